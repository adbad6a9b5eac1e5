"""Stationary TASEP simulation and estimators for the two-point function.

Runs are independent: run r draws every random number from a counter-based
Philox stream keyed by (seed, r), in a fixed chunked order, so ensembles are
bitwise reproducible for any worker count.  Estimator error bars come from
run-level (or run-group) scatter only; within-run translation averages are
correlated and never shrink the bars.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..airy_limit import DistributionCurve
from . import kernels

__all__ = [
    "SimConfig",
    "LatticeState",
    "TwoPointEstimate",
    "Ensemble",
    "PmfEstimate",
    "PairingResult",
    "DominanceReport",
    "auto_ring_size",
    "rng_for_run",
    "init_stationary",
    "init_step",
    "evolve",
    "height",
    "height_profile",
    "run_ensemble",
    "estimate_S",
    "sum_rule_report",
    "laplacian_var_S",
    "second_class_pmf",
    "second_class_displacements",
    "empirical_Fw",
    "step_ic_dominance",
    "weak_pairing",
    "bump_test_function",
]

RNG_CHUNK = 1 << 16  # fixed draw-chunk size; part of the reproducibility contract


def auto_ring_size(t_max: float) -> int:
    """Ring size L >= 4 t + 8 t^(2/3): the information cone stays inside."""
    return int(math.ceil(4.0 * t_max + 8.0 * t_max ** (2.0 / 3.0))) + 8


@dataclass(frozen=True)
class SimConfig:
    rho: float
    t_max: float
    n_runs: int
    seed: int
    ring_size: int = 0
    w_list: tuple = (0.3,)
    s_grid: tuple = tuple(np.round(np.arange(-8.0, 8.0 + 1e-9, 0.25), 6))

    def __post_init__(self):
        if not (0.0 < self.rho < 1.0):
            raise ValueError("rho must be in (0, 1)")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.n_runs < 1:
            raise ValueError("n_runs must be positive")
        L = self.ring_size if self.ring_size else auto_ring_size(self.t_max)
        if L < auto_ring_size(self.t_max):
            raise ValueError(
                f"ring_size {L} below the information-cone bound {auto_ring_size(self.t_max)}")
        object.__setattr__(self, "ring_size", int(L))

    @property
    def chi(self) -> float:
        return self.rho * (1.0 - self.rho)


@dataclass
class LatticeState:
    occupancy: np.ndarray        # uint8, exclusion by construction
    jump_counts: np.ndarray      # int64 per bond, non-decreasing
    time: float

    @property
    def n_particles(self) -> int:
        return int(self.occupancy.sum())


@dataclass(frozen=True)
class TwoPointEstimate:
    j_offsets: np.ndarray
    S_hat: np.ndarray
    stderr: np.ndarray
    t: float
    rho: float


@dataclass
class Ensemble:
    rho: float
    t: float
    ring_size: int
    seed: int
    n_runs: int
    eta0: np.ndarray             # (n_runs, L) uint8
    etaT: np.ndarray             # (n_runs, L) uint8
    n0: np.ndarray               # (n_runs,) int64: jumps over bond 0
    nt: np.ndarray | None = None  # (n_runs, L) int64 when counts are stored
    initial: str = "stationary"

    @property
    def chi(self) -> float:
        return self.rho * (1.0 - self.rho)


@dataclass(frozen=True)
class PmfEstimate:
    j: np.ndarray
    pmf: np.ndarray
    stderr: np.ndarray
    displacements: np.ndarray
    t: float
    rho: float


@dataclass(frozen=True)
class PairingResult:
    lhs: float
    rhs: float
    lhs_stderr: float
    rhs_stderr: float


@dataclass(frozen=True)
class DominanceReport:
    j_values: np.ndarray
    u_values: np.ndarray
    p_stationary: np.ndarray     # (n_j, n_u)
    p_step: np.ndarray
    stderr: np.ndarray
    violations: int
    max_violation_sigma: float


def rng_for_run(seed: int, run_index: int) -> np.random.Generator:
    """Counter-based stream for one run: Philox keyed by (seed, run_index)."""
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF,
                                                     run_index & 0xFFFFFFFFFFFFFFFF]))


def _init_state(config: SimConfig, run_index: int, initial: str):
    """State plus the run's stream, positioned just past the init draws."""
    rng = rng_for_run(config.seed, run_index)
    L = config.ring_size
    if initial == "stationary":
        occ = (rng.random(L) < config.rho).astype(np.uint8)
    elif initial == "step":
        occ = np.zeros(L, np.uint8)
        occ[0] = 1
        occ[L - (L // 2 - 1):] = 1
    else:
        raise ValueError("initial must be 'stationary' or 'step'")
    state = LatticeState(occupancy=occ, jump_counts=np.zeros(L, np.int64), time=0.0)
    return state, rng


def init_stationary(config: SimConfig, run_index: int) -> LatticeState:
    """i.i.d. Bernoulli(rho) occupancy from the run's own stream."""
    return _init_state(config, run_index, "stationary")[0]


def init_step(config: SimConfig, run_index: int) -> LatticeState:
    """Step profile: sites j <= 0 occupied, j >= 1 empty (ring window coords)."""
    return _init_state(config, run_index, "step")[0]


def evolve(state: LatticeState, t_target: float, rng: np.random.Generator) -> LatticeState:
    """Exact event-driven evolution to t_target (no time discretization)."""
    if t_target < state.time:
        raise ValueError("t_target must not precede the current state time")
    L = state.occupancy.shape[0]
    pos = np.empty(L, np.int32)
    lst = np.empty(L, np.int32)
    ne = kernels.build_bond_list(state.occupancy, pos, lst)
    t_now = state.time
    while True:
        ebuf = rng.standard_exponential(RNG_CHUNK)
        ubuf = rng.random(RNG_CHUNK)
        t_now, ne, _, done = kernels.evolve_bonds(
            state.occupancy, state.jump_counts, pos, lst, ne, t_now, t_target,
            ebuf, ubuf)
        if done:
            break
    state.time = t_target
    return state


def height(state: LatticeState, j: int) -> int:
    """Height h_t(j) = 2 N_t(0) + sum_{i=1}^{j} (1 - 2 eta_i(t)), exact integer."""
    return int(height_profile(state.occupancy[None, :],
                              2 * state.jump_counts[0:1], np.array([j]))[0, 0])


def height_profile(etaT: np.ndarray, two_n0: np.ndarray, j_values: np.ndarray) -> np.ndarray:
    """Heights h_t(j) for each run (rows) and each j in j_values (columns).

    j is a signed window coordinate; |j| must stay below ring_size // 2.
    """
    L = etaT.shape[1]
    j_values = np.asarray(j_values, dtype=np.int64)
    if np.any(np.abs(j_values) >= L // 2):
        raise ValueError("height window exceeds half the ring")
    w = int(np.abs(j_values).max()) if j_values.size else 0
    idx = np.arange(-w, w + 1) % L
    inc = 1 - 2 * etaT[:, idx].astype(np.int64)
    c = np.cumsum(inc, axis=1)
    cols = j_values + w
    return two_n0[:, None] + c[:, cols] - c[:, w:w + 1]


def _simulate_block(args):
    (rho, t_max, L, seed, runs, initial) = args
    cfg = SimConfig(rho=rho, t_max=t_max, n_runs=1, seed=seed, ring_size=L)
    n = len(runs)
    eta0 = np.empty((n, L), np.uint8)
    etaT = np.empty((n, L), np.uint8)
    nt = np.empty((n, L), np.int64)
    for i, r in enumerate(runs):
        state, rng = _init_state(cfg, r, initial)
        eta0[i] = state.occupancy
        evolve(state, t_max, rng)
        etaT[i] = state.occupancy
        nt[i] = state.jump_counts
    return eta0, etaT, nt


def run_ensemble(config: SimConfig, store_counts: bool = False, workers: int = 1,
                 initial: str = "stationary") -> Ensemble:
    """Simulate n_runs independent trajectories; deterministic for any workers."""
    if initial not in ("stationary", "step"):
        raise ValueError("initial must be 'stationary' or 'step'")
    L = config.ring_size
    R = config.n_runs
    eta0 = np.empty((R, L), np.uint8)
    etaT = np.empty((R, L), np.uint8)
    n0 = np.empty(R, np.int64)
    nt = np.empty((R, L), np.int64) if store_counts else None
    blocks = []
    block_size = max(1, R // max(1, workers * 4))
    for lo in range(0, R, block_size):
        runs = list(range(lo, min(lo + block_size, R)))
        blocks.append((config.rho, config.t_max, L, config.seed, runs, initial))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_simulate_block, blocks))
    else:
        results = [_simulate_block(b) for b in blocks]
    for (spec, (e0, eT, cnt)) in zip(blocks, results):
        runs = spec[4]
        sl = slice(runs[0], runs[-1] + 1)
        eta0[sl] = e0
        etaT[sl] = eT
        n0[sl] = cnt[:, 0]
        if store_counts:
            nt[sl] = cnt
    return Ensemble(rho=config.rho, t=config.t_max, ring_size=L, seed=config.seed,
                    n_runs=R, eta0=eta0, etaT=etaT, n0=n0, nt=nt, initial=initial)


def _group_stats(per_run: np.ndarray, n_groups: int = 50):
    """Mean and run-group standard error along axis 0."""
    R = per_run.shape[0]
    g = min(n_groups, max(2, R // 4))
    edges = np.linspace(0, R, g + 1).astype(int)
    groups = np.array([per_run[edges[i]:edges[i + 1]].mean(axis=0) for i in range(g)])
    return per_run.mean(axis=0), groups.std(axis=0, ddof=1) / math.sqrt(g)


def default_offsets(ensemble: Ensemble, pad: float = 3.0) -> np.ndarray:
    """Offsets covering the mass of S(., t): around (1-2 rho) t, width ~ t^{2/3}."""
    t, rho, chi = ensemble.t, ensemble.rho, ensemble.chi
    center = (1.0 - 2.0 * rho) * t
    width = pad * 2.0 * chi ** (1.0 / 3.0) * t ** (2.0 / 3.0) + 8.0 * t ** (1.0 / 3.0) + 20.0
    lo = int(math.floor(center - width))
    hi = int(math.ceil(center + width))
    lo = max(lo, -(ensemble.ring_size // 2) + 1)
    hi = min(hi, ensemble.ring_size // 2 - 1)
    return np.arange(lo, hi + 1)


def _per_run_correlations(ensemble: Ensemble, j_offsets: np.ndarray) -> np.ndarray:
    """Per-run translation-averaged centered correlations at the given offsets.

    corr_r(j) = (1/L) sum_x (eta_x(0) - rho)(eta_{x+j}(t) - rho); centering on
    the known rho removes the conserved-density noise that otherwise dominates
    the run-to-run scatter of windowed sums.  Cyclic sums via FFT.
    """
    L = ensemble.ring_size
    R = ensemble.n_runs
    rho = ensemble.rho
    out = np.empty((R, j_offsets.size))
    chunk = max(1, int(2e7) // (4 * L))
    for lo in range(0, R, chunk):
        sl = slice(lo, min(lo + chunk, R))
        f0 = np.fft.rfft(ensemble.eta0[sl].astype(np.float64) - rho, axis=1)
        ft = np.fft.rfft(ensemble.etaT[sl].astype(np.float64) - rho, axis=1)
        corr = np.fft.irfft(ft * np.conj(f0), n=L, axis=1) / L
        out[sl] = corr[:, j_offsets % L]
    return out


def estimate_S(ensemble: Ensemble, j_offsets: np.ndarray | None = None) -> TwoPointEstimate:
    """Two-point function estimate via full translation averaging per run.

    S_hat(j) estimates Cov(eta_j(t), eta_0(0)); error bars are run-level only
    (within-run translation averages are correlated).
    """
    if ensemble.n_runs < 100:
        raise ValueError("estimate_S needs at least 100 runs")
    if ensemble.initial != "stationary":
        raise ValueError("estimate_S expects a stationary ensemble")
    if j_offsets is None:
        j_offsets = default_offsets(ensemble)
    j_offsets = np.asarray(j_offsets, dtype=np.int64)
    per_run = _per_run_correlations(ensemble, j_offsets)
    mean, err = _group_stats(per_run)
    return TwoPointEstimate(j_offsets=j_offsets, S_hat=mean, stderr=err,
                            t=ensemble.t, rho=ensemble.rho)


def sum_rule_report(ensemble: Ensemble, j_offsets: np.ndarray | None = None):
    """(sum_j S_hat, stderr), (sum_j j S_hat / chi, stderr).

    Defaults to the full (symmetric) ring window: on the ring the zeroth sum
    rule holds exactly for every t because sum_j Cov(eta_j(t), eta_0(0)) =
    Cov(N, eta_0(0)) = chi by particle conservation, while the first-moment
    sum localizes on the information cone.
    """
    if j_offsets is None:
        half = ensemble.ring_size // 2
        j_offsets = np.arange(-half + 1, half)
    j_offsets = np.asarray(j_offsets, dtype=np.int64)
    per_run = _per_run_correlations(ensemble, j_offsets)
    total = per_run.sum(axis=1)
    # first moment localizes on the information cone; restricting the window
    # there avoids picking up |j|-weighted noise from the far ring
    cone = default_offsets(ensemble)
    mask = (j_offsets >= cone[0]) & (j_offsets <= cone[-1])
    first = (per_run[:, mask] * j_offsets[None, mask]).sum(axis=1) / ensemble.chi
    m_tot, e_tot = _group_stats(total)
    m_first, e_first = _group_stats(first)
    return (float(m_tot), float(e_tot)), (float(m_first), float(e_first))


def laplacian_var_S(ensemble: Ensemble, j_offsets: np.ndarray | None = None,
                    n_groups: int = 50) -> TwoPointEstimate:
    """S estimated as (1/8) discrete Laplacian of Var h_t(j).

    The variance is a nonlinear statistic, so the error bars come from run-group
    scatter of the whole estimator.
    """
    if ensemble.n_runs < 100:
        raise ValueError("laplacian_var_S needs at least 100 runs")
    if j_offsets is None:
        j_offsets = default_offsets(ensemble)
    j_offsets = np.asarray(j_offsets, dtype=np.int64)
    j_ext = np.arange(j_offsets.min() - 1, j_offsets.max() + 2)
    h = height_profile(ensemble.etaT, 2 * ensemble.n0, j_ext).astype(np.float64)

    def estimator(hs):
        var = hs.var(axis=0, ddof=1)
        lap = var[:-2] - 2.0 * var[1:-1] + var[2:]
        return lap / 8.0

    full = estimator(h)
    R = ensemble.n_runs
    g = min(n_groups, max(2, R // 4))
    edges = np.linspace(0, R, g + 1).astype(int)
    groups = np.array([estimator(h[edges[i]:edges[i + 1]]) for i in range(g)])
    err = groups.std(axis=0, ddof=1) / math.sqrt(g)
    sel = np.searchsorted(j_ext[1:-1], j_offsets)
    return TwoPointEstimate(j_offsets=j_offsets, S_hat=full[sel], stderr=err[sel],
                            t=ensemble.t, rho=ensemble.rho)


def _second_class_block(args):
    (rho, t_max, L, seed, runs) = args
    out = np.empty(len(runs), np.int64)
    for i, r in enumerate(runs):
        rng = rng_for_run(seed, r)
        state = (rng.random(L) < rho).astype(np.uint8)
        state[0] = 2
        pos = np.empty(L, np.int32)
        lst = np.empty(L, np.int32)
        ne = kernels.build_second_class_bond_list(state, pos, lst)
        t_now = 0.0
        disp = 0
        while True:
            ebuf = rng.standard_exponential(RNG_CHUNK)
            ubuf = rng.random(RNG_CHUNK)
            t_now, ne, disp, _, done = kernels.evolve_second_class(
                state, pos, lst, ne, disp, t_now, t_max, ebuf, ubuf)
            if done:
                break
        out[i] = disp
    return out


def second_class_displacements(config: SimConfig, workers: int = 1) -> np.ndarray:
    """Displacement samples of the discrepancy between two coupled copies.

    The basic coupling of two configurations differing in one site reduces to a
    single lattice with one tagged site: first-class particles swap with it,
    and it hops right into holes.
    """
    L = config.ring_size
    R = config.n_runs
    out = np.empty(R, np.int64)
    block_size = max(1, R // max(1, workers * 4))
    blocks = [(config.rho, config.t_max, L, config.seed,
               list(range(lo, min(lo + block_size, R))))
              for lo in range(0, R, block_size)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_second_class_block, blocks))
    else:
        results = [_second_class_block(b) for b in blocks]
    for spec, res in zip(blocks, results):
        runs = spec[4]
        out[runs[0]:runs[-1] + 1] = res
    return out


def second_class_pmf(config: SimConfig, workers: int = 1) -> PmfEstimate:
    """Empirical law of the second-class particle position at t_max."""
    disp = second_class_displacements(config, workers)
    lo, hi = int(disp.min()), int(disp.max())
    j = np.arange(lo, hi + 1)
    R = disp.size
    indicators = (disp[:, None] == j[None, :]).astype(np.float64)
    pmf, err = _group_stats(indicators)
    return PmfEstimate(j=j, pmf=pmf, stderr=err, displacements=disp,
                       t=config.t_max, rho=config.rho)


def rescaled_position(config_or_ens, w: float) -> int:
    """Integer lattice site j(w) = [(1-2 rho) t + 2 w chi^(1/3) t^(2/3)]."""
    rho, t = config_or_ens.rho, getattr(config_or_ens, "t", None) or config_or_ens.t_max
    chi = rho * (1.0 - rho)
    x = (1.0 - 2.0 * rho) * t + 2.0 * w * chi ** (1.0 / 3.0) * t ** (2.0 / 3.0)
    return int(math.floor(x + 0.5))


def height_center(rho: float, t: float, w: float) -> float:
    """Centering constant 2m = (1-2 chi) t + 2 w (1-2 rho) chi^(1/3) t^(2/3)."""
    chi = rho * (1.0 - rho)
    return (1.0 - 2.0 * chi) * t + 2.0 * w * (1.0 - 2.0 * rho) * chi ** (1.0 / 3.0) * t ** (2.0 / 3.0)


def rescaled_height_samples(ensemble: Ensemble, w: float) -> np.ndarray:
    """Samples of H_t(w) = (h_t(j(w)) - 2m) / (-2 chi^(2/3) t^(1/3))."""
    j_w = rescaled_position(ensemble, w)
    h = height_profile(ensemble.etaT, 2 * ensemble.n0, np.array([j_w]))[:, 0]
    denom = -2.0 * ensemble.chi ** (2.0 / 3.0) * ensemble.t ** (1.0 / 3.0)
    return (h - height_center(ensemble.rho, ensemble.t, w)) / denom


def empirical_Fw(ensemble: Ensemble, w: float, s_grid) -> tuple[DistributionCurve, np.ndarray]:
    """Empirical CDF of H_t(w) on s_grid, plus the raw samples."""
    if ensemble.n_runs < 1000:
        raise ValueError("empirical_Fw needs at least 1000 runs for CDF bands")
    s_grid = np.asarray(s_grid, dtype=float)
    samples = rescaled_height_samples(ensemble, w)
    srt = np.sort(samples)
    cdf = np.searchsorted(srt, s_grid + 1e-12, side="right") / samples.size
    pdf = np.gradient(cdf, s_grid)
    moments = np.array([np.mean(samples ** k) for k in range(5)])
    dkw = math.sqrt(math.log(2.0 / 0.05) / (2.0 * samples.size))
    curve = DistributionCurve(s=s_grid.copy(), cdf=cdf, pdf=pdf, moments=moments,
                              quad_error=dkw)
    return curve, samples


def step_ic_dominance(config: SimConfig, w_probe: tuple = (-0.5, 0.0, 0.5),
                      n_thresholds: int = 9, workers: int = 1) -> DominanceReport:
    """Check P(h_t(j) >= v) <= P(h^step_t(j) >= v) on a (j, v) grid."""
    ens_stat = run_ensemble(config, workers=workers, initial="stationary")
    ens_step = run_ensemble(config, workers=workers, initial="step")
    rho, t = config.rho, config.t_max
    j_values = np.unique([rescaled_position(config, w) for w in w_probe])
    h_stat = height_profile(ens_stat.etaT, 2 * ens_stat.n0, j_values)
    h_step = height_profile(ens_step.etaT, 2 * ens_step.n0, j_values)
    R = config.n_runs
    p_stat = np.empty((j_values.size, n_thresholds))
    p_step = np.empty_like(p_stat)
    err = np.empty_like(p_stat)
    u_all = np.empty((j_values.size, n_thresholds))
    viol = 0
    worst = 0.0
    for i, j in enumerate(j_values):
        lo = np.quantile(h_stat[:, i], 0.05)
        hi = np.quantile(h_stat[:, i], 0.98)
        us = np.linspace(lo, hi, n_thresholds)
        u_all[i] = us
        for k, u in enumerate(us):
            a = (h_stat[:, i] >= u).mean()
            b = (h_step[:, i] >= u).mean()
            se = math.sqrt((a * (1 - a) + b * (1 - b)) / R + 1e-12)
            p_stat[i, k] = a
            p_step[i, k] = b
            err[i, k] = se
            if a > b:
                sig = (a - b) / se
                worst = max(worst, sig)
                if sig > 3.0:
                    viol += 1
    return DominanceReport(j_values=j_values, u_values=u_all, p_stationary=p_stat,
                           p_step=p_step, stderr=err, violations=viol,
                           max_violation_sigma=worst)


def bump_test_function(center: float = 0.0, halfwidth: float = 1.0):
    """Smooth compactly supported bump exp(-1/(1-x^2)) on (center +- halfwidth)."""

    def f(w):
        w = np.asarray(w, dtype=float)
        x = (w - center) / halfwidth
        inside = np.abs(x) < 1.0
        xs = np.where(inside, x, 0.0)
        out = np.where(inside, np.exp(-1.0 / np.maximum(1.0 - xs * xs, 1e-12)), 0.0)
        return out

    return f


def weak_pairing(ensemble: Ensemble, f=None, n_groups: int = 50) -> PairingResult:
    """Both sides of the discrete summation-by-parts pairing, same ensemble.

    lhs = sum_j S_hat(j) f(w_j);  rhs = (chi/4) sum_j G_t(w_j) D2f(w_j) delta,
    with w_j = (j - (1-2 rho) t) / (2 chi^(1/3) t^(2/3)), delta the w-spacing of
    neighbouring sites, G_t(w) = Var H_t(w), and D2f the centered second
    difference of f at step delta.  Exact identity in expectation.
    """
    if f is None:
        f = bump_test_function()
    rho, t, chi = ensemble.rho, ensemble.t, ensemble.chi
    scale = 2.0 * chi ** (1.0 / 3.0) * t ** (2.0 / 3.0)
    delta = 1.0 / scale
    center = (1.0 - 2.0 * rho) * t
    # support of f: |w| <= ~1 plus the difference stencil
    w_span = 1.0 + 3.0 * delta
    j_lo = int(math.floor(center - w_span * scale)) - 1
    j_hi = int(math.ceil(center + w_span * scale)) + 1
    j_values = np.arange(j_lo, j_hi + 1)
    w_values = (j_values - center) / scale
    fw = f(w_values)
    d2f = (f(w_values + delta) - 2.0 * fw + f(w_values - delta)) / delta ** 2

    # lhs per run: sum_j S_hat(j) f(w_j) from centered translation averages
    R = ensemble.n_runs
    lhs_run = _per_run_correlations(ensemble, j_values) @ fw
    lhs, lhs_se = _group_stats(lhs_run)

    # rhs: variance of heights (run-group errors for the nonlinear statistic)
    h = height_profile(ensemble.etaT, 2 * ensemble.n0, j_values).astype(np.float64)
    denom2 = (2.0 * chi ** (2.0 / 3.0) * t ** (1.0 / 3.0)) ** 2

    def rhs_estimator(hs):
        gt = hs.var(axis=0, ddof=1) / denom2
        return 0.25 * chi * float((gt * d2f).sum()) * delta

    rhs = rhs_estimator(h)
    g = min(n_groups, max(2, R // 4))
    edges = np.linspace(0, R, g + 1).astype(int)
    groups = np.array([rhs_estimator(h[edges[i]:edges[i + 1]]) for i in range(g)])
    rhs_se = groups.std(ddof=1) / math.sqrt(g)
    return PairingResult(lhs=float(lhs), rhs=float(rhs),
                         lhs_stderr=float(lhs_se), rhs_stderr=float(rhs_se))
