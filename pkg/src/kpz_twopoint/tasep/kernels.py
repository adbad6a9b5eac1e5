"""Event-driven lattice kernels (the hot loops of the simulator).

Exact continuous-time dynamics: the set of eligible bonds is kept as a
swap-removal list, the holding time is exponential with rate = #eligible, and
the jumping bond is picked uniformly.  Randomness arrives pre-drawn in flat
buffers (one exponential + one uniform per event) so the kernels are pure
array-in/array-out and bitwise reproducible.

Each kernel is compiled with numba @njit; setting KPZ_TWOPOINT_NO_NUMBA=1 (or a
missing numba) selects the identical pure-Python implementations instead.  The
benchmark in benchmarks/bench_sim.py compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("KPZ_TWOPOINT_NO_NUMBA", "").strip() not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

__all__ = ["USE_NUMBA", "evolve_bonds", "evolve_second_class", "build_bond_list"]


def _build_bond_list_impl(occ, pos, lst):
    L = occ.shape[0]
    ne = 0
    for j in range(L):
        nxt = j + 1 if j + 1 < L else 0
        if occ[j] == 1 and occ[nxt] == 0:
            pos[j] = ne
            lst[ne] = j
            ne += 1
        else:
            pos[j] = -1
    return ne


def _evolve_bonds_impl(occ, nt, pos, lst, ne, t_now, t_target, ebuf, ubuf):
    """Advance plain TASEP until t_target or buffer exhaustion.

    Returns (t_now, ne, used, done); done=0 means the buffers ran out.
    """
    L = occ.shape[0]
    nbuf = ebuf.shape[0]
    k = 0
    while ne > 0:
        if k >= nbuf:
            return t_now, ne, k, 0
        dt = ebuf[k] / ne
        if t_now + dt > t_target:
            k += 1
            t_now = t_target
            return t_now, ne, k, 1
        t_now += dt
        pick = int(ubuf[k] * ne)
        if pick >= ne:
            pick = ne - 1
        k += 1
        j = lst[pick]
        jp = j + 1 if j + 1 < L else 0
        occ[j] = 0
        occ[jp] = 1
        nt[j] += 1
        # bond j leaves the eligible list (swap-remove)
        ii = pos[j]
        lst[ii] = lst[ne - 1]
        pos[lst[ii]] = ii
        ne -= 1
        pos[j] = -1
        # left neighbor bond may have become eligible
        jm = j - 1 if j > 0 else L - 1
        if occ[jm] == 1 and pos[jm] == -1:
            pos[jm] = ne
            lst[ne] = jm
            ne += 1
        # bond jp may have become eligible (its left site is now occupied)
        jpp = jp + 1 if jp + 1 < L else 0
        if occ[jpp] == 0 and pos[jp] == -1:
            pos[jp] = ne
            lst[ne] = jp
            ne += 1
    t_now = t_target
    return t_now, ne, k, 1


def _evolve_second_class_impl(state, pos, lst, ne, disp, t_now, t_target, ebuf, ubuf):
    """Advance TASEP coupled with one second-class particle (site value 2).

    Eligible bonds: (1,0) jump, (1,2) swap (first class overtakes, discrepancy
    moves left), (2,0) second-class hop right.  disp tracks the unwrapped
    displacement of the discrepancy.  Returns (t_now, ne, disp, used, done).
    """
    L = state.shape[0]
    nbuf = ebuf.shape[0]
    k = 0
    while ne > 0:
        if k >= nbuf:
            return t_now, ne, disp, k, 0
        dt = ebuf[k] / ne
        if t_now + dt > t_target:
            k += 1
            t_now = t_target
            return t_now, ne, disp, k, 1
        t_now += dt
        pick = int(ubuf[k] * ne)
        if pick >= ne:
            pick = ne - 1
        k += 1
        j = lst[pick]
        jp = j + 1 if j + 1 < L else 0
        left = state[j]
        right = state[jp]
        if left == 1 and right == 0:
            state[j] = 0
            state[jp] = 1
        elif left == 1 and right == 2:
            state[j] = 2
            state[jp] = 1
            disp -= 1
        else:  # left == 2, right == 0
            state[j] = 0
            state[jp] = 2
            disp += 1
        # refresh eligibility of bonds j-1, j, jp (their sites changed)
        jm = j - 1 if j > 0 else L - 1
        b = jm
        for _ in range(3):
            bn = b + 1 if b + 1 < L else 0
            ls = state[b]
            rs = state[bn]
            ok = (ls == 1 and rs == 0) or (ls == 1 and rs == 2) or (ls == 2 and rs == 0)
            if ok and pos[b] == -1:
                pos[b] = ne
                lst[ne] = b
                ne += 1
            elif not ok and pos[b] != -1:
                ii = pos[b]
                lst[ii] = lst[ne - 1]
                pos[lst[ii]] = ii
                ne -= 1
                pos[b] = -1
            b = bn
    t_now = t_target
    return t_now, ne, disp, k, 1


if USE_NUMBA:
    build_bond_list = njit(cache=True)(_build_bond_list_impl)
    evolve_bonds = njit(cache=True)(_evolve_bonds_impl)
    evolve_second_class = njit(cache=True)(_evolve_second_class_impl)
else:
    build_bond_list = _build_bond_list_impl
    evolve_bonds = _evolve_bonds_impl
    evolve_second_class = _evolve_second_class_impl


def build_second_class_bond_list(state: np.ndarray, pos: np.ndarray, lst: np.ndarray) -> int:
    """Initial eligible-bond list for the coupled (3-state) lattice."""
    L = state.shape[0]
    ne = 0
    pos[:] = -1
    for j in range(L):
        jn = j + 1 if j + 1 < L else 0
        ls = int(state[j])
        rs = int(state[jn])
        if (ls == 1 and rs == 0) or (ls == 1 and rs == 2) or (ls == 2 and rs == 0):
            pos[j] = ne
            lst[ne] = j
            ne += 1
    return ne
