"""Nystrom discretization of integral operators on semi-infinite intervals.

A Gauss-Legendre rule on [-1, 1) is pushed to [cutoff, inf) through the rational
map x = cutoff + scale*(1+xi)/(1-xi).  Operators are stored as the weighted
matrix sqrt(w_i) K(x_i, x_j) sqrt(w_j), so determinants, traces and resolvents
come from plain dense linear algebra on a matrix whose spectrum matches the
discretized operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "QuadratureRule",
    "NystromSystem",
    "build_semi_infinite_rule",
    "build_system",
    "fredholm_det",
    "resolvent_solve",
    "operator_trace",
]

DEFAULT_N = 64
DEFAULT_MAP_SCALE = 4.0


class SingularOperatorError(ValueError):
    """Raised when 1 is (numerically) an eigenvalue of the discretized operator."""

    def __init__(self, det_value: float):
        super().__init__(f"operator 1-K is numerically singular (det = {det_value:.3e})")
        self.det_value = det_value


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a quadrature rule."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def build_semi_infinite_rule(cutoff: float, n: int = DEFAULT_N,
                             map_scale: float = DEFAULT_MAP_SCALE) -> QuadratureRule:
    """Gauss-Legendre rule mapped to [cutoff, inf).

    The rational map x = cutoff + map_scale*(1+xi)/(1-xi) handles both Gaussian-type
    and Airy-type integrand decay; weights carry the Jacobian 2*map_scale/(1-xi)^2.
    """
    if n < 8:
        raise ValueError("need at least 8 quadrature nodes")
    if not np.isfinite(map_scale) or map_scale <= 0:
        raise ValueError("map_scale must be positive")
    xi, wq = leggauss(int(n))
    nodes = cutoff + map_scale * (1.0 + xi) / (1.0 - xi)
    weights = wq * 2.0 * map_scale / (1.0 - xi) ** 2
    return QuadratureRule(nodes=nodes, weights=weights)


@dataclass(frozen=True)
class NystromSystem:
    """Discretized integral operator on [left_endpoint, inf).

    ``matrix`` holds sqrt(w_i) K(x_i, x_j) sqrt(w_j); it is symmetric whenever the
    kernel is, and shares the spectrum of the discretized operator.
    """

    rule: QuadratureRule
    left_endpoint: float
    matrix: np.ndarray
    kernel_diag: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        if mat.shape != (self.rule.n, self.rule.n):
            raise ValueError("matrix shape must match the quadrature rule")
        if not np.all(np.isfinite(mat)):
            raise ValueError("non-finite kernel matrix entries")
        object.__setattr__(self, "matrix", mat)
        diag = self.kernel_diag
        if diag is None:
            sw = np.sqrt(self.rule.weights)
            diag = np.diag(mat) / (sw * sw)
        object.__setattr__(self, "kernel_diag", np.asarray(diag, dtype=float))


def build_system(kernel, cutoff: float, n: int = DEFAULT_N,
                 map_scale: float = DEFAULT_MAP_SCALE) -> NystromSystem:
    """Discretize kernel(x, y) on [cutoff, inf).

    ``kernel`` must accept broadcast arrays and is evaluated on the node grid.
    """
    rule = build_semi_infinite_rule(cutoff, n, map_scale)
    x = rule.nodes
    kmat = np.asarray(kernel(x[:, None], x[None, :]), dtype=float)
    sw = np.sqrt(rule.weights)
    return NystromSystem(rule=rule, left_endpoint=cutoff,
                         matrix=sw[:, None] * kmat * sw[None, :],
                         kernel_diag=np.diag(kmat).copy())


def fredholm_det(system: NystromSystem) -> float:
    """det(1 - K) of the discretized operator."""
    n = system.rule.n
    return float(np.linalg.det(np.eye(n) - system.matrix))


def resolvent_solve(system: NystromSystem, rhs) -> np.ndarray:
    """Solve (1 - K) f = rhs on the quadrature grid.

    ``rhs`` is sampled at system.rule.nodes; the returned array is f at the same
    nodes, i.e. the Nystrom approximation of the resolvent applied to rhs.
    """
    rhs = np.asarray(rhs, dtype=float)
    n = system.rule.n
    if rhs.shape != (n,):
        raise ValueError("rhs must be sampled on the system's quadrature nodes")
    det = fredholm_det(system)
    if abs(det) <= 1e-12:
        raise SingularOperatorError(det)
    sw = np.sqrt(system.rule.weights)
    # (I - D^{1/2} K D^{1/2}) (D^{1/2} f) = D^{1/2} rhs  with D = diag(weights)
    scaled = np.linalg.solve(np.eye(n) - system.matrix, sw * rhs)
    return scaled / sw


def operator_trace(system: NystromSystem) -> float:
    """Trace sum_i w_i K(x_i, x_i)."""
    if not np.all(np.isfinite(system.kernel_diag)):
        raise ValueError("non-finite kernel diagonal")
    return float(np.dot(system.rule.weights, system.kernel_diag))
