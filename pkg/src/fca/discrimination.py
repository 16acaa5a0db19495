"""Discriminating a nonlinear evolution from its linearized counterpart.

The relevant geometry is the polygon spanned by the eigenvalues of
``U0^dag U1`` on the unit circle: the distance from the origin to its convex
hull is the minimal overlap between the two output states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.linalg import schur

from .errors import NotUnitary, OrderingMismatch
from .matrixrep import EvolutionMatrix

CLUSTER_TOL = 1e-9


def relative_unitary(U0: EvolutionMatrix, U1: EvolutionMatrix) -> EvolutionMatrix:
    if U0.dim != U1.dim or U0.ordering.state_order != U1.ordering.state_order:
        raise OrderingMismatch("unitaries must share dimension and basis ordering")
    return EvolutionMatrix(U0.matrix.conj().T @ U1.matrix, U0.ordering, 1)


def _eigh_unitary(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenvectors of a normal matrix via complex Schur."""
    if m.size == 0:
        return np.zeros(0, complex), np.zeros((0, 0), complex)
    t, z = schur(m, output="complex")
    return np.diag(t).copy(), z


def cluster(values: Sequence[complex], tol: float = CLUSTER_TOL) -> list[int]:
    """Indices of the first member of each cluster of nearly equal values."""
    reps: list[int] = []
    for i, v in enumerate(values):
        if all(abs(v - values[r]) > tol for r in reps):
            reps.append(i)
    return reps


def hull_distance(points: Sequence[complex]) -> tuple[float, dict]:
    """Distance from 0 to the convex hull of unit-circle points and a realizing combination.

    Returns ``(d, weights)`` with ``weights`` keyed by position in ``points``.
    """
    pts = list(points)
    if not pts:
        raise ValueError("empty point set")
    reps = cluster(pts)
    if len(reps) == 1:
        return 1.0, {reps[0]: 1.0}
    angles = sorted((math.atan2(pts[i].imag, pts[i].real) % (2 * math.pi), i) for i in reps)
    gaps = []
    for k, (a, i) in enumerate(angles):
        b, j = angles[(k + 1) % len(angles)]
        gaps.append(((b - a) % (2 * math.pi) or 2 * math.pi, i, j))
    gap, i, j = max(gaps)
    spread = 2 * math.pi - gap
    d = math.cos(spread / 2)
    if d > 1e-12:
        # nearest hull point is the midpoint of the chord bounding the empty arc
        return d, {i: 0.5, j: 0.5}
    for i, j in combinations(reps, 2):
        if abs(pts[i] + pts[j]) <= 1e-9:
            return 0.0, {i: 0.5, j: 0.5}
    for i, j, k in combinations(reps, 3):
        w = _barycentric_origin(pts[i], pts[j], pts[k])
        if w is not None:
            return 0.0, {i: w[0], j: w[1], k: w[2]}
    return 0.0, {}  # unreachable for points on the circle


def _barycentric_origin(a: complex, b: complex, c: complex):
    m = np.array([[a.real, b.real, c.real], [a.imag, b.imag, c.imag], [1.0, 1.0, 1.0]])
    if abs(np.linalg.det(m)) < 1e-14:
        return None
    w = np.linalg.solve(m, np.array([0.0, 0.0, 1.0]))
    if np.all(w >= -1e-12):
        w = np.clip(w, 0.0, None)
        return tuple(float(x) for x in w / w.sum())
    return None


def max_angular_separation(points: Sequence[complex]) -> float:
    best = 0.0
    for a, b in combinations(points, 2):
        delta = abs(math.remainder(math.atan2(b.imag, b.real) - math.atan2(a.imag, a.real), 2 * math.pi))
        best = max(best, delta)
    return min(best, math.pi)


@dataclass
class DiscriminationReport:
    eigenpairs: list  # (eigenvalue, parity)
    hull_distance_full: float
    hull_distance_even: float | None
    hull_distance_odd: float | None
    optimal_weights: dict
    paper_p_succ: float
    standard_p_opt: float
    perfectly_discriminable: bool
    local_strategy_sufficient: bool | None
    parity_kind: str = "preserving"
    polygon: list = field(default_factory=list)

    @property
    def eigenvalues(self) -> list[complex]:
        return [v for v, _ in self.eigenpairs]

    def distinct_eigenvalues(self, parity: str | None = None) -> list[complex]:
        vals = [v for v, p in self.eigenpairs if parity is None or p == parity]
        return [vals[i] for i in cluster(vals)]

    def to_json(self, emit_polygon: bool = False) -> dict:
        out = {
            "eigenpairs": [
                {"eigenvalue": [float(v.real), float(v.imag)], "parity": p}
                for v, p in self.eigenpairs
            ],
            "hull_distance_full": self.hull_distance_full,
            "hull_distance_even": self.hull_distance_even,
            "hull_distance_odd": self.hull_distance_odd,
            "optimal_weights": {str(k): w for k, w in sorted(self.optimal_weights.items())},
            "paper_p_succ": self.paper_p_succ,
            "standard_p_opt": self.standard_p_opt,
            "perfectly_discriminable": self.perfectly_discriminable,
            "local_strategy_sufficient": self.local_strategy_sufficient,
            "parity_kind": self.parity_kind,
        }
        if emit_polygon:
            out["polygon"] = [[float(v.real), float(v.imag)] for v in self.polygon]
        return out


def _classify(vec: np.ndarray, even: list[int], odd: list[int], tol: float = 1e-9) -> str:
    w_even = np.linalg.norm(vec[even])
    w_odd = np.linalg.norm(vec[odd])
    if w_odd <= tol:
        return "even"
    if w_even <= tol:
        return "odd"
    return "mixed"


def analyze(Utilde: EvolutionMatrix, tol: float = 1e-10, parity_restricted: bool = False) -> DiscriminationReport:
    m = Utilde.matrix
    dim = m.shape[0]
    if np.linalg.norm(m.conj().T @ m - np.eye(dim), 2) > max(tol, 1e-9):
        raise NotUnitary("input to analyze is not unitary")
    even = Utilde.ordering.even_indices()
    odd = Utilde.ordering.odd_indices()
    kind = Utilde.parity_kind(1e-9)

    pairs: list[tuple[complex, str]] = []
    if kind == "preserving":
        for idx, label in ((even, "even"), (odd, "odd")):
            vals, _ = _eigh_unitary(m[np.ix_(idx, idx)])
            pairs += [(complex(v), label) for v in vals]
    else:
        vals, vecs = _eigh_unitary(m)
        pairs = [(complex(v), _classify(vecs[:, k], even, odd)) for k, v in enumerate(vals)]

    values = [v for v, _ in pairs]
    if any(abs(abs(v) - 1) > 1e-8 for v in values):
        raise NotUnitary("eigenvalues off the unit circle")

    d_full, w_full = hull_distance(values)

    def sector(label):
        idx = [k for k, (_, p) in enumerate(pairs) if p == label]
        if not idx:
            return None, {}
        d, w = hull_distance([values[k] for k in idx])
        return d, {idx[k]: p for k, p in w.items()}

    d_even, w_even = sector("even")
    d_odd, w_odd = sector("odd")

    if kind == "flipping":
        local = True
    else:
        sectors = [d for d in (d_even, d_odd) if d is not None]
        local = None if not sectors else abs(min(sectors) - d_full) <= 1e-10

    weights, d_used = w_full, d_full
    if parity_restricted:
        options = [(d, w) for d, w in ((d_even, w_even), (d_odd, w_odd)) if d is not None]
        if options:
            d_used, weights = min(options, key=lambda o: o[0])
    theta = max_angular_separation([values[i] for i in cluster(values)])
    return DiscriminationReport(
        eigenpairs=pairs,
        hull_distance_full=d_full,
        hull_distance_even=d_even,
        hull_distance_odd=d_odd,
        optimal_weights=weights,
        paper_p_succ=math.sin(theta / 2),
        standard_p_opt=(1 + math.sqrt(max(0.0, 1 - d_used**2))) / 2,
        perfectly_discriminable=d_full <= 1e-10,
        local_strategy_sufficient=local,
        parity_kind=kind,
        polygon=[values[i] for i in cluster(values)],
    )


def linearized_pair(rule, ordering=None) -> tuple[EvolutionMatrix, EvolutionMatrix]:
    """Unitaries of the linear part and of the full rule."""
    from .matrixrep import synthesize_unitary

    return synthesize_unitary(rule.linear_part(), ordering), synthesize_unitary(rule, ordering)
