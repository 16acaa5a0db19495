"""Independent reference computations used to cross-check the package.

Nothing here calls into fca's algebra or matrix code: operators are built
directly from their action on occupation-number basis states.
"""

from __future__ import annotations

import math
import numpy as np


# Fock-space operators by explicit action -------------------------------------------


def annihilator(n: int, j: int) -> np.ndarray:
    """psi_j on n modes; basis index bit (n-1-j) is the occupation of mode j.

    Sign convention: (-1)^(occupied modes after j), i.e. a Z-string on later modes.
    """
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        bits = [(idx >> (n - 1 - k)) & 1 for k in range(n)]
        if not bits[j]:
            continue
        sign = (-1) ** sum(bits[j + 1 :])
        m[idx ^ (1 << (n - 1 - j)), idx] = sign
    return m


def creator(n: int, j: int) -> np.ndarray:
    return annihilator(n, j).conj().T


def word_matrix(n: int, word) -> np.ndarray:
    """Product of (site, is_dagger) factors, left to right."""
    out = np.eye(2**n, dtype=complex)
    for site, dag in word:
        out = out @ (creator(n, site) if dag else annihilator(n, site))
    return out


def polynomial_matrix(p) -> np.ndarray:
    """Matrix of a FermionPolynomial from its canonical terms.

    A key (cre, ann) stands for creators ascending then annihilators ascending.
    """
    n = p.mode_count
    out = np.zeros((2**n, 2**n), dtype=complex)
    for (cre, ann), c in p.items():
        word = [(s, True) for s in range(n) if cre >> s & 1]
        word += [(s, False) for s in range(n) if ann >> s & 1]
        out += complex(c) * word_matrix(n, word)
    return out


def flip_matrix(n: int) -> np.ndarray:
    out = np.eye(2**n, dtype=complex)
    for j in range(n):
        out = out @ (annihilator(n, j) + creator(n, j))
    return out


def reorder(m: np.ndarray, states) -> np.ndarray:
    idx = [int(s, 2) for s in states]
    return m[np.ix_(idx, idx)]


# closed forms for number-preserving diagonal automata ---------------------------


def cycle_edges(site_order, adjacency) -> list[tuple[int, int]]:
    pos = {s: k for k, s in enumerate(site_order)}
    return [(pos[a], pos[b]) for a, b in adjacency]


Z5_ADJACENCY = [("0", "1"), ("1", "2"), ("2", "3"), ("3", "4"), ("4", "0")]
KLEIN_ADJACENCY = [("e", "a"), ("e", "b"), ("c", "a"), ("c", "b")]


def diagonal_closed_form(states, edges, alpha: complex, beta: complex) -> np.ndarray:
    """diag( conj(alpha)^N(s) * conj(1 + beta/alpha)^E(s) ).

    N(s) counts occupied modes, E(s) occupied edges (both endpoints filled).
    Valid when every neighbour contributes n_y psi_x with the same beta and the
    quintic coefficient equals beta^2 / alpha.
    """
    lam = np.conj(1 + beta / alpha)
    out = []
    for s in states:
        occ = [c == "1" for c in s]
        n_occ = sum(occ)
        n_edges = sum(1 for a, b in edges if occ[a] and occ[b])
        out.append(np.conj(alpha) ** n_occ * lam**n_edges)
    return np.diag(out)


# geometry ------------------------------------------------------------------------


def hull_distance(points) -> float:
    """Distance from 0 to conv(points) through the support-function dual.

    d = max(0, max_u min_j <u, z_j>) over unit directions u.  The inner
    minimum is a lower envelope of cosines, so its maximum sits either at a
    point's own direction or on a bisector of two points; all are tried.
    """
    pts = np.asarray(points, dtype=complex)
    angles = np.angle(pts)
    cands = list(angles)
    for i in range(len(angles)):
        for j in range(i + 1, len(angles)):
            mid = (angles[i] + angles[j]) / 2
            cands += [mid, mid + math.pi]
    best = max(float(np.min((np.exp(-1j * t) * pts).real)) for t in cands)
    return max(0.0, best)


# wrapping lemma ----------------------------------------------------------------------


def brute_force_regular(offsets, n: int) -> bool:
    """Compare projected neighbourhood intersections with projected intersections."""
    offsets = list(offsets)

    def nb(x):
        return {x + h for h in offsets}

    for x in range(-3 * n, 3 * n):
        for h1 in offsets:
            for h2 in offsets:
                y = x + h1 - h2
                lhs = {v % n for v in nb(x)} & {v % n for v in nb(y)}
                if lhs != {v % n for v in nb(x) & nb(y)}:
                    return False
    return True


def pairwise_distinct(values, tol=1e-9) -> list[complex]:
    out: list[complex] = []
    for v in values:
        if all(abs(v - w) > tol for w in out):
            out.append(v)
    return out


def same_set(a, b, tol) -> bool:
    a, b = pairwise_distinct(a, tol), pairwise_distinct(b, tol)
    return len(a) == len(b) and all(any(abs(x - y) <= tol for y in b) for x in a)

