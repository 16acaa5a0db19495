"""Jordan-Wigner matrices, evolution-unitary synthesis and named blocks.

Mode ``j`` of a polynomial is qubit ``j`` of the tensor product, and

    J(psi_j) = I x ... x I x sigma^-_j x Z x ... x Z

with the Z string on the qubits after ``j``.  In the occupation basis
``|s_1 ... s_N>`` (s_1 the most significant bit) this is exactly the
fermionic basis obtained by applying creators to the vacuum in order
``psi^dag_1`` first, so no extra signs appear.

Matrices exposed by :class:`EvolutionMatrix` are expressed in the ordered
basis of a :class:`BasisOrdering` (state ``k`` of the ordering is row and
column ``k``; the printed 1-based index is ``k + 1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .algebra import FermionPolynomial, bits_to_sites
from .errors import NotUnitary, NullSpaceDimension, OrderingMismatch
from .rings import SymPoly
from .rules import LocalRule, evolved_operator

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)

KLEIN_STATES = (
    "0000",
    "0011", "0101", "0110", "1100", "1010", "1001",
    "1111",
    "1000", "0100", "0010", "0001",
    "1110", "1101", "1011", "0111",
)

Z5_STATES = (
    "00000",
    "11000", "10100", "10010", "10001", "01100", "01010", "01001", "00110", "00101", "00011",
    "11110", "11101", "11011", "10111", "01111",
    "10000", "01000", "00100", "00010", "00001",
    "11100", "11001", "10011", "00111", "01110", "01011", "10101", "11010", "01101", "10110",
    "11111",
)


@dataclass(frozen=True)
class BasisOrdering:
    site_order: tuple  # element names, one per mode
    state_order: tuple  # occupation strings, character j = mode j

    def __post_init__(self):
        n = len(self.site_order)
        states = tuple(str(s) for s in self.state_order)
        object.__setattr__(self, "site_order", tuple(str(s) for s in self.site_order))
        object.__setattr__(self, "state_order", states)
        if len(states) != 2**n or len(set(states)) != 2**n:
            raise OrderingMismatch("state_order must list all occupation strings once")
        if any(len(s) != n or set(s) - {"0", "1"} for s in states):
            raise OrderingMismatch("occupation strings must be binary of length N")

    @property
    def mode_count(self) -> int:
        return len(self.site_order)

    @property
    def dim(self) -> int:
        return 2 ** self.mode_count

    @property
    def permutation(self) -> np.ndarray:
        """``perm[k]`` = computational index of ordered state ``k``."""
        return np.array([int(s, 2) for s in self.state_order])

    def index(self, state: str) -> int:
        """0-based position of an occupation string."""
        return self.state_order.index(state)

    def even_indices(self) -> list[int]:
        return [k for k, s in enumerate(self.state_order) if s.count("1") % 2 == 0]

    def odd_indices(self) -> list[int]:
        return [k for k, s in enumerate(self.state_order) if s.count("1") % 2 == 1]

    def to_computational(self, m: np.ndarray) -> np.ndarray:
        p = self.permutation
        out = np.zeros_like(m)
        out[np.ix_(p, p)] = m
        return out

    def from_computational(self, m: np.ndarray) -> np.ndarray:
        p = self.permutation
        return m[np.ix_(p, p)]


def generic_ordering(site_names: Sequence[str]) -> BasisOrdering:
    """Even sector then odd, by particle number, descending lexicographic inside."""
    n = len(site_names)
    states = [format(i, f"0{n}b") for i in range(2**n)]
    states.sort(key=lambda s: (s.count("1") % 2, s.count("1"), [-int(c) for c in s]))
    return BasisOrdering(tuple(site_names), tuple(states))


def klein_ordering() -> BasisOrdering:
    return BasisOrdering(("a", "b", "e", "c"), KLEIN_STATES)


def z5_ordering() -> BasisOrdering:
    return BasisOrdering(("1", "0", "4", "3", "2"), Z5_STATES)


def ordering_for(case_or_names) -> BasisOrdering:
    if isinstance(case_or_names, str):
        key = case_or_names.lower()
        if key == "z2xz2":
            return klein_ordering()
        if key == "z5":
            return z5_ordering()
        raise ValueError(f"no preset ordering for {case_or_names!r}")
    return generic_ordering(list(case_or_names))


def rule_ordering(rule: LocalRule) -> BasisOrdering:
    names = rule.graph.site_names()
    for preset in (klein_ordering(), z5_ordering()):
        if list(preset.site_order) == names:
            return preset
    return generic_ordering(names)


# Jordan-Wigner ------------------------------------------------------------------


@lru_cache(maxsize=None)
def _annihilator(n: int, j: int) -> np.ndarray:
    ops = [np.eye(2, dtype=complex)] * j + [SIGMA_MINUS] + [SIGMA_Z] * (n - j - 1)
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    out.setflags(write=False)
    return out


def annihilator_matrix(n: int, j: int) -> np.ndarray:
    """Computational-basis matrix of ``psi_j`` on ``n`` modes."""
    return _annihilator(n, j)


@lru_cache(maxsize=None)
def _monomial_matrix(n: int, key: tuple) -> np.ndarray:
    cre, ann = key
    out = np.eye(2**n, dtype=complex)
    for s in bits_to_sites(cre):
        out = out @ _annihilator(n, s).conj().T
    for s in bits_to_sites(ann):
        out = out @ _annihilator(n, s)
    out.setflags(write=False)
    return out


def jordan_wigner(p: FermionPolynomial, ordering: BasisOrdering | None = None) -> np.ndarray:
    """Matrix of a numeric polynomial, in the computational basis or ``ordering``."""
    n = p.mode_count
    out = np.zeros((2**n, 2**n), dtype=complex)
    for key, c in p.items():
        if isinstance(c, SymPoly):
            raise TypeError("jordan_wigner needs numeric coefficients")
        out += complex(c) * _monomial_matrix(n, key)
    if ordering is not None:
        if ordering.mode_count != n:
            raise OrderingMismatch("ordering and polynomial disagree on the mode count")
        out = ordering.from_computational(out)
    return out


# evolution unitary --------------------------------------------------------------


@dataclass(frozen=True)
class EvolutionMatrix:
    matrix: np.ndarray  # in the ordered basis
    ordering: BasisOrdering
    nullspace_dimension: int = 1

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def computational(self) -> np.ndarray:
        return self.ordering.to_computational(self.matrix)

    def element(self, i: int, j: int) -> complex:
        """Matrix element with 1-based indices as printed for the ordering."""
        return complex(self.matrix[i - 1, j - 1])

    def parity_structure(self) -> dict:
        return {"even": self.ordering.even_indices(), "odd": self.ordering.odd_indices()}

    def parity_leakage(self) -> tuple[float, float]:
        """Norms of the parity-changing and parity-preserving parts."""
        ev, od = self.ordering.even_indices(), self.ordering.odd_indices()
        m = self.matrix
        off = np.sqrt(
            np.linalg.norm(m[np.ix_(ev, od)]) ** 2 + np.linalg.norm(m[np.ix_(od, ev)]) ** 2
        )
        on = np.sqrt(
            np.linalg.norm(m[np.ix_(ev, ev)]) ** 2 + np.linalg.norm(m[np.ix_(od, od)]) ** 2
        )
        return float(off), float(on)

    def parity_kind(self, tol: float = 1e-10) -> str:
        off, on = self.parity_leakage()
        if off <= tol:
            return "preserving"
        if on <= tol:
            return "flipping"
        return "mixed"

    def unitarity_residual(self) -> float:
        m = self.matrix
        return float(np.linalg.norm(m.conj().T @ m - np.eye(self.dim), 2))

    def to_json(self) -> dict:
        flat = self.matrix.reshape(-1)
        return {
            "dim": self.dim,
            "site_order": list(self.ordering.site_order),
            "ordering": list(self.ordering.state_order),
            "data": [[float(z.real), float(z.imag)] for z in flat],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "EvolutionMatrix":
        dim = int(data["dim"])
        states = list(data["ordering"])
        n = len(states[0]) if states else 0
        sites = data.get("site_order") or [str(i) for i in range(n)]
        ordering = BasisOrdering(tuple(sites), tuple(states))
        if ordering.dim != dim:
            raise OrderingMismatch("dim does not match the ordering")
        raw = np.asarray(data["data"], dtype=float)
        if raw.shape != (dim * dim, 2):
            raise ValueError("data must hold dim*dim [re, im] pairs")
        mat = (raw[:, 0] + 1j * raw[:, 1]).reshape(dim, dim)
        return cls(mat, ordering)


def _field_matrices(rule: LocalRule):
    graph = rule.graph
    n = graph.mode_count
    M = [annihilator_matrix(n, j) for j in range(n)]
    Mp = [jordan_wigner(evolved_operator(rule, graph.site_order[j])) for j in range(n)]
    return M, Mp


def _fock_image(Mp: Sequence[np.ndarray], v: np.ndarray) -> np.ndarray:
    """Columns ``(M'^dag_N)^{s_N} ... (M'^dag_1)^{s_1} v`` in computational order."""
    n = len(Mp)
    dag = [m.conj().T for m in Mp]
    cols = np.zeros((2**n, 2**n), dtype=complex)
    for idx in range(2**n):
        w = v
        for j in range(n):
            if idx >> (n - 1 - j) & 1:
                w = dag[j] @ w
        cols[:, idx] = w
    return cols


def intertwiner_space(rule: LocalRule) -> tuple[np.ndarray, int, float]:
    """Orthonormal basis of the solutions ``X`` of ``M'_j X = X M_j`` (and adjoints).

    Any solution is fixed by ``v = X|vacuum>``, which must be annihilated by
    every ``M'_j``; candidates are built from that null space and then the
    full stacked map is restricted to their span.
    Returns ``(basis, dimension, threshold)``; ``basis`` has one flattened
    solution per column.
    """
    M, Mp = _field_matrices(rule)
    n = len(M)
    dim = 2**n
    scale = max(np.linalg.norm(a, 2) + np.linalg.norm(b, 2) for a, b in zip(M, Mp))
    threshold = 1e-9 * scale

    stacked = np.vstack(Mp)
    _, sv, vh = np.linalg.svd(stacked)
    smax = sv[0] if sv.size else 0.0
    vac_null = [vh[k].conj() for k in range(dim) if sv[k] <= 1e-9 * max(smax, 1e-300)]
    if not vac_null:
        return np.zeros((dim * dim, 0), dtype=complex), 0, threshold

    cands = np.column_stack([_fock_image(Mp, v).reshape(-1) for v in vac_null])
    q, r = np.linalg.qr(cands)
    keep = np.abs(np.diag(r)) > 1e-12 * max(np.abs(np.diag(r)).max(), 1e-300)
    q = q[:, keep]

    Mdag = [m.conj().T for m in M]
    Mpdag = [m.conj().T for m in Mp]
    images = []
    for col in q.T:
        X = col.reshape(dim, dim)
        parts = []
        for j in range(n):
            parts.append((Mp[j] @ X - X @ M[j]).reshape(-1))
            parts.append((Mpdag[j] @ X - X @ Mdag[j]).reshape(-1))
        images.append(np.concatenate(parts))
    K = np.column_stack(images)
    _, ks, kvh = np.linalg.svd(K, full_matrices=False)
    ks_full = np.zeros(q.shape[1])
    ks_full[: ks.size] = ks
    null = [k for k in range(q.shape[1]) if ks_full[k] <= threshold]
    basis = q @ np.column_stack([kvh[k].conj() for k in null]) if null else q[:, :0]
    return basis, len(null), threshold


def _fix_phase(X: np.ndarray, ordering: BasisOrdering) -> np.ndarray:
    perm = ordering.permutation
    col = X[:, 0]  # the vacuum is computational index 0
    for k in perm:
        if abs(col[k]) > 1e-9:
            return X * (abs(col[k]) / col[k])
    return X


def synthesize_unitary(
    rule: LocalRule, ordering: BasisOrdering | None = None, tol: float = 1e-10
) -> EvolutionMatrix:
    """Unitary ``U`` with ``U J(psi_j) U^dag = J(psi'_j)`` for every site ``j``."""
    ordering = ordering or rule_ordering(rule)
    if list(ordering.site_order) != rule.graph.site_names():
        raise OrderingMismatch("ordering site_order differs from the rule's site order")
    basis, dimension, _ = intertwiner_space(rule)
    if dimension != 1:
        raise NullSpaceDimension(dimension)
    dim = ordering.dim
    X = basis[:, 0].reshape(dim, dim)
    X = X / np.sqrt(np.trace(X.conj().T @ X).real / dim)
    X = _fix_phase(X, ordering)
    residual = float(np.linalg.norm(X.conj().T @ X - np.eye(dim), 2))
    if residual > tol:
        raise NotUnitary(f"normalized intertwiner deviates from unitarity by {residual:.3g}")
    return EvolutionMatrix(ordering.from_computational(X), ordering, dimension)


def conjugation_residual(U: EvolutionMatrix, rule: LocalRule) -> float:
    """``max_j || U J(psi_j) U^dag - J(psi'_j) ||``."""
    M, Mp = _field_matrices(rule)
    X = U.computational
    return max(float(np.linalg.norm(X @ a @ X.conj().T - b, 2)) for a, b in zip(M, Mp))


def flip_operator(ordering: BasisOrdering) -> np.ndarray:
    """Ordered-basis matrix of ``prod_j (psi_j + psi^dag_j)`` taken in site order."""
    n = ordering.mode_count
    out = np.eye(2**n, dtype=complex)
    for j in range(n):
        a = annihilator_matrix(n, j)
        out = out @ (a + a.conj().T)
    return ordering.from_computational(out)


# named blocks ----------------------------------------------------------------------

_KLEIN_BLOCKS = {
    "vacuum": ([0], [0]),
    "A": (range(1, 4), range(1, 4)),
    "B": (range(1, 4), range(4, 7)),
    "B_lower": (range(4, 7), range(1, 4)),
    "A_lower": (range(4, 7), range(4, 7)),
    "full": ([7], [7]),
    "S": (range(8, 12), range(8, 12)),
    "T": (range(12, 16), range(12, 16)),
}

_Z5_BLOCKS = {
    "vacuum": ([0], [0]),
    "D": (range(1, 11), range(1, 11)),
    "C": (range(11, 16), range(11, 16)),
    "A": (range(16, 21), range(16, 21)),
    "B": (range(21, 31), range(21, 31)),
    "full": ([31], [31]),
}


def sector_blocks(U: EvolutionMatrix, scheme: str) -> dict:
    """Named sub-blocks of ``U`` plus the norm of everything outside them."""
    key = scheme.lower()
    if key == "z2xz2":
        expected, layout = klein_ordering(), _KLEIN_BLOCKS
    elif key == "z5":
        expected, layout = z5_ordering(), _Z5_BLOCKS
    else:
        raise ValueError(f"unknown block scheme {scheme!r}")
    if U.ordering.state_order != expected.state_order:
        raise OrderingMismatch(f"matrix is not in the {scheme} ordering")
    m = U.matrix
    mask = np.zeros(m.shape, dtype=bool)
    out: dict = {}
    for name, (rows, cols) in layout.items():
        idx = np.ix_(list(rows), list(cols))
        out[name] = m[idx].copy()
        mask[idx] = True
    out["leakage"] = float(np.linalg.norm(np.where(mask, 0, m)))
    out["parity_leakage"] = U.parity_leakage()[0]
    return out
