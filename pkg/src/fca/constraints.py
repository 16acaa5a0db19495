"""CAR-preservation constraint systems for symbolic rules.

Every coefficient of ``{psi'_x, psi'_y}`` and ``{psi'_x, psi'_y^dag}`` in the
normal-ordered basis must vanish, except the identity coefficient of the
self bracket ``{psi'_x, psi'_x^dag}`` which must equal one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import adjoint, anticommute, bits_to_sites, monomial_sort_key, sites_to_bits
from .errors import MissingAssignment
from .rings import SymPoly, evaluate
from .rules import LocalRule, evolved_operator


@dataclass(frozen=True)
class Equation:
    lhs: SymPoly
    rhs: int
    pair: tuple  # (x, y) element names
    bracket: str  # "pp" or "pd"
    monomial: tuple  # (creator element names, annihilator element names)

    def residual(self, assignment: Mapping[str, complex]) -> float:
        return abs(evaluate(self.lhs, assignment) - self.rhs)

    def describe(self) -> str:
        cre, ann = self.monomial
        mono = " ".join([f"d{s}" for s in cre] + [f"p{s}" for s in ann]) or "I"
        x, y = self.pair
        kind = "{x', y'}" if self.bracket == "pp" else "{x', y'^dag}"
        return f"{kind} x={x} y={y} [{mono}]: {self.lhs} = {self.rhs}"

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs,
            "pair": list(self.pair),
            "bracket": self.bracket,
            "monomial": {"create": list(self.monomial[0]), "annihilate": list(self.monomial[1])},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Equation":
        rhs = int(data["rhs"])
        if rhs not in (0, 1):
            raise ValueError("rhs must be 0 or 1")
        bracket = str(data["bracket"])
        if bracket not in ("pp", "pd"):
            raise ValueError("bracket must be 'pp' or 'pd'")
        mono = data["monomial"]
        return cls(
            SymPoly.from_json(data["lhs"]),
            rhs,
            tuple(str(x) for x in data["pair"]),
            bracket,
            (tuple(str(s) for s in mono["create"]), tuple(str(s) for s in mono["annihilate"])),
        )


@dataclass(frozen=True)
class ConstraintSystem:
    equations: tuple

    def __len__(self):
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for eq in self.equations:
            out |= eq.lhs.variables()
        return out

    def lhs_set(self) -> set:
        return {(eq.lhs, eq.rhs) for eq in self.equations}

    def contains(self, lhs: SymPoly, rhs: int = 0) -> bool:
        """Whether an equation equal to ``lhs = rhs`` (up to scale when rhs = 0) is present."""
        if rhs == 0:
            target = lhs.monic()
            return any(eq.rhs == 0 and eq.lhs.monic() == target for eq in self.equations)
        return any(eq.rhs == rhs and eq.lhs == lhs for eq in self.equations)

    def to_json(self) -> list:
        return [eq.to_json() for eq in self.equations]

    @classmethod
    def from_json(cls, data) -> "ConstraintSystem":
        return cls(tuple(Equation.from_json(e) for e in data))


@dataclass
class VerificationReport:
    max_residual: float
    failures: list = field(default_factory=list)  # (Equation, residual)
    tolerance: float = 1e-12
    equation_count: int = 0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "equations": self.equation_count,
            "failures": [
                {"equation": eq.to_json(), "description": eq.describe(), "residual": r}
                for eq, r in self.failures
            ],
        }


def derive_constraints(rule: LocalRule, anchored: bool = True) -> ConstraintSystem:
    """Derive the CAR-preservation system of a symbolic rule.

    With ``anchored`` only brackets with ``x`` at the identity are formed;
    translation invariance makes the others redundant.  Without it all
    unordered site pairs are enumerated.
    """
    graph = rule.graph
    n = graph.mode_count
    names = graph.site_names()
    evolved = [evolved_operator(rule, graph.site_order[i]) for i in range(n)]
    daggers = [adjoint(p) for p in evolved]
    e_site = graph.site_index(0)

    if anchored:
        pairs = [(e_site, y) for y in range(n)]
    else:
        pairs = [(x, y) for x in range(n) for y in range(x, n)]
    # deterministic order: by element label pair, then bracket, then monomial
    pairs.sort(key=lambda xy: (graph.site_order[xy[0]], graph.site_order[xy[1]]))

    raw: list[Equation] = []
    for x, y in pairs:
        for bracket in ("pp", "pd"):
            other = evolved[y] if bracket == "pp" else daggers[y]
            poly = anticommute(evolved[x], other)
            terms = dict(poly.items())
            self_pd = bracket == "pd" and x == y
            if self_pd and (0, 0) not in terms:
                terms[(0, 0)] = SymPoly()
            for key in sorted(terms, key=monomial_sort_key):
                lhs = _as_sympoly(terms[key])
                rhs = 1 if (self_pd and key == (0, 0)) else 0
                if rhs == 0 and lhs.is_zero():
                    continue
                cre = tuple(names[s] for s in bits_to_sites(key[0]))
                ann = tuple(names[s] for s in bits_to_sites(key[1]))
                raw.append(Equation(lhs, rhs, (names[x], names[y]), bracket, (cre, ann)))
    return ConstraintSystem(tuple(_dedupe(raw)))


def _as_sympoly(c) -> SymPoly:
    if isinstance(c, SymPoly):
        return c
    return SymPoly.const(c)


def _dedupe(equations: Sequence[Equation]) -> list[Equation]:
    seen = set()
    out = []
    for eq in equations:
        key = (eq.lhs.monic(), 0) if eq.rhs == 0 else (eq.lhs, eq.rhs)
        if key in seen:
            continue
        seen.add(key)
        out.append(eq)
    return out


def verify_solution(
    system: ConstraintSystem, assignment: Mapping[str, complex], tol: float = 1e-12
) -> VerificationReport:
    missing = system.variables() - set(assignment)
    if missing:
        raise MissingAssignment(f"unassigned variables: {sorted(missing)}")
    worst = 0.0
    failures = []
    for eq in system.equations:
        r = eq.residual(assignment)
        worst = max(worst, r)
        if r > tol:
            failures.append((eq, r))
    failures.sort(key=lambda item: -item[1])
    return VerificationReport(worst, failures, tol, len(system.equations))


@dataclass(frozen=True)
class LinearSector:
    A: np.ndarray
    Gamma: np.ndarray
    bogoliubov: np.ndarray
    residual: float


def linear_sector(rule: LocalRule) -> LinearSector:
    """Degree-one part of the evolved fields and its Bogoliubov unitarity residual.

    Row ``g`` of ``A`` holds the coefficients of ``psi_f`` in ``psi'_g``,
    row ``g`` of ``Gamma`` those of ``psi^dag_f``; rows and columns follow the
    graph's site order.
    """
    graph = rule.graph
    n = graph.mode_count
    A = np.zeros((n, n), dtype=complex)
    G = np.zeros((n, n), dtype=complex)
    for i in range(n):
        p = evolved_operator(rule, graph.site_order[i])
        for (cre, ann), c in p.items():
            if cre == 0 and bin(ann).count("1") == 1:
                A[i, ann.bit_length() - 1] += complex(c)
            elif ann == 0 and bin(cre).count("1") == 1:
                G[i, cre.bit_length() - 1] += complex(c)
    W = np.block([[A, G], [G.conj(), A.conj()]])
    residual = float(np.linalg.norm(W @ W.conj().T - np.eye(2 * n), 2))
    return LinearSector(A, G, W, residual)


def monomial_bits(names: Sequence[str], cre: Sequence[str], ann: Sequence[str]) -> tuple[int, int]:
    return sites_to_bits(names.index(s) for s in cre), sites_to_bits(names.index(s) for s in ann)
