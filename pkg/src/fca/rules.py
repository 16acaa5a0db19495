"""Local update rules and the two case-study solution families.

A rule is a coefficient table over monomial descriptors ``(s, t)``: bitsets
over the positions of the neighborhood template.  The descriptor stands for
the product, taken in template order, of ``(psi^dag_p)^{s_p} (psi_p)^{t_p}``.
The table is stored once, at the identity; the evolved field at any other
site is its translate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import groups as _groups
from .algebra import FermionPolynomial, normal_order, translate
from .errors import NoSolution
from .groups import CayleyGraph
from .rings import SymPoly


class MonomialDescriptor(NamedTuple):
    s: int  # daggered positions
    t: int  # undaggered positions

    @property
    def positions_s(self) -> list[int]:
        return [p for p in range(self.s.bit_length()) if self.s >> p & 1]

    @property
    def positions_t(self) -> list[int]:
        return [p for p in range(self.t.bit_length()) if self.t >> p & 1]

    @property
    def degree(self) -> int:
        return bin(self.s).count("1") + bin(self.t).count("1")

    def flipped(self) -> "MonomialDescriptor":
        return MonomialDescriptor(self.t, self.s)

    @classmethod
    def of(cls, s: Iterable[int] = (), t: Iterable[int] = ()) -> "MonomialDescriptor":
        sb = tb = 0
        for p in s:
            sb |= 1 << p
        for p in t:
            tb |= 1 << p
        return cls(sb, tb)


def validate_descriptor(d: MonomialDescriptor, k: int) -> None:
    if d.s == 0 and d.t == 0:
        raise ValueError("empty descriptor")
    if d.s >> k or d.t >> k:
        raise ValueError(f"descriptor {d} references positions beyond {k}")
    if d.degree % 2 == 0:
        raise ValueError(f"descriptor {d} has even degree")


def is_number_preserving(d: MonomialDescriptor) -> bool:
    # one more annihilator than creator: the term lowers particle number by one
    return bin(d.t).count("1") == bin(d.s).count("1") + 1


def all_descriptors(k: int) -> list[MonomialDescriptor]:
    out = [
        MonomialDescriptor(s, t)
        for s in range(1 << k)
        for t in range(1 << k)
        if (bin(s).count("1") + bin(t).count("1")) % 2 == 1
    ]
    return sorted(out, key=_descriptor_sort_key)


def number_preserving_descriptors(k: int) -> list[MonomialDescriptor]:
    return [d for d in all_descriptors(k) if is_number_preserving(d)]


def _descriptor_sort_key(d: MonomialDescriptor):
    return (d.degree, d.positions_s, d.positions_t)


# naming ---------------------------------------------------------------------


def _rotation_from(labels: Sequence[str], start: int) -> str:
    k = len(labels)
    return "".join(labels[(start + i) % k] for i in range(k))


def _rotation_ending(labels: Sequence[str], last: int) -> str:
    return _rotation_from(labels, (last + 1) % len(labels))


def descriptor_name(
    d: MonomialDescriptor, labels: Sequence[str], quintic: tuple[str, str] = ("mu", "nu")
) -> str:
    """Coefficient symbol for a descriptor given the template's element labels."""
    k = len(labels)
    s, t = set(d.positions_s), set(d.positions_t)
    pairs = s & t
    free_s, free_t = s - pairs, t - pairs
    full = set(range(k))
    if not pairs:
        if len(s) + len(t) == 1:
            (p,) = s | t
            return ("gamma_" if s else "alpha_") + labels[p]
        if len(s) + len(t) == k == 3 and s | t == full:
            if not s:
                return "theta"
            if not t:
                return "thetabar"
            if len(s) == 1:
                return "xi_" + _rotation_from(labels, next(iter(s)))
            return "chi_" + _rotation_ending(labels, next(iter(t)))
    elif len(free_s) + len(free_t) == 1:
        field_pos = next(iter(free_s | free_t))
        dagger = bool(free_s)
        if len(pairs) == 1:
            (x,) = pairs
            return ("eta_" if dagger else "beta_") + labels[x] + labels[field_pos]
        if len(pairs) == k - 1 == 2:
            return (quintic[1] if dagger else quintic[0]) + "_" + _rotation_ending(labels, field_pos)
    tag_s = "".join(labels[p] for p in sorted(s))
    tag_t = "".join(labels[p] for p in sorted(t))
    return f"T_s{tag_s}_t{tag_t}"


# rules ------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalRule:
    """Coefficient table at the identity site plus the graph it lives on."""

    graph: CayleyGraph
    terms: tuple  # ((MonomialDescriptor, coefficient), ...)
    number_preserving: bool = False
    quintic: tuple = ("mu", "nu")
    case: str = ""

    def __post_init__(self):
        k = len(self.graph.template)
        merged: dict = {}
        for d, c in self.terms:
            d = MonomialDescriptor(*d)
            validate_descriptor(d, k)
            if self.number_preserving and not is_number_preserving(d):
                raise ValueError(f"descriptor {d} breaks number preservation")
            merged[d] = merged[d] + c if d in merged else c
        object.__setattr__(
            self, "terms", tuple(sorted(merged.items(), key=lambda kv: _descriptor_sort_key(kv[0])))
        )

    @property
    def coefficients(self) -> dict:
        return dict(self.terms)

    @property
    def labels(self) -> list[str]:
        return [self.graph.group.name(h) for h in self.graph.template]

    def name_of(self, d: MonomialDescriptor) -> str:
        return descriptor_name(d, self.labels, self.quintic)

    def descriptor_of(self, name: str) -> MonomialDescriptor:
        for d in all_descriptors(len(self.graph.template)):
            if self.name_of(d) == name:
                return d
        raise KeyError(name)

    @property
    def is_symbolic(self) -> bool:
        return any(isinstance(c, SymPoly) for _, c in self.terms)

    def coefficient(self, name_or_descriptor):
        d = name_or_descriptor
        if isinstance(d, str):
            d = self.descriptor_of(d)
        return self.coefficients.get(MonomialDescriptor(*d), 0)

    def assignment(self, descriptors: Iterable[MonomialDescriptor] | None = None) -> dict:
        """Map coefficient names to complex values (zeros for absent descriptors)."""
        table = self.coefficients
        ds = list(descriptors) if descriptors is not None else list(table)
        return {self.name_of(d): complex(table.get(d, 0)) for d in ds}

    def replace(self, **changes) -> "LocalRule":
        """New rule with named coefficients replaced (0 drops a term)."""
        table = self.coefficients
        for name, value in changes.items():
            d = self.descriptor_of(name)
            if value == 0:
                table.pop(d, None)
            else:
                table[d] = value
        return LocalRule(self.graph, tuple(table.items()), self.number_preserving, self.quintic, self.case)

    def linear_part(self) -> "LocalRule":
        return LocalRule(
            self.graph,
            tuple((d, c) for d, c in self.terms if d.degree == 1),
            self.number_preserving,
            self.quintic,
            self.case,
        )

    def substitute(self, assignment: Mapping[str, complex]) -> "LocalRule":
        """Numeric rule from a symbolic one."""
        from .rings import evaluate

        out = []
        for d, c in self.terms:
            v = evaluate(c, assignment) if isinstance(c, SymPoly) else complex(c)
            if v != 0:
                out.append((d, v))
        return LocalRule(self.graph, tuple(out), self.number_preserving, self.quintic, self.case)

    @cached_property
    def template_polynomial(self) -> FermionPolynomial:
        n = self.graph.mode_count
        sites = self.graph.neighborhood_sites(0)
        total = FermionPolynomial.zero(n)
        for d, c in self.terms:
            word = []
            for p, site in enumerate(sites):
                if d.s >> p & 1:
                    word.append((site, True))
                if d.t >> p & 1:
                    word.append((site, False))
            total = total + normal_order(word, mode_count=n).scale(c)
        return total

    def evolved_operator(self, g) -> FermionPolynomial:
        return evolved_operator(self, g)

    def to_json(self) -> dict:
        grp = self.graph.group
        terms = []
        for d, c in self.terms:
            entry = {"s": d.positions_s, "t": d.positions_t, "name": self.name_of(d)}
            if isinstance(c, SymPoly):
                entry["symbol"] = self.name_of(d)
            else:
                c = complex(c)
                entry["coeff"] = [c.real, c.imag]
            terms.append(entry)
        return {
            "group": {"table": [list(r) for r in grp.table], "names": list(grp.names)},
            "generators": [grp.name(x) for x in self.graph.generators],
            "neighborhood": self.labels,
            "site_order": self.graph.site_names(),
            "number_preserving": self.number_preserving,
            "quintic": list(self.quintic),
            "case": self.case,
            "terms": terms,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LocalRule":
        group = _groups.build_group(data["group"])
        graph = CayleyGraph(
            group,
            tuple(data.get("generators") or _groups._default_generators(group)),
            tuple(data["neighborhood"]),
            tuple(data.get("site_order", ())),
        )
        terms = []
        for entry in data["terms"]:
            d = MonomialDescriptor.of(entry.get("s", ()), entry.get("t", ()))
            if "symbol" in entry:
                c = SymPoly.var(entry["symbol"])
            else:
                re_, im_ = entry["coeff"]
                c = complex(float(re_), float(im_))
            terms.append((d, c))
        return cls(
            graph,
            tuple(terms),
            bool(data.get("number_preserving", False)),
            tuple(data.get("quintic", ("mu", "nu"))),
            str(data.get("case", "")),
        )


def evolved_operator(rule: LocalRule, g) -> FermionPolynomial:
    base = rule.template_polynomial
    g = rule.graph.group.element(g)
    if g == 0:
        return base
    return translate(base, g, rule.graph)


def symbolic_rule(
    graph: CayleyGraph,
    descriptors: Iterable[MonomialDescriptor],
    number_preserving: bool = False,
    quintic: tuple = ("mu", "nu"),
    case: str = "",
) -> LocalRule:
    labels = [graph.group.name(h) for h in graph.template]
    terms = tuple(
        (d, SymPoly.var(descriptor_name(d, labels, quintic))) for d in descriptors
    )
    return LocalRule(graph, terms, number_preserving, quintic, case)


def flip_rule(rule: LocalRule) -> LocalRule:
    """Swap creator and annihilator roles in every descriptor."""
    return LocalRule(
        rule.graph,
        tuple((d.flipped(), c) for d, c in rule.terms),
        False,
        rule.quintic,
        rule.case,
    )


def identity_rule(graph: CayleyGraph) -> LocalRule:
    pos = graph.template.index(0)
    return LocalRule(graph, ((MonomialDescriptor.of(t=[pos]), 1 + 0j),), True)


# case studies -------------------------------------------------------------------

KLEIN_QUINTIC = ("gamma", "gammabar")


def case_graph(case: str) -> CayleyGraph:
    key = normalize_case(case)
    return _groups.klein_graph() if key == "z2xz2" else _groups.z5_graph()


def normalize_case(case: str) -> str:
    key = str(case).strip().lower().replace("×", "x")
    if key in ("z2xz2", "klein", "v4"):
        return "z2xz2"
    if key in ("z5", "zn(5)"):
        return "z5"
    raise ValueError(f"unknown case {case!r}")


def case_template(case: str, number_preserving: bool | None = None) -> LocalRule:
    """Symbolic template for a case study.

    The Klein case defaults to the number-preserving template, the cyclic
    case to the general odd-degree template.
    """
    key = normalize_case(case)
    graph = case_graph(key)
    k = len(graph.template)
    if number_preserving is None:
        number_preserving = key == "z2xz2"
    ds = number_preserving_descriptors(k) if number_preserving else all_descriptors(k)
    quintic = KLEIN_QUINTIC if key == "z2xz2" else ("mu", "nu")
    return symbolic_rule(graph, ds, number_preserving, quintic, key)


# coefficients that can be nonzero once the linear and cubic analysis is done
Z5_SUPPORT = (
    "alpha_1", "alpha_0", "alpha_4", "gamma_1", "gamma_0", "gamma_4",
    "beta_10", "beta_40", "eta_10", "eta_40", "mu_410", "nu_410",
)


def support_template(case: str) -> LocalRule:
    """Reduced template: Klein keeps the number-preserving one, Z5 keeps ``Z5_SUPPORT``."""
    key = normalize_case(case)
    if key == "z2xz2":
        return case_template(key, True)
    full = case_template(key, False)
    terms = tuple((d, c) for d, c in full.terms if full.name_of(d) in Z5_SUPPORT)
    return LocalRule(full.graph, terms, False, full.quintic, key)


def _numeric_rule(case: str, values: Mapping[str, complex], number_preserving: bool) -> LocalRule:
    template = case_template(case, number_preserving)
    out = []
    remaining = dict(values)
    for d, _ in template.terms:
        name = template.name_of(d)
        if name in remaining:
            v = complex(remaining.pop(name))
            if v != 0:
                out.append((d, v))
    if remaining:
        # names outside the np template (e.g. creators) need the general one
        general = case_template(case, False)
        for d, _ in general.terms:
            name = general.name_of(d)
            if name in remaining:
                v = complex(remaining.pop(name))
                if v != 0:
                    out.append((d, v))
    if remaining:
        raise KeyError(f"unknown coefficient names {sorted(remaining)}")
    return LocalRule(template.graph, tuple(out), number_preserving, template.quintic, template.case)


def _modulus_from_cos(scale: float, angle: float, what: str, tol: float = 1e-12) -> float:
    """``-2 * scale * cos(angle)``, rejecting negative results."""
    value = -2.0 * scale * math.cos(angle)
    if value < -tol:
        raise NoSolution(f"{what}: modulus -2 cos(...) would be negative ({value:.3g})")
    return max(value, 0.0)


def _angle_close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(cmath.phase(cmath.exp(1j * (a - b)))) < tol


KLEIN_OTHERS = {"e": ("a", "b"), "a": ("b", "e"), "b": ("e", "a")}


def klein_family(family: int, params: Mapping) -> dict:
    """Coefficient values for the Klein-group families (names -> complex)."""
    if family == 1:
        raise NoSolution("the first Klein family admits no automaton")
    if family == 2:
        x = str(params.get("alpha_site", "e"))
        if x not in KLEIN_OTHERS:
            raise ValueError(f"alpha_site must be one of e, a, b (got {x!r})")
        theta = float(params.get("theta", 0.0))
        phi = float(params["phi"])
        mod = _modulus_from_cos(1.0, phi - theta, "beta")
        alpha = cmath.exp(1j * theta)
        beta = mod * cmath.exp(1j * phi)
        gamma = beta * beta * alpha.conjugate()
        i, j = KLEIN_OTHERS[x]
        # quintic name is the cyclic rotation ending with the field site
        rot = {"e": "abe", "a": "bea", "b": "eab"}[x]
        return {
            f"alpha_{x}": alpha,
            f"beta_{i}{x}": beta,
            f"beta_{j}{x}": beta,
            f"gamma_{rot}": gamma,
        }
    if family == 3:
        sites = params.get("sites", ("e", "a"))
        x, y = (str(s) for s in sites)
        if x == y or x not in KLEIN_OTHERS or y not in KLEIN_OTHERS:
            raise ValueError("sites must be two distinct elements of e, a, b")
        w = float(params.get("weight", 0.5))
        if not 0.0 <= w <= 1.0:
            raise NoSolution("weight must lie in [0, 1]")
        theta_x = float(params.get("theta_x", 0.0))
        theta_y = float(params.get("theta_y", theta_x + math.pi / 2))
        if not (
            _angle_close(theta_y, theta_x + math.pi / 2)
            or _angle_close(theta_y, theta_x - math.pi / 2)
        ):
            raise NoSolution("theta_y must differ from theta_x by +-pi/2")
        phi_yx = float(params.get("phi_yx", theta_x + math.pi))
        rx, ry = math.sqrt(w), math.sqrt(1.0 - w)
        angle = theta_x - phi_yx
        mod_yx = _modulus_from_cos(rx, angle, "beta_yx")
        mod_xy = _modulus_from_cos(ry, angle, "beta_xy")
        phi_xy = theta_y - theta_x + phi_yx
        return {
            f"alpha_{x}": rx * cmath.exp(1j * theta_x),
            f"alpha_{y}": ry * cmath.exp(1j * theta_y),
            f"beta_{y}{x}": mod_yx * cmath.exp(1j * phi_yx),
            f"beta_{x}{y}": mod_xy * cmath.exp(1j * phi_xy),
        }
    raise ValueError(f"unknown Klein family {family}")


def z5_family(family: int, params: Mapping) -> dict:
    if family == 1:
        kind = str(params.get("kind", "alpha"))
        site = str(params.get("site", "0"))
        if kind not in ("alpha", "gamma") or site not in ("1", "0", "4"):
            raise ValueError("family 1 needs kind alpha|gamma and site in 1, 0, 4")
        return {f"{kind}_{site}": cmath.exp(1j * float(params.get("theta", 0.0)))}
    if family == 2:
        omega = float(params.get("omega", 0.0))
        phi = float(params["phi"])
        mod = _modulus_from_cos(1.0, phi - omega, "eta")
        gamma0 = cmath.exp(1j * omega)
        eta = mod * cmath.exp(1j * phi)
        return {"gamma_0": gamma0, "eta_10": eta, "eta_40": eta, "nu_410": eta * eta / gamma0}
    if family == 3:
        theta = float(params.get("theta", 0.0))
        phi = float(params["phi"])
        mod = _modulus_from_cos(1.0, phi - theta, "beta")
        alpha0 = cmath.exp(1j * theta)
        beta = mod * cmath.exp(1j * phi)
        return {"alpha_0": alpha0, "beta_10": beta, "beta_40": beta, "mu_410": beta * beta / alpha0}
    raise ValueError(f"unknown Z5 family {family}")


def family_values(case: str, family: int, params: Mapping) -> dict:
    key = normalize_case(case)
    return klein_family(int(family), params) if key == "z2xz2" else z5_family(int(family), params)


def family_rule(case: str, family: int, params: Mapping | None = None) -> LocalRule:
    """Numeric rule for a named solution family."""
    key = normalize_case(case)
    params = dict(params or {})
    values = family_values(key, family, params)
    if key == "z5" and int(family) == 2 and params.get("construct", "flip") == "flip":
        partner = z5_family(3, {"theta": params.get("omega", 0.0), "phi": params["phi"]})
        return flip_rule(_numeric_rule(key, partner, True))
    np_flag = not (key == "z5" and (int(family) == 2 or values.keys() & {"gamma_1", "gamma_0", "gamma_4"}))
    return _numeric_rule(key, values, np_flag)


def z5_flip_partner(omega: float, phi: float) -> dict:
    """Family-3 coefficients whose unitary, left-multiplied by the flip, gives family 2.

    With ``b = eta / gamma0`` the partner satisfies ``1 + b' = 1 / (1 + b)``,
    ``alpha0 = gamma0 / (1 + b')**2`` and ``beta = alpha0 * b'``.
    """
    vals = z5_family(2, {"omega": omega, "phi": phi})
    g0, eta = vals["gamma_0"], vals["eta_10"]
    b = eta / g0
    if abs(1 + b) < 1e-12:
        raise NoSolution("partner undefined when eta = -gamma0")
    bp = 1 / (1 + b) - 1
    alpha0 = g0 / (1 + bp) ** 2
    beta = alpha0 * bp
    return {"alpha_0": alpha0, "beta_10": beta, "beta_40": beta, "mu_410": beta * beta / alpha0}


def random_family_params(case: str, family: int, rng) -> dict:
    """Uniform draw from a family's parameter domain."""
    key = normalize_case(case)
    tau = 2 * math.pi
    if key == "z2xz2" and family == 2:
        theta = rng.uniform(0, tau)
        return {
            "alpha_site": str(rng.choice(["e", "a", "b"])),
            "theta": theta,
            "phi": theta + math.pi / 2 + rng.uniform(0, math.pi),
        }
    if key == "z2xz2" and family == 3:
        pair = list(rng.choice([("e", "a"), ("a", "b"), ("b", "e"), ("a", "e"), ("b", "a"), ("e", "b")]))
        theta_x = rng.uniform(0, tau)
        sign = 1 if rng.random() < 0.5 else -1
        return {
            "sites": pair,
            "weight": rng.uniform(0, 1),
            "theta_x": theta_x,
            "theta_y": theta_x + sign * math.pi / 2,
            "phi_yx": theta_x + math.pi / 2 + rng.uniform(0, math.pi),
        }
    if key == "z5" and family == 1:
        return {
            "kind": str(rng.choice(["alpha", "gamma"])),
            "site": str(rng.choice(["1", "0", "4"])),
            "theta": rng.uniform(0, tau),
        }
    if key == "z5" and family == 2:
        omega = rng.uniform(0, tau)
        return {"omega": omega, "phi": omega + math.pi / 2 + rng.uniform(0, math.pi)}
    if key == "z5" and family == 3:
        theta = rng.uniform(0, tau)
        return {"theta": theta, "phi": theta + math.pi / 2 + rng.uniform(0, math.pi)}
    raise ValueError(f"no parameter domain for {case} family {family}")
