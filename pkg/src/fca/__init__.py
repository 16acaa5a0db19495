"""Nonlinear fermionic cellular automata on Cayley graphs of finite groups."""

from .algebra import FermionPolynomial, adjoint, anticommute, multiply, normal_order
from .constraints import ConstraintSystem, derive_constraints, linear_sector, verify_solution
from .discrimination import DiscriminationReport, analyze, relative_unitary
from .groups import CayleyGraph, FiniteGroupModel, QuotientSpec, is_regular
from .matrixrep import EvolutionMatrix, jordan_wigner, sector_blocks, synthesize_unitary
from .rules import LocalRule, MonomialDescriptor, case_template, family_rule

__version__ = "0.1.0"

__all__ = [
    "CayleyGraph",
    "ConstraintSystem",
    "DiscriminationReport",
    "EvolutionMatrix",
    "FermionPolynomial",
    "FiniteGroupModel",
    "LocalRule",
    "MonomialDescriptor",
    "QuotientSpec",
    "adjoint",
    "analyze",
    "anticommute",
    "case_template",
    "derive_constraints",
    "family_rule",
    "is_regular",
    "jordan_wigner",
    "linear_sector",
    "multiply",
    "normal_order",
    "relative_unitary",
    "sector_blocks",
    "synthesize_unitary",
    "verify_solution",
]
