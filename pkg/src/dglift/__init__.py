"""Exact computations for naive liftability of semifree DG modules along free extensions A -> B."""
from .scalars import Field, ModP
from .gca import DgAlgebra, AlgebraElement, ValidationReport, partial_derivative, validate_dgca
from .dgmod import GradedHom, NoSolution, SemifreeModule, solve_null_homotopy, validate_module
from .enveloping import EnvelopingAlgebra, Omega, build_enveloping, build_omega
from .derivations import Derivation, der_basis, der_differential, dual_basis
from .connections import Connection, fundamental_sequence, trivial_connection
from .lifting import (
    LiftReport,
    atiyah_map,
    classical_atiyah,
    decide_fesox,
    decide_naive_lifting,
    h0_nu_surjective,
    kodaira_spencer,
    setting_for,
)
from .frontend import generate_random_instance, load_instance, parse_instance

__version__ = "0.1.0"
