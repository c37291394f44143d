"""Mahler measures of four genus-one families by torus integration,
q-series, hypergeometric series and Kronecker-Eisenstein lattice sums,
with a harness that checks their functional equations."""

from .errors import (
    BadPrime,
    BranchAmbiguous,
    BudgetExceeded,
    ConvergenceError,
    DegenerateCurve,
    DegenerateLeading,
    DomainError,
    LeadingVanishes,
    MahlerLabError,
    NoConvergence,
    NotImplementedIdentity,
    SamplerExhausted,
    SignMismatch,
)
from .harness import evaluate, m_k, verify, verify_all, verify_modular_param
from .hypergeom import g_hyp, hyp, mu_hyp, n_hyp, omega, phi, r_via_phi
from .lfun import Curve, curve_from_k2, lprime_at_0
from .nome import invert_base, nome_qj
from .numkit import LaurentPoly, SeriesBudget, poly_roots, precision, set_precision, sum_series
from .qseries import CharacterId, FamilyId, base_function, character, mahler_qseries, qpochhammer
from .regulator import bloch_wigner, d_tau, family_lattice, j_tau, jfun, r_tau
from .torus import family_polynomial, mahler_grid, mahler_jensen

__version__ = "0.1.0"
