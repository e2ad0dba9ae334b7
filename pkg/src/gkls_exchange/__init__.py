"""Exchange decomposition of two-level GKLS master equations.

Rewrites a two-jump-operator qubit generator as free evolution, exchange of a
generalised charge with the bath and residual pure dephasing, then analyses
the resulting Bloch dynamics, stationary states and exceptional points.
"""
from .algebra import HermitianAxis, pauli_decompose
from .decompose import PhysicalForm, decompose, decompose_verbose, reassemble, roundtrip_residual
from .dynamics import EP, Case, cubic_eigenvalues, ep_map, evolve, stationary_state
from .exceptions import GklsExchangeError, NegativeRate, NotExchangeCandidate
from .gkls import Classification, GklsSystem, JumpTerm, bloch_generator, classify_input, liouvillian_matrix
from .thermo import GibbsFit, analytic_stationary, gibbs_fit

__all__ = [
    "Case",
    "Classification",
    "EP",
    "GibbsFit",
    "GklsExchangeError",
    "GklsSystem",
    "HermitianAxis",
    "JumpTerm",
    "NegativeRate",
    "NotExchangeCandidate",
    "PhysicalForm",
    "analytic_stationary",
    "bloch_generator",
    "classify_input",
    "cubic_eigenvalues",
    "decompose",
    "decompose_verbose",
    "ep_map",
    "evolve",
    "gibbs_fit",
    "liouvillian_matrix",
    "pauli_decompose",
    "reassemble",
    "roundtrip_residual",
    "stationary_state",
]
