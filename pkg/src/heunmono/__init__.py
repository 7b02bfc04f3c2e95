"""Monodromy groups, unitarity and accessory-parameter spectra of Heun-class
ordinary differential equations.

Submodules
----------
linalg2    2x2 complex linear algebra and Hermitian forms
unitarity  four-case unitarity classification and form construction
monodromy  contour-integrated monodromy matrices of the Heun equation
elliptic   Weierstrass periods, wp/zeta, and the asymptotic eigenvalue lattice
spectrum   two-trace Newton solver, seed sweeps, convergence maps
cli        command-line entry point (heunmono)
"""

from .linalg2 import HermitianForm, det, eigen, inverse, sqrt_det_rescale, trace
from .unitarity import (Case, Classification, GeneratorSet, beukers_inequality,
                        classify, construct_form, heun_reducibility_guard,
                        is_irreducible, real_algebra_dim, seven_trace_test)
from .monodromy import (Contour, ContourError, HeunParams, MonodromyTriple,
                        lame_params, monodromy_triple, standard_contour,
                        transport)
from .elliptic import (DarbouxParams, EllipticData, asymptotic_accessory,
                       heun_to_darboux_params, periods_from_a, seed_lattice,
                       wp, wp_prime, wzeta)
from .spectrum import (SolverConfig, SpectrumResult, convergence_map,
                       newton_epsilon, solve_from_seed, sweep, traces_at)

__version__ = "1.0.0"

__all__ = [
    "HermitianForm", "det", "trace", "inverse", "eigen", "sqrt_det_rescale",
    "GeneratorSet", "Case", "Classification", "classify", "construct_form",
    "is_irreducible", "real_algebra_dim", "seven_trace_test",
    "beukers_inequality", "heun_reducibility_guard",
    "HeunParams", "Contour", "ContourError", "MonodromyTriple",
    "standard_contour", "transport", "monodromy_triple", "lame_params",
    "EllipticData", "DarbouxParams", "periods_from_a",
    "heun_to_darboux_params", "asymptotic_accessory", "seed_lattice",
    "wp", "wp_prime", "wzeta",
    "SolverConfig", "SpectrumResult", "traces_at", "newton_epsilon",
    "solve_from_seed", "sweep", "convergence_map",
]
