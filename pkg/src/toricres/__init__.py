"""Exact minimal resolutions of toric substack pushforwards.

Pipeline: torus cells -> cellular complex of line bundles -> per-class
integer complexes -> pseudoinverse contraction -> perturbation -> minimal
differentials, with a path-sum cross-check.
"""

from .errors import (NoPositiveGrading, ParseError, ToricResError, ValidationError,
                     VerificationFailure)
from .grading import betti_table, build_bm_complexes, find_positive_grading
from .hhl import LineBundleComplex, build_hhl_complex, verify_complex
from .hpl import minimal_resolution
from .paths import crosscheck_sigma, enumerate_paths
from .pinv import mp_inverse
from .strat import Quadruple, enumerate_cells

__all__ = [
    "Quadruple", "enumerate_cells", "build_hhl_complex", "verify_complex",
    "LineBundleComplex", "find_positive_grading", "build_bm_complexes", "betti_table",
    "minimal_resolution", "crosscheck_sigma", "enumerate_paths", "mp_inverse",
    "ToricResError", "ParseError", "ValidationError", "NoPositiveGrading",
    "VerificationFailure",
]
