"""Isotropic (Higgs) oscillator on the two-sphere: separable bases, spectrum,
interbasis expansion coefficients and finite-difference operator checks."""

from .basis import (Basis, BasisState, ModelParams, energy, enumerate_level, epsilon,
                    eval_wavefunction, native_wavefunction, wavefunction_s1)
from .geometry import (AnglePair, CoordinateSingularity, EmbeddedPoint, OutOfDomain, System,
                       convert, from_embedded, to_embedded)
from .interbasis import (PHASE_BRANCH, CoefficientMatrix, coefficient_matrix, overlap_matrix,
                         overlap_numeric, u_coeff, w_basis3, w_coeff_3f2, w_coeff_cg, w_inverse)
from .operators import (OperatorTag, StencilConfig, StencilOutOfDomain, algebra_identity_check,
                        apply_operator, residual_report)
from .quadrature import NotConverged, gauss_legendre, integrate_hemisphere
from .specfun import (CGArgs, DivergenceError, Hyp3F2Spec, PoleError, cg_continued,
                      gegenbauer_poly, hyp3f2_terminating_regularized, jacobi_poly)

__version__ = "0.1.0"
