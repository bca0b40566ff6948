"""Forward Sturm-Liouville machinery: coefficients, normal form, eigensolvers, closed forms."""
from .coefficients import LiouvilleForm, SLCoefficients, assemble_coefficients, liouville_transform, regularize
from .conformal import closed_form_conformal, is_conformal
from .fd import RegularizationStudy, regularization_study, solve_spectrum_fd
from .forward import GegenbauerMatch, fd_modes, gegenbauer_model, match_gegenbauer, solve_model
from .gegenbauer import closed_form_gegenbauer, gegenbauer_lambdas, symmetric_jacobi
from .modes import EigenMode, eigenfunction, eigenmodes, gram_matrix
from .shooting import solve_spectrum_shooting
from .spectrum import SLSpectrum

__all__ = [
    "SLCoefficients", "LiouvilleForm", "SLSpectrum", "assemble_coefficients", "liouville_transform",
    "regularize", "solve_spectrum_fd", "regularization_study", "RegularizationStudy",
    "solve_spectrum_shooting", "EigenMode", "eigenfunction", "eigenmodes", "gram_matrix",
    "closed_form_gegenbauer", "gegenbauer_lambdas", "symmetric_jacobi",
    "GegenbauerMatch", "match_gegenbauer", "gegenbauer_model", "fd_modes", "solve_model",
    "closed_form_conformal", "is_conformal",
]
