"""Closed-form covariance matrices and their decompositions per regime."""

from .covariance import CauchyView, CovarianceBundle, build_sigma, cauchy_view, sb_scale, sp_vector
from .critical import (
    CriticalBounds,
    cr_charpoly,
    cr_cholesky_natural,
    cr_det,
    cr_det_natural,
    cr_eigen_bounds,
    cr_inverse,
    cr_lu_natural,
)
from .cross_regime import RelationReport, cross_cholesky_relation, cross_lu_relation
from .subcritical import (
    sb_charpoly,
    sb_cholesky,
    sb_det,
    sb_eigen_bounds,
    sb_eigenvalues_2,
    sb_inverse,
    sb_lu,
)
from .supercritical import SupercriticalSpectrum, sp_cholesky, sp_lu, sp_root, sp_schur, sp_spectrum

__all__ = [
    "CauchyView",
    "CovarianceBundle",
    "CriticalBounds",
    "RelationReport",
    "SupercriticalSpectrum",
    "build_sigma",
    "cauchy_view",
    "cr_charpoly",
    "cr_cholesky_natural",
    "cr_det",
    "cr_det_natural",
    "cr_eigen_bounds",
    "cr_inverse",
    "cr_lu_natural",
    "cross_cholesky_relation",
    "cross_lu_relation",
    "sb_charpoly",
    "sb_cholesky",
    "sb_det",
    "sb_eigen_bounds",
    "sb_eigenvalues_2",
    "sb_inverse",
    "sb_lu",
    "sb_scale",
    "sp_cholesky",
    "sp_lu",
    "sp_root",
    "sp_schur",
    "sp_spectrum",
    "sp_vector",
]
