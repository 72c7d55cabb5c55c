"""Bivariate density oracles for squared (shifted) Gaussian pairs.

For eta = (eta_1, eta_2) centered Gaussian with covariance C and a
common shift r, the vector ((eta_1 + r)^2, (eta_2 + r)^2) has density

    h_r(s, t) = sum over eps in {-1,+1}^2 of
                phi_C(eps_1 sqrt(s) - r, eps_2 sqrt(t) - r) / (4 sqrt(s t))

on the open positive quadrant (four sign branches of the square-root
change of variables).  r = 0 is the central case.  Grids for lattice
tests are geometric between marginal quantiles, keeping clear of the
inverse-square-root singularity at the axes.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import chi2, ncx2

from . import defaults
from .errors import InputFormatError, NotPositiveDefiniteError
from .matcore import KernelMatrix

__all__ = [
    "gaussian_pair_pdf",
    "squared_pair_density",
    "marginal_quantile_grid",
    "pair_grid",
]


def _pair_cov(C) -> tuple:
    a = np.asarray(C.entries if isinstance(C, KernelMatrix) else C, dtype=float)
    if a.shape != (2, 2):
        raise InputFormatError("pair density needs a 2x2 covariance")
    v1, v2, c = float(a[0, 0]), float(a[1, 1]), float(0.5 * (a[0, 1] + a[1, 0]))
    det = v1 * v2 - c * c
    if v1 <= 0 or v2 <= 0 or det <= 0:
        raise NotPositiveDefiniteError(
            f"pair covariance must be positive definite (det {det:g})", det)
    return v1, v2, c, det


def gaussian_pair_pdf(C):
    """Vectorized density of a centered bivariate normal with covariance C."""
    v1, v2, c, det = _pair_cov(C)
    i11, i22, i12 = v2 / det, v1 / det, -c / det
    norm = 1.0 / (2.0 * math.pi * math.sqrt(det))

    def pdf(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        q = i11 * x * x + 2.0 * i12 * x * y + i22 * y * y
        return norm * np.exp(-0.5 * q)

    return pdf


def squared_pair_density(C, r: float = 0.0):
    """Density oracle of ((eta_1+r)^2, (eta_2+r)^2) on the open quadrant."""
    pdf = gaussian_pair_pdf(C)
    r = float(r)

    def h(s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        if np.any(s <= 0) or np.any(t <= 0):
            raise InputFormatError("density is evaluated on the open quadrant only")
        rs, rt = np.sqrt(s), np.sqrt(t)
        total = 0.0
        for e1 in (1.0, -1.0):
            for e2 in (1.0, -1.0):
                total = total + pdf(e1 * rs - r, e2 * rt - r)
        return total / (4.0 * rs * rt)

    return h


def marginal_quantile_grid(variance: float, r: float = 0.0, size: int = None,
                           lo: float = None, hi: float = None) -> np.ndarray:
    """Geometric grid between quantiles of the (eta + r)^2 marginal.

    (eta + r)^2 / variance is noncentral chi-square with 1 degree of
    freedom and noncentrality r^2 / variance (central when r = 0).
    """
    if variance <= 0:
        raise InputFormatError("variance must be positive")
    size = defaults.LATTICE_GRID_SIZE if size is None else int(size)
    lo = defaults.QUANTILE_LO if lo is None else float(lo)
    hi = defaults.QUANTILE_HI if hi is None else float(hi)
    if not (0 < lo < hi < 1) or size < 2:
        raise InputFormatError("need 0 < lo < hi < 1 and at least 2 grid points")
    if r == 0.0:
        qlo, qhi = chi2.ppf(lo, df=1), chi2.ppf(hi, df=1)
    else:
        nc = r * r / variance
        qlo, qhi = ncx2.ppf(lo, df=1, nc=nc), ncx2.ppf(hi, df=1, nc=nc)
    return np.geomspace(variance * qlo, variance * qhi, size)


def pair_grid(C, r: float = 0.0, size: int = None) -> tuple:
    """Per-coordinate quantile grids for a 2x2 covariance and shift r."""
    v1, v2, _, _ = _pair_cov(C)
    return (marginal_quantile_grid(v1, r, size),
            marginal_quantile_grid(v2, r, size))
