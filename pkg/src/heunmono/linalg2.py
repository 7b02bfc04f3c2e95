"""2x2 complex linear algebra used throughout the package.

Matrices are plain (2, 2) complex numpy arrays.  Everything here is pure and
deterministic; tolerances are keyword arguments with library-wide defaults.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SingularMatrixError",
    "DegenerateFormError",
    "HermitianForm",
    "EigenPair",
    "mat2",
    "mul",
    "det",
    "trace",
    "inverse",
    "eigen",
    "conjugate",
    "form_action",
    "sqrt_det_rescale",
]

SINGULAR_TOL = 1e-14
FORM_DEGENERACY_TOL = 1e-10


class SingularMatrixError(ValueError):
    """Raised when a matrix required to be invertible is numerically singular."""


class DegenerateFormError(ValueError):
    """Raised when a Hermitian form is numerically degenerate."""


def mat2(a11, a12, a21, a22) -> np.ndarray:
    """Build a (2, 2) complex matrix from four entries."""
    m = np.array([[a11, a12], [a21, a22]], dtype=complex)
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix entries must be finite")
    return m


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product a @ b."""
    return a @ b


def det(a: np.ndarray) -> complex:
    return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]


def trace(a: np.ndarray) -> complex:
    return a[0, 0] + a[1, 1]


def inverse(a: np.ndarray) -> np.ndarray:
    d = det(a)
    if abs(d) <= SINGULAR_TOL:
        raise SingularMatrixError(f"matrix is singular: |det| = {abs(d):.3e}")
    return np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]], dtype=complex) / d


def conjugate(a: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Similarity transform t^-1 a t."""
    return inverse(t) @ a @ t


@dataclass(frozen=True)
class HermitianForm:
    """Nondegenerate Hermitian form on C^2, stored as h11, h12 (h21 = conj h12)."""

    h11: float
    h22: float
    h12: complex

    def __post_init__(self):
        if not (np.isfinite(self.h11) and np.isfinite(self.h22)
                and np.isfinite(complex(self.h12).real)
                and np.isfinite(complex(self.h12).imag)):
            raise ValueError("form entries must be finite")
        if abs(self.det) <= FORM_DEGENERACY_TOL:
            raise DegenerateFormError(f"form is degenerate: |det H| = {abs(self.det):.3e}")

    @property
    def det(self) -> float:
        return self.h11 * self.h22 - abs(self.h12) ** 2

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.h11, self.h12], [np.conj(self.h12), self.h22]], dtype=complex
        )

    @staticmethod
    def from_matrix(m: np.ndarray, herm_tol: float = 1e-8) -> "HermitianForm":
        """Read a form off a numerically Hermitian matrix, symmetrizing small noise."""
        if np.max(np.abs(m - m.conj().T)) > herm_tol * (1 + np.max(np.abs(m))):
            raise ValueError("matrix is not Hermitian within tolerance")
        s = (m + m.conj().T) / 2
        return HermitianForm(h11=s[0, 0].real, h22=s[1, 1].real, h12=complex(s[0, 1]))

    def normalized(self) -> "HermitianForm":
        """Rescale by a real factor so max entry magnitude is 1, h11 >= 0."""
        scale = max(abs(self.h11), abs(self.h22), abs(self.h12))
        sign = -1.0 if self.h11 < -FORM_DEGENERACY_TOL else 1.0
        f = sign / scale
        return HermitianForm(self.h11 * f, self.h22 * f, self.h12 * f)


def form_action(g: np.ndarray, h: HermitianForm) -> HermitianForm:
    """The action g^dagger H g, re-symmetrized into a HermitianForm."""
    m = g.conj().T @ h.matrix @ g
    return HermitianForm(h11=m[0, 0].real, h22=m[1, 1].real, h12=complex(m[0, 1]))


@dataclass(frozen=True)
class EigenPair:
    lambda1: complex
    lambda2: complex
    v1: np.ndarray
    v2: np.ndarray
    defective: bool


def _eigvec(a: np.ndarray, lam: complex) -> np.ndarray:
    # rows of (a - lam I) both annihilate the eigenvector; use the larger one
    r1 = np.array([a[0, 0] - lam, a[0, 1]])
    r2 = np.array([a[1, 0], a[1, 1] - lam])
    r = r1 if np.linalg.norm(r1) >= np.linalg.norm(r2) else r2
    if np.linalg.norm(r) == 0.0:
        return np.array([1.0 + 0j, 0.0 + 0j])
    v = np.array([-r[1], r[0]])
    return v / np.linalg.norm(v)


def eigen(a: np.ndarray, defect_tol: float = 1e-8) -> EigenPair:
    """Eigen-decomposition via the stable quadratic formula.

    The square root sign is chosen to avoid cancellation.  The pair is flagged
    defective when the eigenvalues coincide within defect_tol * (1 + ||a||)
    and the eigenspace is one-dimensional.
    """
    t = trace(a) / 2.0
    d = det(a)
    disc = np.sqrt(complex(t * t - d))
    if (np.conj(t) * disc).real < 0.0:
        disc = -disc
    lam1 = t + disc
    lam2 = d / lam1 if abs(lam1) > 0 else t - disc
    norm_a = np.linalg.norm(a)
    close = abs(lam1 - lam2) <= defect_tol * (1.0 + norm_a)
    defective = False
    if close:
        lam = (lam1 + lam2) / 2.0
        # defective iff a - lam I has rank 1 (a is not a scalar matrix)
        defective = np.max(np.abs(a - lam * np.eye(2))) > defect_tol * (1.0 + norm_a)
        lam1 = lam2 = lam
    v1 = _eigvec(a, lam1)
    v2 = v1 if defective else _eigvec(a, lam2)
    return EigenPair(complex(lam1), complex(lam2), v1, v2, defective)


def sqrt_det_rescale(g: np.ndarray) -> np.ndarray:
    """Rescale g to g / sqrt(det g) (principal branch); result defined up to sign."""
    d = det(g)
    if abs(d) <= SINGULAR_TOL:
        raise SingularMatrixError("cannot rescale a singular matrix")
    return g / np.sqrt(complex(d))
