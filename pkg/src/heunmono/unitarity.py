"""Deciding unitarity of finitely generated subgroups of GL(2, C).

A group G is unitary (preserves a nondegenerate, possibly indefinite,
Hermitian form H: g^dagger H g = H for all g) iff every generator has
unit-modulus determinant and the rescaled group G' = {+-g/sqrt(det g)} falls
into one of four cases, distinguished by irreducibility, abelianness and the
dimension of the real algebra spanned by G' inside the 2x2 complex matrices:

  1. scalar (dim 1);
  2. abelian reducible (dim 2): conjugate of SO(2), of the real diagonal
     group, or of the real trace-+-2 upper-triangular group;
  3. non-abelian reducible (dim 3): conjugate of the real upper-triangular
     subgroup of SL(2, R);
  4. irreducible (dim 4): unitary iff tr P, tr Q, tr R, tr PQ, tr PR, tr QR
     are real for all generator triples and, for each triple, tr(PQR) or
     tr(PRQ) is real.

The constructive branch produces the form H together with a witness
normalizer T such that T^-1 g T lies in the model group for every generator,
and H is the model form pulled back through T.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg2 import (
    DegenerateFormError,
    HermitianForm,
    SingularMatrixError,
    det,
    eigen,
    inverse,
    sqrt_det_rescale,
    trace,
)

__all__ = [
    "GeneratorSet",
    "Case",
    "Classification",
    "NotUnitaryError",
    "is_irreducible",
    "real_algebra_dim",
    "seven_trace_test",
    "classify",
    "construct_form",
    "beukers_inequality",
    "heun_reducibility_guard",
]

DET_MODULUS_TOL = 1e-8
COMMUTATOR_TOL = 1e-8
TRACE_IMAG_TOL = 1e-8
RANK_TOL = 1e-9
FORM_PRESERVATION_TOL = 1e-8
_SCALAR_TOL = 1e-10


class NotUnitaryError(ValueError):
    """Raised by construct_form when the generator set preserves no form."""


@dataclass(frozen=True)
class GeneratorSet:
    """An ordered, nonempty tuple of invertible 2x2 complex matrices."""

    gens: tuple

    def __post_init__(self):
        if len(self.gens) == 0:
            raise ValueError("generator set must be nonempty")
        for g in self.gens:
            g = np.asarray(g)
            if g.shape != (2, 2):
                raise ValueError("generators must be 2x2 matrices")
            if abs(det(g)) <= 1e-14:
                raise SingularMatrixError("generator is numerically singular")

    @staticmethod
    def of(*gens) -> "GeneratorSet":
        return GeneratorSet(tuple(np.asarray(g, dtype=complex) for g in gens))

    def __len__(self):
        return len(self.gens)


class Case(enum.Enum):
    SCALAR = "Scalar"
    ABELIAN_REDUCIBLE = "AbelianReducible"
    NONABELIAN_REDUCIBLE = "NonabelianReducible"
    IRREDUCIBLE = "Irreducible"


@dataclass(frozen=True)
class Classification:
    """Outcome of the four-case decision.

    When unitary, `form` is preserved by every generator within 1e-8 relative
    error and `normalizer` conjugates the generators into the model group
    (model = normalizer^-1 g normalizer).
    """

    case: Case
    unitary: bool
    algebra_dim: int
    form: Optional[HermitianForm]
    normalizer: Optional[np.ndarray]
    det_modulus_ok: bool

    def to_dict(self) -> dict:
        out = {
            "case": self.case.value,
            "unitary": self.unitary,
            "algebra_dim": self.algebra_dim,
            "det_modulus_ok": self.det_modulus_ok,
            "form": None,
            "normalizer": None,
        }
        if self.form is not None:
            out["form"] = [[_c2pair(x) for x in row] for row in self.form.matrix]
        if self.normalizer is not None:
            out["normalizer"] = [[_c2pair(x) for x in row] for row in self.normalizer]
        return out


def _c2pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _is_scalar(g: np.ndarray, tol: float = _SCALAR_TOL) -> bool:
    scale = 1.0 + np.max(np.abs(g))
    return (abs(g[0, 1]) <= tol * scale and abs(g[1, 0]) <= tol * scale
            and abs(g[0, 0] - g[1, 1]) <= tol * scale)


def _common_eigendirection(gens, tol: float = 1e-8):
    """A direction fixed by every generator, or None.

    Any common eigendirection is an eigendirection of the first non-scalar
    generator, so only its (at most two) candidates need checking.
    """
    anchor = next((g for g in gens if not _is_scalar(g)), None)
    if anchor is None:
        return np.array([1.0 + 0j, 0.0 + 0j])  # scalars fix every direction
    ep = eigen(anchor)
    candidates = [ep.v1] if ep.defective else [ep.v1, ep.v2]
    for v in candidates:
        ok = True
        for g in gens:
            w = g @ v
            # v is an eigendirection of g iff w is parallel to v
            cross = w[0] * v[1] - w[1] * v[0]
            if abs(cross) > tol * (1.0 + np.max(np.abs(g))):
                ok = False
                break
        if ok:
            return v
    return None


def is_irreducible(s: GeneratorSet) -> bool:
    """True iff no single direction is fixed by all generators."""
    return _common_eigendirection(s.gens) is None


def _vec8(g: np.ndarray) -> np.ndarray:
    f = np.asarray(g, dtype=complex).ravel()
    return np.concatenate([f.real, f.imag])


def _mat_of_vec8(v: np.ndarray) -> np.ndarray:
    return (v[:4] + 1j * v[4:]).reshape(2, 2)


def real_algebra_dim(s, rank_tol: float = RANK_TOL) -> int:
    """Dimension over R of the associative algebra generated by {I} and gens.

    Maintains an orthonormal basis of the current span in R^8 and absorbs
    products of basis pairs until the rank stabilizes (at most 8 rounds).
    """
    gens = s.gens if isinstance(s, GeneratorSet) else tuple(s)
    seed = [np.eye(2, dtype=complex)] + [np.asarray(g, complex) for g in gens]
    basis = _orthonormalize(np.array([_vec8(g) for g in seed]), rank_tol)
    for _ in range(8):
        mats = [_mat_of_vec8(v) for v in basis]
        prods = [a @ b for a, b in itertools.product(mats, mats)]
        stacked = np.vstack([basis] + [[_vec8(p) for p in prods]])
        new_basis = _orthonormalize(stacked, rank_tol)
        if len(new_basis) == len(basis):
            return len(basis)
        basis = new_basis
    return len(basis)


def _orthonormalize(rows: np.ndarray, rank_tol: float) -> np.ndarray:
    """Orthonormal basis (rows) of the row space, with relative rank cutoff."""
    u, sv, vt = np.linalg.svd(rows, full_matrices=False)
    if len(sv) == 0 or sv[0] == 0.0:
        return np.zeros((0, rows.shape[1]))
    keep = sv > rank_tol * sv[0]
    return vt[keep]


def seven_trace_test(p: np.ndarray, q: np.ndarray, r: np.ndarray,
                     tol: float = TRACE_IMAG_TOL) -> bool:
    """True iff all seven Fricke traces of (p, q, r) are real within tol.

    Requires unit determinants; a real trace spectrum is necessary for
    unitarity but not sufficient (see the abelian parabolic counterexample).
    """
    for g in (p, q, r):
        if abs(det(g) - 1.0) > 1e-10:
            raise ValueError("seven_trace_test requires det = 1 inputs")
    words = (p, q, r, p @ q, q @ r, p @ r, p @ q @ r)
    return all(abs(trace(w).imag) <= tol for w in words)


def beukers_inequality(t_pq: complex, t_qr: complex,
                       imag_tol: float = 1e-6) -> bool:
    """True iff both traces are real within imag_tol and
    (t_pq^2 - 4)(t_qr^2 - 4) >= 16 - 1e-6."""
    t_pq, t_qr = complex(t_pq), complex(t_qr)
    if abs(t_pq.imag) > imag_tol or abs(t_qr.imag) > imag_tol:
        return False
    prod = (t_pq.real ** 2 - 4.0) * (t_qr.real ** 2 - 4.0)
    return prod >= 16.0 - 1e-6


def heun_reducibility_guard(params) -> bool:
    """True iff alpha lies (mod 1) within 1e-9 of
    {0, gamma, delta, epsilon, and their pairwise/triple sums} — the
    parameter locus where the monodromy representation may be reducible."""
    g, d, e = params.gamma, params.delta, params.epsilon
    targets = [0.0, g, d, e, g + d, g + e, d + e, g + d + e]
    for t in targets:
        diff = complex(params.alpha) - complex(t)
        if abs(diff - round(diff.real)) <= 1e-9:
            return True
    return False


# ----------------------------------------------------------------------------
# constructive normalization


_H0 = HermitianForm(h11=0.0, h22=0.0, h12=1j)  # [[0, i], [-i, 0]]
_IDENTITY_FORM = HermitianForm(h11=1.0, h22=1.0, h12=0.0)


def _preservation_error(form: HermitianForm, gens) -> float:
    h = form.matrix
    hn = np.linalg.norm(h)
    return max(np.linalg.norm(g.conj().T @ h @ g - h) / hn for g in gens)


def _pull_back(model_form: HermitianForm, normalizer: np.ndarray) -> HermitianForm:
    tinv = inverse(normalizer)
    m = tinv.conj().T @ model_form.matrix @ tinv
    m = (m + m.conj().T) / 2.0
    # real rescale for reproducible output: |h11| = 1 when h11 is nonzero
    scale = abs(m[0, 0].real)
    if scale <= 1e-10:
        scale = np.max(np.abs(m))
    return HermitianForm(h11=m[0, 0].real / scale, h22=m[1, 1].real / scale,
                         h12=complex(m[0, 1]) / scale)


def _columns(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    t = np.column_stack([v1, v2])
    if abs(det(t)) <= 1e-12:
        raise NotUnitaryError("normalizing basis is numerically singular")
    return t


def _construct_scalar(resc):
    return _IDENTITY_FORM, np.eye(2, dtype=complex)


def _construct_abelian(resc, tol: float = TRACE_IMAG_TOL):
    """Match an abelian set of det-1 matrices to one of the case-2 models."""
    anchor = next((g for g in resc if not _is_scalar(g)), None)
    if anchor is None:
        return _construct_scalar(resc)
    ep = eigen(anchor)
    if not ep.defective:
        t = _columns(ep.v1, ep.v2)
        tinv = inverse(t)
        diags = []
        for g in resc:
            m = tinv @ g @ t
            scale = 1.0 + np.max(np.abs(m))
            if max(abs(m[0, 1]), abs(m[1, 0])) > 1e-7 * scale:
                raise NotUnitaryError("abelian set has no common eigenbasis")
            diags.extend([m[0, 0], m[1, 1]])
        if all(abs(abs(x) - 1.0) <= tol for x in diags):
            # common model: conjugate of the diagonal torus in U(1) x U(1)
            return _IDENTITY_FORM, t
        if all(abs(x.imag) <= tol * (1 + abs(x)) for x in diags):
            return _H0, t  # real diagonal model
        raise NotUnitaryError(
            "abelian diagonalizable set is neither unimodular nor real")
    # parabolic family: anchor sign-normalized to trace +2, Jordan basis
    sign = 1.0 if anchor[0, 0].real + anchor[1, 1].real > 0 else -1.0
    n = sign * anchor - np.eye(2)
    u = _nilpotent_partner(n)
    t = _columns(n @ u, u)
    tinv = inverse(t)
    for g in resc:
        m = tinv @ g @ t
        sgn = 1.0 if m.trace().real > 0 else -1.0
        m = sgn * m
        scale = 1.0 + np.max(np.abs(m))
        if (abs(m[1, 0]) > 1e-7 * scale
                or abs(m[0, 0] - 1) > 1e-7 * scale
                or abs(m[0, 1].imag) > tol * scale):
            raise NotUnitaryError(
                "parabolic abelian set is not conjugate to a real translation group")
    return _H0, t


def _nilpotent_partner(n: np.ndarray) -> np.ndarray:
    """A vector u with n @ u != 0, for a nonzero nilpotent n."""
    for u in (np.array([1.0 + 0j, 0j]), np.array([0j, 1.0 + 0j])):
        if np.linalg.norm(n @ u) > 1e-10 * (1 + np.linalg.norm(n)):
            return u
    raise NotUnitaryError("matrix is not parabolic (nilpotent part vanishes)")


def _construct_nonabelian_reducible(resc, tol: float = TRACE_IMAG_TOL):
    """Conjugate a reducible non-abelian det-1 set into real upper-triangular
    matrices; the model form is H0."""
    v = _common_eigendirection(resc)
    if v is None:
        raise NotUnitaryError("no common eigendirection")
    u = np.array([-np.conj(v[1]), np.conj(v[0])])
    t = _columns(v, u)
    tinv = inverse(t)
    tri = []
    for g in resc:
        m = tinv @ g @ t
        if abs(m[1, 0]) > 1e-7 * (1 + np.max(np.abs(m))):
            raise NotUnitaryError("triangularization failed")
        if abs(m[0, 0].imag) > tol * (1 + abs(m[0, 0])):
            raise NotUnitaryError("diagonal part is not real")
        tri.append(m)
    # shift away the off-diagonal entry of a non-parabolic anchor
    anchor = next((m for m in tri if abs(m[0, 0] - m[1, 1]) > 1e-8), None)
    if anchor is None:
        raise NotUnitaryError("set is abelian, not case 3")
    shift = -anchor[0, 1] / (anchor[0, 0] - anchor[1, 1])
    offs = [m[0, 1] + shift * (m[0, 0] - m[1, 1]) for m in tri]
    scale = max(abs(b) for b in offs)
    ref = next(b for b in offs if abs(b) > 1e-10 * (1 + scale))
    z = np.conj(ref) / abs(ref)
    for b in offs:
        if abs((b * z).imag) > tol * (1 + scale):
            raise NotUnitaryError(
                "off-diagonal entries are not real multiples of one another")
    t_total = t @ np.array([[1.0, shift], [0.0, 1.0]]) @ np.diag([1.0, z])
    return _H0, t_total


def _noncommuting_partner(p: np.ndarray, pool, tinv, t, corner_tol=1e-8):
    """A pool element whose conjugate by t has both corners nonzero."""
    for q in pool:
        m = tinv @ q @ t
        scale = 1.0 + np.max(np.abs(m))
        if min(abs(m[0, 1]), abs(m[1, 0])) > corner_tol * scale:
            return m
    return None


def _construct_irreducible(resc, tol: float = TRACE_IMAG_TOL):
    """Normalize an irreducible det-1 set by the trace of a suitable element:
    hyperbolic -> real basis with H0; elliptic -> eigenbasis with a diagonal
    form; all-parabolic -> Jordan basis with an antidiagonal-plus-corner form."""
    pool = list(resc)
    pool += [a @ b for a, b in itertools.permutations(resc, 2)]
    pool = [g for g in pool if not _is_scalar(g)]
    real_pool = [g for g in pool if abs(trace(g).imag) <= 1e-7 * (1 + abs(trace(g)))]
    if not real_pool:
        raise NotUnitaryError("no generator word with a real trace")
    anchor = max(real_pool, key=lambda g: abs(abs(trace(g).real) - 2.0))
    t_anchor = trace(anchor).real

    if abs(abs(t_anchor) - 2.0) <= 1e-6:
        return _construct_irreducible_parabolic(resc, pool, tol)

    ep = eigen(anchor)
    t = _columns(ep.v1, ep.v2)
    tinv = inverse(t)
    q = _noncommuting_partner(anchor, pool, tinv, t)
    if q is None:
        raise NotUnitaryError("no partner in general position found")

    if abs(t_anchor) > 2.0:
        # hyperbolic: make the partner's corners real by a diagonal rescale
        if abs((q[0, 1] * q[1, 0]).imag) > tol * (1 + abs(q[0, 1] * q[1, 0])):
            raise NotUnitaryError("corner product is not real")
        z = np.conj(q[0, 1]) / abs(q[0, 1])
        t_total = t @ np.diag([1.0, z])
        return _H0, t_total
    # elliptic: diagonal form in the eigenbasis
    ratio = -q[0, 1] / np.conj(q[1, 0])
    if abs(ratio.imag) > 1e-7 * (1 + abs(ratio)):
        raise NotUnitaryError("eigenbasis corner ratio is not real")
    return HermitianForm(h11=1.0, h22=ratio.real, h12=0.0), t


def _construct_irreducible_parabolic(resc, pool, tol):
    anchor = next(g for g in pool if not _is_scalar(g))
    sign = 1.0 if trace(anchor).real > 0 else -1.0
    n = sign * anchor - np.eye(2)
    u = _nilpotent_partner(n)
    t = _columns(n @ u, u)
    tinv = inverse(t)
    q = _noncommuting_partner(anchor, pool, tinv, t)
    if q is None:
        raise NotUnitaryError("no partner in general position found")
    sgn = 1.0 if q.trace().real > 0 else -1.0
    m = sgn * q - np.eye(2)
    n1, n3 = m[0, 0], m[1, 0]
    # the unique (up to real scale) candidate preserved by a unipotent
    # anchor [[1,1],[0,1]] and the partner: [[0, -i], [i, h]]
    h = -2.0 * (n3.imag + (np.conj(n1) * n3).imag) / abs(n3) ** 2
    return HermitianForm(h11=0.0, h22=h, h12=-1j), t


def _trace_conditions(resc, tol: float = TRACE_IMAG_TOL) -> bool:
    """The case-4 criterion: real traces on all words of length <= 2 and, for
    every unordered triple, a real trace for PQR or PRQ."""
    for g in resc:
        if abs(trace(g).imag) > tol:
            return False
    for a, b in itertools.combinations(resc, 2):
        if abs(trace(a @ b).imag) > tol:
            return False
    for a, b, c in itertools.combinations(resc, 3):
        if (abs(trace(a @ b @ c).imag) > tol
                and abs(trace(a @ c @ b).imag) > tol):
            return False
    return True


def classify(s: GeneratorSet, rank_tol: float = RANK_TOL) -> Classification:
    """The four-case unitarity decision, with constructed form on success.

    rank_tol is the relative cutoff for the algebra-dimension computation;
    loosen it (e.g. to 1e-6) for generators known only to limited relative
    accuracy, where it still separates the O(1) true dimensions from noise.
    """
    gens = [np.asarray(g, complex) for g in s.gens]
    det_ok = all(abs(abs(det(g)) - 1.0) <= DET_MODULUS_TOL for g in gens)
    resc = [sqrt_det_rescale(g) for g in gens]

    scalar = all(_is_scalar(g) for g in resc)
    abelian = scalar or _all_commute(resc)
    irreducible = is_irreducible(s)
    dim = real_algebra_dim(resc, rank_tol=rank_tol)

    if scalar:
        case = Case.SCALAR
    elif abelian:
        case = Case.ABELIAN_REDUCIBLE
    elif irreducible:
        case = Case.IRREDUCIBLE
    else:
        case = Case.NONABELIAN_REDUCIBLE

    unitary = False
    form = None
    normalizer = None
    if det_ok:
        try:
            if case is Case.SCALAR:
                model_form, normalizer = _construct_scalar(resc)
            elif case is Case.ABELIAN_REDUCIBLE:
                model_form, normalizer = _construct_abelian(resc)
            elif case is Case.NONABELIAN_REDUCIBLE:
                model_form, normalizer = _construct_nonabelian_reducible(resc)
            else:
                if not _trace_conditions(resc):
                    raise NotUnitaryError("trace conditions fail")
                model_form, normalizer = _construct_irreducible(resc)
            candidate = _pull_back(model_form, normalizer)
            if _preservation_error(candidate, resc) <= FORM_PRESERVATION_TOL:
                unitary = True
                form = candidate
            else:
                normalizer = None
        except (NotUnitaryError, DegenerateFormError, SingularMatrixError):
            normalizer = None

    return Classification(case=case, unitary=unitary, algebra_dim=dim,
                          form=form, normalizer=normalizer,
                          det_modulus_ok=det_ok)


def _all_commute(gens, tol: float = COMMUTATOR_TOL) -> bool:
    for a, b in itertools.combinations(gens, 2):
        scale = 1.0 + np.max(np.abs(a)) * np.max(np.abs(b))
        if np.max(np.abs(a @ b - b @ a)) > tol * scale:
            return False
    return True


def construct_form(s: GeneratorSet):
    """The preserved Hermitian form and witness normalizer of a unitary set.

    Raises NotUnitaryError when the set preserves no nondegenerate form.
    """
    c = classify(s)
    if not c.unitary or c.form is None:
        raise NotUnitaryError("generator set is not unitary")
    return c.form, c.normalizer
