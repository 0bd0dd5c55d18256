"""Dense complex linear algebra on SU(N) and its Lie algebra su(N).

Everything works on plain ``numpy`` arrays.  A gate is an N x N complex
array with ``U.conj().T @ U = I`` and ``det U = 1``; an algebra element is a
traceless anti-Hermitian array (a Hamiltonian H enters as ``A = -1j * H``).
Validation helpers raise typed errors instead of silently accepting bad
input, and every tolerance is an overridable keyword.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from itertools import combinations, islice

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateBranchTieError,
    DimensionMismatchError,
    InvalidParameterError,
    InvariantViolationError,
    NoConvergenceError,
    NotNormalError,
)

TWO_PI = 2.0 * np.pi

# Default tolerances; callers may override any of them per call.
UNITARY_ATOL = 1e-10
ALGEBRA_ATOL = 1e-10
NORMALITY_ATOL = 1e-8
CLUSTER_ATOL = 1e-8


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def as_square_matrix(m) -> np.ndarray:
    """Coerce to a square complex128 array or raise DimensionMismatchError."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    return m


def require_special_unitary(u, atol: float = UNITARY_ATOL) -> np.ndarray:
    """Validate U†U = I and det U = 1 (max-abs entrywise, within ``atol``)."""
    u = as_square_matrix(u)
    n = u.shape[0]
    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(n))))
    if defect > atol:
        raise InvariantViolationError(f"matrix is not unitary: max|U†U - I| = {defect:.3e}")
    det = complex(np.linalg.det(u))
    if abs(det - 1.0) > atol:
        raise InvariantViolationError(f"matrix is not special unitary: det = {det:.17g}")
    return u


def require_algebra_element(a, atol: float = ALGEBRA_ATOL) -> np.ndarray:
    """Validate A† = -A and tr A = 0 within ``atol``."""
    a = as_square_matrix(a)
    defect = float(np.max(np.abs(a + a.conj().T)))
    if defect > atol:
        raise InvariantViolationError(f"matrix is not anti-Hermitian: max|A + A†| = {defect:.3e}")
    tr = complex(np.trace(a))
    if abs(tr) > atol:
        raise InvariantViolationError(f"matrix is not traceless: tr = {tr:.3e}")
    return a


def is_identity(u, atol: float = UNITARY_ATOL) -> bool:
    u = as_square_matrix(u)
    return float(np.max(np.abs(u - np.eye(u.shape[0])))) <= atol


def principal_angles(values) -> np.ndarray:
    """Arguments of complex numbers mapped to the half-open interval (-pi, pi].

    ``numpy.angle`` already lands there except for a signed-zero artifact at
    exactly -pi, which we fold to +pi so that an eigenvalue of -1 always gets
    the angle +pi.
    """
    ang = np.angle(np.asarray(values, dtype=np.complex128))
    return np.where(ang <= -np.pi, ang + TWO_PI, ang)


# ---------------------------------------------------------------------------
# Eigendecomposition of normal matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralDecomposition:
    """Unitary diagonalization M = Q diag(eigenvalues) Q†."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.conj().T


def eig_normal(m, normality_atol: float = NORMALITY_ATOL) -> SpectralDecomposition:
    """Unitarily diagonalize a normal matrix.

    Uses the complex Schur form, whose orthogonal-iteration backbone keeps the
    eigenvector matrix unitary even for repeated eigenvalues; for a normal
    input the triangular factor is diagonal up to roundoff.  Eigenvalues are
    returned sorted by argument in (-pi, pi], then by modulus, so the ordering
    is deterministic.
    """
    m = as_square_matrix(m)
    commut = float(np.max(np.abs(m @ m.conj().T - m.conj().T @ m)))
    if commut > normality_atol:
        raise NotNormalError(f"matrix is not normal: max|MM† - M†M| = {commut:.3e}")
    try:
        t, q = scipy.linalg.schur(m, output="complex")
    except np.linalg.LinAlgError as exc:  # zgees hit its iteration cap
        raise NoConvergenceError(f"Schur decomposition did not converge: {exc}") from exc
    eigs = np.diag(t).copy()
    order = np.lexsort((np.abs(eigs), principal_angles(eigs)))
    return SpectralDecomposition(eigenvalues=eigs[order], eigenvectors=q[:, order])


# ---------------------------------------------------------------------------
# Exponential and logarithms
# ---------------------------------------------------------------------------

def expm(a, atol: float = ALGEBRA_ATOL) -> np.ndarray:
    """exp(A) for a traceless anti-Hermitian A, via eigendecomposition of iA.

    The result is special unitary by construction: the eigenvalues of A are
    purely imaginary and sum to zero.
    """
    a = require_algebra_element(a, atol=atol)
    try:
        w, v = np.linalg.eigh(1j * a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"Hermitian eigensolver failed: {exc}") from exc
    return (v * np.exp(-1j * w)) @ v.conj().T


@dataclass(frozen=True)
class LogBranch:
    """One matrix logarithm of a special unitary matrix.

    ``angles`` are the principal eigenangles in (-pi, pi] (eig_normal order),
    ``shifts`` the integer winding numbers, so the log eigenvalues are
    ``1j * (angles + 2*pi*shifts)``, and ``value`` is the assembled traceless
    anti-Hermitian logarithm.
    """

    angles: np.ndarray
    shifts: np.ndarray
    value: np.ndarray

    @property
    def shifted_angles(self) -> np.ndarray:
        return self.angles + TWO_PI * self.shifts

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.value))


@dataclass(frozen=True)
class _EigenClusters:
    """Eigenstructure of a unitary, grouped into degenerate angle clusters."""

    decomposition: SpectralDecomposition
    angles: np.ndarray        # principal angle per eigenvalue
    base_shifts: np.ndarray   # +1 for members of a wrapped cluster sitting near -pi
    cluster_of: np.ndarray    # cluster id per eigenvalue
    n_clusters: int
    winding: int              # round(sum(effective angles) / 2pi)

    @property
    def effective_angles(self) -> np.ndarray:
        return self.angles + TWO_PI * self.base_shifts

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.cluster_of == cid)


def _cluster_eigenangles(dec: SpectralDecomposition, cluster_atol: float) -> _EigenClusters:
    """Group (near-)equal eigenvalues of a unitary into angle clusters.

    Clustering is circular: angles just above -pi and just below +pi belong to
    the same eigenvalue (-1-ish) and are merged, with a base winding of +1
    assigned to the members on the -pi side so the whole cluster behaves as if
    it sat at +pi.
    """
    theta = principal_angles(dec.eigenvalues)
    n = len(theta)
    order = np.argsort(theta, kind="stable")
    cluster_of = np.empty(n, dtype=int)
    cid = 0
    cluster_of[order[0]] = 0
    for pos in range(1, n):
        k, prev = order[pos], order[pos - 1]
        if theta[k] - theta[prev] > cluster_atol:
            cid += 1
        cluster_of[k] = cid
    base = np.zeros(n, dtype=int)
    if cid > 0 and (theta[order[0]] + TWO_PI) - theta[order[-1]] <= cluster_atol:
        # wrap-around: merge the cluster at -pi into the one at +pi
        low = cluster_of == 0
        cluster_of[low] = cluster_of[order[-1]]
        base[low] = 1
        # re-number clusters densely
        ids = np.unique(cluster_of)
        remap = {old: new for new, old in enumerate(ids)}
        cluster_of = np.array([remap[c] for c in cluster_of], dtype=int)
        cid = len(ids) - 1
    effective = theta + TWO_PI * base
    winding = int(np.rint(effective.sum() / TWO_PI))
    return _EigenClusters(
        decomposition=dec,
        angles=theta,
        base_shifts=base,
        cluster_of=cluster_of,
        n_clusters=cid + 1,
        winding=winding,
    )


def _assemble_branch(clusters: _EigenClusters, shifts: np.ndarray) -> LogBranch:
    dec = clusters.decomposition
    phi = clusters.angles + TWO_PI * shifts
    q = dec.eigenvectors
    value = (q * (1j * phi)) @ q.conj().T
    return LogBranch(angles=clusters.angles.copy(), shifts=shifts, value=value)


def principal_log(u, atol: float = UNITARY_ATOL,
                  cluster_atol: float = CLUSTER_ATOL) -> LogBranch:
    """Principal-branch matrix logarithm of a special unitary matrix.

    All eigenangles are taken in (-pi, pi].  Their sum is 2*pi*m for an
    integer m; to land in the traceless algebra, 2*pi is subtracted from the
    m angles closest to +pi (added to those closest to -pi when m < 0).
    Repeated eigenvalues must share a winding number - if the correction
    would split a degenerate cluster, the choice is basis-dependent and
    DegenerateBranchTieError is raised carrying every candidate branch.
    """
    u = require_special_unitary(u, atol=atol)
    clusters = _cluster_eigenangles(eig_normal(u), cluster_atol)
    m = clusters.winding
    shifts = clusters.base_shifts.copy()
    if m != 0:
        sign = 1 if m > 0 else -1
        # clusters ordered by closeness to the relevant endpoint (+pi or -pi)
        reps = [(cid, clusters.effective_angles[clusters.members(cid)][0])
                for cid in range(clusters.n_clusters)]
        reps.sort(key=lambda item: -sign * item[1])
        remaining = abs(m)
        for cid, _rep in reps:
            if remaining == 0:
                break
            idx = clusters.members(cid)
            if len(idx) > remaining:
                candidates = []
                for chosen in _index_choices(idx, remaining):
                    alt = shifts.copy()
                    alt[list(chosen)] -= sign
                    candidates.append(_assemble_branch(clusters, alt))
                raise DegenerateBranchTieError(
                    "traceless correction would split a degenerate eigenvalue "
                    f"cluster of multiplicity {len(idx)} (need {remaining}); "
                    "no basis-independent principal logarithm exists",
                    candidates=candidates,
                )
            shifts[idx] -= sign
            remaining -= len(idx)
        if remaining != 0:
            raise InvariantViolationError(
                f"could not absorb winding {m} into eigenangle corrections")
    return _assemble_branch(clusters, shifts)


def _index_choices(indices, r, cap: int = 16):
    """First ``cap`` combinations of ``r`` indices, lowest indices first."""
    return islice(combinations(indices.tolist(), r), cap)


def log_branches(u, n_max: int, atol: float = UNITARY_ATOL,
                 cluster_atol: float = CLUSTER_ATOL) -> list[LogBranch]:
    """All traceless logarithm branches of U with winding shifts |n_k| <= n_max.

    A branch is a choice of one integer winding per eigenvalue cluster
    (repeated eigenvalues share a winding so the result does not depend on the
    arbitrary basis inside a degenerate eigenspace), subject to the traceless
    constraint that the shifted angles sum to zero.  The list is deduplicated
    and sorted by Frobenius norm of the branch value, ties broken by the shift
    vector.
    """
    if n_max < 0:
        raise InvalidParameterError(f"n_max must be >= 0, got {n_max}")
    u = require_special_unitary(u, atol=atol)
    clusters = _cluster_eigenangles(eig_normal(u), cluster_atol)
    target = -clusters.winding

    sizes = []
    ranges = []
    for cid in range(clusters.n_clusters):
        idx = clusters.members(cid)
        sizes.append(len(idx))
        base = clusters.base_shifts[idx]
        lo = int(np.max(-n_max - base))
        hi = int(np.min(n_max - base))
        ranges.append((lo, hi))

    solutions: list[tuple[int, ...]] = []
    picks: list[int] = []

    def recurse(pos: int, need: int) -> None:
        if pos == clusters.n_clusters:
            if need == 0:
                solutions.append(tuple(picks))
            return
        lo_rest = sum(r[0] * s for r, s in zip(ranges[pos + 1:], sizes[pos + 1:]))
        hi_rest = sum(r[1] * s for r, s in zip(ranges[pos + 1:], sizes[pos + 1:]))
        lo, hi = ranges[pos]
        size = sizes[pos]
        for c in range(lo, hi + 1):
            rest = need - c * size
            if lo_rest <= rest <= hi_rest:
                picks.append(c)
                recurse(pos + 1, rest)
                picks.pop()

    recurse(0, target)

    branches = []
    seen = set()
    for sol in solutions:
        shifts = clusters.base_shifts.copy()
        for cid, c in enumerate(sol):
            shifts[clusters.members(cid)] += c
        key = tuple(shifts.tolist())
        if key in seen:
            continue
        seen.add(key)
        branches.append(_assemble_branch(clusters, shifts))
    branches.sort(key=lambda b: (b.frobenius(), tuple(b.shifts.tolist())))
    return branches


# ---------------------------------------------------------------------------
# Algebra structure
# ---------------------------------------------------------------------------

def commutator(a, b) -> np.ndarray:
    """[A, B] = AB - BA.  su(N) is closed under this bracket."""
    a = as_square_matrix(a)
    b = as_square_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


@functools.lru_cache(maxsize=None)
def su_basis(n: int) -> np.ndarray:
    """Orthonormal basis of su(n) under the inner product <A,B> = -tr(AB).

    Returns an array of shape (n**2 - 1, n, n) of traceless anti-Hermitian
    matrices: i/sqrt(2) times the generalized Gell-Mann family, enumerated as
    symmetric then antisymmetric off-diagonal pairs (row-major), followed by
    the diagonal members.
    """
    if n < 2:
        raise InvalidParameterError(f"su(n) basis needs n >= 2, got {n}")
    mats = []
    for j in range(n):
        for k in range(j + 1, n):
            sym = np.zeros((n, n), dtype=np.complex128)
            sym[j, k] = sym[k, j] = 1.0
            mats.append(sym)
            asym = np.zeros((n, n), dtype=np.complex128)
            asym[j, k] = -1j
            asym[k, j] = 1j
            mats.append(asym)
    for d in range(1, n):
        diag = np.zeros((n, n), dtype=np.complex128)
        norm = np.sqrt(2.0 / (d * (d + 1)))
        for j in range(d):
            diag[j, j] = norm
        diag[d, d] = -d * norm
        mats.append(diag)
    basis = (1j / np.sqrt(2.0)) * np.stack(mats)
    basis.setflags(write=False)
    return basis


def basis_coords(a) -> np.ndarray:
    """Real coordinates of an algebra element in the su_basis chart."""
    a = as_square_matrix(a)
    basis = su_basis(a.shape[0])
    return -np.einsum("kij,ji->k", basis, a).real


def from_coords(coords, n: int) -> np.ndarray:
    """Assemble an algebra element from su_basis coordinates."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (n * n - 1,):
        raise DimensionMismatchError(
            f"expected {n * n - 1} coordinates for su({n}), got shape {coords.shape}")
    return np.tensordot(coords, su_basis(n), axes=1)


# ---------------------------------------------------------------------------
# Random sampling
# ---------------------------------------------------------------------------

def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_su(n: int, seed) -> np.ndarray:
    """Haar-distributed special unitary matrix, deterministic for a fixed seed.

    The stream is numpy's default_rng (PCG64).  A complex Ginibre sample is
    QR-factorized, the R diagonal phases are absorbed to make the unitary
    factor Haar on U(n), and a global phase det**(-1/n) projects to SU(n).
    ``seed`` may also be a numpy Generator to draw from an existing stream.
    """
    if n < 2:
        raise InvalidParameterError(f"need n >= 2, got {n}")
    rng = _as_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return q / np.linalg.det(q) ** (1.0 / n)


def random_algebra_element(n: int, seed, scale: float = 1.0) -> np.ndarray:
    """Random su(n) element with normal coordinates of the given scale."""
    rng = _as_rng(seed)
    return from_coords(scale * rng.standard_normal(n * n - 1), n)
