"""Foundation tests: eigendecomposition, exp/log, branches, basis, sampling."""

import itertools

import numpy as np
import pytest

from qslkit import (
    DegenerateBranchTieError,
    DimensionMismatchError,
    InvariantViolationError,
    NotNormalError,
    basis_coords,
    commutator,
    eig_normal,
    expm,
    from_coords,
    haar_su,
    log_branches,
    principal_log,
    random_algebra_element,
    require_algebra_element,
    require_special_unitary,
    su_basis,
)
from qslkit.gates import orthogonalizer

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
LHAT = np.array([[0, -1j], [-1j, 0]], dtype=complex)


# ---------------------------------------------------------------------------
# eig_normal
# ---------------------------------------------------------------------------

def test_eig_diagonal_matrix():
    dec = eig_normal(np.diag([1.0, -1.0]).astype(complex))
    assert sorted(dec.eigenvalues.real.tolist()) == [-1.0, 1.0]
    # eigenvectors are permuted identity columns
    assert np.allclose(np.abs(dec.eigenvectors), np.eye(2))


def test_eig_sigma_x():
    dec = eig_normal(SX)
    # sorted by argument: +1 (angle 0) before -1 (angle pi)
    assert np.allclose(dec.eigenvalues, [1.0, -1.0], atol=1e-12)
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert abs(np.vdot(dec.eigenvectors[:, 0], plus)) == pytest.approx(1.0, abs=1e-12)
    assert abs(np.vdot(dec.eigenvectors[:, 1], minus)) == pytest.approx(1.0, abs=1e-12)


def test_eig_reconstructs_haar_unitary():
    u = haar_su(4, seed=11)
    dec = eig_normal(u)
    err = np.linalg.norm(dec.reconstruct() - u)
    assert err < 1e-9 * (1 + np.linalg.norm(u))
    assert np.max(np.abs(dec.eigenvectors.conj().T @ dec.eigenvectors - np.eye(4))) < 1e-9


def test_eig_rejects_non_normal():
    with pytest.raises(NotNormalError):
        eig_normal(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_orthonormal_on_degenerate_spectrum():
    # eigenvalue 1 with multiplicity 3, in a scrambled basis
    v = haar_su(4, seed=5)
    u = v @ np.diag([1, 1, 1, -1]).astype(complex) @ v.conj().T
    dec = eig_normal(u)
    assert np.max(np.abs(dec.eigenvectors.conj().T @ dec.eigenvectors - np.eye(4))) < 1e-9
    assert np.linalg.norm(dec.reconstruct() - u) < 1e-9


# ---------------------------------------------------------------------------
# expm
# ---------------------------------------------------------------------------

def test_expm_zero_is_identity():
    assert np.allclose(expm(np.zeros((3, 3))), np.eye(3))


def test_expm_closed_form_2x2():
    # L^2 = -I, so exp(t L) = cos(t) I + sin(t) L; at t = pi/2 this is L itself
    assert np.max(np.abs(expm((np.pi / 2) * LHAT) - LHAT)) < 1e-12


def test_expm_semigroup():
    rng = np.random.default_rng(0)
    a = random_algebra_element(3, rng)
    u1 = expm(a)
    assert np.max(np.abs(expm(2 * a) - u1 @ u1)) < 1e-9


def test_expm_rejects_non_algebra_input():
    with pytest.raises(InvariantViolationError):
        expm(np.eye(2))


# ---------------------------------------------------------------------------
# principal_log
# ---------------------------------------------------------------------------

def test_principal_log_identity():
    branch = principal_log(np.eye(3, dtype=complex))
    assert np.max(np.abs(branch.value)) < 1e-12
    assert np.all(branch.shifts == 0)


def test_principal_log_orthogonalizer_block():
    branch = principal_log(orthogonalizer(np.pi, 2))
    assert np.max(np.abs(branch.value - (np.pi / 2) * LHAT)) < 1e-12


def test_principal_log_orthogonalizer_padded():
    # the identity block contributes a zero block to the log
    expected = np.zeros((4, 4), dtype=complex)
    expected[:2, :2] = (np.pi / 2) * LHAT
    branch = principal_log(orthogonalizer(np.pi, 4))
    assert np.max(np.abs(branch.value - expected)) < 1e-12


def test_principal_log_diag():
    branch = principal_log(np.diag([1j, -1j]))
    assert np.max(np.abs(branch.value - np.diag([1j * np.pi / 2, -1j * np.pi / 2]))) < 1e-12


def test_principal_log_roundtrip_random():
    rng = np.random.default_rng(21)
    for n in (2, 3, 4):
        for _ in range(5):
            a = random_algebra_element(n, rng)
            w = np.linalg.eigvalsh(1j * a)
            a *= (np.pi - 0.1) / max(np.max(np.abs(w)), 1e-12)
            branch = principal_log(expm(a))
            assert np.max(np.abs(branch.value - a)) < 1e-9


def test_principal_log_degenerate_tie_reports_candidates():
    with pytest.raises(DegenerateBranchTieError) as exc:
        principal_log(-np.eye(2, dtype=complex))
    candidates = exc.value.candidates
    assert len(candidates) == 2
    for cand in candidates:
        assert np.max(np.abs(expm(cand.value) + np.eye(2))) < 1e-9
        assert abs(np.trace(cand.value)) < 1e-9


def test_principal_log_traceless_correction_distinct_angles():
    # eigenangle sum 2*pi with distinct angles: the angle closest to +pi
    # gets wound down and exp still reconstructs the gate
    u = np.diag(np.exp(1j * np.array([np.pi, 0.9 * np.pi, 0.1 * np.pi])))
    branch = principal_log(u)
    assert abs(np.trace(branch.value)) < 1e-9
    assert sorted(branch.shifts.tolist()) == [-1, 0, 0]
    assert np.max(np.abs(expm(branch.value) - u)) < 1e-9


# ---------------------------------------------------------------------------
# log_branches
# ---------------------------------------------------------------------------

def test_branches_identity_nmax0():
    branches = log_branches(np.eye(3, dtype=complex), 0)
    assert len(branches) == 1
    assert np.max(np.abs(branches[0].value)) < 1e-12


def test_branches_diag_nmax1():
    branches = log_branches(np.diag([1j, -1j]), 1)
    shifts = [tuple(b.shifts.tolist()) for b in branches]
    assert shifts == [(0, 0), (1, -1), (-1, 1)]  # sorted by Frobenius norm
    norms = [b.frobenius() for b in branches]
    assert norms == sorted(norms)


def test_branches_match_principal_log():
    u = haar_su(3, seed=3)
    branches = log_branches(u, 0)
    assert len(branches) == 1
    principal = principal_log(u)
    assert np.max(np.abs(branches[0].value - principal.value)) < 1e-12


@pytest.mark.parametrize("n,n_max,seed", [(2, 1, 0), (2, 3, 1), (3, 2, 2), (3, 3, 3)])
def test_branch_count_matches_independent_enumeration(n, n_max, seed):
    # independent oracle: integer vectors in the box with the right sum,
    # winding computed from raw eigenvalues rather than the branch machinery
    u = haar_su(n, seed=seed)
    theta = np.angle(np.linalg.eigvals(u))
    total = int(np.rint(theta.sum() / (2 * np.pi)))
    expected = sum(
        1 for vec in itertools.product(range(-n_max, n_max + 1), repeat=n)
        if sum(vec) == -total)
    branches = log_branches(u, n_max)
    assert len(branches) == expected
    for b in branches:
        assert np.max(np.abs(expm(b.value) - u)) < 1e-9
        assert abs(b.shifted_angles.sum()) < 1e-9


def test_branches_empty_for_minus_identity():
    # -I in SU(2) has no cluster-coherent traceless branch
    assert log_branches(-np.eye(2, dtype=complex), 3) == []


# ---------------------------------------------------------------------------
# commutator and basis
# ---------------------------------------------------------------------------

def test_commutator_self_is_zero():
    a = random_algebra_element(3, np.random.default_rng(1))
    assert np.max(np.abs(commutator(a, a))) < 1e-14


def test_commutator_su2_convention():
    got = commutator(0.5j * SX, 0.5j * SY)
    assert np.max(np.abs(got - (-0.5j * SZ))) < 1e-14


def test_commutator_entrywise_oracle():
    rng = np.random.default_rng(8)
    a = random_algebra_element(3, rng)
    b = random_algebra_element(3, rng)
    oracle = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                oracle[i, j] += a[i, k] * b[k, j] - b[i, k] * a[k, j]
    got = commutator(a, b)
    assert np.max(np.abs(got - oracle)) < 1e-12
    require_algebra_element(got)  # closure in su(3)


def test_commutator_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        commutator(np.zeros((2, 2)), np.zeros((3, 3)))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_su_basis_orthonormal(n):
    basis = su_basis(n)
    assert basis.shape == (n * n - 1, n, n)
    gram = -np.einsum("aij,bji->ab", basis, basis).real
    assert np.max(np.abs(gram - np.eye(n * n - 1))) < 1e-12
    for t in basis:
        require_algebra_element(t)


def test_su_basis_span_roundtrip():
    rng = np.random.default_rng(4)
    for n in (2, 3, 4):
        a = random_algebra_element(n, rng)
        coords = basis_coords(a)
        assert np.max(np.abs(from_coords(coords, n) - a)) < 1e-10


# ---------------------------------------------------------------------------
# haar_su
# ---------------------------------------------------------------------------

def test_haar_deterministic():
    assert np.array_equal(haar_su(3, seed=123), haar_su(3, seed=123))


def test_haar_invariants():
    for seed in range(5):
        u = haar_su(4, seed=seed)
        require_special_unitary(u)


def test_haar_first_entry_moment():
    # Haar moment: E|U_00|^2 = 1/N, unchanged by the det-fixing global phase
    rng = np.random.default_rng(99)
    vals = [abs(haar_su(2, rng)[0, 0]) ** 2 for _ in range(10_000)]
    assert abs(np.mean(vals) - 0.5) < 0.02


# ---------------------------------------------------------------------------
# module-level invariants
# ---------------------------------------------------------------------------

def test_every_branch_exponentiates_back():
    for n, seed in ((2, 31), (3, 32)):
        u = haar_su(n, seed=seed)
        for b in log_branches(u, 2):
            assert np.max(np.abs(expm(b.value) - u)) < 1e-9
