"""Positive-homogeneous resource functionals on su(N).

Each constraint is a function F: su(N) -> R with F(lambda*A) = lambda*F(A)
for lambda > 0, modeling how much of some limited physical quantity a
Hamiltonian consumes.  Hamiltonians enter through A = -1j*H, so every
functional below is written in terms of H = 1j*A.

Atoms
-----
Schatten(p)              p-norm of the singular values of H (p = inf is the
                         operator norm).
SpectralRange()          E_max - E_min of H: the operator norm after shifting
                         the ground energy to zero.
GroundShiftedMoment(p,psi)  (<psi| (H - E_min)**p |psi>)**(1/p), the p-th
                         moment of the ground-shifted Hamiltonian in a fixed
                         reference state.
EnergyUncertainty(psi)   standard deviation of H in a fixed reference state.
Randers(metric, oneform) sqrt(a.M.a) + b.a in su_basis coordinates a, with M
                         positive definite and b small enough that the value
                         stays positive away from zero.

Combinators (all preserve degree-1 homogeneity)
-----------------------------------------------
Sum, Max, Min            pointwise on two constraints.
PowerMean(p)             (F1**p + F2**p)**(1/p).
GeometricMean(p)         (F1**p * F2**p)**(1/(2p)); the naive product of two
                         degree-1 functionals would be degree 2, so the
                         exponent halves it back.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isinf
from typing import Optional

import numpy as np

from .errors import DimensionMismatchError, InvalidParameterError, InvariantViolationError
from .linalg import basis_coords, random_algebra_element, require_algebra_element

STATE_ATOL = 1e-12


def require_state(psi, atol: float = STATE_ATOL) -> np.ndarray:
    """Validate a unit-norm complex state vector."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.ndim != 1:
        raise DimensionMismatchError(f"state must be a 1-d array, got shape {psi.shape}")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > atol:
        raise InvariantViolationError(f"state is not normalized: <psi|psi> = {norm:.17g}")
    return psi


def basis_state(n: int, k: int = 0) -> np.ndarray:
    """Computational basis state |k> in dimension n."""
    psi = np.zeros(n, dtype=np.complex128)
    psi[k] = 1.0
    return psi


def _hermitian_eigs(a: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of H = 1j*A."""
    return np.linalg.eigvalsh(1j * a)


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Schatten:
    """Schatten p-norm of the Hamiltonian; p = inf is the operator norm."""

    p: float
    kind = "schatten"
    children = ()

    def __post_init__(self):
        if not (self.p >= 1.0):
            raise InvalidParameterError(f"Schatten exponent must be >= 1, got {self.p}")

    @property
    def dim(self) -> Optional[int]:
        return None

    def value(self, a: np.ndarray) -> float:
        sv = np.abs(_hermitian_eigs(a))
        if isinf(self.p):
            return float(np.max(sv))
        return float(np.sum(sv ** self.p) ** (1.0 / self.p))


@dataclass(frozen=True)
class SpectralRange:
    """Spread E_max - E_min of the Hamiltonian spectrum."""

    kind = "op_shifted"
    children = ()

    @property
    def dim(self) -> Optional[int]:
        return None

    def value(self, a: np.ndarray) -> float:
        w = _hermitian_eigs(a)
        return float(w[-1] - w[0])


@dataclass(frozen=True, eq=False)
class GroundShiftedMoment:
    """p-th root of the p-th moment of H - E_min in a reference state.

    The shifted operator is positive semidefinite, so non-integer exponents
    are defined spectrally and the moment is never negative.
    """

    p: float
    psi: np.ndarray
    kind = "ml"
    children = ()

    def __post_init__(self):
        if not (self.p > 0.0) or isinf(self.p):
            raise InvalidParameterError(f"moment exponent must be finite and > 0, got {self.p}")
        object.__setattr__(self, "psi", require_state(self.psi))

    @property
    def dim(self) -> Optional[int]:
        return len(self.psi)

    def value(self, a: np.ndarray) -> float:
        w, v = np.linalg.eigh(1j * a)
        amps = np.abs(v.conj().T @ self.psi) ** 2
        moment = float(amps @ (w - w[0]) ** self.p)
        assert moment > -1e-9, "ground-shifted moment must be non-negative"
        return max(moment, 0.0) ** (1.0 / self.p)


@dataclass(frozen=True, eq=False)
class EnergyUncertainty:
    """Standard deviation of the Hamiltonian in a reference state."""

    psi: np.ndarray
    kind = "mt"
    children = ()

    def __post_init__(self):
        object.__setattr__(self, "psi", require_state(self.psi))

    @property
    def dim(self) -> Optional[int]:
        return len(self.psi)

    def value(self, a: np.ndarray) -> float:
        h = 1j * a
        hpsi = h @ self.psi
        mean = float(np.vdot(self.psi, hpsi).real)
        var = float(np.vdot(hpsi, hpsi).real) - mean * mean
        assert var > -1e-9, "variance must be non-negative"
        return float(np.sqrt(max(var, 0.0)))


@dataclass(frozen=True, eq=False)
class Randers:
    """Riemannian norm plus a linear drift term, in su_basis coordinates.

    ``metric`` is a symmetric positive-definite (n**2-1) x (n**2-1) matrix and
    ``oneform`` a real vector of matching size with oneform . metric^-1 .
    oneform < 1, which keeps the value positive for every nonzero argument.
    """

    metric: np.ndarray
    oneform: np.ndarray
    kind = "randers"
    children = ()

    def __post_init__(self):
        metric = np.asarray(self.metric, dtype=float)
        oneform = np.asarray(self.oneform, dtype=float)
        if metric.ndim != 2 or metric.shape[0] != metric.shape[1]:
            raise DimensionMismatchError(f"metric must be square, got shape {metric.shape}")
        if oneform.shape != (metric.shape[0],):
            raise DimensionMismatchError(
                f"oneform shape {oneform.shape} does not match metric {metric.shape}")
        if float(np.max(np.abs(metric - metric.T))) > 1e-10:
            raise InvalidParameterError("metric must be symmetric")
        eigs = np.linalg.eigvalsh(metric)
        if eigs[0] <= 0.0:
            raise InvalidParameterError(f"metric must be positive definite, min eig {eigs[0]:.3e}")
        drift = float(oneform @ np.linalg.solve(metric, oneform))
        if drift >= 1.0:
            raise InvalidParameterError(
                f"oneform too large for positivity: oneform.M^-1.oneform = {drift:.6g} >= 1")
        n = int(round(np.sqrt(metric.shape[0] + 1)))
        if n * n - 1 != metric.shape[0]:
            raise DimensionMismatchError(
                f"metric size {metric.shape[0]} is not n**2 - 1 for any integer n")
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "oneform", oneform)

    @property
    def dim(self) -> Optional[int]:
        return int(round(np.sqrt(self.metric.shape[0] + 1)))

    def value(self, a: np.ndarray) -> float:
        coords = basis_coords(a)
        return float(np.sqrt(coords @ self.metric @ coords) + self.oneform @ coords)


# ---------------------------------------------------------------------------
# Combinators
# ---------------------------------------------------------------------------

def _check_pair(children):
    if len(children) != 2:
        raise InvalidParameterError(f"combinators take exactly 2 children, got {len(children)}")
    dims = {c.dim for c in children if c.dim is not None}
    if len(dims) > 1:
        raise DimensionMismatchError(f"children disagree on dimension: {sorted(dims)}")
    return tuple(children)


@dataclass(frozen=True)
class Sum:
    children: tuple
    kind = "sum"

    def __post_init__(self):
        object.__setattr__(self, "children", _check_pair(self.children))

    @property
    def dim(self) -> Optional[int]:
        return _children_dim(self.children)

    def value(self, a) -> float:
        return self.children[0].value(a) + self.children[1].value(a)


@dataclass(frozen=True)
class Max:
    children: tuple
    kind = "max"

    def __post_init__(self):
        object.__setattr__(self, "children", _check_pair(self.children))

    @property
    def dim(self) -> Optional[int]:
        return _children_dim(self.children)

    def value(self, a) -> float:
        return max(self.children[0].value(a), self.children[1].value(a))


@dataclass(frozen=True)
class Min:
    children: tuple
    kind = "min"

    def __post_init__(self):
        object.__setattr__(self, "children", _check_pair(self.children))

    @property
    def dim(self) -> Optional[int]:
        return _children_dim(self.children)

    def value(self, a) -> float:
        return min(self.children[0].value(a), self.children[1].value(a))


@dataclass(frozen=True)
class PowerMean:
    """(F1**p + F2**p)**(1/p) for p > 0."""

    p: float
    children: tuple
    kind = "powmean"

    def __post_init__(self):
        if not (self.p > 0.0) or isinf(self.p):
            raise InvalidParameterError(f"powmean exponent must be finite and > 0, got {self.p}")
        object.__setattr__(self, "children", _check_pair(self.children))

    @property
    def dim(self) -> Optional[int]:
        return _children_dim(self.children)

    def value(self, a) -> float:
        v1 = self.children[0].value(a)
        v2 = self.children[1].value(a)
        return float((v1 ** self.p + v2 ** self.p) ** (1.0 / self.p))


@dataclass(frozen=True)
class GeometricMean:
    """(F1**p * F2**p)**(1/(2p)): the degree-1 geometric combination."""

    p: float
    children: tuple
    kind = "geomean"

    def __post_init__(self):
        if not (self.p > 0.0) or isinf(self.p):
            raise InvalidParameterError(f"geomean exponent must be finite and > 0, got {self.p}")
        object.__setattr__(self, "children", _check_pair(self.children))

    @property
    def dim(self) -> Optional[int]:
        return _children_dim(self.children)

    def value(self, a) -> float:
        v1 = self.children[0].value(a)
        v2 = self.children[1].value(a)
        return float((v1 ** self.p * v2 ** self.p) ** (1.0 / (2.0 * self.p)))


def _children_dim(children) -> Optional[int]:
    for c in children:
        if c.dim is not None:
            return c.dim
    return None


ATOM_KINDS = ("schatten", "op_shifted", "ml", "mt", "randers")
COMBINATOR_KINDS = ("sum", "powmean", "geomean", "max", "min")


# ---------------------------------------------------------------------------
# Evaluation and verification
# ---------------------------------------------------------------------------

def evaluate(func, a, validate: bool = True) -> float:
    """Evaluate a constraint functional on an algebra element.

    ``func`` is any object with a ``value(A)`` method and an optional ``dim``;
    the catalog classes above all qualify.  With ``validate`` the input is
    checked to be a traceless anti-Hermitian matrix of matching dimension.
    """
    a = np.asarray(a, dtype=np.complex128)
    if validate:
        a = require_algebra_element(a)
        want = getattr(func, "dim", None)
        if want is not None and a.shape[0] != want:
            raise DimensionMismatchError(
                f"constraint expects dimension {want}, got {a.shape[0]}")
    return float(func.value(a))


@dataclass(frozen=True)
class HomogeneityReport:
    max_relative_deviation: float
    trials: int
    seed: int


def check_homogeneity(func, n: int, trials: int = 100, seed: int = 0) -> HomogeneityReport:
    """Sample |F(lambda A) - lambda F(A)| / (lambda F(A) + eps) over random
    algebra elements and scales lambda in (0, 10]."""
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        a = random_algebra_element(n, rng)
        lam = 10.0 * (1.0 - rng.random())  # uniform in (0, 10]
        scaled = evaluate(func, lam * a, validate=False)
        direct = lam * evaluate(func, a, validate=False)
        worst = max(worst, abs(scaled - direct) / (direct + 1e-300))
    return HomogeneityReport(max_relative_deviation=worst, trials=trials, seed=seed)


@dataclass(frozen=True)
class EnergyStats:
    """Spectral and state-relative statistics of a Hamiltonian H = 1j*A."""

    ground: float
    top: float
    expectation: float
    uncertainty: float


def energy_stats(a, psi) -> EnergyStats:
    """Ground/top eigenvalues of H = 1j*A plus mean and standard deviation in psi."""
    a = require_algebra_element(a)
    psi = require_state(psi)
    if len(psi) != a.shape[0]:
        raise DimensionMismatchError(
            f"state dimension {len(psi)} does not match matrix dimension {a.shape[0]}")
    w = _hermitian_eigs(a)
    h = 1j * a
    hpsi = h @ psi
    mean = float(np.vdot(psi, hpsi).real)
    var = max(float(np.vdot(hpsi, hpsi).real) - mean * mean, 0.0)
    return EnergyStats(ground=float(w[0]), top=float(w[-1]),
                       expectation=mean, uncertainty=float(np.sqrt(var)))
