"""Minimum gate implementation times under a constraint F(-1j*H) = kappa.

For a constant Hamiltonian reaching the gate O at time T, taking logarithms
of exp(-1j*H*T) = O and applying F gives T = F(log O) / kappa.  The physical
minimum over constant drives is the minimum of that expression over all
traceless logarithm branches; for constraints that are monotone in the
eigenangle moduli (every unitarily invariant norm) the principal branch is
already optimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf, isinf, pi
from typing import Optional

import numpy as np
import scipy.optimize

from .constraints import Schatten, SpectralRange, evaluate
from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    InvariantViolationError,
    OptimizerDidNotConvergeError,
    QslError,
    TooFewSamplesError,
)
from .linalg import (
    LogBranch,
    basis_coords,
    expm,
    from_coords,
    haar_su,
    log_branches,
    principal_log,
    require_special_unitary,
    _as_rng,
)

# Derivative-free search defaults: simplex diameter convergence and a hard
# iteration cap; the objective may be non-smooth (max/min combinators,
# spectral degeneracies), so gradient methods are not used.
SIMPLEX_TOL = 1e-9
SIMPLEX_MAXITER = 20_000
DEFAULT_RESTARTS = 16

UNITARILY_INVARIANT_ATOMS = (Schatten, SpectralRange)


@dataclass(frozen=True)
class Diagnostics:
    branches_considered: int
    optimizer_iterations: Optional[int]
    converged: bool


@dataclass(frozen=True)
class SpeedLimitResult:
    """Outcome of a minimum-time computation.

    ``time`` is ``f_value / kappa`` by construction, in units where hbar = 1
    and F carries energy units.  ``conjugator`` is set only by searches that
    optimize over conjugations.  For definite constraints (norms), time is
    zero exactly when the gate is the identity; semidefinite constraints such
    as the state-anchored moments can reach zero on nontrivial gates.
    """

    time: float
    branch: LogBranch
    conjugator: Optional[np.ndarray]
    f_value: float
    kappa: float
    diagnostics: Diagnostics


def _require_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not kappa > 0.0:
        raise InvalidParameterError(f"kappa must be > 0, got {kappa}")
    return kappa


def _require_matching_dim(func, n: int) -> None:
    want = getattr(func, "dim", None)
    if want is not None and want != n:
        raise DimensionMismatchError(
            f"constraint expects dimension {want}, gate has dimension {n}")


def gate_time(func, kappa: float, gate, n_max: int = 0,
              atol: float = 1e-10) -> SpeedLimitResult:
    """Minimum time to reach ``gate`` with a constant Hamiltonian on the
    constraint level set F = kappa, minimized over logarithm branches with
    winding |n_k| <= n_max.

    For Schatten and spectral-range constraints the principal branch is
    provably optimal; that is asserted whenever the principal branch is in
    the searched set.
    """
    kappa = _require_kappa(kappa)
    gate = require_special_unitary(gate, atol=atol)
    _require_matching_dim(func, gate.shape[0])
    branches = log_branches(gate, n_max, atol=atol)
    if not branches:
        # forces the informative degenerate-cluster error when applicable
        principal_log(gate, atol=atol)
        raise InvalidParameterError(
            f"no traceless logarithm branch with winding <= {n_max}; raise n_max")
    values = [evaluate(func, b.value, validate=False) for b in branches]
    best = int(np.argmin(values))
    if isinstance(func, UNITARILY_INVARIANT_ATOMS):
        principal = principal_log(gate, atol=atol)
        key = tuple(principal.shifts.tolist())
        for b, v in zip(branches, values):
            if tuple(b.shifts.tolist()) == key:
                if not np.isclose(values[best], v, rtol=1e-12, atol=1e-12):
                    raise QslError(
                        "internal consistency failure: principal branch is not "
                        "minimal for a unitarily invariant constraint")
                break
    f_value = float(values[best])
    return SpeedLimitResult(
        time=f_value / kappa,
        branch=branches[best],
        conjugator=None,
        f_value=f_value,
        kappa=kappa,
        diagnostics=Diagnostics(branches_considered=len(branches),
                                optimizer_iterations=None, converged=True),
    )


def conj_min_time(func, kappa: float, gate, restarts: int = DEFAULT_RESTARTS,
                  seed: int = 0, atol: float = 1e-10) -> SpeedLimitResult:
    """Minimize F(V X V†)/kappa over conjugators V in SU(n), X = log(gate).

    Conjugation commutes with the principal logarithm, so the search runs on
    the fixed principal branch.  V is charted as exp(sum_i c_i T_i) over the
    su basis and minimized by multi-start Nelder-Mead; the identity chart
    point is always one start, so the result can never exceed the plain
    branch value.  For conjugation-invariant F the minimum equals gate_time.
    """
    kappa = _require_kappa(kappa)
    if restarts < 1:
        raise InvalidParameterError(f"restarts must be >= 1, got {restarts}")
    gate = require_special_unitary(gate, atol=atol)
    _require_matching_dim(func, gate.shape[0])
    branch = principal_log(gate, atol=atol)
    x = branch.value
    n = gate.shape[0]
    dim = n * n - 1
    rng = _as_rng(seed)

    def objective(coords: np.ndarray) -> float:
        v = expm(from_coords(coords, n))
        return evaluate(func, v @ x @ v.conj().T, validate=False)

    starts = [np.zeros(dim)]
    for _ in range(restarts - 1):
        starts.append(basis_coords(principal_log(haar_su(n, rng)).value))

    best_coords = None
    best_value = inf
    best_nit = None
    any_converged = False
    for start in starts:
        res = scipy.optimize.minimize(
            objective, start, method="Nelder-Mead",
            options={"xatol": SIMPLEX_TOL, "fatol": SIMPLEX_TOL,
                     "maxiter": SIMPLEX_MAXITER, "maxfev": 2 * SIMPLEX_MAXITER})
        any_converged = any_converged or bool(res.success)
        candidate = (float(res.fun), tuple(res.x.tolist()))
        if candidate < (best_value, tuple(best_coords.tolist()) if best_coords is not None else ()):
            best_value = float(res.fun)
            best_coords = np.asarray(res.x)
            best_nit = int(res.nit)

    conjugator = expm(from_coords(best_coords, n))
    result = SpeedLimitResult(
        time=best_value / kappa,
        branch=branch,
        conjugator=conjugator,
        f_value=best_value,
        kappa=kappa,
        diagnostics=Diagnostics(branches_considered=1,
                                optimizer_iterations=best_nit,
                                converged=any_converged),
    )
    if not any_converged:
        raise OptimizerDidNotConvergeError(
            f"no restart converged within {SIMPLEX_MAXITER} iterations; "
            f"best value so far {best_value:.17g}", best=result)
    return result


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Sampled time-dependent Hamiltonian on [0, duration].

    ``times`` must be strictly increasing and span the full interval;
    ``hamiltonians`` is the matching stack of Hermitian matrices.
    """

    times: np.ndarray
    hamiltonians: np.ndarray
    duration: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        hams = np.asarray(self.hamiltonians, dtype=np.complex128)
        duration = float(self.duration)
        if times.ndim != 1 or hams.ndim != 3 or hams.shape[0] != len(times):
            raise InvalidParameterError("need matching 1-d times and a stack of matrices")
        if len(times) < 2:
            raise TooFewSamplesError(f"need at least 2 samples, got {len(times)}")
        if np.any(np.diff(times) <= 0):
            raise InvariantViolationError("sample times must be strictly increasing")
        if not duration > 0:
            raise InvalidParameterError(f"duration must be positive, got {duration}")
        if abs(times[0]) > 1e-12 or abs(times[-1] - duration) > 1e-12:
            raise InvariantViolationError(
                f"samples must span [0, {duration}], got [{times[0]}, {times[-1]}]")
        herm = float(np.max(np.abs(hams - np.conj(np.transpose(hams, (0, 2, 1))))))
        if herm > 1e-10:
            raise InvariantViolationError(f"samples must be Hermitian: defect {herm:.3e}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "hamiltonians", hams)
        object.__setattr__(self, "duration", duration)

    @classmethod
    def from_samples(cls, samples, duration=None) -> "Trajectory":
        """Build from an ordered list of (t, H) pairs; duration defaults to
        the last sample time."""
        times = np.array([t for t, _ in samples], dtype=float)
        hams = np.stack([np.asarray(h, dtype=np.complex128) for _, h in samples])
        if duration is None:
            duration = float(times[-1])
        return cls(times=times, hamiltonians=hams, duration=duration)


def action(func, traj: Trajectory) -> float:
    """Integral of F(-1j*H_t) along the trajectory.

    Composite Simpson on uniformly spaced grids with an odd sample count,
    trapezoid otherwise.  On a constraint level set F = kappa the action is
    kappa times the duration, independent of parametrization.
    """
    ts = traj.times
    if len(ts) < 2:
        raise TooFewSamplesError(f"need at least 2 samples, got {len(ts)}")
    vals = np.array([evaluate(func, -1j * h) for h in traj.hamiltonians])
    dt = np.diff(ts)
    uniform = bool(np.max(np.abs(dt - dt.mean())) <= 1e-9 * dt.mean())
    if uniform and len(ts) % 2 == 1:
        h = float(dt.mean())
        weights = np.ones(len(ts))
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        return float(h / 3.0 * weights @ vals)
    return float(np.trapezoid(vals, ts))


# ---------------------------------------------------------------------------
# Closed-form reference times
# ---------------------------------------------------------------------------

def analytic_bounds(bound: str, kappa: float, p: Optional[float] = None) -> float:
    """Closed-form orthogonalization time for the named constraint family,
    with the resource quantity set to kappa.

    ``ml``      pi / (2**(1/p) * kappa)   (ground-shifted p-th moment)
    ``mt``      pi / (2 * kappa)          (energy uncertainty)
    ``opnorm``  pi / kappa                (spectral range)
    """
    kappa = _require_kappa(kappa)
    if bound == "ml":
        if p is None or not (p > 0.0) or isinf(p):
            raise InvalidParameterError(f"ml bound needs finite p > 0, got {p}")
        return pi / (2.0 ** (1.0 / p) * kappa)
    if bound == "mt":
        return pi / (2.0 * kappa)
    if bound == "opnorm":
        return pi / kappa
    raise InvalidParameterError(f"unknown bound family {bound!r}; expected ml, mt, or opnorm")
