"""Geometric classification of constraints and gates.

Two questions are answered numerically.  First, is a constraint invariant
under conjugation?  If so, constant Hamiltonians are time optimal for every
gate and the branch-minimized gate time is the true optimum.  Second, for a
non-invariant constraint, does a specific gate still admit a time-optimal
constant drive?  That holds exactly when the log of the gate is a geodesic
vector of the induced right-invariant Finsler structure, i.e. when the
fundamental tensor g of F satisfies g_X(X, [X, Z]) = 0 for every basis
direction Z.  The tensor is evaluated by finite differences of F**2, so the
checks are only meaningful at generic probes away from spectral kinks.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isinf
from typing import Optional

import numpy as np

from . import constraints as con
from .errors import (
    DimensionMismatchError,
    IdentityGateError,
    InvalidParameterError,
    QslError,
    StepUnderflowError,
)
from .linalg import (
    _as_rng,
    commutator,
    haar_su,
    is_identity,
    log_branches,
    principal_log,
    random_algebra_element,
    require_algebra_element,
    require_special_unitary,
    su_basis,
)

INVARIANCE_THRESHOLD = 1e-8
GEODESIC_THRESHOLD = 1e-6
FD_STEP = 1e-4
NORM_SLACK = 1e-9
GENERIC_MARGIN = 1e-3

CELL_ALL_GATES = "Constant Hamiltonian optimal for all gates"
CELL_GEODESIC_GATES = "Constant Hamiltonian optimal only for gates passing the geodesic check"


def _require_matching_dim(func, n: int) -> None:
    want = getattr(func, "dim", None)
    if want is not None and want != n:
        raise DimensionMismatchError(
            f"constraint expects dimension {want}, got dimension {n}")


# ---------------------------------------------------------------------------
# Conjugation invariance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvarianceReport:
    ad_invariant: bool
    max_deviation: float
    samples: int
    is_norm: bool
    table_cell: str
    seed: int
    threshold: float


def _table_cell(ad_invariant: bool, is_norm: bool) -> str:
    row = "norm" if is_norm else "PH function"
    col = "Ad-invariant" if ad_invariant else "not Ad-invariant"
    cell = CELL_ALL_GATES if ad_invariant else CELL_GEODESIC_GATES
    return f"{row}, {col}: {cell}"


def classification_line(report: InvarianceReport) -> str:
    yn = "yes" if report.ad_invariant else "no"
    cell = CELL_ALL_GATES if report.ad_invariant else CELL_GEODESIC_GATES
    return f"Ad-invariant: {yn} — {cell}"


def check_ad_invariance(func, n: int, samples: int = 200, seed: int = 0,
                        threshold: float = INVARIANCE_THRESHOLD,
                        norm_slack: float = NORM_SLACK) -> InvarianceReport:
    """Sample |F(V A V†) - F(A)| / F(A) over random pairs (A, V).

    Also samples the two norm axioms that are not implied by positive
    homogeneity (triangle inequality and F(-A) = F(A)) to fill ``is_norm``;
    definiteness is not tested.  Deterministic for a fixed seed.
    """
    if samples < 1:
        raise InvalidParameterError(f"samples must be >= 1, got {samples}")
    _require_matching_dim(func, n)
    rng = _as_rng(seed)
    worst = 0.0
    is_norm = True
    for _ in range(samples):
        a = random_algebra_element(n, rng)
        v = haar_su(n, rng)
        fa = con.evaluate(func, a, validate=False)
        fconj = con.evaluate(func, v @ a @ v.conj().T, validate=False)
        worst = max(worst, abs(fconj - fa) / (fa + 1e-300))
        if is_norm:
            b = random_algebra_element(n, rng)
            fb = con.evaluate(func, b, validate=False)
            fneg = con.evaluate(func, -a, validate=False)
            fsum = con.evaluate(func, a + b, validate=False)
            scale = 1.0 + fa + fb
            if abs(fneg - fa) > norm_slack * scale or fsum > fa + fb + norm_slack * scale:
                is_norm = False
    ad = worst < threshold
    return InvarianceReport(
        ad_invariant=ad, max_deviation=worst, samples=samples, is_norm=is_norm,
        table_cell=_table_cell(ad, is_norm),
        seed=seed if isinstance(seed, int) else -1, threshold=threshold)


# ---------------------------------------------------------------------------
# Fundamental tensor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TensorProbe:
    """Base point and relative finite-difference step for tensor evaluation."""

    base: np.ndarray
    step: float = FD_STEP

    def __post_init__(self):
        object.__setattr__(self, "base", require_algebra_element(self.base))
        if not (self.step > 0.0):
            raise InvalidParameterError(f"step must be positive, got {self.step}")


def _mixed_second(fsq, base, u, v, h: float) -> float:
    upp = fsq(base + h * u + h * v)
    upm = fsq(base + h * u - h * v)
    ump = fsq(base - h * u + h * v)
    umm = fsq(base - h * u - h * v)
    return (upp - upm - ump + umm) / (4.0 * h * h)


def fundamental_tensor_estimate(func, probe: TensorProbe, u, v,
                                tol: float = GEODESIC_THRESHOLD) -> tuple[float, float]:
    """Finite-difference fundamental tensor with an error estimate.

    g_X(u, v) = (1/2) d^2/ds dt F^2(X + s*u + t*v) at s = t = 0, computed by
    the symmetric four-point stencil at step h and h/2 (h relative to the
    Frobenius norm of the base point).  The half-step value is returned; the
    estimate |g_h - g_{h/2}|/3 is widened to the full disagreement when the
    two stencils differ by more than ten times ``tol``.
    """
    base = probe.base
    u = require_algebra_element(u)
    v = require_algebra_element(v)
    if u.shape != base.shape or v.shape != base.shape:
        raise DimensionMismatchError(
            f"direction shapes {u.shape}/{v.shape} do not match base {base.shape}")
    _require_matching_dim(func, base.shape[0])
    f0 = con.evaluate(func, base, validate=False)
    if not f0 > 0.0:
        raise InvalidParameterError(
            "fundamental tensor is undefined where F vanishes (origin of a "
            f"positive-homogeneous function): F(base) = {f0:.3e}")
    h = probe.step * float(np.linalg.norm(base))
    if h < 1e-12:
        raise StepUnderflowError(f"finite-difference step underflow: h = {h:.3e}")

    def fsq(a):
        return con.evaluate(func, a, validate=False) ** 2

    g_full = 0.5 * _mixed_second(fsq, base, u, v, h)
    g_half = 0.5 * _mixed_second(fsq, base, u, v, h / 2.0)
    disagreement = abs(g_full - g_half)
    uncertainty = disagreement / 3.0
    if disagreement > 10.0 * tol:
        uncertainty = disagreement
    return g_half, uncertainty


def fundamental_tensor(func, probe: TensorProbe, u, v) -> float:
    """Fundamental tensor g_X(u, v) of the constraint at the probe point."""
    value, _ = fundamental_tensor_estimate(func, probe, u, v)
    return value


# ---------------------------------------------------------------------------
# Geodesic checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicReport:
    """Residuals g_X(X, [X, T_i]) over the su basis, normalized by F(X)**2."""

    residuals: np.ndarray
    normalized_max: float
    passes: bool
    threshold: float
    step: float
    branch_shifts: Optional[tuple] = None


def geodesic_vector_check(func, x, step: float = FD_STEP,
                          threshold: float = GEODESIC_THRESHOLD) -> GeodesicReport:
    """Test whether X generates a critical one-parameter flow of the
    constraint's action, i.e. whether a constant Hamiltonian along X is a
    candidate time-optimal drive."""
    x = require_algebra_element(x)
    _require_matching_dim(func, x.shape[0])
    fx = con.evaluate(func, x, validate=False)
    if not fx > 0.0:
        raise InvalidParameterError(f"geodesic check needs F(X) > 0, got {fx:.3e}")
    probe = TensorProbe(base=x, step=step)
    basis = su_basis(x.shape[0])
    residuals = np.array([
        fundamental_tensor(func, probe, x, commutator(x, t)) for t in basis
    ])
    normalized_max = float(np.max(np.abs(residuals)) / fx ** 2)
    return GeodesicReport(residuals=residuals, normalized_max=normalized_max,
                          passes=normalized_max < threshold,
                          threshold=threshold, step=step)


def gate_geodesic_check(func, gate, step: float = FD_STEP,
                        threshold: float = GEODESIC_THRESHOLD,
                        branch_sweep: int = 0) -> GeodesicReport:
    """Geodesic check at the logarithm of a gate.

    A passing report means the gate admits a time-optimal constant drive
    under this constraint, so no pulse-shaping search is needed for it.  By
    default only the principal logarithm is probed; ``branch_sweep`` > 0
    checks every branch with winding up to that bound and reports the best.
    """
    gate = require_special_unitary(gate)
    if is_identity(gate):
        raise IdentityGateError("geodesic check is undefined for the identity gate")
    if branch_sweep <= 0:
        branch = principal_log(gate)
        report = geodesic_vector_check(func, branch.value, step=step, threshold=threshold)
        return GeodesicReport(residuals=report.residuals,
                              normalized_max=report.normalized_max,
                              passes=report.passes, threshold=threshold, step=step,
                              branch_shifts=tuple(branch.shifts.tolist()))
    best = None
    for branch in log_branches(gate, branch_sweep):
        rep = geodesic_vector_check(func, branch.value, step=step, threshold=threshold)
        rep = GeodesicReport(residuals=rep.residuals, normalized_max=rep.normalized_max,
                             passes=rep.passes, threshold=threshold, step=step,
                             branch_shifts=tuple(branch.shifts.tolist()))
        if best is None or rep.normalized_max < best.normalized_max:
            best = rep
    return best


# ---------------------------------------------------------------------------
# Generic probes
# ---------------------------------------------------------------------------

def kink_margin(func, a) -> float:
    """Distance-to-nonsmoothness heuristic for a constraint at a point.

    Finite differences of F**2 assert nothing at spectral kinks (eigenvalue
    collisions, zero crossings under odd or fractional powers, ties between
    max/min arms), so probes are only considered generic when this margin is
    comfortably positive.
    """
    w = np.linalg.eigvalsh(1j * np.asarray(a))
    margin = np.inf
    if isinstance(func, con.Schatten):
        if isinf(func.p):
            # kinks where an extreme eigenvalue degenerates or where the top
            # and bottom arms cross; on su(2) the arms coincide identically
            # (w_min = -w_max), so the crossing is not a kink there
            gaps = [float(w[-1] - w[-2]), float(w[1] - w[0])]
            if len(w) > 2:
                gaps.append(abs(float(w[-1] + w[0])))
            margin = min(gaps)
        else:
            even_integer = abs(func.p - round(func.p)) < 1e-12 and int(round(func.p)) % 2 == 0
            if not even_integer:
                # odd or fractional powers kink where an eigenvalue crosses zero
                margin = float(np.min(np.abs(w)))
    elif isinstance(func, (con.SpectralRange, con.GroundShiftedMoment)):
        margin = float(np.min(np.diff(w)))
    elif isinstance(func, con.EnergyUncertainty):
        margin = func.value(np.asarray(a))
    elif isinstance(func, con.Randers):
        margin = float(np.linalg.norm(a))
    elif isinstance(func, (con.Max, con.Min)):
        v1 = func.children[0].value(np.asarray(a))
        v2 = func.children[1].value(np.asarray(a))
        margin = abs(v1 - v2)
    if func.children:
        for child in func.children:
            margin = min(margin, kink_margin(child, a))
        if isinstance(func, (con.PowerMean, con.GeometricMean)):
            margin = min(margin, *(c.value(np.asarray(a)) for c in func.children))
    return margin


def sample_generic_probe(func, n: int, rng, scale: float = 2.0,
                         margin: float = GENERIC_MARGIN,
                         max_tries: int = 500) -> np.ndarray:
    """Random algebra element of roughly the given Frobenius norm at which
    the constraint is smooth enough for finite differencing."""
    rng = _as_rng(rng)
    for _ in range(max_tries):
        a = random_algebra_element(n, rng)
        a *= scale / float(np.linalg.norm(a))
        if kink_margin(func, a) > margin:
            return a
    raise QslError(f"no generic probe found within {max_tries} draws")
