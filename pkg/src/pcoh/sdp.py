"""Small dense semidefinite feasibility and minimisation.

The core is a primal-dual interior-point method (predictor-corrector, KSH
direction, dense normal-equation solves) over block-diagonal cones of modest
size.  Complex Hermitian data is handled through the real symmetric embedding
``[[Re X, -Im X], [Im X, Re X]]``; slack scalars ride along as 1x1 blocks.

Three public entry points wrap the core:

* :func:`psd_minimize`     -- min <C,X> over PSD X with affine trace constraints
* :func:`psd_feasibility`  -- does F0 + sum_i lam_i F_i admit a PSD point, lam >= 0
* :func:`maximize_lmi`     -- max b.y subject to C - sum_k y_k A_k >= 0

Every solve is deterministic: fixed iteration order, no randomisation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatchError, SolverFailure, ValidationError
from .linalg import as_hermitian

DEFAULT_TOL = 1e-9
MAX_ITERATIONS = 200
_STEP_FRACTION = 0.98
_ACCEPTABLE_RESIDUAL = 1e-7
_RAY_RATIO = 1e6

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_NUMERICAL_FAILURE = "numerical_failure"


def solver_tolerance(override: Optional[float] = None) -> float:
    """Effective complementarity target: argument, else PCOH_SOLVER_TOL, else 1e-9."""
    if override is not None:
        return float(override)
    env = os.environ.get("PCOH_SOLVER_TOL")
    if env:
        try:
            return float(env)
        except ValueError as exc:
            raise ValidationError(f"PCOH_SOLVER_TOL is not a float: {env!r}") from exc
    return DEFAULT_TOL


# ---------------------------------------------------------------------------
# standard-form core
# ---------------------------------------------------------------------------


@dataclass
class _CoreResult:
    status: str
    X: list
    y: np.ndarray
    S: list
    primal_objective: float
    dual_objective: float
    rel_gap: float
    primal_residual: float
    dual_residual: float
    iterations: int

    def residual_dict(self):
        return {
            "rel_gap": self.rel_gap,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "iterations": self.iterations,
        }


def _sym(m):
    return (m + m.T) / 2.0


def _binner(p, q):
    return float(sum((pb * qb).sum() for pb, qb in zip(p, q)))


def _bnorm(p):
    return float(np.sqrt(sum(float((pb * pb).sum()) for pb in p)))


def _max_step(x_blocks, dx_blocks):
    """Largest alpha with X + alpha*dX staying PSD, per block, via Cholesky.

    Returns 0 when a direction is unusable (non-finite or the iterate has
    numerically left the cone), which the main loop treats as a stall.
    """
    alpha = np.inf
    for xb, db in zip(x_blocks, dx_blocks):
        n = xb.shape[0]
        if n == 0:
            continue
        if not np.all(np.isfinite(db)):
            return 0.0
        jitter = 1e-14 * max(1.0, float(np.trace(xb)) / n)
        try:
            chol = np.linalg.cholesky(xb)
        except np.linalg.LinAlgError:
            try:
                chol = np.linalg.cholesky(xb + jitter * np.eye(n))
            except np.linalg.LinAlgError:
                return 0.0
        w = np.linalg.solve(chol, db)
        w = np.linalg.solve(chol, w.T).T
        lam_min = float(np.linalg.eigvalsh(_sym(w))[0])
        if lam_min < 0.0:
            alpha = min(alpha, -1.0 / lam_min)
    return alpha


def _solve_core(c_blocks, a_blocks, b, tol, max_iter=MAX_ITERATIONS):
    """Predictor-corrector interior point on min <C,X> s.t. A(X)=b, X >= 0."""
    m = len(b)
    nblocks = len(c_blocks)
    b = np.asarray(b, dtype=float)
    nu = sum(cb.shape[0] for cb in c_blocks)

    # per-block stack of constraint matrices, shape (m, nb, nb)
    stacked = [
        np.stack([a_blocks[k][ib] for k in range(m)]) if m else np.zeros((0,) + c_blocks[ib].shape)
        for ib in range(nblocks)
    ]

    def apply_a(xb):
        out = np.zeros(m)
        for ib in range(nblocks):
            out += np.einsum("kab,ba->k", stacked[ib], xb[ib])
        return out

    def apply_at(yv):
        return [np.einsum("k,kab->ab", yv, stacked[ib]) for ib in range(nblocks)]

    norm_c = _bnorm(c_blocks)
    norm_b = float(np.linalg.norm(b))
    a_norms = np.array([_bnorm(ak) for ak in a_blocks]) if m else np.zeros(0)

    scale_p = max(10.0, np.sqrt(nu))
    if m:
        scale_p = max(scale_p, float(np.max((1.0 + np.abs(b)) / (1.0 + a_norms))) * np.sqrt(nu))
    scale_d = max(10.0, np.sqrt(nu), norm_c, float(a_norms.max()) if m else 0.0)

    x = [scale_p * np.eye(cb.shape[0]) for cb in c_blocks]
    s = [scale_d * np.eye(cb.shape[0]) for cb in c_blocks]
    y = np.zeros(m)

    best = None

    for it in range(1, max_iter + 1):
        gap = _binner(x, s)
        mu = gap / nu
        r_p = b - apply_a(x)
        at_y = apply_at(y)
        r_d = [cb - sb - ab for cb, sb, ab in zip(c_blocks, s, at_y)]
        pobj = _binner(c_blocks, x)
        dobj = float(b @ y)

        pinf = float(np.linalg.norm(r_p)) / (1.0 + norm_b)
        dinf = _bnorm(r_d) / (1.0 + norm_c)
        rel_gap = gap / (1.0 + abs(pobj) + abs(dobj))
        worst = max(pinf, dinf, rel_gap)

        if best is None or worst < best[0]:
            best = (worst, [xb.copy() for xb in x], y.copy(), [sb.copy() for sb in s],
                    pobj, dobj, rel_gap, pinf, dinf, it)

        if worst <= tol:
            return _CoreResult(STATUS_OPTIMAL, x, y, s, pobj, dobj, rel_gap, pinf, dinf, it)

        # ray-based infeasibility heuristics
        if dobj > 0.0 and np.linalg.norm(y) > 1e4:
            hom = _bnorm([sb + ab for sb, ab in zip(s, at_y)])
            if dobj / max(hom, 1e-300) > _RAY_RATIO:
                return _CoreResult(STATUS_INFEASIBLE, x, y, s, pobj, dobj, rel_gap, pinf, dinf, it)
        if pobj < 0.0 and _bnorm(x) > 1e4 * scale_p:
            hom = float(np.linalg.norm(apply_a(x)))
            if -pobj / max(hom, 1e-300) > _RAY_RATIO:
                return _CoreResult(STATUS_UNBOUNDED, x, y, s, pobj, dobj, rel_gap, pinf, dinf, it)

        s_inv = []
        for sb in s:
            n = sb.shape[0]
            try:
                s_inv.append(np.linalg.inv(sb))
            except np.linalg.LinAlgError:
                s_inv.append(np.linalg.inv(sb + 1e-14 * np.eye(n)))

        # Schur complement M[j,k] = sum_b Tr(A_j X A_k S^-1)
        big_m = np.zeros((m, m))
        for ib in range(nblocks):
            t_stack = np.einsum("ij,kjl,lm->kim", x[ib], stacked[ib], s_inv[ib], optimize=True)
            big_m += np.einsum("jab,kba->jk", stacked[ib], t_stack, optimize=True)

        def newton(k_blocks):
            """Solve for (dx, dy, ds) with dX S + X dS = K linearised."""
            rhs = r_p.copy()
            for ib in range(nblocks):
                u = (k_blocks[ib] - x[ib] @ r_d[ib]) @ s_inv[ib]
                rhs -= np.einsum("jab,ba->j", stacked[ib], u)
            try:
                dy = np.linalg.solve(big_m, rhs)
            except np.linalg.LinAlgError:
                reg = 1e-12 * max(1.0, float(np.abs(big_m).max()))
                dy = np.linalg.solve(big_m + reg * np.eye(m), rhs)
            ds_at = apply_at(dy)
            ds = [r_d[ib] - ds_at[ib] for ib in range(nblocks)]
            dx = [_sym((k_blocks[ib] - x[ib] @ ds[ib]) @ s_inv[ib]) for ib in range(nblocks)]
            return dx, dy, ds

        # predictor (affine scaling)
        k_aff = [-(x[ib] @ s[ib]) for ib in range(nblocks)]
        dx_a, dy_a, ds_a = newton(k_aff)
        if not (np.all(np.isfinite(dy_a)) and all(np.all(np.isfinite(d)) for d in dx_a)):
            break
        ap_a = min(1.0, _max_step(x, dx_a))
        ad_a = min(1.0, _max_step(s, ds_a))
        gap_aff = _binner(
            [x[ib] + ap_a * dx_a[ib] for ib in range(nblocks)],
            [s[ib] + ad_a * ds_a[ib] for ib in range(nblocks)],
        )
        sigma = min(1.0, max(0.0, (gap_aff / gap)) ** 3) if gap > 0 else 0.1

        # corrector with second-order term
        k_cor = [
            sigma * mu * np.eye(x[ib].shape[0]) - x[ib] @ s[ib] - dx_a[ib] @ ds_a[ib]
            for ib in range(nblocks)
        ]
        dx, dy, ds = newton(k_cor)
        if not (np.all(np.isfinite(dy)) and all(np.all(np.isfinite(d)) for d in dx)):
            break
        alpha_p = min(1.0, _STEP_FRACTION * _max_step(x, dx))
        alpha_d = min(1.0, _STEP_FRACTION * _max_step(s, ds))
        if alpha_p < 1e-10 and alpha_d < 1e-10:
            break

        x = [_sym(x[ib] + alpha_p * dx[ib]) for ib in range(nblocks)]
        s = [_sym(s[ib] + alpha_d * ds[ib]) for ib in range(nblocks)]
        y = y + alpha_d * dy

    worst, bx, by, bs, pobj, dobj, rel_gap, pinf, dinf, bit = best
    status = STATUS_OPTIMAL if worst <= _ACCEPTABLE_RESIDUAL else STATUS_NUMERICAL_FAILURE
    return _CoreResult(status, bx, by, bs, pobj, dobj, rel_gap, pinf, dinf, bit)


# ---------------------------------------------------------------------------
# Hermitian embedding
# ---------------------------------------------------------------------------


def _embed(h):
    h = np.asarray(h, dtype=complex)
    re, im = h.real.copy(), h.imag.copy()
    return np.block([[re, -im], [im, re]])


def _unembed(mr, n):
    re = (mr[:n, :n] + mr[n:, n:]) / 2.0
    im = (mr[n:, :n] - mr[:n, n:]) / 2.0
    return as_hermitian(re + 1j * im, warn_tol=np.inf)


def _needs_embedding(mats):
    return any(np.abs(np.asarray(m, dtype=complex).imag).max(initial=0.0) > 0.0 for m in mats)


# ---------------------------------------------------------------------------
# public problem types
# ---------------------------------------------------------------------------


@dataclass
class AffinePsdProblem:
    """min <C,X> over X >= 0 with Tr(A_k X) = b_k and Tr(B_j X) >= c_j."""

    objective: np.ndarray
    equality_constraints: list
    inequality_constraints: list = field(default_factory=list)
    dim: int = 0

    def __post_init__(self):
        self.objective = as_hermitian(self.objective)
        if self.dim == 0:
            self.dim = self.objective.shape[0]
        if self.objective.shape[0] != self.dim:
            raise DimensionMismatchError("objective dimension does not match problem dim")
        self.equality_constraints = [
            (as_hermitian(a), float(v)) for a, v in self.equality_constraints
        ]
        self.inequality_constraints = [
            (as_hermitian(a), float(v)) for a, v in self.inequality_constraints
        ]
        for a, _ in self.equality_constraints + self.inequality_constraints:
            if a.shape[0] != self.dim:
                raise DimensionMismatchError("constraint dimension does not match problem dim")
        if not self.equality_constraints and not self.inequality_constraints:
            raise ValidationError("problem needs at least one constraint")


@dataclass
class SdpSolution:
    status: str
    X: Optional[np.ndarray]
    value: float
    duals: np.ndarray
    certificate_residuals: dict


def psd_minimize(problem: AffinePsdProblem, tol: Optional[float] = None) -> SdpSolution:
    """Solve an :class:`AffinePsdProblem`; inequalities get 1x1 slack blocks."""
    tol = solver_tolerance(tol)
    n = problem.dim
    eqs = problem.equality_constraints
    ineqs = problem.inequality_constraints
    mats = [problem.objective] + [a for a, _ in eqs] + [a for a, _ in ineqs]
    embed = _needs_embedding(mats)
    lift = _embed if embed else (lambda mm: np.asarray(mm).real.astype(float))
    bscale = 2.0 if embed else 1.0

    nslack = len(ineqs)
    zero_slacks = [np.zeros((1, 1)) for _ in range(nslack)]
    c_blocks = [lift(problem.objective)] + zero_slacks

    a_blocks = []
    b = []
    for a, v in eqs:
        a_blocks.append([lift(a)] + [np.zeros((1, 1)) for _ in range(nslack)])
        b.append(bscale * v)
    for j, (a, v) in enumerate(ineqs):
        slacks = [np.zeros((1, 1)) for _ in range(nslack)]
        slacks[j] = np.array([[-1.0]])
        a_blocks.append([lift(a)] + slacks)
        b.append(bscale * v)

    res = _solve_core(c_blocks, a_blocks, b, tol)
    if res.status in (STATUS_INFEASIBLE, STATUS_UNBOUNDED):
        return SdpSolution(res.status, None, float("nan"), res.y, res.residual_dict())

    xmat = _unembed(res.X[0], n) if embed else as_hermitian(res.X[0], warn_tol=np.inf)
    value = res.primal_objective / bscale
    eig_min = float(np.linalg.eigvalsh(xmat)[0])
    eq_res = max(
        (abs(float(np.trace(a @ xmat).real) - v) / (1.0 + abs(v)) for a, v in eqs),
        default=0.0,
    )
    ineq_res = max(
        (max(0.0, v - float(np.trace(a @ xmat).real)) for a, v in ineqs),
        default=0.0,
    )
    residuals = res.residual_dict()
    residuals.update(
        {
            "primal_psd_violation": max(0.0, -eig_min),
            "equality_residual": eq_res,
            "inequality_residual": ineq_res,
        }
    )
    status = res.status
    if status == STATUS_OPTIMAL and (
        eig_min < -1e-7 or eq_res > 1e-7 or ineq_res > 1e-7
    ):
        status = STATUS_NUMERICAL_FAILURE
    return SdpSolution(status, xmat, value, res.y, residuals)


# ---------------------------------------------------------------------------
# LMI form: max b.y  s.t.  C - sum_k y_k A_k >= 0 (+ sign / cap side blocks)
# ---------------------------------------------------------------------------


@dataclass
class LmiResult:
    status: str
    y: np.ndarray
    value: float
    primal_matrix: Optional[np.ndarray]
    primal_value: float
    residuals: dict


def maximize_lmi(
    b: Sequence[float],
    c_main: np.ndarray,
    a_main: Sequence[np.ndarray],
    nonneg: Sequence[int] = (),
    caps: Sequence[tuple] = (),
    tol: Optional[float] = None,
) -> LmiResult:
    """Maximise ``b . y`` subject to ``c_main - sum_k y_k a_main[k] >= 0``.

    ``nonneg`` lists variable indices constrained to y_k >= 0; ``caps`` holds
    ``(index, upper_bound)`` pairs.  The solver's primal block associated with
    the main LMI is returned (in original complex units) -- for prevision
    problems it is the optimising density matrix, for feasibility problems a
    separating functional.
    """
    tol = solver_tolerance(tol)
    b = np.asarray(b, dtype=float)
    m = len(b)
    if len(a_main) != m:
        raise DimensionMismatchError("one main-block coefficient required per variable")
    n = np.asarray(c_main).shape[0]
    mats = [c_main] + list(a_main)
    embed = _needs_embedding(mats)
    lift = _embed if embed else (lambda mm: np.asarray(mm).real.astype(float))

    side = [np.zeros((1, 1)) for _ in range(len(nonneg) + len(caps))]
    c_blocks = [lift(as_hermitian(c_main))] + side[: len(nonneg)] + [
        np.array([[float(ub)]]) for _, ub in caps
    ]
    a_blocks = []
    for k in range(m):
        blocks = [lift(as_hermitian(a_main[k]))]
        for idx in nonneg:
            blocks.append(np.array([[-1.0]]) if idx == k else np.zeros((1, 1)))
        for idx, _ in caps:
            blocks.append(np.array([[1.0]]) if idx == k else np.zeros((1, 1)))
        a_blocks.append(blocks)

    res = _solve_core(c_blocks, a_blocks, b, tol)
    scale = 2.0 if embed else 1.0
    primal = None
    if res.X is not None:
        primal = scale * (_unembed(res.X[0], n) if embed else as_hermitian(res.X[0], warn_tol=np.inf))
    return LmiResult(
        status=res.status,
        y=res.y,
        value=res.dual_objective,
        primal_matrix=primal,
        primal_value=res.primal_objective,
        residuals=res.residual_dict(),
    )


# ---------------------------------------------------------------------------
# feasibility of F0 + sum_i lam_i F_i >= 0 with lam >= 0
# ---------------------------------------------------------------------------

FEASIBLE_MARGIN = -1e-8
INFEASIBLE_MARGIN = -1e-6


@dataclass
class FeasibilityReport:
    margin: float
    multipliers: np.ndarray
    separating: Optional[np.ndarray]
    residuals: dict


def feasibility_margin(
    f0: np.ndarray, fs: Sequence[np.ndarray], tol: Optional[float] = None
) -> FeasibilityReport:
    """max t with F0 + sum lam_i F_i - t I >= 0, lam >= 0, t capped at 1.

    The margin is the optimal t; the primal block provides a separating
    functional (a PSD matrix sigma with <F0,sigma> < 0 <= <F_i,sigma>)
    whenever the margin is negative.
    """
    f0 = as_hermitian(f0)
    fs = [as_hermitian(f) for f in fs]
    n = f0.shape[0]
    for f in fs:
        if f.shape[0] != n:
            raise DimensionMismatchError("all feasibility matrices must share one dimension")
    p = len(fs)
    b = np.zeros(1 + p)
    b[0] = 1.0
    a_main = [np.eye(n, dtype=complex)] + [-f for f in fs]
    res = maximize_lmi(
        b,
        f0,
        a_main,
        nonneg=tuple(range(1, 1 + p)),
        caps=((0, 1.0),),
        tol=tol,
    )
    if res.status != STATUS_OPTIMAL:
        raise SolverFailure(
            f"feasibility solve ended with status {res.status}", residuals=res.residuals
        )
    t_opt = max(float(res.y[0]), -1e10)
    lam = np.maximum(res.y[1:], 0.0)
    sep = res.primal_matrix
    return FeasibilityReport(t_opt, lam, sep, res.residuals)


def psd_feasibility(
    f0: np.ndarray, fs: Sequence[np.ndarray], tol: Optional[float] = None
) -> Optional[np.ndarray]:
    """Multipliers lam >= 0 making F0 + sum lam_i F_i PSD, or None if impossible.

    Raises :class:`SolverFailure` on the ambiguous near-boundary band where
    the margin falls between the feasible and infeasible thresholds.
    """
    report = feasibility_margin(f0, fs, tol=tol)
    if report.margin >= FEASIBLE_MARGIN:
        return report.multipliers
    if report.margin < INFEASIBLE_MARGIN:
        return None
    raise SolverFailure(
        "feasibility margin is inconclusive",
        residuals={"margin": report.margin, **report.residuals},
    )
