"""Minimal linear-SDP layer: symmetric matrix unknowns, scalar unknowns,
affine matrix-inequality constraints, linear objectives.

Every returned certificate is re-validated by an eigenvalue check,
independent of the backend; callers can trust status over raw solver
output.
"""

import os
import warnings
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from .errors import InvalidDimension, NoFiniteGain, SolverFailure

# status values
OPTIMAL = "Optimal"
FEASIBLE = "Feasible"
INFEASIBLE = "Infeasible"
NUMERICAL_FAILURE = "NumericalFailure"

SOLVER_TOL_ENV = "SG2C_SOLVER_TOL"
DEFAULT_EPS = 0.01
_SOLVER_ORDER = ("CLARABEL", "SCS", "CVXOPT")


def _env_tolerance():
    raw = os.environ.get(SOLVER_TOL_ENV)
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        return None


@dataclass
class SolverOptions:
    """Backend-independent solve settings.

    ``tolerance`` None means backend defaults (or the value of the
    environment variable SG2C_SOLVER_TOL when set).
    """

    tolerance: float | None = field(default_factory=_env_tolerance)
    max_iters: int | None = None
    verbose: bool = False
    solvers: tuple = _SOLVER_ORDER
    psd_cone_cap: int = 200
    violation_tolerance: float = 1e-7

    def tightened(self, factor: float = 100.0) -> "SolverOptions":
        base = self.tolerance if self.tolerance is not None else 1e-8
        return SolverOptions(
            tolerance=base / factor,
            max_iters=self.max_iters,
            verbose=self.verbose,
            solvers=self.solvers,
            psd_cone_cap=self.psd_cone_cap,
            violation_tolerance=self.violation_tolerance,
        )


@dataclass
class SdpSolution:
    status: str
    values: dict
    objective_value: float | None
    max_constraint_violation: float

    @property
    def ok(self) -> bool:
        return self.status in (OPTIMAL, FEASIBLE)


class LmiProblem:
    """Container for one linear SDP.

    Matrix unknowns are symmetric; constraints are affine expressions
    required negative (or positive) semidefinite.  Symmetry of each block
    is the caller's responsibility and is re-checked numerically at
    validation time.
    """

    def __init__(self):
        self.matrix_vars: list[tuple[str, int]] = []
        self.scalar_vars: list[tuple[str, float | None]] = []
        self._vars: dict[str, cp.Variable] = {}
        self._constraints: list[tuple[str, object]] = []
        self._extra: list = []
        self._objective = None

    def symmetric(self, name: str, dim: int) -> cp.Variable:
        if name in self._vars:
            raise ValueError(f"variable {name!r} already declared")
        v = cp.Variable((dim, dim), symmetric=True, name=name)
        self._vars[name] = v
        self.matrix_vars.append((name, dim))
        return v

    def scalar(self, name: str, lower: float | None = None,
               upper: float | None = None) -> cp.Variable:
        if name in self._vars:
            raise ValueError(f"variable {name!r} already declared")
        v = cp.Variable(name=name)
        self._vars[name] = v
        self.scalar_vars.append((name, lower))
        if lower is not None:
            self._extra.append(v >= lower)
        if upper is not None:
            self._extra.append(v <= upper)
        return v

    def neg_semidef(self, expr):
        """Require expr <= 0 in the semidefinite order."""
        self._constraints.append(("nsd", expr))

    def pos_semidef(self, expr):
        """Require expr >= 0 in the semidefinite order."""
        self._constraints.append(("psd", expr))

    def minimize(self, expr):
        self._objective = expr

    @property
    def cone_dimension(self) -> int:
        return sum(e.shape[0] for _, e in self._constraints)


def _solver_kwargs(solver: str, opts: SolverOptions) -> dict:
    kw = {}
    t = opts.tolerance
    if t is not None:
        if solver == "CLARABEL":
            kw.update(tol_gap_abs=t, tol_gap_rel=t, tol_feas=t)
        elif solver == "SCS":
            kw.update(eps=t)
        elif solver == "CVXOPT":
            kw.update(abstol=t, reltol=t, feastol=t)
    if opts.max_iters is not None:
        if solver == "SCS":
            kw["max_iters"] = opts.max_iters
        else:
            kw["max_iter"] = opts.max_iters
    return kw


def _violation(problem: LmiProblem) -> float:
    worst = 0.0
    for kind, expr in problem._constraints:
        val = np.asarray(expr.value, dtype=float)
        sym = 0.5 * (val + val.T)
        eig = np.linalg.eigvalsh(sym)
        worst = max(worst, eig[-1] if kind == "nsd" else -eig[0])
    return max(worst, 0.0)


def solve(problem: LmiProblem, options: SolverOptions | None = None) -> SdpSolution:
    """Solve an LmiProblem, trying backends in order.

    Returns a solution whose status reflects post-hoc certificate
    validation, not just the backend's claim.  Infeasible is reported only
    when a backend produces an infeasibility certificate; stalls and
    unvalidatable answers map to NumericalFailure.
    """
    opts = options or SolverOptions()
    if problem.cone_dimension > opts.psd_cone_cap:
        raise InvalidDimension(
            f"total PSD cone dimension {problem.cone_dimension} exceeds cap "
            f"{opts.psd_cone_cap}"
        )

    constraints = [e << 0 if kind == "nsd" else e >> 0
                   for kind, e in problem._constraints]
    constraints += problem._extra
    objective = cp.Minimize(problem._objective if problem._objective is not None else 0)
    prob = cp.Problem(objective, constraints)

    infeasible_seen = False
    for solver in opts.solvers:
        if solver not in cp.installed_solvers():
            continue
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                prob.solve(solver=solver, verbose=opts.verbose,
                           **_solver_kwargs(solver, opts))
        except (cp.error.SolverError, ValueError, ArithmeticError):
            continue
        if prob.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            violation = _violation(problem)
            if violation <= opts.violation_tolerance:
                values = {name: np.asarray(v.value, dtype=float) if v.ndim else float(v.value)
                          for name, v in problem._vars.items()}
                exact = prob.status == cp.OPTIMAL
                has_objective = problem._objective is not None
                status = OPTIMAL if (exact and has_objective) else FEASIBLE
                obj = float(prob.value) if has_objective else None
                return SdpSolution(status, values, obj, violation)
            continue
        if prob.status == cp.INFEASIBLE:
            infeasible_seen = True
            break
        # inaccurate infeasibility or unboundedness: try the next backend
        continue

    if infeasible_seen:
        return SdpSolution(INFEASIBLE, {}, None, np.inf)
    return SdpSolution(NUMERICAL_FAILURE, {}, None, np.inf)


def _as_vertex_list(A):
    if isinstance(A, (list, tuple)):
        return [np.asarray(a, dtype=float) for a in A]
    return [np.asarray(A, dtype=float)]


def min_gain_squared(A, B, eps: float = DEFAULT_EPS,
                     options: SolverOptions | None = None):
    """Smallest certified L2 gain from input to state.

    Minimizes g2 subject to [[A^T P + P A + I, P B], [B^T P, -g2 I]] <= 0
    and P >= eps I, replicated over vertices when A, B are lists sharing a
    common P.

    Returns
    -------
    (gamma, P) : (float, ndarray)
        gamma = sqrt(g2*); P re-validated at gamma inflated by 1e-6.

    Raises
    ------
    NoFiniteGain
        If the LMI family is infeasible for every finite gain.
    SolverFailure
        If no backend produces a validatable answer.
    """
    As = _as_vertex_list(A)
    Bs = _as_vertex_list(B)
    if len(Bs) == 1 and len(As) > 1:
        Bs = Bs * len(As)
    if len(As) != len(Bs):
        raise ValueError("vertex lists for A and B differ in length")
    n = As[0].shape[0]
    if n == 0:
        return 0.0, np.zeros((0, 0))

    opts = options or SolverOptions()
    m = Bs[0].shape[1] if Bs[0].ndim == 2 else 0
    if m == 0 or all(not Bk.any() for Bk in Bs):
        # zero input map: the gain is exactly 0 once A admits a Lyapunov
        # certificate with the unit output weight
        p = LmiProblem()
        P = p.symmetric("P", n)
        for Ak in As:
            p.neg_semidef(Ak.T @ P + P @ Ak + np.eye(n))
        p.pos_semidef(P - eps * np.eye(n))
        sol = solve(p, opts)
        if sol.status == INFEASIBLE:
            raise NoFiniteGain("stability LMI infeasible at every vertex")
        if not sol.ok:
            raise SolverFailure("gain LMI solve failed")
        return 0.0, sol.values["P"]

    p = LmiProblem()
    P = p.symmetric("P", n)
    g2 = p.scalar("g2", lower=0.0)
    for Ak, Bk in zip(As, Bs):
        block = cp.bmat([
            [Ak.T @ P + P @ Ak + np.eye(n), P @ Bk],
            [Bk.T @ P, -g2 * np.eye(m)],
        ])
        p.neg_semidef(block)
    p.pos_semidef(P - eps * np.eye(n))
    p.minimize(g2)
    sol = solve(p, opts)
    if sol.status == INFEASIBLE:
        raise NoFiniteGain("gain LMI infeasible for every finite gain")
    if not sol.ok:
        raise SolverFailure("gain LMI solve failed")

    g2_opt = max(float(sol.values["g2"]), 0.0)
    P_opt = sol.values["P"]
    gamma = float(np.sqrt(g2_opt))
    if not _gain_certificate_valid(As, Bs, P_opt, g2_opt, opts.violation_tolerance):
        raise SolverFailure("gain certificate failed re-validation")
    return gamma, P_opt


def _gain_certificate_valid(As, Bs, P, g2, tol) -> bool:
    # validated at the slightly inflated gain gamma (1 + 1e-6)
    g2_inflated = g2 * (1.0 + 1e-6) ** 2 + 1e-14
    n = P.shape[0]
    for Ak, Bk in zip(As, Bs):
        m = Bk.shape[1]
        top = np.hstack([Ak.T @ P + P @ Ak + np.eye(n), P @ Bk])
        bot = np.hstack([Bk.T @ P, -g2_inflated * np.eye(m)])
        block = np.vstack([top, bot])
        if np.linalg.eigvalsh(0.5 * (block + block.T))[-1] > tol:
            return False
    return True


def partitioned_gain_feasible(A, B1, B2, eta1sq: float, eta2sq: float,
                              eps: float = DEFAULT_EPS,
                              options: SolverOptions | None = None):
    """Feasibility of the two-channel gain LMI at fixed squared gains.

    The block [[A^T P + P A + I, P B1, P B2], [B1^T P, -eta1sq I, 0],
    [B2^T P, 0, -eta2sq I]] <= 0 with P >= eps I, replicated over
    vertices.

    Returns (feasible, P_or_None); raises SolverFailure on numerical
    breakdown.
    """
    As = _as_vertex_list(A)
    B1s = _as_vertex_list(B1)
    B2s = _as_vertex_list(B2)
    if len(B1s) == 1 and len(As) > 1:
        B1s = B1s * len(As)
    if len(B2s) == 1 and len(As) > 1:
        B2s = B2s * len(As)
    n = As[0].shape[0]
    m1 = B1s[0].shape[1]
    m2 = B2s[0].shape[1]

    p = LmiProblem()
    P = p.symmetric("P", n)
    for Ak, B1k, B2k in zip(As, B1s, B2s):
        rows = [[Ak.T @ P + P @ Ak + np.eye(n)]]
        if m1:
            rows[0].append(P @ B1k)
        if m2:
            rows[0].append(P @ B2k)
        if m1:
            row = [B1k.T @ P, -eta1sq * np.eye(m1)]
            if m2:
                row.append(np.zeros((m1, m2)))
            rows.append(row)
        if m2:
            row = [B2k.T @ P]
            if m1:
                row.insert(1, np.zeros((m2, m1)))
            row.append(-eta2sq * np.eye(m2))
            rows.append(row)
        p.neg_semidef(cp.bmat(rows) if len(rows) > 1 or len(rows[0]) > 1 else rows[0][0])
    p.pos_semidef(P - eps * np.eye(n))
    sol = solve(p, options)
    if sol.status == INFEASIBLE:
        return False, None
    if not sol.ok:
        raise SolverFailure("partitioned gain LMI solve failed")
    return True, sol.values["P"]
