"""Threshold location, condition-value curves, and trajectory integration.

Bisection operates on certification verdicts of built-in systems; every
probe is one full certification run.  Curves tabulate both small-gain
condition values over a parameter grid.  Simulation is fixed-step RK4
through the kernels in ``_accel``.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import InvalidParameter, NoFiniteGain, NonFinite, NoSignChange, SolverFailure
from .gains import gamma1, gamma2, gamma12, partitioned_gains_minimize
from .models import ExampleSystem
from .sdp import DEFAULT_EPS, SolverOptions
from .smallgain import (CERTIFIED, CONDITION_MARGIN, NOT_CERTIFIED, UNKNOWN,
                        certify)
from .compound_algebra import decompose

DEFAULT_BISECT_TOL = 1e-3
DEFAULT_STEP = 1e-2
DEFAULT_T_END = 500.0
# trailing window share and peak-to-peak level of the oscillation test
OSCILLATION_WINDOW = 0.2
OSCILLATION_LEVEL = 0.1
THOMAS_GUARD_PAD = 0.1
DEFAULT_GUARD_HALF_WIDTH = 100.0


@dataclass
class SweepResult:
    method: str
    parameter_grid: np.ndarray
    condition_values: np.ndarray
    verdicts: list = field(default_factory=list)
    threshold: float | None = None
    bracket: tuple | None = None
    tolerance_achieved: float | None = None
    columns: dict = field(default_factory=dict)
    unknown_encountered: bool = False
    # full probe reports aligned with parameter_grid (bisection only)
    reports: list = field(default_factory=list)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    step: float
    integrator: str = "RK4 fixed-step"


def _hull_route(method: str) -> str:
    return "direct" if method.lower() == "direct" else "modular"


def _probe(sys: ExampleSystem, method: str, param: float,
           eps: float, options: SolverOptions | None):
    model = sys.hull(param, route=_hull_route(method))
    report = certify(model, method, eps=eps, options=options)
    if report.verdict == UNKNOWN:
        # one retry at tightened tolerance before accepting Unknown
        tight = (options or SolverOptions()).tightened()
        report = certify(model, method, eps=eps, options=tight)
    return report


def bisect_threshold(sys: ExampleSystem, method: str, param_range,
                     direction: str | None = None,
                     tol: float = DEFAULT_BISECT_TOL,
                     eps: float = DEFAULT_EPS,
                     options: SolverOptions | None = None) -> SweepResult:
    """Locate the parameter where the certification verdict flips.

    ``direction`` is "increasing" when Certified verdicts lie at the high
    end of the range, "decreasing" when at the low end, or None to infer
    from the endpoints.  Raises NoSignChange when both endpoints agree
    (or contradict an explicit direction).  Unknown probes count toward
    the uncertified side without moving the verified bracket, so the
    reported bracket can be wider than ``tol`` when they occur.
    """
    if tol <= 0.0 or not math.isfinite(tol):
        raise InvalidParameter(f"tolerance must be positive, got {tol}")
    lo, hi = (float(param_range[0]), float(param_range[1]))
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise InvalidParameter(f"bad parameter range ({lo}, {hi})")

    probed: dict = {}

    def verdict_at(p: float) -> str:
        if p not in probed:
            probed[p] = _probe(sys, method, p, eps, options)
        return probed[p].verdict

    v_lo, v_hi = verdict_at(lo), verdict_at(hi)
    if CERTIFIED not in (v_lo, v_hi) or v_lo == v_hi:
        raise NoSignChange(
            f"no verdict flip on [{lo}, {hi}]: {v_lo} at both ends"
            if v_lo == v_hi else
            f"no Certified endpoint on [{lo}, {hi}]: {v_lo}, {v_hi}")
    inferred = "increasing" if v_hi == CERTIFIED else "decreasing"
    if direction is not None and direction != inferred:
        raise NoSignChange(
            f"endpoints certify in the {inferred} direction, expected "
            f"{direction}")

    certified_end = hi if inferred == "increasing" else lo
    other_end = lo if inferred == "increasing" else hi
    unknown_seen = False
    # verified endpoints of the final bracket
    best_certified = certified_end
    best_uncertified = other_end

    while abs(certified_end - other_end) > tol:
        mid = 0.5 * (certified_end + other_end)
        v = verdict_at(mid)
        if v == CERTIFIED:
            certified_end = mid
            best_certified = mid
        elif v == NOT_CERTIFIED:
            other_end = mid
            best_uncertified = mid
        else:
            unknown_seen = True
            other_end = mid

    grid = np.array(sorted(probed))
    values = np.array([probed[p].condition_value for p in grid])
    verdicts = [probed[p].verdict for p in grid]
    bracket = (best_certified, best_uncertified)
    return SweepResult(
        method=method,
        parameter_grid=grid,
        condition_values=values,
        verdicts=verdicts,
        threshold=0.5 * (best_certified + best_uncertified),
        bracket=bracket,
        tolerance_achieved=abs(bracket[1] - bracket[0]),
        unknown_encountered=unknown_seen,
        reports=[probed[p] for p in grid],
    )


def _curve_point(sys: ExampleSystem, param: float, eps: float,
                 options: SolverOptions | None) -> dict:
    out = {"param": param, "gamma1": math.nan, "gamma2": math.nan,
           "gamma12": math.nan, "Gamma1": math.nan, "Gamma2": math.nan,
           "verdict": UNKNOWN}
    try:
        decs = [decompose(v) for v in sys.hull(param).vertices]
        c1 = gamma1(decs, eps=eps, options=options)
        c2 = gamma2(decs, eps=eps, options=options)
        c12 = gamma12(decs, eps=eps, options=options)
        pg = partitioned_gains_minimize(
            decs, (c1.value ** 2, c2.value ** 2), eps=eps, options=options)
    except NoFiniteGain:
        out["verdict"] = NOT_CERTIFIED
        out["Gamma1"] = out["Gamma2"] = math.inf
        return out
    except SolverFailure:
        return out
    out["gamma1"] = c1.value
    out["gamma2"] = c2.value
    out["gamma12"] = c12.value
    out["Gamma1"] = pg.objective
    out["Gamma2"] = c12.value ** 2 * (c1.value ** 2 + c2.value ** 2)
    out["verdict"] = (CERTIFIED if out["Gamma1"] < 1.0 - CONDITION_MARGIN
                      else NOT_CERTIFIED)
    return out


def curve(sys: ExampleSystem, param_grid, eps: float = DEFAULT_EPS,
          options: SolverOptions | None = None, jobs: int = 1) -> SweepResult:
    """Tabulate gains and both condition values over a parameter grid.

    The verdict column follows the weighted-channel condition (the
    tighter of the two).  Solver failures leave NaN rows.
    """
    grid = [float(p) for p in param_grid]
    if not grid:
        raise InvalidParameter("empty parameter grid")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(
                lambda p: _curve_point(sys, p, eps, options), grid))
    else:
        rows = [_curve_point(sys, p, eps, options) for p in grid]
    columns = {key: np.array([r[key] for r in rows])
               for key in ("param", "gamma1", "gamma2", "gamma12",
                           "Gamma1", "Gamma2")}
    columns["verdict"] = [r["verdict"] for r in rows]
    return SweepResult(
        method="curve",
        parameter_grid=np.array(grid),
        condition_values=columns["Gamma1"],
        verdicts=columns["verdict"],
        columns=columns,
    )


def default_guard_box(sys: ExampleSystem) -> np.ndarray:
    """Per-state guard bounds: the invariant box padded for Thomas
    systems, a wide symmetric box otherwise."""
    box = sys.invariant_box()
    if box is None:
        w = DEFAULT_GUARD_HALF_WIDTH
        return np.array([[-w, w]] * sys.n)
    box = np.asarray(box, dtype=float)
    return box + np.array([-THOMAS_GUARD_PAD, THOMAS_GUARD_PAD])


def simulate(sys: ExampleSystem, x0, t_end: float = DEFAULT_T_END,
             step: float = DEFAULT_STEP, guard_box=None) -> Trajectory:
    """Integrate the system from x0 with fixed-step RK4.

    Raises NonFinite when the state leaves the guard box or stops being
    finite (divergence flag).
    """
    if step <= 0.0 or not math.isfinite(step):
        raise InvalidParameter(f"step must be positive, got {step}")
    if t_end <= 0.0 or not math.isfinite(t_end):
        raise InvalidParameter(f"t_end must be positive, got {t_end}")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.n,):
        raise InvalidParameter(
            f"x0 must have shape ({sys.n},), got {x0.shape}")
    guard = np.asarray(default_guard_box(sys) if guard_box is None
                       else guard_box, dtype=float)

    perm = np.array(sys.kernel_perm)
    x0_k = np.empty_like(x0)
    x0_k[perm] = x0
    guard_k = np.empty_like(guard)
    guard_k[perm] = guard

    n_steps = int(round(t_end / step))
    kernel = _accel.trajectory_kernel()
    states_k, code, idx = kernel(
        sys.kernel_id, float(sys.parameter), x0_k, float(step), n_steps,
        np.ascontiguousarray(guard_k[:, 0]),
        np.ascontiguousarray(guard_k[:, 1]))
    if code != 0:
        raise NonFinite(
            f"trajectory left the guard box at t = {idx * step:.6g}")
    times = step * np.arange(n_steps + 1)
    return Trajectory(times=times, states=states_k[:, perm], step=step)


def oscillation_amplitude(traj: Trajectory, coord: int = 0,
                          window: float = OSCILLATION_WINDOW) -> float:
    """Peak-to-peak amplitude of one coordinate over the trailing window."""
    m = traj.states.shape[0]
    tail = traj.states[int(m * (1.0 - window)):, coord]
    return float(tail.max() - tail.min())


def sustained_oscillation(traj: Trajectory, coord: int = 0,
                          level: float = OSCILLATION_LEVEL) -> bool:
    return oscillation_amplitude(traj, coord) > level


def curve_to_csv(result: SweepResult) -> str:
    """Deterministic CSV of a curve sweep, 12 significant digits."""
    cols = result.columns
    lines = ["param,gamma1,gamma2,gamma12,Gamma1,Gamma2,verdict"]
    for i in range(len(result.parameter_grid)):
        nums = ",".join(_fmt(cols[k][i]) for k in
                        ("param", "gamma1", "gamma2", "gamma12",
                         "Gamma1", "Gamma2"))
        lines.append(f"{nums},{cols['verdict'][i]}")
    return "\n".join(lines) + "\n"


def trajectory_to_csv(traj: Trajectory) -> str:
    n = traj.states.shape[1]
    lines = ["t," + ",".join(f"x{i + 1}" for i in range(n))]
    for t, row in zip(traj.times, traj.states):
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in row]))
    return "\n".join(lines) + "\n"


def _fmt(v: float) -> str:
    return f"{float(v):.12g}"
