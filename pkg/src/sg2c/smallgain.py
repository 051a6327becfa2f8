"""Certification of 2-contraction for polytopic interconnections.

Four routes: the weighted two-channel condition (thm1), the single
interconnection-gain condition (thm2), the scalar degenerate case (n3),
and the monolithic compound LMI (direct).  Certified verdicts carry an
assembled block-diagonal Lyapunov matrix that an independent eigenvalue
oracle re-checks at every vertex.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .compound_algebra import (PartitionedMatrix, decompose,
                               permutation_to_compound,
                               second_additive_compound)
from .errors import InvalidPartition, NoFiniteGain, SolverFailure
from .gains import (GainCertificate, PartitionedGains, gamma1, gamma2,
                    gamma12, partitioned_gains_minimize)
from . import sdp
from .sdp import DEFAULT_EPS, SolverOptions

CERTIFIED = "Certified"
NOT_CERTIFIED = "NotCertified"
UNKNOWN = "Unknown"

# "< 1" realized with a fixed margin against solver tolerance noise
CONDITION_MARGIN = 1e-6
# slack bound for the margin-maximizing direct pass; caps the implied
# rescaling of P near feasibility boundaries
DIRECT_MARGIN_CAP = 1e-2
VERIFY_MARGIN = 1e-9


@dataclass(frozen=True)
class PolytopicModel:
    """Finite vertex family of partitioned matrices covering a Jacobian hull."""

    vertices: tuple
    description: str = ""
    invariant_box: tuple | None = None
    parameter: float | None = None

    def __post_init__(self):
        vs = tuple(self.vertices)
        object.__setattr__(self, "vertices", vs)
        if not vs:
            raise InvalidPartition("vertex list is empty")
        n1, n2 = vs[0].n1, vs[0].n2
        for v in vs:
            if (v.n1, v.n2) != (n1, n2):
                raise InvalidPartition("vertices disagree on the partition")

    @property
    def n1(self) -> int:
        return self.vertices[0].n1

    @property
    def n2(self) -> int:
        return self.vertices[0].n2

    @property
    def n(self) -> int:
        return self.n1 + self.n2


@dataclass
class CertificationReport:
    method: str  # Thm1 | Thm2 | Thm3 | Thm4 | N3Special | Direct
    verdict: str  # Certified | NotCertified | Unknown
    condition_value: float
    gains: dict = field(default_factory=dict)
    assembled_lyapunov: np.ndarray | None = None
    multipliers: dict = field(default_factory=dict)
    n1: int = 0
    n2: int = 0
    vertex_count: int = 0
    diagnostics: dict = field(default_factory=dict)


def _decompositions(model: PolytopicModel):
    return [decompose(v) for v in model.vertices]


def _report(method, model, verdict, condition, **kw):
    return CertificationReport(
        method=method, verdict=verdict, condition_value=condition,
        n1=model.n1, n2=model.n2, vertex_count=len(model.vertices), **kw)


def certify_thm1(model: PolytopicModel, eps: float = DEFAULT_EPS,
                 options: SolverOptions | None = None) -> CertificationReport:
    """Weighted-channel route: minimize g1^2*eta1sq + g2^2*eta2sq < 1.

    Certified reports carry blockdiag(lam1 P1, P12, lam2 P2) with
    lam_i = eta_isq + sigma and sigma at half its admissible bound.
    """
    method = "Thm1" if len(model.vertices) == 1 else "Thm3"
    try:
        decs = _decompositions(model)
        c1 = gamma1(decs, eps=eps, options=options)
        c2 = gamma2(decs, eps=eps, options=options)
        pg = partitioned_gains_minimize(
            decs, (c1.value ** 2, c2.value ** 2), eps=eps, options=options)
    except NoFiniteGain as exc:
        return _report(method, model, NOT_CERTIFIED, math.inf,
                       diagnostics={"reason": str(exc)})
    except SolverFailure as exc:
        return _report(method, model, UNKNOWN, math.nan,
                       diagnostics={"reason": str(exc)})

    condition = pg.objective
    gains = {"gamma1": c1, "gamma2": c2, "partitioned": pg}
    if condition >= 1.0 - CONDITION_MARGIN:
        return _report(method, model, NOT_CERTIFIED, condition, gains=gains)

    gsq = c1.value ** 2 + c2.value ** 2
    sigma = 1.0 if gsq <= 1e-12 else (1.0 - condition) / (2.0 * gsq)
    lam1 = pg.eta1sq + sigma
    lam2 = pg.eta2sq + sigma
    lyap = _blockdiag(lam1 * c1.P, pg.P12, lam2 * c2.P)
    return _report(method, model, CERTIFIED, condition, gains=gains,
                   assembled_lyapunov=lyap,
                   multipliers={"lambda1": lam1, "lambda2": lam2,
                                "sigma": sigma})


def certify_thm2(model: PolytopicModel, eps: float = DEFAULT_EPS,
                 options: SolverOptions | None = None) -> CertificationReport:
    """Single interconnection-gain route: g12 * sqrt(g1^2 + g2^2) < 1.

    Condition value is the squared form Gamma2 = g12^2 (g1^2 + g2^2);
    certificates use blockdiag(P1, lam P12, P2) with lam at the geometric
    mean of its admissible window.
    """
    method = "Thm2" if len(model.vertices) == 1 else "Thm4"
    try:
        decs = _decompositions(model)
        c1 = gamma1(decs, eps=eps, options=options)
        c2 = gamma2(decs, eps=eps, options=options)
        c12 = gamma12(decs, eps=eps, options=options)
    except NoFiniteGain as exc:
        return _report(method, model, NOT_CERTIFIED, math.inf,
                       diagnostics={"reason": str(exc)})
    except SolverFailure as exc:
        return _report(method, model, UNKNOWN, math.nan,
                       diagnostics={"reason": str(exc)})

    gsq = c1.value ** 2 + c2.value ** 2
    condition = c12.value ** 2 * gsq
    gains = {"gamma1": c1, "gamma2": c2, "gamma12": c12}
    if c12.value * math.sqrt(gsq) >= 1.0 - CONDITION_MARGIN:
        return _report(method, model, NOT_CERTIFIED, condition, gains=gains)

    lam = _lambda_window_choice(gsq, c12.value)
    lyap = _blockdiag(c1.P, lam * c12.P, c2.P)
    return _report(method, model, CERTIFIED, condition, gains=gains,
                   assembled_lyapunov=lyap, multipliers={"lambda": lam})


def _lambda_window_choice(gsq: float, g12: float) -> float:
    # admissible window (g1^2 + g2^2, 1/g12^2); geometric mean when both
    # ends are informative
    lo = gsq
    hi = math.inf if g12 <= 1e-12 else 1.0 / g12 ** 2
    if not math.isfinite(hi):
        return lo + 1.0
    if lo <= 1e-12:
        return hi / 2.0
    return math.sqrt(lo * hi)


def certify_n3(model: PolytopicModel, eps: float = DEFAULT_EPS,
               options: SolverOptions | None = None) -> CertificationReport:
    """Degenerate n=3 route with a scalar first subsystem.

    The surviving compound block is scalar; certification reduces to
    gamma12 * gamma_scalar < 1.  Gain keys follow the degenerate modular
    display: the scalar block is reported as gamma1.
    """
    if model.n1 != 1 or model.n2 != 2:
        raise InvalidPartition(
            f"n=3 route needs partition (1, 2), got ({model.n1}, {model.n2})")
    try:
        decs = _decompositions(model)
        # with an empty first pair-block the scalar dynamics live in the
        # (a22c2, b2) slot and the single input channel of ksum is g2
        c_sc = gamma2(decs, eps=eps, options=options)
        c12 = gamma12(decs, eps=eps, options=options)
    except NoFiniteGain as exc:
        return _report("N3Special", model, NOT_CERTIFIED, math.inf,
                       diagnostics={"reason": str(exc)})
    except SolverFailure as exc:
        return _report("N3Special", model, UNKNOWN, math.nan,
                       diagnostics={"reason": str(exc)})

    condition = (c12.value * c_sc.value) ** 2
    gains = {
        "gamma1": GainCertificate("Gamma1", c_sc.value, c_sc.P,
                                  c_sc.vertex_count, c_sc.eps),
        "gamma12": c12,
    }
    if c12.value * c_sc.value >= 1.0 - CONDITION_MARGIN:
        return _report("N3Special", model, NOT_CERTIFIED, condition,
                       gains=gains)

    lam = _lambda_window_choice(c_sc.value ** 2, c12.value)
    lyap = _blockdiag(np.zeros((0, 0)), lam * c12.P, c_sc.P)
    return _report("N3Special", model, CERTIFIED, condition, gains=gains,
                   assembled_lyapunov=lyap, multipliers={"lambda": lam})


def certify_direct(model: PolytopicModel,
                   options: SolverOptions | None = None) -> CertificationReport:
    """Monolithic baseline: one P >= I with V^[2]T P + P V^[2] <= 0
    at every vertex.

    A margin-maximizing pass (slack bounded by DIRECT_MARGIN_CAP) keeps
    certificates verifiable away from feasibility boundaries; a plain
    feasibility pass covers marginal families the slack formulation
    rejects.  The certificate lives in the lexicographic compound
    ordering; condition_value is the measured worst eigenvalue margin
    (negative when strictly certified).
    """
    comps = [second_additive_compound(v.entries) for v in model.vertices]
    q = comps[0].shape[0]
    eye = np.eye(q)

    def attempt(with_margin: bool):
        p = sdp.LmiProblem()
        P = p.symmetric("P", q)
        if with_margin:
            t = p.scalar("t", lower=0.0, upper=DIRECT_MARGIN_CAP)
            p.minimize(-t)
        for C in comps:
            lhs = C.T @ P + P @ C
            if with_margin:
                lhs = lhs + 2.0 * t * eye
            p.neg_semidef(lhs)
        p.pos_semidef(P - eye)
        return sdp.solve(p, options)

    sol = attempt(True)
    if not sol.ok:
        sol = attempt(False)
    if sol.status == sdp.INFEASIBLE:
        return _report("Direct", model, NOT_CERTIFIED, math.inf)
    if not sol.ok:
        return _report("Direct", model, UNKNOWN, math.nan,
                       diagnostics={"reason": "solver failed"})
    P_val = sol.values["P"]
    margin = max(np.linalg.eigvalsh(C.T @ P_val + P_val @ C)[-1] for C in comps)
    return _report("Direct", model, CERTIFIED, float(margin),
                   assembled_lyapunov=P_val)


_METHODS = {
    "thm1": certify_thm1,
    "thm2": certify_thm2,
    "n3": certify_n3,
    "direct": certify_direct,
}


def certify(model: PolytopicModel, method: str, eps: float = DEFAULT_EPS,
            options: SolverOptions | None = None) -> CertificationReport:
    """Dispatch a certification route by name: thm1, thm2, n3, direct."""
    key = method.lower()
    if key not in _METHODS:
        raise ValueError(f"unknown method {method!r}")
    if key == "direct":
        return certify_direct(model, options)
    return _METHODS[key](model, eps=eps, options=options)


def verify_certificate(report: CertificationReport,
                       model: PolytopicModel) -> bool:
    """Independent eigenvalue re-check of a Certified report.

    Rebuilds the decomposition blocks and the permutation at every vertex
    and checks both equivalent Lyapunov inequalities with margin 1e-9.
    Returns False on any failure; never raises.
    """
    if report.verdict != CERTIFIED or report.assembled_lyapunov is None:
        return False
    native = np.asarray(report.assembled_lyapunov, dtype=float)
    try:
        if np.linalg.eigvalsh(native)[0] <= 0.0:
            return False
        for v in model.vertices:
            dec = decompose(v)
            S = permutation_to_compound(dec)
            A2 = second_additive_compound(v.entries)
            curly = dec.assembled()
            if report.method == "Direct":
                Q = native
                P_stacked = S.T @ native @ S
            else:
                P_stacked = native
                Q = S @ native @ S.T
            if np.linalg.eigvalsh(curly.T @ P_stacked + P_stacked @ curly)[-1] > -VERIFY_MARGIN:
                return False
            if np.linalg.eigvalsh(A2.T @ Q + Q @ A2)[-1] > -VERIFY_MARGIN:
                return False
    except Exception:
        return False
    return True


def matrix_to_dict(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]),
            "data": M.reshape(-1).tolist()}


def report_to_dict(report: CertificationReport) -> dict:
    """JSON-ready view of a report; matrices as row-major arrays."""
    gains = {}
    for key, g in report.gains.items():
        if isinstance(g, PartitionedGains):
            gains[key] = {
                "eta1sq": g.eta1sq, "eta2sq": g.eta2sq,
                "objective": g.objective, "eps": g.eps,
                "vertex_count": g.vertex_count,
                "P12": matrix_to_dict(g.P12),
            }
        else:
            gains[key] = {
                "kind": g.kind, "value": g.value, "eps": g.eps,
                "vertex_count": g.vertex_count,
                "P": matrix_to_dict(g.P),
            }
    doc = {
        "method": report.method,
        "verdict": report.verdict,
        "condition_value": report.condition_value,
        "n1": report.n1,
        "n2": report.n2,
        "vertex_count": report.vertex_count,
        "gains": gains,
        "multipliers": dict(report.multipliers),
        "diagnostics": dict(report.diagnostics),
    }
    if report.assembled_lyapunov is not None:
        doc["assembled_lyapunov"] = matrix_to_dict(report.assembled_lyapunov)
    return doc


def _blockdiag(*blocks) -> np.ndarray:
    blocks = [np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks]
    m = sum(b.shape[0] for b in blocks)
    out = np.zeros((m, m))
    at = 0
    for b in blocks:
        d = b.shape[0]
        out[at:at + d, at:at + d] = b
        at += d
    return out
