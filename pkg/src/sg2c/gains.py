"""Subsystem and interconnection gains certified by common-P LMIs.

Each gain is the smallest value for which one shared certificate matrix
satisfies the bounded-real-type LMI at every vertex of a polytopic family
(a single decomposition is the one-vertex case).
"""

from dataclasses import dataclass

import numpy as np

from .compound_algebra import ModularDecomposition
from .errors import SolverFailure
from .sdp import DEFAULT_EPS, SolverOptions, min_gain_squared
from . import sdp

# weight floor keeping zero-weighted gain variables bounded in the solver
_WEIGHT_FLOOR = 1e-9


@dataclass(frozen=True)
class GainCertificate:
    """A certified gain value with its Lyapunov-type matrix."""

    kind: str  # Gamma1 | Gamma2 | Gamma12 | Partitioned
    value: float | tuple
    P: np.ndarray
    vertex_count: int
    eps: float = DEFAULT_EPS


@dataclass(frozen=True)
class PartitionedGains:
    """Optimal squared channel gains for the weighted two-input problem."""

    eta1sq: float
    eta2sq: float
    P12: np.ndarray
    objective: float
    vertex_count: int
    eps: float = DEFAULT_EPS

    @property
    def certificate(self) -> GainCertificate:
        return GainCertificate("Partitioned", (self.eta1sq, self.eta2sq),
                               self.P12, self.vertex_count, self.eps)


def _as_list(d):
    if isinstance(d, ModularDecomposition):
        return [d]
    ds = list(d)
    if not ds:
        raise ValueError("empty decomposition list")
    return ds


def gamma1(d, eps: float = DEFAULT_EPS,
           options: SolverOptions | None = None) -> GainCertificate:
    """Gain of the first subsystem compound block with input b1.

    Minimal gamma certified by one P1 across all vertices; 0 when the
    block is empty (n1 = 1) or b1 vanishes.
    """
    ds = _as_list(d)
    g, P = min_gain_squared([x.a11c2 for x in ds], [x.b1 for x in ds],
                            eps=eps, options=options)
    return GainCertificate("Gamma1", g, P, len(ds), eps)


def gamma2(d, eps: float = DEFAULT_EPS,
           options: SolverOptions | None = None) -> GainCertificate:
    """Gain of the second subsystem compound block with input b2."""
    ds = _as_list(d)
    g, P = min_gain_squared([x.a22c2 for x in ds], [x.b2 for x in ds],
                            eps=eps, options=options)
    return GainCertificate("Gamma2", g, P, len(ds), eps)


def gamma12(d, eps: float = DEFAULT_EPS,
            options: SolverOptions | None = None) -> GainCertificate:
    """Gain of the Kronecker-sum coupling block with stacked input [g1 g2]."""
    ds = _as_list(d)
    g, P = min_gain_squared([x.ksum for x in ds],
                            [np.hstack([x.g1, x.g2]) for x in ds],
                            eps=eps, options=options)
    return GainCertificate("Gamma12", g, P, len(ds), eps)


def partitioned_gains_minimize(d, weights, eps: float = DEFAULT_EPS,
                               options: SolverOptions | None = None) -> PartitionedGains:
    """Minimize w1*eta1sq + w2*eta2sq over the two-channel LMI family.

    ``weights`` are the squared subsystem gains (gamma1^2, gamma2^2); the
    optimized objective is the first small-gain condition value.  Channels
    whose input matrix is identically zero are dropped with their squared
    gain pinned to exactly 0.

    Raises
    ------
    NoFiniteGain
        When no P12 >= eps I satisfies the vertex family for any finite
        channel gains.
    SolverFailure
        On numerical breakdown.
    """
    ds = _as_list(d)
    w1, w2 = float(weights[0]), float(weights[1])
    n = ds[0].ksum.shape[0]
    g1s = [x.g1 for x in ds]
    g2s = [x.g2 for x in ds]
    live1 = g1s[0].shape[1] > 0 and any(g.any() for g in g1s)
    live2 = g2s[0].shape[1] > 0 and any(g.any() for g in g2s)

    import cvxpy as cp

    p = sdp.LmiProblem()
    P = p.symmetric("P12", n)
    objective = 0
    e1 = p.scalar("eta1sq", lower=0.0) if live1 else None
    e2 = p.scalar("eta2sq", lower=0.0) if live2 else None
    if live1:
        objective = objective + max(w1, _WEIGHT_FLOOR) * e1
    if live2:
        objective = objective + max(w2, _WEIGHT_FLOOR) * e2

    eye = np.eye(n)
    for x in ds:
        rows = [[x.ksum.T @ P + P @ x.ksum + eye]]
        if live1:
            rows[0].append(P @ x.g1)
        if live2:
            rows[0].append(P @ x.g2)
        if live1:
            m1 = x.g1.shape[1]
            row = [x.g1.T @ P, -e1 * np.eye(m1)]
            if live2:
                row.append(np.zeros((m1, x.g2.shape[1])))
            rows.append(row)
        if live2:
            m2 = x.g2.shape[1]
            row = [x.g2.T @ P]
            if live1:
                row.insert(1, np.zeros((m2, x.g1.shape[1])))
            row.append(-e2 * np.eye(m2))
            rows.append(row)
        block = cp.bmat(rows) if (live1 or live2) else rows[0][0]
        p.neg_semidef(block)
    p.pos_semidef(P - eps * eye)
    if live1 or live2:
        p.minimize(objective)

    sol = sdp.solve(p, options)
    if sol.status == sdp.INFEASIBLE:
        from .errors import NoFiniteGain
        raise NoFiniteGain("partitioned gain LMI infeasible")
    if not sol.ok:
        raise SolverFailure("partitioned gain solve failed")

    eta1 = max(float(sol.values["eta1sq"]), 0.0) if live1 else 0.0
    eta2 = max(float(sol.values["eta2sq"]), 0.0) if live2 else 0.0
    return PartitionedGains(eta1, eta2, sol.values["P12"],
                            w1 * eta1 + w2 * eta2, len(ds), eps)
