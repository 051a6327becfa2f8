"""Built-in example systems, their interval hulls, and JSON model I/O.

Three built-ins: a feedback multistable system with an arctangent
nonlinearity (``multistable4``, parameter k), and cyclic Thomas-type
systems in four and three states (``thomas4``, ``thomas3``, parameter b).
States are kept in partition order; ``thomas4`` groups (x1, x3) against
(x2, x4), so its canonical state is the reordering (x1, x3, x2, x4) of
the cyclic one.
"""

import json
import math

import numpy as np

from . import _accel
from .compound_algebra import PartitionedMatrix
from .errors import (DimensionMismatch, InvalidParameter, ParseError,
                     SchemaError)
from .smallgain import PolytopicModel


class ExampleSystem:
    """One built-in system at a fixed parameter value.

    Instances are immutable in use; ``with_parameter`` returns a copy at
    a new parameter value after validation.
    """

    def __init__(self, name, n1, n2, parameter_symbol, parameter,
                 kernel_id, kernel_perm, field_fn, jacobian_fn, hull_fn,
                 box_fn, validate_fn):
        self.name = name
        self.n1 = n1
        self.n2 = n2
        self.parameter_symbol = parameter_symbol
        self.parameter = parameter
        self.kernel_id = kernel_id
        # canonical state i equals kernel state kernel_perm[i]
        self.kernel_perm = tuple(kernel_perm)
        self._field = field_fn
        self._jacobian = jacobian_fn
        self._hull = hull_fn
        self._box = box_fn
        self._validate = validate_fn
        validate_fn(parameter)

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    def with_parameter(self, parameter: float) -> "ExampleSystem":
        return ExampleSystem(
            self.name, self.n1, self.n2, self.parameter_symbol,
            float(parameter), self.kernel_id, self.kernel_perm,
            self._field, self._jacobian, self._hull, self._box,
            self._validate)

    def field(self, x) -> np.ndarray:
        x = self._check_state(x)
        return self._field(x, self.parameter)

    def jacobian(self, x) -> PartitionedMatrix:
        x = self._check_state(x)
        return PartitionedMatrix(self._jacobian(x, self.parameter),
                                 self.n1, self.n2)

    def hull(self, parameter: float | None = None,
             route: str = "modular") -> PolytopicModel:
        p = self.parameter if parameter is None else float(parameter)
        self._validate(p)
        return self._hull(p, route)

    def invariant_box(self, parameter: float | None = None):
        p = self.parameter if parameter is None else float(parameter)
        self._validate(p)
        return self._box(p)

    def _check_state(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(
                f"{self.name} expects a state of shape ({self.n},), "
                f"got {x.shape}")
        return x


def _require_positive(symbol):
    def check(p):
        if not math.isfinite(p) or p <= 0.0:
            raise InvalidParameter(f"{symbol} must be positive, got {p}")
    return check


def _require_nonnegative(symbol):
    def check(p):
        if not math.isfinite(p) or p < 0.0:
            raise InvalidParameter(f"{symbol} must be nonnegative, got {p}")
    return check


# ---------------------------------------------------------------- multistable4

def _ms4_field(x, k):
    return np.array([
        x[1],
        -x[0] + math.atan(2.0 * x[0]) - 2.0 * x[1] + x[2],
        -x[2] + x[3],
        -k * x[0] - x[3],
    ])


def _ms4_jacobian(x, k):
    # d/dx1 atan(2 x1) = 2 / (1 + 4 x1^2), in (0, 2]
    d = -1.0 + 2.0 / (1.0 + 4.0 * x[0] ** 2)
    return np.array([
        [0.0, 1.0, 0.0, 0.0],
        [d, -2.0, 1.0, 0.0],
        [0.0, 0.0, -1.0, 1.0],
        [-k, 0.0, 0.0, -1.0],
    ])


def _ms4_hull(k, route):
    # entry (2,1) spans [-1, 1]; both routes use the same 2-vertex hull
    vs = []
    for s in (-1.0, 1.0):
        A = np.array([
            [0.0, 1.0, 0.0, 0.0],
            [s, -2.0, 1.0, 0.0],
            [0.0, 0.0, -1.0, 1.0],
            [-k, 0.0, 0.0, -1.0],
        ])
        vs.append(PartitionedMatrix(A, 2, 2))
    return PolytopicModel(tuple(vs), description="multistable4", parameter=k)


def _ms4_box(k):
    return None


# -------------------------------------------------------------- thomas family

def _thomas_cyclic_jacobian(x, b):
    # in cyclic order: row i has cos(x_{i+1}) at column i+1 (wrapping)
    n = x.shape[0]
    J = -b * np.eye(n)
    for i in range(n):
        J[i, (i + 1) % n] = math.cos(x[(i + 1) % n])
    return J


def _t4_perm():
    return np.array([0, 2, 1, 3])


def _t4_field(z, b):
    p = _t4_perm()
    x = np.empty(4)
    x[p] = z
    dx = -b * x + np.sin(np.roll(x, -1))
    return dx[p]


def _t4_jacobian(z, b):
    p = _t4_perm()
    x = np.empty(4)
    x[p] = z
    J = _thomas_cyclic_jacobian(x, b)
    return J[np.ix_(p, p)]


def _t4_hull(b, route):
    # 16 sign patterns of (c1..c4), kept verbatim, in partition order
    p = _t4_perm()
    vs = []
    for m in range(16):
        c = [1.0 if m & (1 << i) else -1.0 for i in range(4)]
        J = -b * np.eye(4)
        for i in range(4):
            J[i, (i + 1) % 4] = c[(i + 1) % 4]
        vs.append(PartitionedMatrix(J[np.ix_(p, p)], 2, 2))
    return PolytopicModel(tuple(vs), description="thomas4", parameter=b)


def _thomas_box(n):
    def box(b):
        r = 1.0 / b
        return np.array([[-r, r]] * n)
    return box


def _t3_field(x, b):
    return -b * x + np.sin(np.roll(x, -1))


def _t3_jacobian(x, b):
    return _thomas_cyclic_jacobian(x, b)


def _t3_hull(b, route):
    # partition (x1) | (x2, x3): J = [[-b, c2, 0], [0, -b, c3], [c1, 0, -b]]
    def vertex(c1, c2, c3):
        return PartitionedMatrix(np.array([
            [-b, c2, 0.0],
            [0.0, -b, c3],
            [c1, 0.0, -b],
        ]), 1, 2)

    if route == "direct":
        vs = [vertex(c1, c2, c3)
              for c1 in (-1.0, 1.0)
              for c2 in (-1.0, 1.0)
              for c3 in (-1.0, 1.0)]
    elif route == "modular":
        # square in (c2, c3); c1 fixed at +1, the sign-symmetric
        # representative
        vs = [vertex(1.0, c2, c3)
              for c2 in (-1.0, 1.0)
              for c3 in (-1.0, 1.0)]
    else:
        raise InvalidParameter(f"unknown hull route {route!r}")
    return PolytopicModel(tuple(vs), description="thomas3", parameter=b)


def _registry():
    return {
        "multistable4": lambda: ExampleSystem(
            "multistable4", 2, 2, "k", 0.5, _accel.MULTISTABLE4,
            (0, 1, 2, 3), _ms4_field, _ms4_jacobian, _ms4_hull, _ms4_box,
            _require_nonnegative("k")),
        "thomas4": lambda: ExampleSystem(
            "thomas4", 2, 2, "b", 1.0, _accel.THOMAS_CYCLIC,
            tuple(_t4_perm()), _t4_field, _t4_jacobian, _t4_hull,
            _thomas_box(4), _require_positive("b")),
        "thomas3": lambda: ExampleSystem(
            "thomas3", 1, 2, "b", 1.0, _accel.THOMAS_CYCLIC,
            (0, 1, 2), _t3_field, _t3_jacobian, _t3_hull,
            _thomas_box(3), _require_positive("b")),
    }


BUILTIN_NAMES = tuple(sorted(_registry()))


def get_system(name: str, parameter: float | None = None) -> ExampleSystem:
    """Look up a built-in system, optionally at a given parameter value."""
    factories = _registry()
    key = name.strip().lower()
    if key not in factories:
        raise ValueError(
            f"unknown system {name!r}; built-ins: {', '.join(BUILTIN_NAMES)}")
    sys = factories[key]()
    if parameter is not None:
        sys = sys.with_parameter(parameter)
    return sys


def hull_vertices(sys: ExampleSystem, parameter: float | None = None,
                  route: str = "modular") -> PolytopicModel:
    """Vertex enumeration of the Jacobian interval hull of a built-in."""
    return sys.hull(parameter, route)


def evaluate_field(sys: ExampleSystem, x) -> np.ndarray:
    return sys.field(x)


def evaluate_jacobian(sys: ExampleSystem, x) -> PartitionedMatrix:
    return sys.jacobian(x)


# ------------------------------------------------------------------- JSON I/O

def model_to_dict(model: PolytopicModel, name: str = "") -> dict:
    doc = {
        "name": name or model.description or "model",
        "n1": model.n1,
        "n2": model.n2,
        "vertices": [v.entries.reshape(-1).tolist() for v in model.vertices],
    }
    if model.parameter is not None:
        doc["parameter"] = model.parameter
    if model.invariant_box is not None:
        doc["invariant_box"] = [list(pair) for pair in model.invariant_box]
    return doc


def _schema_fail(field, why):
    raise SchemaError(f"field {field!r}: {why}")


def model_from_dict(doc) -> PolytopicModel:
    if not isinstance(doc, dict):
        _schema_fail("<root>", "document is not an object")
    for key in ("name", "n1", "n2", "vertices"):
        if key not in doc:
            _schema_fail(key, "missing")
    name = doc["name"]
    if not isinstance(name, str):
        _schema_fail("name", "not a string")
    n1, n2 = doc["n1"], doc["n2"]
    for key, v in (("n1", n1), ("n2", n2)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            _schema_fail(key, "not a nonnegative integer")
    n = n1 + n2
    if n < 3:
        _schema_fail("n1", f"partition sizes sum to {n}, need at least 3")
    raw = doc["vertices"]
    if not isinstance(raw, list) or not raw:
        _schema_fail("vertices", "not a nonempty array")
    vertices = []
    for idx, flat in enumerate(raw):
        if not isinstance(flat, list) or len(flat) != n * n:
            _schema_fail(f"vertices[{idx}]",
                         f"expected {n * n} row-major numbers")
        try:
            entries = np.array(flat, dtype=float).reshape(n, n)
        except (TypeError, ValueError):
            _schema_fail(f"vertices[{idx}]", "non-numeric entry")
        if not np.isfinite(entries).all():
            _schema_fail(f"vertices[{idx}]", "non-finite entry")
        vertices.append(PartitionedMatrix(entries, n1, n2))
    parameter = doc.get("parameter")
    if parameter is not None and not isinstance(parameter, (int, float)):
        _schema_fail("parameter", "not a number")
    box = doc.get("invariant_box")
    if box is not None:
        if (not isinstance(box, list) or len(box) != n
                or any(not isinstance(p, list) or len(p) != 2 for p in box)):
            _schema_fail("invariant_box", f"expected {n} [lo, hi] pairs")
        box = tuple((float(lo), float(hi)) for lo, hi in box)
    return PolytopicModel(tuple(vertices), description=name,
                          invariant_box=box,
                          parameter=None if parameter is None
                          else float(parameter))


def load_model(path) -> PolytopicModel:
    """Read a polytopic model from a JSON file.

    Raises ParseError with the offending location on malformed JSON and
    SchemaError naming the field on structural problems.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    return model_from_dict(doc)
