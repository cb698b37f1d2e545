"""Problem data model and the JSON problem-file format.

A problem is the system ``y' + A(t) y = f(t)`` on ``(a, b)`` with ``r``
scalar conditions ``B y = c``. Document layout::

    {
      "dimension": m,
      "interval": {"a": ..., "b": ...},
      "space": {"s": ..., "p": ...},
      "coefficient": {"kind": ..., "data": ...},
      "rhs": {"kind": ..., "data": ...},
      "boundary": {
        "point_terms": [{"t": ..., "order": ..., "matrix": ...}, ...],
        "integral_terms": [{"kernel_kind": ..., "kernel_data": ...}, ...]
      },
      "boundary_rhs": [[re, im], ...]
    }

Complex numbers are ``[re, im]`` pairs (bare reals are accepted on input).
``data`` is a value for ``constant``, a list of values (coefficients of
``(t - a)**k``) for ``polynomial`` and ``{"nodes", "values", "order"}`` for
``sampled``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryOperator, IntegralTerm, PointTerm
from .errors import (
    DimensionMismatch,
    EmptyInterval,
    InvalidOrder,
    InvalidSpace,
    OutOfDomain,
    ProblemSyntaxError,
)
from .functions import INTERPOLATION_ORDERS, DataFunction


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise EmptyInterval(f"interval endpoints must be finite, got [{self.a}, {self.b}]")
        if not self.a < self.b:
            raise EmptyInterval(f"need a < b, got a={self.a}, b={self.b}")

    @property
    def length(self):
        return self.b - self.a


@dataclass(frozen=True)
class SpaceParams:
    s: float
    p: float

    def __post_init__(self):
        if not math.isfinite(self.s) or self.s <= 1 or float(self.s).is_integer():
            raise InvalidSpace(f"s must be a non-integer greater than 1, got {self.s}")
        if not math.isfinite(self.p) or self.p < 1:
            raise InvalidSpace(f"p must satisfy 1 <= p < inf, got {self.p}")

    @property
    def order_bound(self):
        """Boundary derivative orders must stay strictly below this."""
        return self.s - 1.0 / self.p


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    m: int
    interval: Interval
    space: SpaceParams
    A: DataFunction
    f: DataFunction
    boundary: BoundaryOperator
    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=np.complex128).reshape(-1)
        c.flags.writeable = False
        object.__setattr__(self, "c", c)
        m = self.m
        if m < 1:
            raise DimensionMismatch(f"dimension must be positive, got {m}")
        if tuple(self.A.value_shape) != (m, m):
            raise DimensionMismatch(f"coefficient has shape {self.A.value_shape}, expected {(m, m)}")
        if tuple(self.f.value_shape) != (m,):
            raise DimensionMismatch(f"rhs has shape {self.f.value_shape}, expected {(m,)}")
        if self.boundary.m != m:
            raise DimensionMismatch(f"boundary operator has {self.boundary.m} columns, expected {m}")
        if self.boundary.r != c.shape[0]:
            raise DimensionMismatch(
                f"boundary operator has {self.boundary.r} rows but boundary_rhs has {c.shape[0]}"
            )
        a, b = self.interval.a, self.interval.b
        for name, func in (("coefficient", self.A), ("rhs", self.f)):
            if func.a != a or func.b != b:
                raise OutOfDomain(f"{name} domain [{func.a}, {func.b}] differs from [{a}, {b}]")
        self.boundary.validate(a, b, self.space.s, self.space.p)

    @property
    def r(self):
        return self.boundary.r

    @property
    def a(self):
        return self.interval.a

    @property
    def b(self):
        return self.interval.b

    def replace(self, **changes):
        fields = dict(
            m=self.m, interval=self.interval, space=self.space, A=self.A,
            f=self.f, boundary=self.boundary, c=self.c,
        )
        fields.update(changes)
        return ProblemSpec(**fields)

    def __eq__(self, other):
        if not isinstance(other, ProblemSpec):
            return NotImplemented
        return (
            self.m == other.m
            and self.interval == other.interval
            and self.space == other.space
            and self.A == other.A
            and self.f == other.f
            and self.boundary == other.boundary
            and np.array_equal(self.c, other.c)
        )

    __hash__ = None


# {{{ parsing


def _require(node, key, path):
    if not isinstance(node, dict):
        raise ProblemSyntaxError(path, "expected an object")
    if key not in node:
        raise ProblemSyntaxError(f"{path}.{key}" if path else key, "missing key")
    return node[key]


def _real(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ProblemSyntaxError(path, f"expected a real number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ProblemSyntaxError(path, "number is not finite")
    return x


def _complex(x, path):
    if isinstance(x, list):
        if len(x) != 2:
            raise ProblemSyntaxError(path, "complex numbers are [re, im] pairs")
        return complex(_real(x[0], f"{path}[0]"), _real(x[1], f"{path}[1]"))
    return complex(_real(x, path))


def _vector(x, path):
    if not isinstance(x, list):
        raise ProblemSyntaxError(path, "expected a list")
    return np.array([_complex(v, f"{path}[{i}]") for i, v in enumerate(x)], dtype=np.complex128)


def _matrix(x, path):
    if not isinstance(x, list) or not x:
        raise ProblemSyntaxError(path, "expected a nonempty list of rows")
    rows = [_vector(row, f"{path}[{i}]") for i, row in enumerate(x)]
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise ProblemSyntaxError(path, "rows have different lengths")
    return np.array(rows, dtype=np.complex128).reshape(len(rows), widths.pop())


def _value(x, path, rank):
    return _matrix(x, path) if rank == 2 else _vector(x, path)


def _data_function(kind, data, path, rank, interval, kind_key="kind", data_key="data"):
    a, b = interval.a, interval.b
    dpath = f"{path}.{data_key}"
    if kind == "constant":
        return DataFunction.constant(_value(data, f"{dpath}", rank), a, b)
    if kind == "polynomial":
        if not isinstance(data, list) or not data:
            raise ProblemSyntaxError(f"{dpath}", "expected a nonempty list of coefficients")
        coeffs = [_value(v, f"{dpath}[{k}]", rank) for k, v in enumerate(data)]
        if len({c.shape for c in coeffs}) != 1:
            raise DimensionMismatch(f"{dpath}: coefficients have different shapes")
        return DataFunction.polynomial(np.stack(coeffs), a, b)
    if kind == "sampled":
        nodes = _require(data, "nodes", f"{dpath}")
        if not isinstance(nodes, list):
            raise ProblemSyntaxError(f"{dpath}.nodes", "expected a list")
        nodes = [_real(t, f"{dpath}.nodes[{i}]") for i, t in enumerate(nodes)]
        values = _require(data, "values", f"{dpath}")
        if not isinstance(values, list):
            raise ProblemSyntaxError(f"{dpath}.values", "expected a list")
        values = [_value(v, f"{dpath}.values[{i}]", rank) for i, v in enumerate(values)]
        if not values or len({v.shape for v in values}) != 1:
            raise DimensionMismatch(f"{dpath}.values: samples have different shapes")
        order = data.get("order", 3)
        if order not in INTERPOLATION_ORDERS:
            raise ProblemSyntaxError(f"{dpath}.order", "interpolation order must be 1 or 3")
        if len(nodes) != len(values):
            raise DimensionMismatch(f"{dpath}: {len(nodes)} nodes but {len(values)} values")
        try:
            return DataFunction.sampled(nodes, np.stack(values), a, b, order=order)
        except DimensionMismatch:
            raise
        except ValueError as exc:
            raise ProblemSyntaxError(f"{dpath}.nodes", str(exc)) from exc
    raise ProblemSyntaxError(f"{path}.{kind_key}", f"unknown kind {kind!r}")


def parse_problem(document):
    """Build a validated :class:`ProblemSpec` from a JSON string or tree."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ProblemSyntaxError("$", f"invalid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ProblemSyntaxError("$", "top level must be an object")

    m = _require(document, "dimension", "")
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ProblemSyntaxError("dimension", "expected a positive integer")

    iv = _require(document, "interval", "")
    interval = Interval(
        _real(_require(iv, "a", "interval"), "interval.a"),
        _real(_require(iv, "b", "interval"), "interval.b"),
    )
    sp = _require(document, "space", "")
    space = SpaceParams(
        _real(_require(sp, "s", "space"), "space.s"),
        _real(_require(sp, "p", "space"), "space.p"),
    )

    co = _require(document, "coefficient", "")
    A = _data_function(
        _require(co, "kind", "coefficient"), _require(co, "data", "coefficient"),
        "coefficient", 2, interval,
    )
    if tuple(A.value_shape) != (m, m):
        raise DimensionMismatch(f"coefficient: shape {A.value_shape}, expected {(m, m)}")

    rh = _require(document, "rhs", "")
    f = _data_function(_require(rh, "kind", "rhs"), _require(rh, "data", "rhs"), "rhs", 1, interval)
    if tuple(f.value_shape) != (m,):
        raise DimensionMismatch(f"rhs: shape {f.value_shape}, expected {(m,)}")

    c = _vector(_require(document, "boundary_rhs", ""), "boundary_rhs")
    r = c.shape[0]

    bd = _require(document, "boundary", "")
    pts = bd.get("point_terms", []) if isinstance(bd, dict) else None
    ints = bd.get("integral_terms", []) if isinstance(bd, dict) else None
    if not isinstance(pts, list):
        raise ProblemSyntaxError("boundary.point_terms", "expected a list")
    if not isinstance(ints, list):
        raise ProblemSyntaxError("boundary.integral_terms", "expected a list")

    point_terms = []
    for i, term in enumerate(pts):
        path = f"boundary.point_terms[{i}]"
        t0 = _real(_require(term, "t", path), f"{path}.t")
        order = _real(_require(term, "order", path), f"{path}.order")
        if order < 0:
            raise InvalidOrder(f"{path}.order: derivative order must be nonnegative")
        alpha = _matrix(_require(term, "matrix", path), f"{path}.matrix")
        if alpha.shape != (r, m):
            raise DimensionMismatch(f"{path}.matrix: shape {alpha.shape}, expected {(r, m)}")
        point_terms.append(PointTerm(t0, order, alpha))

    integral_terms = []
    for i, term in enumerate(ints):
        path = f"boundary.integral_terms[{i}]"
        K = _data_function(
            _require(term, "kernel_kind", path), _require(term, "kernel_data", path),
            path, 2, interval, kind_key="kernel_kind", data_key="kernel_data",
        )
        if tuple(K.value_shape) != (r, m):
            raise DimensionMismatch(f"{path}: kernel shape {K.value_shape}, expected {(r, m)}")
        integral_terms.append(IntegralTerm(K))

    boundary = BoundaryOperator(r, m, point_terms, integral_terms)
    return ProblemSpec(m, interval, space, A, f, boundary, c)


def load_problem(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_problem(text)


# }}}

# {{{ serialization


def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def encode_array(x):
    """Nested lists of ``[re, im]`` pairs."""
    x = np.asarray(x)
    if x.ndim == 0:
        return encode_complex(x)
    return [encode_array(row) for row in x]


def _encode_function(func):
    if func.kind == "constant":
        return func.kind, encode_array(func.payload)
    if func.kind == "polynomial":
        return func.kind, [encode_array(c) for c in func.payload]
    return func.kind, {
        "nodes": [float(t) for t in func.nodes],
        "values": [encode_array(v) for v in func.payload],
        "order": func.order,
    }


def problem_to_dict(problem):
    ckind, cdata = _encode_function(problem.A)
    fkind, fdata = _encode_function(problem.f)
    integral_terms = []
    for term in problem.boundary.integral_terms:
        kkind, kdata = _encode_function(term.kernel)
        integral_terms.append({"kernel_kind": kkind, "kernel_data": kdata})
    return {
        "dimension": problem.m,
        "interval": {"a": problem.interval.a, "b": problem.interval.b},
        "space": {"s": problem.space.s, "p": problem.space.p},
        "coefficient": {"kind": ckind, "data": cdata},
        "rhs": {"kind": fkind, "data": fdata},
        "boundary": {
            "point_terms": [
                {"t": t.t0, "order": t.order, "matrix": encode_array(t.alpha)}
                for t in problem.boundary.point_terms
            ],
            "integral_terms": integral_terms,
        },
        "boundary_rhs": encode_array(problem.c),
    }


def serialize_problem(problem, indent=2):
    return json.dumps(problem_to_dict(problem), indent=indent)


# }}}
