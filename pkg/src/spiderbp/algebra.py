"""Pluggable scalar algebras (commutative semirings) for message passing.

The same propagation loop computes marginals, MAP assignments, constraint
support, exact model counts, or derivatives purely by swapping the scalar
algebra it runs on. Each instance bundles:

* the scalar operations ``add``/``mul`` with their identities,
* the numpy dtype used to store tensors of such scalars,
* optional extras: ``normalize`` (rescale a message vector) and ``compare``
  (a total order, needed for argmax decoding).

Instances are stateless singletons looked up by name:

====================  ==========================================
``"prob"``            nonnegative reals, (+, *): marginals
``"maxtimes"``        nonnegative reals, (max, *): MAP
``"bool"``            {False, True}, (or, and): constraint support
``"count"``           nonnegative integers, (+, *), exact: counting
``"dual"``            pairs a + b*eps with eps^2 = 0: derivatives
====================  ==========================================

Tensors over a semiring are ordinary numpy arrays whose dtype the instance
picks: float64 for the real semirings, bool for ``bool``, and object arrays
for ``count`` (arbitrary-precision Python ints) and ``dual`` (pairs).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import NoTotalOrderError, ZeroMessageError


@dataclass(frozen=True)
class DualNumber:
    """A dual number a + b*eps with eps^2 = 0.

    Multiplication carries derivatives along for the ride:
    (a + b*eps)(c + d*eps) = ac + (ad + bc)*eps.
    """

    real: float
    eps: float = 0.0

    def __add__(self, other):
        return DualNumber(self.real + other.real, self.eps + other.eps)

    def __mul__(self, other):
        return DualNumber(
            self.real * other.real,
            self.real * other.eps + self.eps * other.real,
        )

    def __repr__(self):
        return f"{self.real} + {self.eps}ε"


class Semiring:
    """Base contract every scalar algebra fulfils.

    Subclasses set ``name``, ``zero``, ``one``, ``dtype`` and implement the
    scalar ops. The array-level helpers below are what the tensor and engine
    layers actually call; they default to broadcasting the scalar ops via
    numpy ufuncs and only need overriding when a faster elementwise kernel
    exists.
    """

    name = "?"
    zero = None
    one = None
    dtype = np.float64
    has_normalize = False
    has_compare = False
    exact = False
    #: full scalar domain when it is small enough to enumerate, else None
    enumerable = None

    # -- scalar operations -------------------------------------------------

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def distance(self, a, b):
        """Nonnegative float gap between two scalars; 0 iff equal.

        Exact semirings use a 0/1 indicator so the engine's residual
        machinery doubles as an exact-change flag.
        """
        raise NotImplementedError

    def approx_eq(self, a, b, tol=1e-9):
        if self.exact:
            return a == b
        return self.distance(a, b) <= tol

    def render(self, a):
        """Decimal string for one scalar."""
        return repr(a)

    def compare(self, a, b):
        """Three-way comparison; only meaningful when ``has_compare``."""
        raise NoTotalOrderError(f"semiring {self.name!r} has no total order")

    # -- array operations ---------------------------------------------------

    def coerce_scalar(self, x):
        """Validate and convert one raw value into this algebra's domain."""
        raise NotImplementedError

    def coerce(self, values):
        """Flat numpy array of this algebra's scalars from raw values."""
        scalars = [self.coerce_scalar(x) for x in values]
        out = np.empty(len(scalars), dtype=self.dtype)
        out[:] = scalars
        return out

    def full(self, shape, value):
        out = np.empty(shape, dtype=self.dtype)
        out[...] = value
        return out

    def zeros(self, shape):
        return self.full(shape, self.zero)

    def ones(self, shape):
        return self.full(shape, self.one)

    def array_add(self, a, b):
        return np.frompyfunc(self.add, 2, 1)(a, b)

    def array_mul(self, a, b):
        return np.frompyfunc(self.mul, 2, 1)(a, b)

    def fold_add(self, values):
        """Semiring sum of a 1-d array, left to right."""
        acc = self.zero
        for x in values.tolist() if isinstance(values, np.ndarray) else values:
            acc = self.add(acc, x)
        return acc

    def fold_axis_add(self, arr, axis):
        """Semiring sum along one axis of a bulk table.

        Slices combine first to last here; subclasses may substitute any
        fixed deterministic chunking (a ufunc reduction), which is exact
        for the exact semirings and within rounding for the float ones.
        """
        moved = np.moveaxis(np.asarray(arr), axis, 0)
        if moved.shape[0] == 0:
            return self.full(moved.shape[1:], self.zero)
        acc = moved[0]
        for i in range(1, moved.shape[0]):
            acc = self.array_add(acc, moved[i])
        return np.asarray(acc)

    def max_distance(self, a, b):
        """Largest componentwise ``distance`` between two equal-shape arrays."""
        a_flat = np.asarray(a).ravel().tolist()
        b_flat = np.asarray(b).ravel().tolist()
        return max((self.distance(x, y) for x, y in zip(a_flat, b_flat)), default=0.0)

    # -- optional: message rescaling -----------------------------------------

    def aggregate(self, values):
        """Scalar a message is divided by when normalizing."""
        raise NotImplementedError

    def normalize(self, values):
        """Rescaled copy of ``values``; raises ZeroMessageError on dead support.

        Only available when ``has_normalize``. The exception carries the
        unchanged input so callers can still report what was computed.
        """
        raise NotImplementedError

    # -- randomized-check support --------------------------------------------

    def random_scalar(self, rng):
        raise NotImplementedError

    # -- file-format payloads -------------------------------------------------

    def value_to_json(self, a):
        return a

    def value_from_json(self, x):
        return self.coerce_scalar(x)


class ProbSemiring(Semiring):
    """Nonnegative reals under (+, *): sum-product marginals."""

    name = "prob"
    zero = 0.0
    one = 1.0
    has_normalize = True
    has_compare = True

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def distance(self, a, b):
        return abs(a - b)

    def compare(self, a, b):
        # int() first: numpy bools do not support subtraction.
        return int(a > b) - int(a < b)

    def coerce_scalar(self, x):
        v = float(x)
        if not v >= 0.0:
            raise ValueError(f"prob values must be nonnegative reals, got {x!r}")
        return v

    def coerce(self, values):
        out = np.asarray([float(x) for x in values], dtype=np.float64)
        if out.size and not (out >= 0.0).all():
            bad = out[~(out >= 0.0)][0]
            raise ValueError(f"prob values must be nonnegative reals, got {bad!r}")
        return out

    def array_add(self, a, b):
        return np.add(a, b)

    def array_mul(self, a, b):
        return np.multiply(a, b)

    def fold_axis_add(self, arr, axis):
        return np.add.reduce(np.asarray(arr), axis=axis)

    def aggregate(self, values):
        return self.fold_add(values)

    def normalize(self, values):
        s = self.aggregate(values)
        if s == 0.0:
            raise ZeroMessageError(values=values)
        return np.asarray(values) / s

    def random_scalar(self, rng):
        return float(rng.uniform(0.0, 2.0))

    def value_to_json(self, a):
        return float(a)


class MaxTimesSemiring(ProbSemiring):
    """Nonnegative reals under (max, *): max-product / MAP.

    Kept over [0, inf) rather than log space so the exact same factor
    tables drive both marginal and MAP runs.
    """

    name = "maxtimes"

    def add(self, a, b):
        return a if a >= b else b

    def array_add(self, a, b):
        return np.maximum(a, b)

    def fold_axis_add(self, arr, axis):
        return np.maximum.reduce(np.asarray(arr), axis=axis)

    def aggregate(self, values):
        arr = np.asarray(values)
        return float(arr.max()) if arr.size else 0.0

    def normalize(self, values):
        m = self.aggregate(values)
        if m == 0.0:
            raise ZeroMessageError(values=values)
        return np.asarray(values) / m


class BoolSemiring(Semiring):
    """Booleans under (or, and): support / constraint propagation."""

    name = "bool"
    zero = False
    one = True
    dtype = np.bool_
    has_compare = True
    exact = True
    enumerable = (False, True)

    def add(self, a, b):
        return bool(a or b)

    def mul(self, a, b):
        return bool(a and b)

    def distance(self, a, b):
        return 0.0 if bool(a) == bool(b) else 1.0

    def compare(self, a, b):
        return int(bool(a)) - int(bool(b))

    def render(self, a):
        return "1" if a else "0"

    def coerce_scalar(self, x):
        if isinstance(x, (bool, np.bool_)):
            return bool(x)
        if x in (0, 1):
            return bool(x)
        raise ValueError(f"bool values must be true/false or 0/1, got {x!r}")

    def coerce(self, values):
        return np.asarray([self.coerce_scalar(x) for x in values], dtype=np.bool_)

    def array_add(self, a, b):
        return np.logical_or(a, b)

    def array_mul(self, a, b):
        return np.logical_and(a, b)

    def fold_axis_add(self, arr, axis):
        return np.logical_or.reduce(np.asarray(arr), axis=axis)

    def random_scalar(self, rng):
        return bool(rng.integers(2))

    def value_to_json(self, a):
        return bool(a)


class NatCountSemiring(Semiring):
    """Nonnegative integers under (+, *), exact at any size.

    Values are plain Python ints held in object arrays, so counts never
    overflow or round.
    """

    name = "count"
    zero = 0
    one = 1
    dtype = np.object_
    has_compare = True
    exact = True

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def distance(self, a, b):
        return 0.0 if a == b else 1.0

    def compare(self, a, b):
        # int() first: numpy bools do not support subtraction.
        return int(a > b) - int(a < b)

    def render(self, a):
        return str(a)

    def coerce_scalar(self, x):
        if isinstance(x, bool):
            return int(x)
        if isinstance(x, (int, np.integer)):
            v = int(x)
        elif isinstance(x, float) and x.is_integer():
            v = int(x)
        else:
            raise ValueError(f"count values must be nonnegative integers, got {x!r}")
        if v < 0:
            raise ValueError(f"count values must be nonnegative integers, got {x!r}")
        return v

    def array_add(self, a, b):
        return np.add(a, b)

    def array_mul(self, a, b):
        return np.multiply(a, b)

    def fold_axis_add(self, arr, axis):
        # object-dtype reduce combines strictly first to last, and int
        # addition is exact in any case
        return np.add.reduce(np.asarray(arr), axis=axis)

    def random_scalar(self, rng):
        return int(rng.integers(0, 10))

    def value_to_json(self, a):
        return int(a)


class DualSemiring(Semiring):
    """Dual numbers a + b*eps under componentwise +, truncated *.

    Running a contraction with one factor entry seeded as value + 1*eps
    leaves the contraction's partial derivative with respect to that entry
    in the eps component of the result.
    """

    name = "dual"
    zero = DualNumber(0.0, 0.0)
    one = DualNumber(1.0, 0.0)
    dtype = np.object_
    has_normalize = True

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def distance(self, a, b):
        return max(abs(a.real - b.real), abs(a.eps - b.eps))

    def fold_axis_add(self, arr, axis):
        return np.add.reduce(np.asarray(arr), axis=axis)

    def render(self, a):
        return repr(a)

    def coerce_scalar(self, x):
        if isinstance(x, DualNumber):
            return x
        if isinstance(x, (list, tuple)) and len(x) == 2:
            return DualNumber(float(x[0]), float(x[1]))
        if isinstance(x, (int, float, np.floating, np.integer)):
            return DualNumber(float(x), 0.0)
        raise ValueError(f"dual values must be [a, b] pairs or numbers, got {x!r}")

    def aggregate(self, values):
        arr = values.tolist() if isinstance(values, np.ndarray) else values
        s = 0.0
        for d in arr:
            s += d.real
        return s

    def normalize(self, values):
        # Rescaling by the (real) mass keeps the derivative information
        # consistent: both components divide by the same real scalar.
        s = self.aggregate(values)
        if s == 0.0:
            raise ZeroMessageError(values=values)
        out = np.empty(len(values), dtype=object)
        out[:] = [DualNumber(d.real / s, d.eps / s) for d in values.tolist()]
        return out

    def random_scalar(self, rng):
        return DualNumber(float(rng.uniform(-1.0, 1.0)), float(rng.uniform(-1.0, 1.0)))

    def value_to_json(self, a):
        return [a.real, a.eps]


PROB = ProbSemiring()
MAXTIMES = MaxTimesSemiring()
BOOL = BoolSemiring()
COUNT = NatCountSemiring()
DUAL = DualSemiring()

SEMIRINGS = {s.name: s for s in (PROB, MAXTIMES, BOOL, COUNT, DUAL)}


def get_semiring(name):
    """Look up a semiring instance by its registry name."""
    if isinstance(name, Semiring):
        return name
    try:
        return SEMIRINGS[name]
    except KeyError:
        known = ", ".join(sorted(SEMIRINGS))
        raise ValueError(f"unknown semiring {name!r}; known: {known}") from None


def normalize_message(semiring, values):
    """Rescale a message vector so its aggregate equals the unit.

    Raises ZeroMessageError (carrying the unchanged input) when the
    aggregate is the semiring zero, and ValueError when the semiring has
    no notion of rescaling at all.
    """
    semiring = get_semiring(semiring)
    if not semiring.has_normalize:
        raise ValueError(f"semiring {semiring.name!r} does not support normalization")
    return semiring.normalize(np.asarray(values, dtype=semiring.dtype))


@dataclass
class AxiomReport:
    """Outcome of a randomized semiring-axiom check."""

    semiring: str
    triples: int
    checks: int
    failures: list

    @property
    def ok(self):
        return not self.failures


_AXIOMS = (
    ("add associative", lambda s, a, b, c: (s.add(s.add(a, b), c), s.add(a, s.add(b, c)))),
    ("mul associative", lambda s, a, b, c: (s.mul(s.mul(a, b), c), s.mul(a, s.mul(b, c)))),
    ("add commutative", lambda s, a, b, c: (s.add(a, b), s.add(b, a))),
    ("mul commutative", lambda s, a, b, c: (s.mul(a, b), s.mul(b, a))),
    ("add identity", lambda s, a, b, c: (s.add(a, s.zero), a)),
    ("mul identity", lambda s, a, b, c: (s.mul(a, s.one), a)),
    ("distributive", lambda s, a, b, c: (s.mul(a, s.add(b, c)), s.add(s.mul(a, b), s.mul(a, c)))),
    ("annihilating zero", lambda s, a, b, c: (s.mul(a, s.zero), s.zero)),
)


def check_semiring_axioms(semiring, samples=1000, seed=0, tol=1e-9):
    """Spot-check the semiring laws on random scalar triples.

    Draws ``samples`` triples from the instance's own generator (magnitudes
    kept moderate so float roundoff stays far below ``tol``). Semirings with
    a tiny enumerable domain are checked exhaustively instead whenever
    ``samples`` covers every triple.
    """
    semiring = get_semiring(semiring)
    dom = semiring.enumerable
    if dom is not None and len(dom) ** 3 <= samples:
        triples = list(product(dom, repeat=3))
    else:
        rng = np.random.default_rng(seed)
        triples = [
            (
                semiring.random_scalar(rng),
                semiring.random_scalar(rng),
                semiring.random_scalar(rng),
            )
            for _ in range(samples)
        ]
    failures = []
    checks = 0
    for a, b, c in triples:
        for label, law in _AXIOMS:
            left, right = law(semiring, a, b, c)
            checks += 1
            if not semiring.approx_eq(left, right, tol):
                failures.append(
                    f"{label}: a={semiring.render(a)} b={semiring.render(b)} "
                    f"c={semiring.render(c)} -> {semiring.render(left)} != "
                    f"{semiring.render(right)}"
                )
    return AxiomReport(semiring.name, len(triples), checks, failures)
