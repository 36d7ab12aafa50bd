"""Outward-rounded interval numbers and forward-mode interval derivatives.

``IScalar`` encloses a real number between two doubles. Every arithmetic
result is widened by one ulp in each direction, which dominates the
round-to-nearest error of the underlying float operation, so the true
result of the exact operation on any members of the operands is contained.

``IDual`` carries a value and a first derivative; combined with ``IScalar``
it gives derivative enclosures for interval Newton and monotonicity tests.
Functions written against the generic operators work unchanged on floats,
``IScalar`` and ``IDual``.
"""

from __future__ import annotations

import math
from typing import Iterator, Union

_INF = math.inf


def _dn(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


class IScalar:
    """Closed interval ``[lo, hi]`` of reals with outward rounding.

    Comparison operators are *certain* comparisons: ``a < b`` is true only
    when every member of ``a`` is below every member of ``b``.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Union[float, int, "IScalar"], hi: Union[float, int, None] = None):
        if isinstance(lo, IScalar):
            lo, hi = lo.lo, lo.hi
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if not lo <= hi:
            raise ValueError(f"empty or NaN interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @staticmethod
    def _raw(lo: float, hi: float) -> "IScalar":
        out = object.__new__(IScalar)
        out.lo = lo
        out.hi = hi
        return out

    @classmethod
    def ratio(cls, num: int, den: int) -> "IScalar":
        """Enclosure of the rational ``num/den``."""
        return cls(num) / cls(den)

    @classmethod
    def hull_of(cls, values) -> "IScalar":
        items = [as_interval(v) for v in values]
        return cls._raw(min(v.lo for v in items), max(v.hi for v in items))

    # -- inspection -------------------------------------------------------
    def mid(self) -> float:
        if self.lo == self.hi:
            return self.lo
        m = 0.5 * (self.lo + self.hi)
        if math.isinf(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        return m

    def width(self) -> float:
        return _up(self.hi - self.lo)

    def rad(self) -> float:
        return 0.5 * self.width()

    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def contains(self, x: Union[float, "IScalar"]) -> bool:
        if isinstance(x, IScalar):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    def hull(self, other) -> "IScalar":
        o = as_interval(other)
        return IScalar._raw(min(self.lo, o.lo), max(self.hi, o.hi))

    def intersect(self, other) -> "IScalar | None":
        o = as_interval(other)
        lo, hi = max(self.lo, o.lo), min(self.hi, o.hi)
        return IScalar._raw(lo, hi) if lo <= hi else None

    def bisect(self) -> tuple["IScalar", "IScalar"]:
        m = self.mid()
        return IScalar._raw(self.lo, m), IScalar._raw(m, self.hi)

    def split(self, n: int) -> Iterator["IScalar"]:
        edges = [self.lo + (self.hi - self.lo) * k / n for k in range(n)] + [self.hi]
        for a, b in zip(edges, edges[1:]):
            yield IScalar._raw(a, b)

    def endpoints(self) -> tuple["IScalar", "IScalar"]:
        return IScalar._raw(self.lo, self.lo), IScalar._raw(self.hi, self.hi)

    # -- arithmetic -------------------------------------------------------
    def __neg__(self) -> "IScalar":
        return IScalar._raw(-self.hi, -self.lo)

    def __pos__(self) -> "IScalar":
        return self

    def __add__(self, other) -> "IScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return IScalar._raw(_dn(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "IScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return IScalar._raw(_dn(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other) -> "IScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other) -> "IScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        a, b, c, d = self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi
        return IScalar._raw(_dn(min(a, b, c, d)), _up(max(a, b, c, d)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "IScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError(f"interval division by {o!r}")
        a, b, c, d = self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi
        return IScalar._raw(_dn(min(a, b, c, d)), _up(max(a, b, c, d)))

    def __rtruediv__(self, other) -> "IScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> "IScalar":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        if n == 0:
            return IScalar._raw(1.0, 1.0)
        base = abs(self) if n % 2 == 0 else self
        out = base
        for _ in range(n - 1):
            out = out * base
        if n % 2 == 0 and out.lo < 0.0:
            out = IScalar._raw(0.0, out.hi)
        return out

    def __abs__(self) -> "IScalar":
        if self.lo >= 0.0:
            return self
        if self.hi <= 0.0:
            return -self
        return IScalar._raw(0.0, max(-self.lo, self.hi))

    def sqrt(self) -> "IScalar":
        if self.hi < 0.0:
            raise ValueError(f"sqrt of negative interval {self!r}")
        lo = max(self.lo, 0.0)
        return IScalar._raw(max(_dn(math.sqrt(lo)), 0.0), _up(math.sqrt(self.hi)))

    def square(self) -> "IScalar":
        return self ** 2

    # -- certain comparisons ---------------------------------------------
    def __lt__(self, other) -> bool:
        return self.hi < as_interval(other).lo

    def __le__(self, other) -> bool:
        return self.hi <= as_interval(other).lo

    def __gt__(self, other) -> bool:
        return self.lo > as_interval(other).hi

    def __ge__(self, other) -> bool:
        return self.lo >= as_interval(other).hi

    def __eq__(self, other) -> bool:
        if not isinstance(other, IScalar):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __float__(self) -> float:
        return self.mid()

    def __repr__(self) -> str:
        if self.lo == self.hi:
            return f"IScalar({self.lo!r})"
        return f"IScalar({self.lo!r}, {self.hi!r})"


def _coerce(x):
    if isinstance(x, IScalar):
        return x
    if isinstance(x, (int, float)):
        f = float(x)
        return IScalar._raw(f, f)
    return NotImplemented


def as_interval(x) -> IScalar:
    out = _coerce(x)
    if out is NotImplemented:
        raise TypeError(f"cannot interpret {type(x).__name__} as an interval")
    return out


def imax(a, b) -> IScalar:
    a, b = as_interval(a), as_interval(b)
    return IScalar._raw(max(a.lo, b.lo), max(a.hi, b.hi))


def imin(a, b) -> IScalar:
    a, b = as_interval(a), as_interval(b)
    return IScalar._raw(min(a.lo, b.lo), min(a.hi, b.hi))


class IDual:
    """Value and first derivative, both generic numbers (float or IScalar)."""

    __slots__ = ("val", "der")

    def __init__(self, val, der=0.0):
        self.val = val
        self.der = der

    @classmethod
    def variable(cls, x) -> "IDual":
        return cls(x, 1.0 if isinstance(x, (int, float)) else IScalar(1.0))

    def __neg__(self):
        return IDual(-self.val, -self.der)

    def __add__(self, o):
        if isinstance(o, IDual):
            return IDual(self.val + o.val, self.der + o.der)
        return IDual(self.val + o, self.der)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, IDual):
            return IDual(self.val - o.val, self.der - o.der)
        return IDual(self.val - o, self.der)

    def __rsub__(self, o):
        return IDual(o - self.val, -self.der)

    def __mul__(self, o):
        if isinstance(o, IDual):
            return IDual(self.val * o.val, self.der * o.val + self.val * o.der)
        return IDual(self.val * o, self.der * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, IDual):
            q = self.val / o.val
            return IDual(q, (self.der - q * o.der) / o.val)
        return IDual(self.val / o, self.der / o)

    def __rtruediv__(self, o):
        q = o / self.val
        return IDual(q, -q * self.der / self.val)

    def __pow__(self, n: int):
        if n == 0:
            return IDual(1.0, 0.0)
        return IDual(self.val ** n, n * self.val ** (n - 1) * self.der)

    def sqrt(self):
        r = sqrt(self.val)
        return IDual(r, self.der / (2 * r))

    def __abs__(self):
        v = self.val
        if isinstance(v, IScalar):
            if v.lo > 0.0:
                return self
            if v.hi < 0.0:
                return -self
            raise ValueError("abs is not differentiable on an interval containing 0")
        return self if v >= 0 else -self

    def __repr__(self) -> str:
        return f"IDual({self.val!r}, {self.der!r})"


Number = Union[float, IScalar, IDual]


def sqrt(x):
    """Square root dispatching on the number type."""
    if isinstance(x, (int, float)):
        return math.sqrt(x)
    return x.sqrt()


def value_of(x):
    """Strip a derivative, leaving the value part."""
    return x.val if isinstance(x, IDual) else x


def lower(x) -> float:
    x = value_of(x)
    return x.lo if isinstance(x, IScalar) else float(x)


def upper(x) -> float:
    x = value_of(x)
    return x.hi if isinstance(x, IScalar) else float(x)
