"""Periodic configurations x_{n+q} = x_n + p and their order structure."""
import enum
import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Configuration:
    p: int
    q: int
    coords: np.ndarray

    def __post_init__(self):
        q = int(self.q)
        if q < 1:
            raise ValueError(f"q must be positive, got {q}")
        if math.gcd(abs(int(self.p)), q) != 1:
            raise ValueError(f"p={self.p} and q={q} are not coprime")
        coords = np.array(self.coords, dtype=float).reshape(-1)
        if coords.size != q:
            raise ValueError(f"expected {q} coordinates, got {coords.size}")
        coords.flags.writeable = False
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "coords", coords)

    def __getitem__(self, n):
        return extend(self, n)

    def __len__(self):
        return self.q

    def __repr__(self):
        xs = ", ".join(f"{v:.12g}" for v in self.coords)
        return f"Configuration(p={self.p}, q={self.q}, coords=({xs}))"

    def with_coords(self, coords):
        return Configuration(self.p, self.q, coords)

    def to_dict(self):
        return {"p": self.p, "q": self.q, "coords": [float(v) for v in self.coords]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["p"], d["q"], d["coords"])


def config(p, coords) -> Configuration:
    """Shorthand: q is taken from the number of coordinates."""
    coords = list(coords)
    return Configuration(p, len(coords), coords)


class OrderRelation(enum.Enum):
    EQUAL = "EQUAL"
    LESS_STRICT = "LESS_STRICT"
    LESS_WEAK = "LESS_WEAK"
    GREATER_STRICT = "GREATER_STRICT"
    GREATER_WEAK = "GREATER_WEAK"
    INCOMPARABLE = "INCOMPARABLE"

    def reverse(self):
        return _REVERSED[self]

    @property
    def comparable(self):
        return self is not OrderRelation.INCOMPARABLE


_REVERSED = {
    OrderRelation.EQUAL: OrderRelation.EQUAL,
    OrderRelation.LESS_STRICT: OrderRelation.GREATER_STRICT,
    OrderRelation.LESS_WEAK: OrderRelation.GREATER_WEAK,
    OrderRelation.GREATER_STRICT: OrderRelation.LESS_STRICT,
    OrderRelation.GREATER_WEAK: OrderRelation.LESS_WEAK,
    OrderRelation.INCOMPARABLE: OrderRelation.INCOMPARABLE,
}


def extend(c: Configuration, n: int) -> float:
    k, r = divmod(int(n), c.q)
    return float(c.coords[r] + c.p * k)


def _extended(c: Configuration, start: int, count: int) -> np.ndarray:
    n = np.arange(start, start + count)
    k, r = np.divmod(n, c.q)
    return c.coords[r] + c.p * k


def translate(c: Configuration, i: int, j: int) -> Configuration:
    """(tau_ij x)_k = x_{k+i} + j."""
    return c.with_coords(_extended(c, int(i), c.q) + j)


def reverse(c: Configuration) -> Configuration:
    """Time reversal x_k -> -x_{-k}, which maps X_pq to itself."""
    return c.with_coords(-_extended(c, -(c.q - 1), c.q)[::-1])


def _check_same_space(x, y):
    if (x.p, x.q) != (y.p, y.q):
        raise ValueError(f"mismatched (p,q): ({x.p},{x.q}) vs ({y.p},{y.q})")


def _relation(d: np.ndarray, tol: float) -> OrderRelation:
    tie = np.abs(d) <= tol
    above = d > tol
    below = d < -tol
    if tie.all():
        return OrderRelation.EQUAL
    if above.all():
        return OrderRelation.LESS_STRICT
    if below.all():
        return OrderRelation.GREATER_STRICT
    if not below.any():
        return OrderRelation.LESS_WEAK
    if not above.any():
        return OrderRelation.GREATER_WEAK
    return OrderRelation.INCOMPARABLE


def compare(x: Configuration, y: Configuration, tol: float = DEFAULT_TOL) -> OrderRelation:
    """Relation of ``x`` to ``y``: LESS_STRICT means x < y componentwise."""
    _check_same_space(x, y)
    return _relation(y.coords - x.coords, tol)


def _j_window(d: np.ndarray):
    # outside this window every d + j has one sign
    return range(math.ceil(-d.max()) - 1, math.floor(-d.min()) + 2)


def translates_against(x: Configuration, ref: Configuration):
    """Yield (i, j, tau_ij x) for every translate of ``x`` whose coordinates
    are not uniformly above or below ``ref``.

    Translates outside this set are strictly comparable with ``ref``.
    """
    for i in range(x.q):
        base = _extended(x, i, x.q)
        d = base - ref.coords
        for j in _j_window(d):
            yield i, j, x.with_coords(base + j)


def is_cyclically_ordered(c: Configuration, tol: float = DEFAULT_TOL) -> bool:
    for i in range(c.q):
        d = _extended(c, i, c.q) - c.coords
        for j in _j_window(d):
            if _relation(d + j, tol) is OrderRelation.INCOMPARABLE:
                return False
    return True


def comparable_with_all_translates(z: Configuration, x: Configuration,
                                   tol: float = DEFAULT_TOL) -> bool:
    """True iff z is comparable with every tau_ij x."""
    _check_same_space(z, x)
    return all(compare(t, z, tol).comparable for _, _, t in translates_against(x, z))


def aubry_value(c: Configuration, t: float) -> float:
    """Piecewise-linear interpolation of the points (n, x_n)."""
    n = math.floor(t)
    s = t - n
    a = extend(c, n)
    if s == 0.0:
        return a
    return (1.0 - s) * a + s * extend(c, n + 1)


def is_aubry_monotone(c: Configuration) -> bool:
    d = np.diff(_extended(c, 0, c.q + 1))
    return bool((d >= 0).all() or (d <= 0).all())


_SNAP = 1e-12


def _shift_to_unit(v: np.ndarray) -> np.ndarray:
    v = v - math.floor(v[0])
    if v[0] >= 1.0 - _SNAP:
        v = v - 1.0
    return v


def _lex_less(a, b, tol=_SNAP):
    for u, v in zip(a, b):
        if u < v - tol:
            return True
        if u > v + tol:
            return False
    return False


def unit_rotations(c: Configuration):
    """The q translates tau_{i,j} c whose first coordinate lies in [0, 1)."""
    return [c.with_coords(_shift_to_unit(_extended(c, i, c.q))) for i in range(c.q)]


def canonicalize(c: Configuration) -> Configuration:
    """Representative of c modulo the group generated by tau_10 and tau_01.

    Coordinate 0 is put in [0, 1) (up to a 1e-12 snap near integers) and the
    lexicographically smallest of the q rotations is chosen.
    """
    best = None
    for r in unit_rotations(c):
        if best is None or _lex_less(r.coords, best.coords):
            best = r
    return best


def same_class(a: Configuration, b: Configuration, tol: float = 1e-8) -> bool:
    """True iff some translate of ``a`` is within ``tol`` of ``b`` (max norm)."""
    _check_same_space(a, b)
    for i in range(a.q):
        base = _extended(a, i, a.q)
        j = round(b.coords[0] - base[0])
        if np.max(np.abs(base + j - b.coords)) <= tol:
            return True
    return False


class Region(enum.Enum):
    CLOSED_INTERVAL = "closed_interval"
    OPEN_INTERVAL = "open_interval"
    POS_CONE = "pos_cone"
    NEG_CONE = "neg_cone"
    CONE_BOUNDARY = "cone_boundary"


_WEAK_OR_STRICT_LESS = (OrderRelation.LESS_WEAK, OrderRelation.LESS_STRICT, OrderRelation.EQUAL)
_WEAK_OR_STRICT_GREATER = (OrderRelation.GREATER_WEAK, OrderRelation.GREATER_STRICT,
                           OrderRelation.EQUAL)


def region_test(z: Configuration, x: Configuration, y: Configuration = None,
                kind="closed_interval", tol: float = DEFAULT_TOL) -> bool:
    """Membership of ``z`` in an interval [x,y] / [[x,y]], a cone V+-(x), or
    the boundary of V+(x) u V-(x). ``y`` is ignored for cone kinds."""
    kind = Region(kind)
    if kind in (Region.CLOSED_INTERVAL, Region.OPEN_INTERVAL):
        if y is None:
            raise ValueError("interval kinds need both ends")
        ends = compare(x, y, tol)
        if ends not in _WEAK_OR_STRICT_LESS:
            raise ValueError(f"interval ends must satisfy x <= y, got {ends.name}")
        lo, hi = compare(x, z, tol), compare(z, y, tol)
        if kind is Region.OPEN_INTERVAL:
            return lo is OrderRelation.LESS_STRICT and hi is OrderRelation.LESS_STRICT
        return lo in _WEAK_OR_STRICT_LESS and hi in _WEAK_OR_STRICT_LESS
    rel = compare(x, z, tol)
    if kind is Region.POS_CONE:
        return rel in _WEAK_OR_STRICT_LESS
    if kind is Region.NEG_CONE:
        return rel in _WEAK_OR_STRICT_GREATER
    return rel in (OrderRelation.LESS_WEAK, OrderRelation.GREATER_WEAK)


def on_cone_boundary_of_translates(z: Configuration, x: Configuration,
                                   tol: float = DEFAULT_TOL):
    """Translates tau_ij x (other than z itself) on whose cone boundary z lies."""
    hits = []
    for i, j, t in translates_against(x, z):
        if compare(t, z, tol) in (OrderRelation.LESS_WEAK, OrderRelation.GREATER_WEAK):
            hits.append((i, j, t))
    return hits


def shares_coordinate(z: Configuration, others, tol: float = DEFAULT_TOL) -> bool:
    """Whether some z_k agrees mod 1 with some coordinate of one of ``others``."""
    zk = np.mod(z.coords, 1.0)
    for x in others:
        d = np.subtract.outer(zk, np.mod(x.coords, 1.0))
        d = np.abs(d - np.round(d))
        if (d <= tol).any():
            return True
    return False
