"""Upper half-plane model: exact distances, Moebius isometries, geodesics.

Points are complex numbers with positive imaginary part.  Boundary points
are reals, with ``math.inf`` standing for the point at infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError

INF = math.inf

TOL = 1e-9


def check_point(p) -> complex:
    p = complex(p)
    if not (p.imag > 0.0) or not (math.isfinite(p.real) and math.isfinite(p.imag)):
        raise InputError(f"not an upper half-plane point: {p}")
    return p


def dist(p, q) -> float:
    """Hyperbolic distance, via sinh(d/2) = |p-q| / (2 sqrt(Im p Im q)).

    The asinh form stays accurate for very distant points, where the
    cosh identity would overflow.
    """
    p, q = check_point(p), check_point(q)
    num = math.hypot(p.real - q.real, p.imag - q.imag)
    return 2.0 * math.asinh(num / (2.0 * math.sqrt(p.imag) * math.sqrt(q.imag)))


def boundary_eq(x, y, tol=TOL) -> bool:
    if math.isinf(x) or math.isinf(y):
        return math.isinf(x) and math.isinf(y)
    return abs(x - y) <= tol


class Moebius:
    """Real Moebius transformation acting on the upper half-plane.

    Stored with determinant one; the sign ambiguity (+M and -M act
    identically) is resolved by normalizing to nonnegative trace, with the
    first nonzero entry positive as tiebreaker.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        det = a * d - b * c
        if det <= 0:
            raise InputError(f"matrix with nonpositive determinant {det}")
        s = math.sqrt(det)
        self._set(a / s, b / s, c / s, d / s)

    def _set(self, a, b, c, d):
        tr = a + d
        if tr < 0 or (tr == 0 and _first_nonzero(a, b, c, d) < 0):
            a, b, c, d = -a, -b, -c, -d
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def _unit(cls, a, b, c, d):
        # for products of already det-1 matrices, where recomputing the
        # determinant would lose to cancellation at large entries
        m = cls.__new__(cls)
        m._set(a, b, c, d)
        return m

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    def trace(self) -> float:
        return self.a + self.d

    def inverse(self) -> "Moebius":
        return Moebius._unit(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "Moebius") -> "Moebius":
        return Moebius._unit(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __pow__(self, n: int) -> "Moebius":
        if n == 0:
            return Moebius.identity()
        base = self if n > 0 else self.inverse()
        n = abs(n)
        out = Moebius.identity()
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out

    def __call__(self, z):
        if isinstance(z, complex):
            den = self.c * z + self.d
            m2 = den.real * den.real + den.imag * den.imag
            num = (self.a * z + self.b) * den.conjugate()
            # Im(gz) = Im(z) / |cz + d|^2 for det 1: exact positivity,
            # where the plain complex division cancels to zero
            return complex(num.real / m2, z.imag / m2)
        return self.apply_boundary(z)

    def apply_boundary(self, x: float) -> float:
        if math.isinf(x):
            return self.a / self.c if self.c != 0 else INF
        den = self.c * x + self.d
        if den == 0:
            return INF
        return (self.a * x + self.b) / den

    def is_identity(self, tol=TOL) -> bool:
        return (
            abs(self.b) <= tol
            and abs(self.c) <= tol
            and abs(self.a - self.d) <= tol
            and abs(abs(self.a) - 1.0) <= tol
        )

    def max_entry_gap(self, other: "Moebius") -> float:
        """Max entrywise distance, modulo the projective sign."""
        g1 = max(
            abs(self.a - other.a), abs(self.b - other.b),
            abs(self.c - other.c), abs(self.d - other.d),
        )
        g2 = max(
            abs(self.a + other.a), abs(self.b + other.b),
            abs(self.c + other.c), abs(self.d + other.d),
        )
        return min(g1, g2)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return f"Moebius({self.a:.6g}, {self.b:.6g}, {self.c:.6g}, {self.d:.6g})"


def _first_nonzero(*vals):
    for v in vals:
        if v != 0:
            return v
    return 0.0


@dataclass(frozen=True)
class HGeodesic:
    """Oriented complete geodesic with unit-speed parameterization.

    ``neg``/``pos`` are the boundary endpoints (reals or inf).  Vertical
    lines are parameterized as x + i e^{+-t}; circles via the Moebius map
    sending (0, inf) to (neg, pos), so t = 0 sits at the apex.
    """

    neg: float
    pos: float

    def __post_init__(self):
        if boundary_eq(self.neg, self.pos):
            raise InputError("coincident boundary endpoints")

    @classmethod
    def through(cls, p, q) -> "HGeodesic":
        """The geodesic through two interior points, oriented p -> q."""
        p, q = check_point(p), check_point(q)
        if abs(p.real - q.real) <= 1e-14 * max(1.0, abs(p.real)):
            x0 = p.real
            return cls(x0, INF) if q.imag > p.imag else cls(INF, x0)
        c = (abs(p) ** 2 - abs(q) ** 2) / (2.0 * (p.real - q.real))
        r = abs(p - c)
        u, v = c - r, c + r
        # orient so q lies forward of p
        g = cls(u, v)
        return g if g.param(q) > g.param(p) else cls(v, u)

    def at(self, t: float) -> complex:
        if math.isinf(self.pos):
            return complex(self.neg, math.exp(t))
        if math.isinf(self.neg):
            return complex(self.pos, math.exp(-t))
        u, v = self.neg, self.pos
        if t >= 0:
            s2 = math.exp(-2.0 * t)
            return complex((u * s2 + v) / (s2 + 1.0),
                           math.exp(-t) * (v - u) / (s2 + 1.0))
        s2 = math.exp(2.0 * t)
        return complex((u + s2 * v) / (1.0 + s2),
                       math.exp(t) * (v - u) / (1.0 + s2))

    def param(self, z) -> float:
        """Arclength parameter of the nearest-point projection of z."""
        z = check_point(z)
        if math.isinf(self.pos):
            return math.log(abs(z - self.neg))
        if math.isinf(self.neg):
            return -math.log(abs(z - self.pos))
        return math.log(abs(z - self.neg)) - math.log(abs(self.pos - z))

    def param_boundary(self, xi: float) -> float:
        """Parameter of the projection of a boundary point (limit of feet)."""
        if boundary_eq(xi, self.neg) or boundary_eq(xi, self.pos):
            raise InputError("boundary point is an endpoint of the geodesic")
        if math.isinf(self.pos):
            return math.log(abs(xi - self.neg)) if not math.isinf(xi) else INF
        if math.isinf(self.neg):
            return -math.log(abs(xi - self.pos)) if not math.isinf(xi) else -INF
        if math.isinf(xi):
            return 0.0
        return math.log(abs(xi - self.neg)) - math.log(abs(self.pos - xi))

    def project(self, z) -> complex:
        return self.at(self.param(z))

    def project_boundary(self, xi: float) -> complex:
        return self.at(self.param_boundary(xi))

    def distance_to(self, z) -> float:
        return dist(z, self.project(z))

    def reversed(self) -> "HGeodesic":
        return HGeodesic(self.pos, self.neg)

    def boundary(self):
        return (self.neg, self.pos)


def rotation_about_i(theta: float) -> Moebius:
    """Elliptic rotation by angle theta around the point i."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return Moebius(c, -s, s, c)


def point_at(origin: complex, theta: float, rho: float) -> complex:
    """Point at hyperbolic distance rho from ``origin``, direction theta.

    theta = pi/2 points straight up.  Evaluated in closed form so that
    very large rho stays representable.
    """
    origin = check_point(origin)
    # geodesic polar formula around i, then translate i -> origin
    c = math.cos((math.pi / 2.0 - theta) / 2.0)
    s = math.sin((math.pi / 2.0 - theta) / 2.0)
    e = math.exp(rho)
    den = c * c + s * s * e * e
    zx = c * s * (e * e - 1.0) / den
    zy = e / den
    y0 = origin.imag
    return complex(y0 * zx + origin.real, y0 * zy)


class HalfPlane:
    """Model-space facade bundling the module's distance and geodesic tools."""

    def dist(self, p, q) -> float:
        return dist(p, q)

    def apply(self, g: Moebius, p: complex) -> complex:
        return g(check_point(p))

    def geodesic(self, p, q) -> HGeodesic:
        return HGeodesic.through(p, q)

    def geodesic_from_boundary(self, neg: float, pos: float) -> HGeodesic:
        return HGeodesic(neg, pos)

    def sample_ball(self, center, R, n, rng) -> list:
        return sample_ball(center, R, n, rng)


H2 = HalfPlane()


def sample_ball(center: complex, R: float, n: int, rng) -> list[complex]:
    """n points uniform in hyperbolic area on the closed ball B(center, R).

    Radius is drawn by inverting the area CDF (density sinh), angle
    uniform; equivalent in law to disk-model rejection sampling but with
    no rejections and no precision loss at large R.
    """
    center = check_point(center)
    if R <= 0 or n < 1:
        raise InputError("need R > 0 and n >= 1")
    pts = []
    # cosh R - 1 computed stably for both tiny and huge R
    cap = 2.0 * math.sinh(R / 2.0) ** 2
    for _ in range(n):
        u = rng.random()
        rho = 2.0 * math.asinh(math.sqrt(u * cap / 2.0))
        theta = rng.random() * 2.0 * math.pi
        pts.append(point_at(center, theta, rho))
    return pts
