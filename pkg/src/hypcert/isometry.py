"""Isometry classification, translation lengths, axes, circumcenters,
and sampled Margulis domains with gap bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp

from . import freetree, graphspace, halfplane
from .errors import AmbiguityError, DomainError, InputError, PreconditionError

TOL = 1e-9

PARABOLIC_BAND = 1e-9
CROSS_CHECK_BAND = 1e-3
# the orbit estimator carries an O(log n / n) residual near the parabolic
# border, so the cross-check only flags gross contradictions
AMBIGUITY_TOL = 1e-2


@dataclass
class IsometryProfile:
    kind: str  # elliptic | parabolic | hyperbolic
    ell: float
    asymptotic: float
    axis: object = None
    fixed_boundary: tuple = ()
    fixed_point: object = None


def classify(g, space=None) -> IsometryProfile:
    """Type, translation length and boundary data of an isometry.

    Half-plane matrices classify by |trace|; near the parabolic border
    the orbit growth rate is consulted as an independent tiebreaker.
    Tree words classify by cyclically reduced length; finite-graph
    permutations are always elliptic.
    """
    if isinstance(g, halfplane.Moebius):
        return _classify_moebius(g)
    if isinstance(space, graphspace.MetricGraphSpace):
        return _classify_graph(space, g)
    if isinstance(g, str):
        return _classify_word(g)
    raise InputError(f"cannot classify {type(g).__name__}")


def _classify_moebius(g: halfplane.Moebius) -> IsometryProfile:
    tr = abs(g.trace())
    if abs(tr - 2.0) <= CROSS_CHECK_BAND:
        orbit = orbit_translation_length(g)
        trace_par = abs(tr - 2.0) <= PARABOLIC_BAND
        if trace_par and orbit > AMBIGUITY_TOL:
            raise AmbiguityError(
                "trace says parabolic but the orbit translates",
                trace_diag=tr, orbit_diag=orbit)
        if not trace_par:
            ell_tr = 2.0 * math.acosh(tr / 2.0) if tr > 2.0 else 0.0
            if abs(ell_tr - orbit) > AMBIGUITY_TOL:
                raise AmbiguityError(
                    "trace and orbit translation lengths disagree",
                    trace_diag=ell_tr, orbit_diag=orbit)
    if tr > 2.0 + PARABOLIC_BAND:
        ell = 2.0 * math.acosh(tr / 2.0)
        rep, att = _fixed_boundary_pair(g)
        return IsometryProfile("hyperbolic", ell, ell,
                               axis=halfplane.HGeodesic(rep, att),
                               fixed_boundary=(rep, att))
    if tr >= 2.0 - PARABOLIC_BAND:
        if g.is_identity():
            return IsometryProfile("elliptic", 0.0, 0.0, fixed_point=1j)
        fx = _parabolic_fixed_point(g)
        return IsometryProfile("parabolic", 0.0, 0.0, fixed_boundary=(fx,))
    return IsometryProfile("elliptic", 0.0, 0.0,
                           fixed_point=_elliptic_fixed_point(g))


def _fixed_boundary_pair(g):
    """(repelling, attracting) boundary fixed points of a hyperbolic matrix."""
    a, b, c, d = g.entries()
    if abs(c) < 1e-300:
        # fixed points are inf and b/(d-a)
        other = b / (d - a) if abs(d - a) > 0 else 0.0
        roots = [halfplane.INF, other]
    else:
        disc = math.sqrt((d - a) * (d - a) + 4.0 * b * c)
        roots = [((a - d) + disc) / (2.0 * c), ((a - d) - disc) / (2.0 * c)]
    # derivative at a fixed x is (cx + d)^-2; attracting iff |cx + d| > 1
    def mult(x):
        if math.isinf(x):
            return abs(a)  # |derivative|^(-1/2) at infinity in the chart 1/z
        return abs(c * x + d)
    roots.sort(key=mult)
    return roots[0], roots[1]


def _parabolic_fixed_point(g):
    a, b, c, d = g.entries()
    if abs(c) < 1e-12:
        return halfplane.INF
    return (a - d) / (2.0 * c)


def _elliptic_fixed_point(g):
    a, b, c, d = g.entries()
    disc = complex((d - a) * (d - a) + 4.0 * b * c) ** 0.5
    z1 = ((a - d) + disc) / (2.0 * c)
    z2 = ((a - d) - disc) / (2.0 * c)
    return z1 if z1.imag > 0 else z2


def orbit_translation_length(g: halfplane.Moebius, n: int = 1024) -> float:
    """Asymptotic displacement from the orbit of i under high powers.

    Uses (d(x, g^n x) - d(x, g^(n/2) x)) / (n/2): the additive offset of
    the orbit from the axis cancels, so the estimate converges fast.
    Evaluated in extended precision since the matrix powers overflow
    doubles for translation lengths over a few tenths.
    """
    half = n // 2
    with mp.workdps(60):
        M = mp.matrix([[g.a, g.b], [g.c, g.d]])
        Ph = M ** half
        Pf = Ph * Ph
        d_half = _mp_orbit_dist(Ph)
        d_full = _mp_orbit_dist(Pf)
        return float((d_full - d_half) / half)


def _mp_orbit_dist(P):
    # for det-1 matrices, sinh(d(i, Pi)/2) = sqrt((B+C)^2 + (A-D)^2) / 2,
    # which avoids the cancellation in Im(Pi) at huge powers
    s = mp.sqrt((P[0, 1] + P[1, 0]) ** 2 + (P[0, 0] - P[1, 1]) ** 2) / 2
    return 2 * mp.asinh(s)


def _classify_word(w: str) -> IsometryProfile:
    w = freetree.reduce_word(w)
    if not w:
        return IsometryProfile("elliptic", 0.0, 0.0, fixed_point="")
    conj, core = freetree.cyclic_reduce(w)
    ends = freetree.axis_ends(w)
    return IsometryProfile("hyperbolic", float(len(core)), float(len(core)),
                           axis=ends, fixed_boundary=ends,
                           fixed_point=None)


def _classify_graph(space, g) -> IsometryProfile:
    name = g if isinstance(g, str) else None
    if name not in space.isometries:
        raise InputError(f"unknown graph isometry {g!r}")
    center, _ = circumcenter(space, space.vertices)
    return IsometryProfile("elliptic", 0.0, 0.0, fixed_point=center)


def axis(g, space=None):
    prof = classify(g, space)
    if prof.kind != "hyperbolic":
        raise DomainError(f"{prof.kind} isometry has no axis")
    return prof.axis


def apply_isometry(space, g, x):
    if isinstance(g, halfplane.Moebius):
        return g(x) if isinstance(x, complex) else g.apply_boundary(x)
    if isinstance(g, str) and isinstance(space, freetree.FreeTreeSpace):
        return space.apply(g, x)
    if isinstance(space, graphspace.MetricGraphSpace):
        return space.apply(g, x)
    raise InputError("isometry/model mismatch")


def isometry_power(space, g, n: int):
    if isinstance(g, halfplane.Moebius):
        return g ** n
    if isinstance(g, str) and isinstance(space, freetree.FreeTreeSpace):
        base = g if n >= 0 else freetree.invert(g)
        return freetree.reduce_word(base * abs(n))
    raise InputError("powers supported for matrix and word isometries only")


def displacement(space, g, x) -> float:
    d = space.dist if not isinstance(space, halfplane.HalfPlane) else halfplane.dist
    return d(x, apply_isometry(space, g, x))


def power_displacement_check(space, g, x, n: int, delta: float):
    """Measured d(x, g^n x) against the logarithmic power bound."""
    if n < 1:
        raise InputError("need n >= 1")
    prof = classify(g, space)
    d = dist_fn(space)
    gx = apply_isometry(space, g, x)
    gnx = apply_isometry(space, isometry_power(space, g, n), x)
    measured = d(x, gnx)
    bound = d(x, gx) + (n - 1) * prof.ell + 4.0 * delta * math.log2(n)
    return measured, bound


def dist_fn(space):
    if isinstance(space, halfplane.HalfPlane):
        return halfplane.dist
    return space.dist


def circumcenter(space, pts):
    """The point minimizing the maximal distance to a finite set.

    In the half-plane the minimum is found by line searches toward the
    current farthest point (the max-distance function is convex along
    geodesics); discrete models return the best candidate point.
    """
    pts = list(pts)
    if not pts:
        raise InputError("empty point set")
    if len(pts) == 1:
        return pts[0], 0.0
    if isinstance(space, halfplane.HalfPlane):
        return _circumcenter_h2(pts)
    d = dist_fn(space)
    if isinstance(space, freetree.FreeTreeSpace):
        candidates = set()
        for p in pts:
            for q in pts:
                candidates.update(freetree.geodesic_path(p, q))
        candidates = sorted(candidates)
    else:
        candidates = space.vertices
    radii = [(max(d(c, p) for p in pts), c) for c in candidates]
    rad, center = min(radii, key=lambda t: (t[0], str(t[1])))
    return center, rad


def _circumcenter_h2(pts):
    def radius(z):
        return max(halfplane.dist(z, p) for p in pts)

    center = pts[0]
    rad = radius(center)
    for _ in range(400):
        far = max(pts, key=lambda p: halfplane.dist(center, p))
        span = halfplane.dist(center, far)
        if span < 1e-15:
            break
        geo = halfplane.HGeodesic.through(center, far)
        t0 = geo.param(center)
        lo, hi = 0.0, span
        for _ in range(90):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if radius(geo.at(t0 + m1)) <= radius(geo.at(t0 + m2)):
                hi = m2
            else:
                lo = m1
        new_center = geo.at(t0 + (lo + hi) / 2.0)
        new_rad = radius(new_center)
        if rad - new_rad < 1e-12:
            if new_rad < rad:
                center, rad = new_center, new_rad
            break
        center, rad = new_center, new_rad
    return center, rad


def margulis_membership(space, g, eps: float, x, power_cap: int):
    """Is x within the generalized Margulis domain of g at level eps?

    Tests d(x, g^i x) <= eps over 0 < i <= power_cap (negative powers
    give the same displacements).  For hyperbolic g, powers beyond
    eps / ell displace everything too far, so the scan stops there.
    """
    if eps <= 0 or power_cap < 1:
        raise InputError("need eps > 0 and power_cap >= 1")
    prof = classify(g, space)
    d = dist_fn(space)
    cap = power_cap
    if prof.kind == "hyperbolic":
        cap = min(cap, max(1, math.ceil(eps / prof.ell)))
    y = x
    for i in range(1, cap + 1):
        y = apply_isometry(space, g, y)
        if d(x, y) <= eps + TOL:
            return True, i
    return False, None


@dataclass
class MargulisDomainSample:
    g: object
    eps: float
    power_cap: int
    members: list = field(default_factory=list)
    witness_powers: dict = field(default_factory=dict)
    outside: list = field(default_factory=list)


def margulis_domain_sample(space, g, eps, sample, power_cap=64) -> MargulisDomainSample:
    out = MargulisDomainSample(g=g, eps=eps, power_cap=power_cap)
    for x in sample:
        member, i = margulis_membership(space, g, eps, x, power_cap)
        if member:
            out.members.append(x)
            out.witness_powers[_key(x)] = i
        else:
            out.outside.append(x)
    return out


def _key(x):
    return x if isinstance(x, (str, int, tuple)) else repr(x)


@dataclass
class GapReport:
    eps1: float
    eps2: float
    power_cap: int
    inner_count: int
    outer_count: int
    min_gap_observed: float
    lower_bound_i: float
    lower_bound_ii: float
    upper_span_observed: float


def gap_lower_bound_ii(P0, eps1, eps2) -> float:
    """Packing-based gap floor, valid for eps2 at most the packing scale."""
    if not (0 < eps1 < 2.0):
        raise InputError("bound requires 0 < eps1 < 2")
    return math.log(2.0 / eps1 - 1.0) / (2.0 * math.log(1.0 + P0)) * eps2 - 0.5


def domain_gap_report(space, g, eps1, eps2, sample, power_cap=64,
                      P0=None, r0=None) -> GapReport:
    """Sampled gap between the level-eps1 and level-eps2 domains of g.

    Points outside the eps2 domain must sit at least (eps2 - eps1)/2
    from the eps1 domain; the second bound applies when eps2 <= r0 for
    a declared packing profile (P0, r0).
    """
    if not (0 < eps1 <= eps2):
        raise InputError("need 0 < eps1 <= eps2")
    d = dist_fn(space)
    dom1 = margulis_domain_sample(space, g, eps1, sample, power_cap)
    dom2 = margulis_domain_sample(space, g, eps2, sample, power_cap)
    if not dom1.members:
        raise PreconditionError("inner domain empty on the sample")
    def to_inner(x):
        return min(d(x, y) for y in dom1.members)
    gaps = [to_inner(x) for x in dom2.outside]
    spans = [to_inner(x) for x in dom2.members]
    lb2 = None
    if P0 is not None and r0 is not None and eps2 <= r0 and eps1 < 2.0:
        lb2 = gap_lower_bound_ii(P0, eps1, eps2)
    return GapReport(
        eps1=eps1, eps2=eps2, power_cap=power_cap,
        inner_count=len(dom1.members), outer_count=len(dom2.outside),
        min_gap_observed=min(gaps) if gaps else math.inf,
        lower_bound_i=(eps2 - eps1) / 2.0,
        lower_bound_ii=lb2,
        upper_span_observed=max(spans) if spans else 0.0,
    )
