"""Cayley trees of free groups: reduced-word arithmetic, geodesics, ends.

Group elements and tree vertices are freely reduced words over
a..z (generators) and A..Z (their inverses); the empty string is the
identity vertex.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InputError

_WORD_TOKEN = re.compile(r"\s*([a-zA-Z])(?:\^(-?\d+))?")


def reduce_word(w: str) -> str:
    out = []
    for ch in w:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def invert(w: str) -> str:
    return w[::-1].swapcase()


def is_reduced(w: str) -> bool:
    return all(w[i] != w[i + 1].swapcase() for i in range(len(w) - 1))


def parse_word(text: str) -> str:
    """Parse generator syntax like "ab^-1" or "a^3 b^-2" to a reduced word."""
    pos = 0
    out = []
    while pos < len(text):
        m = _WORD_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise InputError(f"bad word syntax at {text[pos:]!r}")
            break
        letter, exp = m.group(1), int(m.group(2) or 1)
        if exp < 0:
            letter, exp = letter.swapcase(), -exp
        out.append(letter * exp)
        pos = m.end()
    return reduce_word("".join(out))


def format_word(w: str) -> str:
    """Render a reduced word back into the a^n b^-m syntax."""
    if not w:
        return "e"
    out = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        n = j - i
        ch = w[i]
        base, exp = (ch, n) if ch.islower() else (ch.lower(), -n)
        out.append(base if exp == 1 else f"{base}^{exp}")
        i = j
    return "".join(out)


def common_prefix(u: str, v: str) -> str:
    n = min(len(u), len(v))
    i = 0
    while i < n and u[i] == v[i]:
        i += 1
    return u[:i]


def mul(u: str, v: str) -> str:
    return reduce_word(u + v)


def word_dist(u: str, v: str) -> int:
    return len(mul(invert(u), v))


def median(u: str, v: str, w: str) -> str:
    """The tree median: the unique common point of the three geodesics."""
    p = common_prefix(mul(invert(u), v), mul(invert(u), w))
    return mul(u, p)


def geodesic_path(u: str, v: str) -> list:
    """All vertices on [u, v], endpoints included, in order."""
    p = common_prefix(u, v)
    down = [u[:k] for k in range(len(u), len(p), -1)]
    up = [v[:k] for k in range(len(p), len(v) + 1)]
    return down + up


def cyclic_reduce(w: str) -> tuple:
    """Returns (conjugator c, core u) with w = c u c^-1 and u cyclically reduced."""
    w = reduce_word(w)
    c = []
    while len(w) >= 2 and w[0] == w[-1].swapcase():
        c.append(w[0])
        w = w[1:-1]
    return "".join(c), w


def primitive_root(u: str) -> str:
    """Shortest v with u = v^k (cyclic words are handled by the caller)."""
    n = len(u)
    for d in range(1, n + 1):
        if n % d == 0 and u == u[:d] * (n // d):
            return u[:d]
    return u


@dataclass(frozen=True)
class TreeEnd:
    """End of the tree: the eventually periodic ray prefix . period^infinity.

    Canonical form: primitive period, and the shortest prefix (trailing
    letters shared with the period end are absorbed by rotating it), so
    equality of ends is string equality.
    """

    prefix: str
    period: str

    def __post_init__(self):
        if not self.period:
            raise InputError("empty period")
        p, q = self.prefix, primitive_root(self.period)
        while p and p[-1] == q[-1]:
            p = p[:-1]
            q = q[-1] + q[:-1]
        if not is_reduced(p + q + q):
            raise InputError(f"non-reduced ray {p!r}.{q!r}")
        object.__setattr__(self, "prefix", p)
        object.__setattr__(self, "period", q)

    def ray_word(self, length: int) -> str:
        reps = -(-max(0, length - len(self.prefix)) // len(self.period)) + 1
        return (self.prefix + self.period * reps)[:length]

    def translate(self, g: str) -> "TreeEnd":
        # g may cancel through the prefix into the periodic part; absorb
        # periods until the junction is reduced (g is finite, so this stops)
        p, q = reduce_word(g + self.prefix), self.period
        while not is_reduced(p + q):
            p = reduce_word(p + q)
        return TreeEnd(p, q)


def axis_ends(w: str) -> tuple:
    """(repelling, attracting) ends of a hyperbolic element."""
    c, u = cyclic_reduce(w)
    if not u:
        raise InputError("elliptic word has no axis")
    return TreeEnd(c, invert(u)), TreeEnd(c, u)


class FreeTreeSpace:
    """The Cayley tree of the free group of the given rank."""

    def __init__(self, rank: int = 2):
        if not 2 <= rank <= 26:
            raise InputError("rank must be between 2 and 26")
        self.rank = rank
        self.letters = [chr(ord("a") + i) for i in range(rank)]
        self.alphabet = set("".join(self.letters) + "".join(self.letters).upper())

    def check_point(self, w: str) -> str:
        if not isinstance(w, str) or not set(w) <= self.alphabet:
            raise InputError(f"not a word over rank-{self.rank} alphabet: {w!r}")
        if not is_reduced(w):
            raise InputError(f"word not freely reduced: {w!r}")
        return w

    def dist(self, u: str, v: str) -> int:
        return word_dist(self.check_point(u), self.check_point(v))

    def apply(self, g: str, p: str) -> str:
        return mul(self.check_point(g), self.check_point(p))

    def geodesic(self, u: str, v: str) -> list:
        if u == v:
            raise InputError("coincident endpoints")
        return geodesic_path(self.check_point(u), self.check_point(v))

    def ball(self, center: str, R: int) -> list:
        """All vertices within distance R of center, BFS order."""
        center = self.check_point(center)
        shells = [[""]]
        for _ in range(int(R)):
            shells.append(sorted(
                w + ch
                for w in shells[-1]
                for ch in self.alphabet
                if not w or ch != w[-1].swapcase()
            ))
        return [mul(center, w) for shell in shells for w in shell]

    def sphere_sizes(self, R: int) -> list:
        """Vertex counts of the spheres S(e, 0..R)."""
        k = 2 * self.rank
        sizes = [1]
        if R >= 1:
            sizes.append(k)
        for _ in range(2, R + 1):
            sizes.append(sizes[-1] * (k - 1))
        return sizes[: R + 1]

    def sample_ball(self, center: str, R, n: int, rng=None) -> list:
        """The whole ball when it has at most n vertices, else n seeded picks."""
        pts = self.ball(center, int(R))
        if len(pts) <= n or rng is None:
            return pts
        keep = sorted(rng.sample(range(len(pts)), n))
        out = [pts[i] for i in keep]
        if center not in out:
            out[0] = center
        return out
