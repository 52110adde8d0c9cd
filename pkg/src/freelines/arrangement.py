"""Exact line arrangements in the projective plane and their lattice invariants.

Lines are integer-coprime linear forms a*x + b*y + c*z, sign-normalized so that
the first nonzero coefficient is positive: one canonical representative per
projective class, which makes hashing and deduplication trivial. Everything in
this module is integer or rational arithmetic; there is no floating point.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, isqrt


class ZeroForm(ValueError):
    """All three coefficients of a would-be linear form are zero."""


class DuplicateLine(ValueError):
    def __init__(self, i: int, j: int):
        super().__init__(f"lines {i} and {j} are the same projective line")
        self.i = i
        self.j = j


def _normalize_triple(a: int, b: int, c: int) -> tuple[int, int, int]:
    """Divide by the gcd and make the first nonzero entry positive."""
    g = gcd(gcd(abs(a), abs(b)), abs(c))
    a, b, c = a // g, b // g, c // g
    for v in (a, b, c):
        if v:
            if v < 0:
                a, b, c = -a, -b, -c
            break
    return a, b, c


@dataclass(frozen=True, order=True)
class Line:
    """Canonical integer form of a projective line a*x + b*y + c*z = 0."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if (self.a, self.b, self.c) != _normalize_triple(self.a, self.b, self.c):
            raise ValueError(f"non-canonical line coefficients {(self.a, self.b, self.c)}")

    @property
    def coeffs(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def evaluate(self, point: tuple[int, int, int]) -> int:
        x, y, z = point
        return self.a * x + self.b * y + self.c * z

    def __str__(self) -> str:
        return f"[{self.a}:{self.b}:{self.c}]"


RationalLike = int | str | Fraction


def _as_fraction(v: RationalLike) -> Fraction:
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


def canonicalize_line(a: RationalLike, b: RationalLike, c: RationalLike) -> Line:
    """Canonical representative of the projective class of a*x + b*y + c*z.

    Accepts integers, Fractions or "p/q" strings; clears denominators, divides
    by the gcd and sign-normalizes. Raises ZeroForm on the zero triple.
    """
    fa, fb, fc = _as_fraction(a), _as_fraction(b), _as_fraction(c)
    if fa == 0 and fb == 0 and fc == 0:
        raise ZeroForm("the zero form does not define a line")
    lcm = 1
    for f in (fa, fb, fc):
        lcm = lcm * f.denominator // gcd(lcm, f.denominator)
    ia, ib, ic = int(fa * lcm), int(fb * lcm), int(fc * lcm)
    return Line(*_normalize_triple(ia, ib, ic))


@dataclass(frozen=True)
class Arrangement:
    """Ordered tuple of pairwise distinct canonical lines."""

    lines: tuple[Line, ...]

    @property
    def n(self) -> int:
        return len(self.lines)

    def contains(self, line: Line) -> bool:
        return line in self.lines

    def extended(self, line: Line) -> "Arrangement":
        return build_arrangement(list(self.lines) + [line])


def build_arrangement(lines: list[Line] | tuple[Line, ...]) -> Arrangement:
    """Build an arrangement, preserving order and rejecting duplicates."""
    if not lines:
        raise ValueError("an arrangement needs at least one line")
    seen: dict[Line, int] = {}
    for i, line in enumerate(lines):
        if line in seen:
            raise DuplicateLine(seen[line], i)
        seen[line] = i
    return Arrangement(tuple(lines))


def arrangement_hash(arr: Arrangement) -> str:
    """sha256 over the sorted canonical coefficient triples.

    Sorting makes the hash independent of listing order; the defining
    polynomial, the lattice and freeness are all order-independent.
    """
    payload = ";".join(f"{l.a},{l.b},{l.c}" for l in sorted(arr.lines))
    return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Intersection lattice summary
# ---------------------------------------------------------------------------


def _cross(p: tuple[int, int, int], q: tuple[int, int, int]) -> tuple[int, int, int]:
    return (
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    )


def intersection_point(l1: Line, l2: Line) -> tuple[int, int, int]:
    """Canonical integer coordinates of the meet of two distinct lines."""
    return _normalize_triple(*_cross(l1.coeffs, l2.coeffs))


@dataclass(frozen=True)
class IntersectionPoint:
    coords: tuple[int, int, int]
    incident_lines: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.incident_lines)


@dataclass(frozen=True)
class LatticeSummary:
    """Multiplicity data of the intersection lattice.

    t maps each multiplicity m >= 2 to the number of m-fold points, b2 is
    sum (m_p - 1), and pair_count_check records the double-counting identity
    sum C(m,2) t_m = C(n,2).
    """

    n: int
    points: tuple[IntersectionPoint, ...]
    t: dict[int, int]
    b2: int
    pair_count_check: bool

    def multiplicity_of(self, coords: tuple[int, int, int]) -> int:
        for p in self.points:
            if p.coords == coords:
                return p.multiplicity
        return 0

    @property
    def max_multiplicity(self) -> int:
        return max((p.multiplicity for p in self.points), default=0)


@lru_cache(maxsize=4096)
def intersection_summary(arr: Arrangement) -> LatticeSummary:
    """Group all pairwise intersections by canonical point.

    O(n^2) pair enumeration with hash-map grouping; exact throughout.
    """
    groups: dict[tuple[int, int, int], set[int]] = {}
    lines = arr.lines
    n = len(lines)
    for i in range(n):
        for j in range(i + 1, n):
            pt = intersection_point(lines[i], lines[j])
            groups.setdefault(pt, set()).update((i, j))
    points = tuple(
        IntersectionPoint(coords, tuple(sorted(idx)))
        for coords, idx in sorted(groups.items())
    )
    t: dict[int, int] = {}
    for p in points:
        t[p.multiplicity] = t.get(p.multiplicity, 0) + 1
    b2 = sum(p.multiplicity - 1 for p in points)
    check = sum(comb(m, 2) * cnt for m, cnt in t.items()) == comb(n, 2)
    return LatticeSummary(n=n, points=points, t=dict(sorted(t.items())), b2=b2, pair_count_check=check)


# ---------------------------------------------------------------------------
# Candidate exponents, characteristic polynomial, Tjurina number
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CandidateExponents:
    d1: int
    d2: int
    discriminant: int

    def __post_init__(self):
        assert 1 <= self.d1 <= self.d2
        assert self.discriminant == (self.d2 - self.d1) ** 2


def discriminant(arr: Arrangement) -> int:
    s = intersection_summary(arr)
    n = arr.n
    return (n - 1) ** 2 - 4 * (s.b2 - n + 1)


def candidate_exponents(arr: Arrangement) -> CandidateExponents | None:
    """Integer roots (d1, d2) of t^2 - (n-1)t + (b2 - n + 1), if they exist.

    None when the discriminant is negative, not a perfect square, or the
    smaller root is not positive (pencils); see no_exponent_reason.
    """
    exps, _ = _exponents_with_reason(arr)
    return exps


def no_exponent_reason(arr: Arrangement) -> str | None:
    """Why candidate exponents do not exist, or None when they do."""
    _, reason = _exponents_with_reason(arr)
    return reason


def _exponents_with_reason(arr: Arrangement) -> tuple[CandidateExponents | None, str | None]:
    delta = discriminant(arr)
    if delta < 0:
        return None, "delta-negative"
    r = isqrt(delta)
    if r * r != delta:
        return None, "delta-not-square"
    n = arr.n
    d1 = (n - 1 - r) // 2
    d2 = (n - 1 + r) // 2
    if d1 < 1:
        return None, "nonpositive-root"
    return CandidateExponents(d1, d2, delta), None


@dataclass(frozen=True)
class CharPoly:
    """Cubic characteristic polynomial and its reduced quadratic factor.

    cubic holds (1, -n, b2, -(b2 - n + 1)); quadratic holds
    (1, -(n-1), b2 - n + 1); cubic = (t - 1) * quadratic and chi(1) = 0.
    """

    cubic: tuple[int, int, int, int]
    quadratic: tuple[int, int, int]

    def eval_cubic(self, t: int) -> int:
        c3, c2, c1, c0 = self.cubic
        return ((c3 * t + c2) * t + c1) * t + c0


def characteristic_polynomial(arr: Arrangement) -> CharPoly:
    s = intersection_summary(arr)
    n, b2 = arr.n, s.b2
    return CharPoly(
        cubic=(1, -n, b2, -(b2 - n + 1)),
        quadratic=(1, -(n - 1), b2 - n + 1),
    )


def tjurina(arr: Arrangement) -> int:
    """Total Tjurina number n(n-1) - b2, cross-checked against sum (m_p - 1)^2."""
    s = intersection_summary(arr)
    n = arr.n
    tau = n * (n - 1) - s.b2
    assert tau == sum((p.multiplicity - 1) ** 2 for p in s.points)
    exps = candidate_exponents(arr)
    if exps is not None:
        assert tau == (n - 1) ** 2 - exps.d1 * exps.d2
    return tau


# ---------------------------------------------------------------------------
# JSON arrangement files: {"lines": [[aStr, bStr, cStr], ...]}
# ---------------------------------------------------------------------------


def arrangement_to_json(arr: Arrangement) -> dict:
    return {"lines": [[str(l.a), str(l.b), str(l.c)] for l in arr.lines]}


def arrangement_from_json(data: dict) -> Arrangement:
    if not isinstance(data, dict) or "lines" not in data:
        raise ValueError("arrangement file needs a 'lines' key")
    raw = data["lines"]
    if not isinstance(raw, list) or not raw:
        raise ValueError("'lines' must be a nonempty list")
    lines = []
    for entry in raw:
        if not isinstance(entry, list) or len(entry) != 3:
            raise ValueError(f"line entry {entry!r} is not a coefficient triple")
        lines.append(canonicalize_line(*entry))
    return build_arrangement(lines)


def write_arrangement(path, arr: Arrangement) -> None:
    with open(path, "w") as fh:
        json.dump(arrangement_to_json(arr), fh, indent=2)
        fh.write("\n")


def read_arrangement(path) -> Arrangement:
    with open(path) as fh:
        return arrangement_from_json(json.load(fh))
