"""Region-of-influence geometry, the 1+1 lightcone causal lattice, timelike lines.

Transverse-invariant spacetime sets (invariant under x1, x2 translations) are
represented by finite unions of rectangles in the lightcone coordinates
u = x0 - x3, v = x0 + x3, each endpoint carrying an open/closed flag.  Between
two points the spacelike relation reads Du Dv < 0 and the non-timelike one
Du Dv <= 0, so both causal complements reduce to exact interval computations:

    rect^perp          = (above u x below v) u (below u x above v)
    rect^perp' allowed = ({u <= inf U} u {v <= inf V}) n ({u >= sup U} u {v >= sup V})

with the perp' result then stripped of the region itself (x != y).

Timelike lines are parameterized as (x, v) = (0, x) + R (1, v) with |v| < 1;
the set of lines meeting a region carries the Lebesgue measure of R^3 x O_1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INF = float("inf")


# --- interval algebra with open/closed flags ---------------------------------


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if self.lo == -INF and not self.lo_open:
            object.__setattr__(self, "lo_open", True)
        if self.hi == INF and not self.hi_open:
            object.__setattr__(self, "hi_open", True)

    @property
    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and (self.lo_open or self.hi_open)

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and self.lo_open:
            return False
        if x == self.hi and self.hi_open:
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo or (self.lo == other.lo and self.lo_open):
            lo, lo_open = self.lo, self.lo_open
        else:
            lo, lo_open = other.lo, other.lo_open
        if self.hi < other.hi or (self.hi == other.hi and self.hi_open):
            hi, hi_open = self.hi, self.hi_open
        else:
            hi, hi_open = other.hi, other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def subtract(self, other: "Interval"):
        """self minus other, as a list of up to two intervals."""
        cut = self.intersect(other)
        if cut.empty:
            return [self]
        out = []
        left = Interval(self.lo, cut.lo, self.lo_open, not cut.lo_open)
        if not left.empty:
            out.append(left)
        right = Interval(cut.hi, self.hi, not cut.hi_open, self.hi_open)
        if not right.empty:
            out.append(right)
        return out

    def above(self) -> "Interval":
        """{x : x > x' for all x' in self}: flips the endpoint flag."""
        return Interval(self.hi, INF, lo_open=not self.hi_open, hi_open=True)

    def below(self) -> "Interval":
        return Interval(-INF, self.lo, lo_open=True, hi_open=not self.lo_open)

    @staticmethod
    def all() -> "Interval":
        return Interval(-INF, INF, True, True)

    @staticmethod
    def le(a: float) -> "Interval":
        return Interval(-INF, a, True, False)

    @staticmethod
    def lt(a: float) -> "Interval":
        return Interval(-INF, a, True, True)

    @staticmethod
    def ge(a: float) -> "Interval":
        return Interval(a, INF, False, True)

    @staticmethod
    def gt(a: float) -> "Interval":
        return Interval(a, INF, True, True)

    @staticmethod
    def point(a: float) -> "Interval":
        return Interval(a, a, False, False)


@dataclass(frozen=True)
class Rect:
    u: Interval
    v: Interval

    @property
    def empty(self) -> bool:
        return self.u.empty or self.v.empty

    def contains(self, u: float, v: float) -> bool:
        return self.u.contains(u) and self.v.contains(v)

    def intersect(self, other: "Rect") -> "Rect":
        return Rect(self.u.intersect(other.u), self.v.intersect(other.v))

    def subtract(self, other: "Rect"):
        cut_u = self.u.intersect(other.u)
        cut_v = self.v.intersect(other.v)
        if cut_u.empty or cut_v.empty:
            return [self]
        out = [Rect(piece, self.v) for piece in self.u.subtract(cut_u)]
        out.extend(Rect(cut_u, piece) for piece in self.v.subtract(cut_v))
        return [r for r in out if not r.empty]


class LightconeRegion:
    """Finite union of pairwise-disjoint (u, v) rectangles; normalization idempotent."""

    def __init__(self, rects=()):
        disjoint: list[Rect] = []
        for r in rects:
            if r.empty:
                continue
            pieces = [r]
            for existing in disjoint:
                pieces = [q for p in pieces for q in p.subtract(existing)]
            disjoint.extend(pieces)
        self.rects = tuple(disjoint)

    # --- constructors ----------------------------------------------------
    @staticmethod
    def empty() -> "LightconeRegion":
        return LightconeRegion([])

    @staticmethod
    def full() -> "LightconeRegion":
        return LightconeRegion([Rect(Interval.all(), Interval.all())])

    @staticmethod
    def h(iv: Interval) -> "LightconeRegion":
        """Half-space family on u = x0 - x3."""
        return LightconeRegion([Rect(iv, Interval.all())])

    @staticmethod
    def k(iv: Interval) -> "LightconeRegion":
        """Half-space family on v = x0 + x3."""
        return LightconeRegion([Rect(Interval.all(), iv)])

    @staticmethod
    def rect(u: Interval, v: Interval) -> "LightconeRegion":
        return LightconeRegion([Rect(u, v)])

    @staticmethod
    def point(u: float, v: float) -> "LightconeRegion":
        return LightconeRegion([Rect(Interval.point(u), Interval.point(v))])

    # --- set algebra ------------------------------------------------------
    @property
    def is_empty(self) -> bool:
        return len(self.rects) == 0

    def contains(self, u: float, v: float) -> bool:
        return any(r.contains(u, v) for r in self.rects)

    def union(self, other: "LightconeRegion") -> "LightconeRegion":
        return LightconeRegion(list(self.rects) + list(other.rects))

    def intersect(self, other: "LightconeRegion") -> "LightconeRegion":
        return LightconeRegion(
            [a.intersect(b) for a in self.rects for b in other.rects]
        )

    def subtract(self, other: "LightconeRegion") -> "LightconeRegion":
        pieces = list(self.rects)
        for b in other.rects:
            pieces = [q for p in pieces for q in p.subtract(b)]
        return LightconeRegion(pieces)

    def equals(self, other: "LightconeRegion") -> bool:
        return self.subtract(other).is_empty and other.subtract(self).is_empty

    def __repr__(self) -> str:
        def fmt(iv: Interval) -> str:
            l = "(" if iv.lo_open else "["
            r = ")" if iv.hi_open else "]"
            return f"{l}{iv.lo:g},{iv.hi:g}{r}"

        return "Region{" + " u ".join(f"{fmt(r.u)}x{fmt(r.v)}" for r in self.rects) + "}"

    # --- causal complements -------------------------------------------------
    def perp(self) -> "LightconeRegion":
        """Spacelike complement: (x - y)^2 < 0 against every point."""
        out = LightconeRegion.full()
        for r in self.rects:
            piece = LightconeRegion(
                [Rect(r.u.above(), r.v.below()), Rect(r.u.below(), r.v.above())]
            )
            out = out.intersect(piece)
        return out

    def perp_ntl(self) -> "LightconeRegion":
        """Non-timelike complement: x != y and (x - y)^2 <= 0 against every point."""
        out = LightconeRegion.full()
        for r in self.rects:
            low = LightconeRegion.h(Interval.le(r.u.lo)).union(
                LightconeRegion.k(Interval.le(r.v.lo))
            )
            high = LightconeRegion.h(Interval.ge(r.u.hi)).union(
                LightconeRegion.k(Interval.ge(r.v.hi))
            )
            out = out.intersect(low.intersect(high))
        return out.subtract(self)

    def completion(self) -> "LightconeRegion":
        return self.perp().perp()

    def completion_ntl(self) -> "LightconeRegion":
        return self.perp_ntl().perp_ntl()


def causal_complement(region: LightconeRegion) -> LightconeRegion:
    return region.perp()


def ntl_complement(region: LightconeRegion) -> LightconeRegion:
    return region.perp_ntl()


def completion(region: LightconeRegion) -> LightconeRegion:
    return region.completion()


def meet(a: LightconeRegion, b: LightconeRegion) -> LightconeRegion:
    """Lattice meet of complete regions: plain intersection."""
    return a.intersect(b)


def join(a: LightconeRegion, b: LightconeRegion) -> LightconeRegion:
    """Lattice join: completion of the union."""
    return a.union(b).completion()


def spacelike_ray_perp(u0: float, v0: float, du: int, include_start: bool = True) -> LightconeRegion:
    """Spacelike complement of the diagonal ray {(u0 + s du, v0 - s du) : s >= 0}.

    du = +1 runs toward growing u (falling v), du = -1 the mirror.  The product
    (u - u(s))(v - v(s)) is concave in s, so the complement is the pair of
    quadrant conditions at the clamped vertex -- plain rectangles.  An open
    start (include_start = False) relaxes the strict inequality at s = 0 to a
    closed one.
    """
    if du == +1:
        quad_u = Interval.lt(u0) if include_start else Interval.le(u0)
        quad_v = Interval.gt(v0) if include_start else Interval.ge(v0)
    else:
        quad_u = Interval.gt(u0) if include_start else Interval.ge(u0)
        quad_v = Interval.lt(v0) if include_start else Interval.le(v0)
    return LightconeRegion([Rect(quad_u, quad_v)])


# --- region-of-influence closed forms ----------------------------------------


@dataclass(frozen=True)
class BallDescriptor:
    center: tuple
    radius: float


def influence_ball(y, t: float) -> BallDescriptor:
    """Influence of the event (t, y) in the t = 0 space: ball (y, |t|)."""
    y = tuple(float(c) for c in y)
    return BallDescriptor(y, abs(float(t)))


def influence_boosted_point(y, rho: float) -> BallDescriptor:
    """Influence of the boosted point A_rho . y: ball around (y1, y2, cosh(rho) y3)."""
    y = [float(c) for c in y]
    return BallDescriptor((y[0], y[1], np.cosh(rho) * y[2]), abs(np.sinh(rho) * y[2]))


def influence_strip(a: float, b: float, rho: float):
    """{a <= x e <= b} (0 <= a < b) boosted: [a e^{-|rho|}, b e^{|rho|}]."""
    if not 0.0 <= a < b:
        raise ValueError("strip needs 0 <= a < b")
    r = abs(rho)
    return a * np.exp(-r), b * np.exp(r)


def influence_cylinder(c: float, a: float, b: float, rho: float):
    """Revolution profile of the boosted cylinder {x1^2+x2^2 <= c^2, a <= x3 <= b}.

    Returns the profile in the (x1, x3) half-plane: corner points P1..P4, the
    two circular arcs around the boosted end faces, and the straight flank.
    """
    if not 0.0 <= a < b or c <= 0:
        raise ValueError("cylinder needs 0 <= a < b and c > 0")
    r = abs(rho)
    ch, sh, th = np.cosh(r), np.sinh(r), np.tanh(r)
    return {
        "P1": (c, 0.0, a * np.exp(-r)),
        "P2": (c + th * a, 0.0, a / ch),
        "P3": (c + th * b, 0.0, b / ch),
        "P4": (c, 0.0, b * np.exp(r)),
        "arc_low": {"center": (c, 0.0, ch * a), "radius": sh * a},
        "arc_high": {"center": (c, 0.0, ch * b), "radius": sh * b},
    }


def in_boosted_ball_influence(x, center, radius: float, rho: float, n_scan: int = 400) -> bool:
    """Whether x lies in the influence region of the boosted ball (center, radius).

    The influence is the union over ball points y of balls around
    (y1, y2, cosh(rho) y3) with radius |sinh(rho) y3|; minimized by a scan over
    the ball cross-section through x (rotational symmetry around e3 offsets).
    """
    x = np.asarray(x, dtype=float)
    c = np.asarray(center, dtype=float)
    ch, sh = np.cosh(rho), np.sinh(rho)
    best = INF
    for y3 in np.linspace(c[2] - radius, c[2] + radius, n_scan):
        s = np.sqrt(max(radius**2 - (y3 - c[2]) ** 2, 0.0))
        # transverse offset along the direction of x_perp reaches the boundary circle
        xp = x[:2] - c[:2]
        xp_norm = np.linalg.norm(xp)
        for frac in np.linspace(-1.0, 1.0, 40):
            yp = c[:2] + (frac * s) * (xp / xp_norm if xp_norm > 0 else np.array([1.0, 0.0]))
            dist = np.sqrt(np.sum((x[:2] - yp) ** 2) + (x[2] - ch * y3) ** 2)
            best = min(best, dist - abs(sh * y3))
    return best <= 1e-9


# --- diamonds and timelike lines --------------------------------------------


@dataclass(frozen=True)
class DiamondRegion:
    """{x : |x0 - c| + |x - a| <= r}: the completion of a flat ball base."""

    c: float
    a: tuple
    r: float

    def contains_event(self, x0: float, x) -> bool:
        return abs(x0 - self.c) + float(np.linalg.norm(np.asarray(x) - self.a)) <= self.r


@dataclass(frozen=True)
class TimelikeLine:
    """(x, v) = the line {(s, x + s v) : s in R} with |v| < 1."""

    x: tuple
    v: tuple

    def __post_init__(self):
        if np.linalg.norm(self.v) >= 1.0:
            raise ValueError("timelike lines need |v| < 1")


def line_hits(diamond: DiamondRegion, line: TimelikeLine, tol: float = 1e-10) -> bool:
    """Whether the line meets the diamond: ternary search on the convex gap.

    f(s) = |s - c| + |x + s v - a| - r is convex; hit iff min f <= 0.
    """
    x = np.asarray(line.x, dtype=float)
    v = np.asarray(line.v, dtype=float)
    a = np.asarray(diamond.a, dtype=float)

    def f(s):
        return abs(s - diamond.c) + np.linalg.norm(x + s * v - a) - diamond.r

    # the minimizer lies within |s - c| <= r + |x + c v - a| of the apex time
    span = diamond.r + np.linalg.norm(x + diamond.c * v - a) + 1.0
    lo, hi = diamond.c - span, diamond.c + span
    while hi - lo > tol:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) < f(m2):
            hi = m2
        else:
            lo = m1
    return f(0.5 * (lo + hi)) <= tol


def hits_all(diamonds, lines_x: np.ndarray, lines_v: np.ndarray) -> np.ndarray:
    """Vectorized all-diamonds hit test for line batches (ternary search in lockstep)."""
    n = lines_x.shape[0]
    ok = np.ones(n, dtype=bool)
    for d in diamonds:
        a = np.asarray(d.a, dtype=float)
        span = d.r + np.linalg.norm(lines_x + d.c * lines_v - a, axis=1) + 1.0
        lo = np.full(n, d.c) - span
        hi = np.full(n, d.c) + span

        def f(s):
            pos = lines_x + s[:, None] * lines_v
            return np.abs(s - d.c) + np.linalg.norm(pos - a, axis=1) - d.r

        for _ in range(60):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            smaller = f(m1) < f(m2)
            hi = np.where(smaller, m2, hi)
            lo = np.where(smaller, lo, m1)
        ok &= f(0.5 * (lo + hi)) <= 1e-10
    return ok


def line_hits_region(region: LightconeRegion, line: TimelikeLine) -> bool:
    """Exact hit test against a transverse-invariant (u, v) region.

    Along the line u(s) = s(1 - v3) - x3 and v(s) = s(1 + v3) + x3 are both
    strictly increasing, so each rectangle pulls back to an s-interval.
    """
    x3 = float(line.x[2])
    v3 = float(line.v[2])
    for r in region.rects:
        su = _pullback(r.u, 1.0 - v3, -x3)
        sv = _pullback(r.v, 1.0 + v3, x3)
        if not su.intersect(sv).empty:
            return True
    return False


def _pullback(iv: Interval, slope: float, offset: float) -> Interval:
    """{s : slope * s + offset in iv} for slope > 0."""
    lo = (iv.lo - offset) / slope if np.isfinite(iv.lo) else -INF
    hi = (iv.hi - offset) / slope if np.isfinite(iv.hi) else INF
    return Interval(lo, hi, iv.lo_open, iv.hi_open)


# --- reference sets and constants --------------------------------------------

#: lambda^6 of {(x, v) : |v| <= 1 - |x|} = (4 pi/3)(4 pi) B(3, 4) = 4 pi^2 / 45:
#: the lines staying inside the unit ball at unit speed budget |x| + |v| <= 1
SHRINKING_BALL_MEASURE = 4.0 * np.pi**2 / 45.0

#: lambda^6 of {(x, v) : |x + v| <= 1 and |x - v| <= 1}: the exact set of lines
#: meeting both diamonds {|x0 -+ 1| + |x| <= 1}.  A hit of {|x0 - 1| + |x| <= 1}
#: at any time s forces |x + v| <= 1 (convexity: |x + v| <= |x + s v| +
#: |1 - s||v| <= 1 - |1 - s|(1 - |v|)), and s = 1 realizes it conversely; the
#: substitution a = x + v, b = x - v has Jacobian 1/8, giving (1/8)(4 pi/3)^2.
DIAMOND_PAIR_MEASURE = 2.0 * np.pi**2 / 9.0


def shrinking_ball_predicate(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """|v| <= 1 - |x| membership (the 4 pi^2/45 family)."""
    return np.linalg.norm(v, axis=1) <= 1.0 - np.linalg.norm(x, axis=1)


def diamond_pair_predicate(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Closed form of 'hits both unit diamonds at x0 = +-1': max(|x+v|, |x-v|) <= 1."""
    return np.maximum(
        np.linalg.norm(x + v, axis=1), np.linalg.norm(x - v, axis=1)
    ) <= 1.0


# --- Monte Carlo measure over timelike lines ---------------------------------


@dataclass(frozen=True)
class MonteCarloResult:
    estimate: float
    stderr: float
    hits: int
    samples: int
    volume: float

    def z_score(self, target: float) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.estimate == target else INF
        return (self.estimate - target) / self.stderr


def monte_carlo_line_measure(
    predicate,
    box_lo,
    box_hi,
    n_samples: int,
    seed: int,
    strata: int = 16,
) -> MonteCarloResult:
    """lambda^6 of {(x, v) : predicate} estimated on box x O_1 (open unit ball).

    Stratified over equal shards with per-shard counter-based Philox streams
    (key = seed, counter offset = shard), so results are reproducible and
    shards are independent.  predicate(x_batch, v_batch) -> bool array.
    """
    box_lo = np.asarray(box_lo, dtype=float)
    box_hi = np.asarray(box_hi, dtype=float)
    vol = float(np.prod(box_hi - box_lo)) * (4.0 * np.pi / 3.0)
    per = n_samples // strata
    means = []
    total_hits = 0
    for shard in range(strata):
        rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, shard]))
        x = box_lo + (box_hi - box_lo) * rng.random((per, 3))
        # uniform in the open unit ball: direction times radius^(1/3)
        d = rng.normal(size=(per, 3))
        d /= np.linalg.norm(d, axis=1)[:, None]
        v = d * rng.random(per)[:, None] ** (1.0 / 3.0)
        hit = predicate(x, v)
        total_hits += int(np.sum(hit))
        means.append(float(np.mean(hit)))
    means = np.array(means)
    p = float(np.mean(means))
    var_of_mean = float(np.var(means, ddof=1) / strata) if strata > 1 else p * (1 - p) / per
    return MonteCarloResult(
        estimate=vol * p,
        stderr=vol * float(np.sqrt(var_of_mean)),
        hits=total_hits,
        samples=per * strata,
        volume=vol,
    )
