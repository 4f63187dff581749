import numpy as np
import pytest

from causalfermion import causalgeo as cg
from causalfermion.causalgeo import Interval as I
from causalfermion.causalgeo import LightconeRegion as R

rng = np.random.default_rng(71)


def random_region(r):
    rects = []
    for _ in range(r.integers(1, 4)):
        a, b = np.sort(r.uniform(-3, 3, 2))
        c, d = np.sort(r.uniform(-3, 3, 2))
        rects.append(
            cg.Rect(
                I(a, b, bool(r.integers(2)), bool(r.integers(2))),
                I(c, d, bool(r.integers(2)), bool(r.integers(2))),
            )
        )
    return R(rects)


class TestIntervalAlgebra:
    def test_flags_matter(self):
        assert not I(0, 1, True, False).contains(0.0)
        assert I(0, 1, False, True).contains(0.0)
        assert I(1, 1).contains(1.0)
        assert I(1, 1, lo_open=True).empty

    def test_subtract_flags(self):
        pieces = I(0, 2).subtract(I(1, 1))
        assert len(pieces) == 2
        assert pieces[0].hi == 1 and pieces[0].hi_open
        assert pieces[1].lo == 1 and pieces[1].lo_open

    def test_above_below_flip_flags(self):
        assert I(0, 1, False, True).above() == I(1, np.inf, False, True)
        assert I(0, 1, False, False).above() == I(1, np.inf, True, True)


class TestLatticeIdentities:
    def test_fhs_complement_rule(self):
        for le, gt in ((I.le, I.gt), (I.lt, I.ge)):
            lhs = R.h(le(1.0)).intersect(R.k(gt(2.0))).perp()
            rhs = R.h(gt(1.0)).intersect(R.k(le(2.0)))
            assert lhs.equals(rhs)

    def test_single_halfspace_complement_empty(self):
        assert R.h(I.le(0.5)).perp().is_empty
        assert R.k(I.gt(-1.0)).perp().is_empty

    def test_same_side_intersection_complement_empty(self):
        assert R.h(I.lt(0.0)).intersect(R.k(I.le(1.0))).perp().is_empty

    def test_two_point_completion(self):
        s = 2.0
        two = R.point(0.0, 0.0).union(R.point(s, s))
        assert two.completion().equals(R.rect(I(0.0, s), I(0.0, s)))

    def test_completion_properties_random(self):
        for seed in range(40):
            reg = random_region(np.random.default_rng(seed))
            comp = reg.completion()
            assert reg.subtract(comp).is_empty  # R subset R^
            assert comp.completion().equals(comp)  # idempotent
            assert reg.perp().equals(comp.perp())  # R^perp = (R^)^perp

    def test_de_morgan_random(self):
        for seed in range(40):
            r = np.random.default_rng(1000 + seed)
            a, b = random_region(r), random_region(r)
            assert a.union(b).perp().equals(a.perp().intersect(b.perp()))

    def test_orthomodularity_failure_witness(self):
        L = R.h(I.lt(0.0)).intersect(R.k(I.gt(2.0)))
        M = R.h(I.lt(0.0)).intersect(R.k(I.gt(0.0)))
        assert L.subtract(M).is_empty  # L subset M
        assert L.perp().intersect(M).is_empty
        witness = cg.join(L, M.perp()).intersect(M)
        assert witness.equals(M)
        assert not witness.equals(L)

    def test_diamond_flat_base(self):
        alpha, delta = 0.5, 2.0
        diamond = R.h(I.ge(alpha)).intersect(R.k(I.le(delta)))
        assert diamond.perp().equals(R.h(I.lt(alpha)).intersect(R.k(I.gt(delta))))
        # base {x0 = (d+a)/2, x3 <= (d-a)/2} is the ray (a, d) + s(1, -1), s >= 0
        assert cg.spacelike_ray_perp(alpha, delta, +1, True).equals(diamond.perp())
        # sigma minus base: open ray the other way; its complement is the diamond
        assert cg.spacelike_ray_perp(alpha, delta, -1, False).equals(diamond)

    def test_halfplane_ntl_completion(self):
        got = R.rect(I.ge(0.0), I.le(0.0)).perp_ntl()
        want = R.rect(I.le(0.0), I.ge(0.0)).subtract(R.point(0.0, 0.0))
        assert got.equals(want)

    def test_perp_vs_perp_ntl_on_open_regions(self):
        for seed in range(20):
            r = np.random.default_rng(2000 + seed)
            a, b = np.sort(r.uniform(-3, 3, 2))
            c, d = np.sort(r.uniform(-3, 3, 2))
            reg = R.rect(I(a, b, True, True), I(c, d, True, True))
            strict = reg.perp()
            ntl = reg.perp_ntl()
            # perp is contained in perp'; they differ only on boundary lines
            assert strict.subtract(ntl).is_empty

    def test_meet_join_de_morgan(self):
        L = R.h(I.lt(0.0)).intersect(R.k(I.gt(2.0)))
        M = R.h(I.ge(1.0)).intersect(R.k(I.le(0.0)))
        lhs = cg.meet(L, M).perp()
        rhs = cg.join(L.perp(), M.perp())
        assert lhs.equals(rhs)


class TestInfluenceClosedForms:
    def test_ball(self):
        d = cg.influence_ball((1.0, 2.0, 3.0), -2.0)
        assert d.center == (1.0, 2.0, 3.0) and d.radius == 2.0
        assert cg.influence_ball((0, 0, 0), 0.0).radius == 0.0

    def test_boosted_point(self):
        d = cg.influence_boosted_point((0.0, 0.0, 1.0), 1.0)
        assert abs(d.center[2] - np.cosh(1.0)) <= 1e-15
        assert abs(d.radius - np.sinh(1.0)) <= 1e-15
        assert cg.influence_boosted_point((3.0, -1.0, 0.0), 2.0).radius == 0.0
        # rho -> -rho leaves the descriptor unchanged
        assert cg.influence_boosted_point((0, 0, 1.0), -1.0) == d

    def test_strip(self):
        lo, hi = cg.influence_strip(0.0, 1.4, 1.0)
        assert lo == 0.0 and abs(hi - 1.4 * np.e) <= 1e-14
        assert cg.influence_strip(0.5, 1.0, 0.0) == (0.5, 1.0)
        lo1, hi1 = cg.influence_strip(0.5, 1.0, 0.5)
        lo2, hi2 = cg.influence_strip(0.5, 1.0, 1.0)
        assert lo2 <= lo1 and hi1 <= hi2  # nesting

    def test_cylinder_corners(self):
        c, a, b, rho = 1.0, 1.0, 2.0, 1.0
        prof = cg.influence_cylinder(c, a, b, rho)
        assert np.allclose(prof["P1"], (1.0, 0.0, np.exp(-1.0)))
        assert np.allclose(prof["P2"], (1.0 + np.tanh(1.0), 0.0, 1.0 / np.cosh(1.0)))
        assert np.allclose(prof["P3"], (1.0 + 2 * np.tanh(1.0), 0.0, 2.0 / np.cosh(1.0)))
        assert np.allclose(prof["P4"], (1.0, 0.0, 2.0 * np.exp(1.0)))
        assert np.allclose(prof["arc_high"]["center"], (1.0, 0.0, 2 * np.cosh(1.0)))

    def test_cylinder_inside_circumscribed_ball_influence(self):
        c, a, b, rho = 1.0, 1.0, 2.0, 1.0
        prof = cg.influence_cylinder(c, a, b, rho)
        center = (0.0, 0.0, (a + b) / 2)
        radius = np.sqrt(c**2 + ((b - a) / 2) ** 2)
        for key in ("P1", "P2", "P3", "P4"):
            assert cg.in_boosted_ball_influence(prof[key], center, radius, rho)
        # points along the straight flank
        for frac in np.linspace(0, 1, 7):
            pt = (1 - frac) * np.array(prof["P2"]) + frac * np.array(prof["P3"])
            assert cg.in_boosted_ball_influence(pt, center, radius, rho)


class TestLineHits:
    def test_through_apex(self):
        d = cg.DiamondRegion(1.0, (0, 0, 0), 1.0)
        assert cg.line_hits(d, cg.TimelikeLine((0, 0, 0), (0, 0, 0)))

    def test_static_far_line_misses(self):
        d = cg.DiamondRegion(1.0, (0, 0, 0), 1.0)
        assert not cg.line_hits(d, cg.TimelikeLine((10, 0, 0), (0, 0, 0)))

    def test_boundary_grazing_resolved_with_tolerance(self):
        d = cg.DiamondRegion(1.0, (0, 0, 0), 1.0)
        # static line tangent to the base sphere: min gap exactly 0
        assert cg.line_hits(d, cg.TimelikeLine((1.0, 0, 0), (0, 0, 0)))
        assert not cg.line_hits(d, cg.TimelikeLine((1.0 + 1e-6, 0, 0), (0, 0, 0)))

    def test_vectorized_matches_scalar(self):
        d1 = cg.DiamondRegion(1.0, (0, 0, 0), 1.0)
        d2 = cg.DiamondRegion(-1.0, (0, 0, 0), 1.0)
        xs = rng.uniform(-1.2, 1.2, (300, 3))
        ds = rng.normal(size=(300, 3))
        ds /= np.linalg.norm(ds, axis=1)[:, None]
        vs = ds * rng.random(300)[:, None] ** (1 / 3)
        batch = cg.hits_all([d1, d2], xs, vs)
        for i in range(0, 300, 17):
            single = cg.line_hits(d1, cg.TimelikeLine(tuple(xs[i]), tuple(vs[i]))) and cg.line_hits(
                d2, cg.TimelikeLine(tuple(xs[i]), tuple(vs[i]))
            )
            assert single == batch[i]

    def test_hit_set_closed_form(self):
        # lines meeting both unit diamonds: max(|x+v|, |x-v|) <= 1
        d1 = cg.DiamondRegion(1.0, (0, 0, 0), 1.0)
        d2 = cg.DiamondRegion(-1.0, (0, 0, 0), 1.0)
        xs = rng.uniform(-1.2, 1.2, (2000, 3))
        ds = rng.normal(size=(2000, 3))
        ds /= np.linalg.norm(ds, axis=1)[:, None]
        vs = ds * rng.random(2000)[:, None] ** (1 / 3)
        batch = cg.hits_all([d1, d2], xs, vs)
        oracle = cg.diamond_pair_predicate(xs, vs)
        # disagreement only possible within the hit-test tolerance of the boundary
        gap = np.abs(np.maximum(np.linalg.norm(xs + vs, axis=1), np.linalg.norm(xs - vs, axis=1)) - 1.0)
        assert np.all((batch == oracle) | (gap <= 1e-9))

    def test_region_hit_exact(self):
        reg = R.rect(I(0.0, 1.0), I(0.0, 1.0))  # diamond |x0 - 1/2| + |x3| <= 1/2
        assert cg.line_hits_region(reg, cg.TimelikeLine((0, 0, 0.0), (0, 0, 0.0)))
        assert not cg.line_hits_region(reg, cg.TimelikeLine((0, 0, 2.0), (0, 0, 0.9)))
        # line with v3 = 0.9 starting left reaches u in [0,1] at s in [?])
        assert cg.line_hits_region(reg, cg.TimelikeLine((0, 0, -0.2), (0, 0, 0.9)))

    def test_timelike_line_validation(self):
        with pytest.raises(ValueError):
            cg.TimelikeLine((0, 0, 0), (0, 0, 1.0))


class TestMonteCarlo:
    def test_deterministic_under_seed(self):
        res1 = cg.monte_carlo_line_measure(
            cg.shrinking_ball_predicate, (-1, -1, -1), (1, 1, 1), 100_000, seed=5
        )
        res2 = cg.monte_carlo_line_measure(
            cg.shrinking_ball_predicate, (-1, -1, -1), (1, 1, 1), 100_000, seed=5
        )
        assert res1.estimate == res2.estimate and res1.stderr == res2.stderr

    def test_shrinking_ball_constant(self):
        res = cg.monte_carlo_line_measure(
            cg.shrinking_ball_predicate, (-1, -1, -1), (1, 1, 1), 400_000, seed=9
        )
        assert abs(res.z_score(cg.SHRINKING_BALL_MEASURE)) <= 3.0

    def test_diamond_pair_exact_measure(self):
        # dual route: geometric hit test against the analytic 2 pi^2/9
        d1 = cg.DiamondRegion(1.0, (0, 0, 0), 1.0)
        d2 = cg.DiamondRegion(-1.0, (0, 0, 0), 1.0)
        res = cg.monte_carlo_line_measure(
            lambda x, v: cg.hits_all([d1, d2], x, v), (-1, -1, -1), (1, 1, 1), 200_000, seed=13
        )
        assert abs(res.z_score(cg.DIAMOND_PAIR_MEASURE)) <= 3.0

    def test_spacelike_separated_no_hits(self):
        d1 = cg.DiamondRegion(1.0, (0, 0, 0), 1.0)
        far = cg.DiamondRegion(0.0, (8.0, 0, 0), 1.0)
        res = cg.monte_carlo_line_measure(
            lambda x, v: cg.hits_all([d1, far], x, v), (-1, -1, -1), (1, 1, 1), 100_000, seed=17
        )
        assert res.hits == 0 and res.estimate == 0.0

    def test_meet_of_diamond_pair_has_zero_measure(self):
        # M meet' L = {origin}: a line meets it only if x = 0 exactly
        def hits_origin(x, v):
            return np.all(x == 0.0, axis=1)

        res = cg.monte_carlo_line_measure(hits_origin, (-1, -1, -1), (1, 1, 1), 100_000, seed=19)
        assert res.hits == 0 and res.estimate == 0.0

    def test_stderr_scaling(self):
        errs = []
        for n in (50_000, 200_000, 800_000):
            res = cg.monte_carlo_line_measure(
                cg.shrinking_ball_predicate, (-1, -1, -1), (1, 1, 1), n, seed=23
            )
            errs.append(res.stderr)
        # quadrupling samples roughly halves the standard error
        assert 1.4 <= errs[0] / errs[1] <= 2.9
        assert 1.4 <= errs[1] / errs[2] <= 2.9
