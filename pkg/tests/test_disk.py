"""Disk resonance tests.

Independent routes used here:
  * secular values reassembled from scipy.special Bessel/Hankel factors
  * the c = 1, alpha = 1 free-space reduction, where the transparent
    condition collapses to the exact Wronskian 2i / (pi lambda)
  * derivative of the secular function against central differences
  * the Dirichlet limit of the delta problem (V -> infinity pins the
    n = 0 root to the first zero of J_0)
  * one-bounce Sabine quotients for the transverse seed heights
  * argument-principle counts behind scan completeness (exercised
    through the public warning machinery)
"""

import cmath
import io
import math

import numpy as np
import pytest
from scipy.special import hankel1, jv, jvp, h1vp

import qsabine.disk
from qsabine.billiards import ConvexDomain, PhasePoint
from qsabine.disk import (
    DampingDisk,
    DeltaDisk,
    IncompleteScanWarning,
    NoConvergenceError,
    RESONANCE_CSV_HEADER,
    Resonance,
    TransparentDisk,
    mode_symmetry_defect,
    newton_refine,
    scan,
    secular,
    seed_glancing,
    seed_normal,
    seed_transverse,
    write_resonance_csv,
)
from qsabine.reflectivity import TransparentObstacle
from qsabine.sabine import sabine_quotient

DISK = ConvexDomain.disk()
TE_FAST = TransparentDisk(2.0, 1.0)
TE_SLOW = TransparentDisk(0.5, 1.0)
LOG3 = math.log(3.0)


def residual(problem, n, lam):
    f, _ = secular(problem, n, lam)
    return abs(f)


class TestProblemTypes:
    def test_field_validation(self):
        with pytest.raises(ValueError):
            TransparentDisk(0.0, 1.0)
        with pytest.raises(ValueError):
            TransparentDisk(2.0, -1.0)
        with pytest.raises(ValueError):
            TransparentDisk(math.inf, 1.0)
        with pytest.raises(ValueError):
            DeltaDisk(0.0)
        with pytest.raises(ValueError):
            DampingDisk(-2.0)

    def test_tags_and_strength(self):
        assert TE_FAST.tag == "transparent"
        assert DampingDisk(2.0).tag == "damping"
        d = DeltaDisk(3.0, 0.5)
        assert d.tag == "delta"
        assert d.strength(4.0) == pytest.approx(6.0)
        assert DeltaDisk(3.0).strength(100.0) == pytest.approx(3.0)

    def test_resonance_validation(self):
        ok = Resonance(complex(10.0, -1.0), 2, 1e-12, "normal", "transparent")
        assert ok.tangent_freq == pytest.approx(0.2)
        with pytest.raises(ValueError):
            Resonance(complex(10.0, 1.0), 2, 1e-12, "normal", "transparent")
        with pytest.raises(ValueError):
            Resonance(complex(-10.0, -1.0), 2, 1e-12, "normal", "transparent")
        with pytest.raises(ValueError):
            Resonance(complex(10.0, -1.0), 2, 1e-6, "normal", "transparent")
        with pytest.raises(ValueError):
            Resonance(complex(10.0, -1.0), 2, 1e-12, "guesswork", "transparent")
        with pytest.raises(ValueError):
            Resonance(complex(10.0, -1.0), 200, 1e-12, "normal", "transparent")


class TestSecular:
    def test_transparent_against_scipy_assembly(self):
        # Same combination assembled from library Bessel evaluations.
        rng = np.random.default_rng(3)
        for _ in range(20):
            lam = complex(rng.uniform(5, 300), -rng.uniform(0.05, 3.0))
            n = int(rng.integers(0, 30))
            c, alpha = TE_FAST.c, TE_FAST.alpha
            w = lam / c
            direct = jvp(n, w) * hankel1(n, lam) / c - alpha * h1vp(n, lam) * jv(n, w)
            f, _ = secular(TE_FAST, n, lam)
            assert abs(f - direct) <= 1e-9 * max(abs(direct), 1e-30)

    def test_delta_against_scipy_assembly(self):
        rng = np.random.default_rng(4)
        prob = DeltaDisk(2.0, 0.5)
        for _ in range(20):
            lam = complex(rng.uniform(5, 300), -rng.uniform(0.05, 3.0))
            n = int(rng.integers(0, 30))
            v = 2.0 * lam**0.5
            direct = jv(n, lam) * hankel1(n, lam) - 2j / (math.pi * v)
            f, _ = secular(prob, n, lam)
            assert abs(f - direct) <= 1e-9 * max(abs(direct), 1e-30)

    def test_damping_against_scipy_assembly(self):
        rng = np.random.default_rng(5)
        prob = DampingDisk(2.0)
        for _ in range(20):
            lam = complex(rng.uniform(5, 300), -rng.uniform(0.05, 3.0))
            n = int(rng.integers(0, 30))
            direct = jvp(n, lam) - 2j * jv(n, lam)
            f, _ = secular(prob, n, lam)
            assert abs(f - direct) <= 1e-9 * max(abs(direct), 1e-30)

    def test_free_space_reduction_is_wronskian(self):
        # c = alpha = 1 makes inside and outside identical; the secular
        # function collapses to -W[J, H] = -2i / (pi lambda), which
        # never vanishes: free space has no resonances.
        free = TransparentDisk(1.0, 1.0)
        rng = np.random.default_rng(6)
        for _ in range(25):
            lam = complex(rng.uniform(2, 500), -rng.uniform(0.01, 5.0))
            n = int(rng.integers(0, 40))
            f, _ = secular(free, n, lam)
            assert abs(f * math.pi * lam / (-2j) - 1.0) < 1e-9

    def test_derivative_against_central_difference(self):
        rng = np.random.default_rng(8)
        problems = (TE_FAST, TE_SLOW, DeltaDisk(1.0, 5.0 / 6.0), DampingDisk(2.0))
        h = 1e-5
        for _ in range(20):
            lam = complex(rng.uniform(10, 200), -rng.uniform(0.1, 2.0))
            n = int(rng.integers(0, 25))
            for prob in problems:
                _, fp = secular(prob, n, lam)
                f_hi, _ = secular(prob, n, lam + h)
                f_lo, _ = secular(prob, n, lam - h)
                fd = (f_hi - f_lo) / (2.0 * h)
                assert abs(fp - fd) <= 1e-6 * max(abs(fp), abs(fd), 1e-20)

    def test_mode_symmetry(self):
        rng = np.random.default_rng(7)
        problems = (TE_FAST, TE_SLOW, DampingDisk(2.0), DeltaDisk(1.0, 0.5))
        for _ in range(10):
            lam = complex(rng.uniform(50, 300), -rng.uniform(0.1, 3.0))
            n = int(rng.integers(1, 40))
            for prob in problems:
                assert mode_symmetry_defect(prob, n, lam) < 1e-12


class TestSeedNormal:
    def test_first_start_point(self):
        # alpha c = 2 > 1 selects the sign-flip branch: k = n = 0 sits at
        # 3 pi / 2 with height log(1/3).
        s = seed_normal(TE_FAST, 0, 0)
        assert s.real == pytest.approx(1.5 * math.pi, abs=1e-12)
        assert s.imag == pytest.approx(-LOG3, abs=1e-12)

    def test_radial_step_is_c_pi(self):
        for n in (0, 2, 9):
            for k in (0, 5, 40):
                a = seed_normal(TE_FAST, n, k)
                b = seed_normal(TE_FAST, n, k + 1)
                assert b.real - a.real == pytest.approx(2.0 * math.pi, abs=1e-10)
                assert b.imag == a.imag

    def test_height_matches_normal_quotient(self):
        # Same number the one-bounce Sabine quotient of the diameter
        # orbit produces.
        for c, alpha in ((2.0, 1.0), (2.0, 0.4), (0.5, 1.0), (0.5, 4.0)):
            model = TransparentObstacle(c, alpha)
            q = sabine_quotient(DISK, model, PhasePoint(0.0, 0.0), 1)
            s = seed_normal(TransparentDisk(c, alpha), 3, 7)
            assert s.imag == pytest.approx(q, abs=1e-12)

    def test_matched_impedance_rejected(self):
        with pytest.raises(ValueError):
            seed_normal(TransparentDisk(2.0, 0.5), 0, 0)


class TestSeedTransverse:
    def test_height_matches_one_bounce_quotient(self):
        # The chord of the (p, q, m) polygon meets the circle at
        # sin(theta) = c / r, and the seed height is the Sabine quotient
        # of that closed orbit.
        s = seed_transverse(TE_FAST, -1, 4, 2)
        r = s.real / 8.0
        model = TransparentObstacle(2.0, 1.0)
        q = sabine_quotient(DISK, model, PhasePoint(0.0, 2.0 / r), 1)
        assert s.imag == pytest.approx(q, abs=1e-12)

    def test_footprint_refinement_converges(self):
        # Doubling the polygon refinement moves the start point by
        # O(1/m); at m ~ 10^6 successive heights agree to 1e-6 and the
        # radius ratio drifts at the same rate.
        a = seed_transverse(TE_FAST, -1, 4, 10**6)
        b = seed_transverse(TE_FAST, -1, 4, 2 * 10**6)
        assert abs(a.imag - b.imag) < 1e-6
        assert abs(a.real / 4e6 - b.real / 8e6) < 1e-6

    def test_positive_winding_rejected(self):
        with pytest.raises(ValueError, match="must be negative"):
            seed_transverse(TE_FAST, 1, 4, 1)

    def test_totally_reflecting_chord_rejected(self):
        # Slow obstacle, nearly glancing rotation number: the chord
        # parameter lands in (c, 1) where the outside wave is evanescent.
        with pytest.raises(ValueError, match="totally reflecting"):
            seed_transverse(TE_SLOW, -1, 40, 1)

    def test_wrong_problem_rejected(self):
        with pytest.raises(TypeError):
            seed_transverse(DampingDisk(2.0), -1, 4, 1)


class TestSeedGlancing:
    def test_frozen_start_point(self):
        s = seed_glancing(DeltaDisk(1.0, 5.0 / 6.0), 1000, 1)
        assert s.real == pytest.approx(1015.5229167052904, abs=1e-8)
        assert s.imag == pytest.approx(-1.9462132530103904, abs=1e-8)

    def test_band_index_ordering(self):
        prob = DeltaDisk(1.0, 5.0 / 6.0)
        seeds = [seed_glancing(prob, 1000, j) for j in (1, 2, 3)]
        assert seeds[0].real < seeds[1].real < seeds[2].real
        assert seeds[0].imag > seeds[1].imag > seeds[2].imag

    def test_weak_potential_rejected(self):
        with pytest.raises(ValueError, match="too weak"):
            seed_glancing(DeltaDisk(1.0, 0.0), 100, 1)

    def test_wrong_problem_rejected(self):
        with pytest.raises(TypeError):
            seed_glancing(DampingDisk(2.0), 100, 1)


class TestNewtonRefine:
    def test_transparent_normal_root(self):
        s = seed_normal(TE_FAST, 0, 32)
        r = newton_refine(TE_FAST, 0, s, 0.2, tag="normal")
        assert r.lam.real == pytest.approx(205.7767485078322, abs=1e-9)
        assert r.lam.imag == pytest.approx(-1.0986111243152326, abs=1e-9)
        assert r.residual < 1e-10
        assert r.guarded
        assert r.seed == "normal"

    def test_refining_a_root_is_stationary(self):
        s = seed_normal(TE_FAST, 0, 32)
        r = newton_refine(TE_FAST, 0, s, 0.2)
        again = newton_refine(TE_FAST, 0, r.lam, 0.2)
        assert abs(again.lam - r.lam) < 1e-9
        # Once the residual is at the fixed-point floor the input is
        # returned untouched.
        third = newton_refine(TE_FAST, 0, again.lam, 0.2)
        if again.residual < 1e-12:
            assert third.lam == again.lam
        else:
            assert abs(third.lam - again.lam) < 1e-12

    def test_seed_error_decays_like_inverse_frequency(self):
        # Drift |root - seed| along the normal family; the log-log slope
        # against Re lambda is -1 to three decimals.
        for n in (0, 3):
            drift, res_re = [], []
            for k in range(10, 21, 2):
                s = seed_normal(TE_FAST, n, k)
                r = newton_refine(TE_FAST, n, s, 0.2, tag="normal")
                drift.append(abs(r.lam - s))
                res_re.append(r.lam.real)
            slope = np.polyfit(np.log(res_re), np.log(drift), 1)[0]
            assert slope < -0.8

    def test_divergence_reports_trace(self):
        with pytest.raises(NoConvergenceError) as err:
            newton_refine(TE_FAST, 0, complex(150.0, -0.5), 0.05)
        assert len(err.value.trace) >= 2
        assert all(isinstance(z, complex) for z in err.value.trace)

    def test_dirichlet_limit_of_strong_delta(self):
        # V -> infinity pins the n = 0 root to the first zero of J_0
        # with an O(1/V) shift and width.
        r = newton_refine(DeltaDisk(1e6, 0.0), 0, complex(2.40, -0.001), 0.1)
        assert r.lam.real == pytest.approx(2.404825557695773, abs=3e-6)
        assert -1e-10 < r.lam.imag < 0.0

    def test_certification_floor_of_extreme_delta(self):
        # At V = 1e8 both secular terms are ~1e-8, so a 1e-10 relative
        # residual would need |f| below double precision; the refinement
        # honestly refuses to certify.
        with pytest.raises(NoConvergenceError):
            newton_refine(DeltaDisk(1e8, 0.0), 0, complex(2.40, -0.001), 0.1)

    def test_glancing_seed_converges_unguarded(self):
        prob = DeltaDisk(1.0, 5.0 / 6.0)
        s = seed_glancing(prob, 1000, 1)
        r = newton_refine(prob, 1000, s, 1.2, tag="glancing")
        assert r.lam.real == pytest.approx(1016.3424, abs=1e-3)
        assert r.lam.imag == pytest.approx(-1.1193, abs=1e-3)
        assert not r.guarded


class TestScan:
    def test_normal_family_window(self):
        res = scan(TE_FAST, (200.0, 230.0), -3.0, [0])
        assert len(res) == 4
        re = [r.lam.real for r in res]
        assert re[0] == pytest.approx(205.776749, abs=1e-5)
        for a, b in zip(re, re[1:]):
            assert b - a == pytest.approx(2.0 * math.pi, abs=1e-4)
        for r in res:
            assert r.lam.imag == pytest.approx(-LOG3, abs=1e-4)
            assert r.residual < 1e-8
            assert r.seed == "normal"

    def test_results_sorted_and_deduplicated(self):
        res = scan(TE_FAST, (200.0, 240.0), -3.0, range(0, 30, 3))
        key = [(r.lam.real, r.n) for r in res]
        assert key == sorted(key)
        by_mode = {}
        for r in res:
            by_mode.setdefault(r.n, []).append(r.lam)
        for lams in by_mode.values():
            for i, a in enumerate(lams):
                for b in lams[i + 1:]:
                    assert abs(a - b) > 1e-6

    def test_damping_strip(self):
        # Every generalized eigenvalue of the constant damping a = 2
        # lies between the normal height log(1/3)/2 and the glancing
        # height -1/2.
        res = scan(DampingDisk(2.0), (200.0, 212.0), -1.0, range(0, 30))
        assert len(res) == 115
        for r in res:
            assert -0.5494 < r.lam.imag < -0.5

    def test_delta_glancing_ladder(self):
        res = scan(DeltaDisk(1.0, 5.0 / 6.0), (1001.0, 1047.0), -4.0, [1000],
                   tangent_floor=0.95)
        assert len(res) == 3
        got = [r.lam for r in res]
        want = [
            complex(1016.3424, -1.1193),
            complex(1030.7267, -1.2371),
            complex(1042.5207, -1.2674),
        ]
        for g, w in zip(got, want):
            assert abs(g - w) < 1e-3

    def test_slow_obstacle_approaches_real_axis(self):
        # c < 1: beyond the critical angle the outside wave is
        # evanescent and widths collapse toward zero.
        res = scan(TE_SLOW, (204.0, 208.0), -1.0, [0, 220])
        inner = [r for r in res if r.n == 0]
        tir = [r for r in res if r.n == 220]
        assert inner and tir
        for r in inner:
            assert r.lam.imag == pytest.approx(-0.2746530721670273, abs=1e-4)
        for r in tir:
            assert -0.01 < r.lam.imag < -1e-6

    def test_workers_match_serial(self):
        serial = scan(TE_FAST, (200.0, 220.0), -3.0, range(0, 40, 5))
        parallel = scan(TE_FAST, (200.0, 220.0), -3.0, range(0, 40, 5), workers=3)
        assert len(serial) == len(parallel)
        for a, b in zip(serial, parallel):
            assert a.lam == b.lam and a.n == b.n and a.seed == b.seed

    def test_window_validation(self):
        with pytest.raises(ValueError):
            scan(TE_FAST, (0.5, 300.0), -3.0, [0])
        with pytest.raises(ValueError):
            scan(TE_FAST, (300.0, 200.0), -3.0, [0])
        with pytest.raises(ValueError, match="interior"):
            scan(TE_FAST, (1.5, 300.0), -3.0, [0])
        with pytest.raises(ValueError):
            scan(TE_FAST, (200.0, 300.0), 1.0, [0])
        with pytest.raises(ValueError):
            scan(TE_FAST, (200.0, 300.0), -60.0, [0])
        with pytest.raises(ValueError):
            scan(TE_FAST, (200.0, 300.0), -3.0, [-1])

    def test_duplicate_modes_collapse(self):
        once = scan(TE_FAST, (200.0, 215.0), -3.0, [0])
        twice = scan(TE_FAST, (200.0, 215.0), -3.0, [0, 0])
        assert [r.lam for r in twice] == [r.lam for r in once]

    def test_incomplete_cell_warns(self, monkeypatch):
        # With seeding and hunting disabled the box count cannot be
        # matched, and the unresolved cell is reported around the root.
        monkeypatch.setattr(qsabine.disk, "_seed_points", lambda *a, **k: [])
        monkeypatch.setattr(qsabine.disk, "_hunt", lambda *a, **k: [])
        with pytest.warns(IncompleteScanWarning) as rec:
            res = scan(TE_FAST, (205.0, 207.0), -1.5, [0])
        assert res == []
        w = rec[0].message
        assert w.n == 0 and w.expected == 1 and w.found == 0
        assert w.box[0] < 205.7768 < w.box[1]


class TestResonanceCsv:
    def test_round_trip(self):
        res = scan(TE_FAST, (200.0, 230.0), -3.0, [0])
        buf = io.StringIO()
        write_resonance_csv(res, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == ",".join(RESONANCE_CSV_HEADER)
        assert len(lines) == 1 + len(res)
        row = lines[1].split(",")
        assert row[0] == "transparent"
        assert int(row[1]) == 0
        assert float(row[2]) == res[0].lam.real
        assert float(row[3]) == res[0].lam.imag
        assert float(row[4]) == res[0].residual
        assert row[5] == "normal"
        assert float(row[6]) == res[0].tangent_freq
