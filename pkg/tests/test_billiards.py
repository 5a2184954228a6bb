"""Billiard map tests.

Independent routes used here:
  * conic ray-trace exit (oracles.ellipse_ray_exit) against the bracketed
    root finder, on the disk and on an ellipse
  * scipy.special.ellipe for the ellipse perimeter against the
    Gauss-Legendre arclength tables
  * elementary chord geometry on the disk (closed forms)
  * the elliptic billiard first integral (oracles.foci_momentum_product)
  * finite differences for the generating-function partials and the
    symplectic Jacobian
"""

import csv
import dataclasses
import io
import math

import numpy as np
import pytest
from scipy.special import ellipe

from qsabine.billiards import (
    ConvexDomain,
    GlancingError,
    OrbitSegment,
    PhasePoint,
    billiard_step,
    glancing_expansion_check,
    mean_chord,
    orbit,
    write_orbit_csv,
)

from oracles import ellipse_ray_exit, foci_momentum_product


def sdiff(a, b, L):
    """Signed difference a - b reduced to (-L/2, L/2]."""
    d = (a - b) % L
    return d - L if d > 0.5 * L else d


def wavy_domain():
    # support function 1 + 0.1 cos(3 phi): radius of curvature in [0.2, 1.8]
    return ConvexDomain.from_support(
        lambda p: 1.0 + 0.1 * np.cos(3 * p),
        lambda p: -0.3 * np.sin(3 * p),
        lambda p: -0.9 * np.cos(3 * p),
        name="wavy",
    )


class TestConvexDomain:
    def test_disk_geometry(self):
        for r in (1.0, 2.5):
            dom = ConvexDomain.disk(r)
            assert abs(dom.perimeter - 2 * math.pi * r) < 1e-12 * r
            assert np.allclose(dom.position(0.0), [r, 0.0], atol=1e-13)
            assert np.allclose(dom.tangent(0.0), [0.0, 1.0], atol=1e-13)
            assert np.allclose(dom.inward_normal(0.0), [-1.0, 0.0], atol=1e-13)
            assert abs(dom.curvature(1.3) - 1.0 / r) < 1e-14
            assert abs(dom.kappa_min - 1.0 / r) < 1e-12

    def test_ellipse_perimeter_oracle(self):
        a, b = 1.5, 1.0
        dom = ConvexDomain.ellipse(a, b)
        expected = 4.0 * a * ellipe(1.0 - (b / a) ** 2)
        assert abs(dom.perimeter - expected) < 1e-10

    def test_ellipse_curvature_endpoints(self):
        a, b = 1.5, 1.0
        dom = ConvexDomain.ellipse(a, b)
        # s = 0 is the point (a, 0); a quarter perimeter later is (0, b)
        assert abs(dom.curvature(0.0) - a / b ** 2) < 1e-12
        assert abs(dom.curvature(0.25 * dom.perimeter) - b / a ** 2) < 1e-10
        assert np.allclose(dom.position(0.25 * dom.perimeter), [0.0, b], atol=1e-10)

    def test_arclength_parametrization(self):
        # |gamma'| = 1: central difference of position against the unit tangent
        h = 1e-5
        for dom in (ConvexDomain.disk(1.3), ConvexDomain.ellipse(1.5, 1.0), wavy_domain()):
            for s in np.linspace(0.1, dom.perimeter, 7):
                fd = (dom.position(s + h) - dom.position(s - h)) / (2 * h)
                assert np.allclose(fd, dom.tangent(s), atol=1e-9)
                assert abs(np.linalg.norm(dom.tangent(s)) - 1.0) < 1e-10

    def test_second_derivative_frenet(self):
        h = 1e-5
        for dom in (ConvexDomain.ellipse(1.5, 1.0), wavy_domain()):
            for s in (0.2, 1.7, 3.9):
                fd = (dom.tangent(s + h) - dom.tangent(s - h)) / (2 * h)
                assert np.allclose(fd, dom.second_derivative(s), atol=1e-6)

    def test_support_function_disk_matches(self):
        one = lambda p: np.ones_like(np.asarray(p, dtype=float))
        zero = lambda p: np.zeros_like(np.asarray(p, dtype=float))
        dom = ConvexDomain.from_support(one, zero, zero, name="unit")
        ref = ConvexDomain.disk(1.0)
        for s in (0.0, 1.1, 4.4):
            assert np.allclose(dom.position(s), ref.position(s), atol=1e-12)
        assert abs(dom.perimeter - 2 * math.pi) < 1e-12

    def test_support_function_wavy(self):
        dom = wavy_domain()
        assert abs(dom.kappa_min - 1.0 / 1.8) < 1e-6
        assert np.allclose(dom.position(dom.perimeter), dom.position(0.0), atol=1e-10)

    def test_nonconvex_support_rejected(self):
        with pytest.raises(ValueError, match="convex"):
            ConvexDomain.from_support(
                lambda p: 1.0 + 0.5 * np.cos(3 * p),
                lambda p: -1.5 * np.sin(3 * p),
                lambda p: -4.5 * np.cos(3 * p),
            )

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            ConvexDomain.disk(0.0)
        with pytest.raises(ValueError):
            ConvexDomain.ellipse(-1.0, 1.0)

    def test_vectorized_accessors(self):
        dom = ConvexDomain.ellipse(1.5, 1.0)
        s = np.array([0.1, 2.0, 5.5])
        assert dom.position(s).shape == (3, 2)
        assert dom.tangent(s).shape == (3, 2)
        assert dom.curvature(s).shape == (3,)
        assert np.allclose(dom.position(s)[1], dom.position(2.0))


class TestPhasePoint:
    def test_validation(self):
        with pytest.raises(ValueError):
            PhasePoint(0.0, 1.0)
        with pytest.raises(ValueError):
            PhasePoint(0.0, -1.0)
        with pytest.raises(ValueError):
            PhasePoint(math.nan, 0.0)
        with pytest.raises(dataclasses.FrozenInstanceError):
            PhasePoint(0.0, 0.5).xi = 0.2

    def test_orbit_segment_validation(self):
        q = PhasePoint(0.0, 0.0)
        with pytest.raises(ValueError):
            OrbitSegment((q, q), ())
        with pytest.raises(ValueError):
            OrbitSegment((q, q), (-1.0,))


class TestBilliardStep:
    def test_disk_diameter(self):
        q1, chord = billiard_step(ConvexDomain.disk(), PhasePoint(0.7, 0.0))
        assert abs(chord - 2.0) < 1e-12
        assert abs(sdiff(q1.s, 0.7 + math.pi, 2 * math.pi)) < 1e-12
        assert abs(q1.xi) < 1e-12

    def test_disk_chord_formula(self):
        q1, chord = billiard_step(ConvexDomain.disk(), PhasePoint(0.7, 0.6))
        assert abs(chord - 1.6) < 1e-12
        assert abs(q1.xi - 0.6) < 1e-12
        # scales with the radius
        q1, chord = billiard_step(ConvexDomain.disk(2.0), PhasePoint(0.7, 0.6))
        assert abs(chord - 3.2) < 1e-12

    def test_disk_angle_advance(self):
        # advance = 2 arccos(xi) in (0, 2 pi): xi > 0 advances by less
        # than pi, xi < 0 by more
        dom = ConvexDomain.disk()
        for xi in (-0.9, -0.5, -0.1, 0.2, 0.6, 0.95):
            q1, chord = billiard_step(dom, PhasePoint(1.1, xi))
            advance = (q1.s - 1.1) % (2 * math.pi)
            assert abs(advance - 2 * math.acos(xi)) < 1e-11
            assert abs(chord - 2 * math.sqrt(1 - xi * xi)) < 1e-12

    def test_ray_trace_oracle(self):
        rng = np.random.default_rng(42)
        cases = ((ConvexDomain.disk(), 1.0, 1.0), (ConvexDomain.ellipse(1.5, 1.0), 1.5, 1.0))
        for dom, a, b in cases:
            for _ in range(25):
                q = PhasePoint(rng.uniform(0, dom.perimeter), rng.uniform(-0.95, 0.95))
                p0, d = dom.ray(q)
                t = ellipse_ray_exit(a, b, (p0[0], p0[1]), (d[0], d[1]))
                q1, chord = billiard_step(dom, q)
                assert abs(chord - t) < 1e-10
                assert np.linalg.norm(dom.position(q1.s) - (p0 + t * d)) < 1e-9

    def test_generating_function_partials(self):
        # chord(u, v) = |gamma(v) - gamma(u)| generates the map:
        # d/du chord = -xi at the start, d/dv chord = +xi at the exit
        def dpartial(f, x, h=1e-3):
            d1 = (f(x + h) - f(x - h)) / (2 * h)
            d2 = (f(x + h / 2) - f(x - h / 2)) / h
            return (4 * d2 - d1) / 3

        for dom in (ConvexDomain.disk(), ConvexDomain.ellipse(1.5, 1.0)):
            for s, xi in ((0.3, 0.45), (2.2, -0.7), (4.0, 0.05)):
                q1, chord = billiard_step(dom, PhasePoint(s, xi))

                def chordfun(u, v):
                    return float(np.linalg.norm(dom.position(v) - dom.position(u)))

                assert abs(dpartial(lambda u: chordfun(u, q1.s), s) + xi) < 1e-8
                assert abs(dpartial(lambda v: chordfun(s, v), q1.s) - q1.xi) < 1e-8

    def test_reversibility(self):
        # xi -> -xi conjugates the map to its inverse
        for dom in (ConvexDomain.disk(), ConvexDomain.ellipse(1.5, 1.0), wavy_domain()):
            for s, xi in ((0.3, 0.45), (2.2, -0.7), (5.0, 0.9)):
                q = PhasePoint(s, xi)
                q1, c1 = billiard_step(dom, q)
                q2, c2 = billiard_step(dom, PhasePoint(q1.s, -q1.xi))
                assert abs(sdiff(q2.s, q.s, dom.perimeter)) < 1e-8
                assert abs(-q2.xi - q.xi) < 1e-8
                assert abs(c2 - c1) < 1e-8

    def test_jacobian_determinant(self):
        # area preservation in (s, xi): central-difference Jacobian at 50
        # random non-glancing points per domain
        rng = np.random.default_rng(7)
        for dom in (ConvexDomain.disk(), ConvexDomain.ellipse(1.5, 1.0)):
            L = dom.perimeter
            hs, hx = 1e-5 * L, 1e-5
            for _ in range(50):
                s, xi = rng.uniform(0, L), rng.uniform(-0.8, 0.8)
                qsp, _ = billiard_step(dom, PhasePoint(s + hs, xi))
                qsm, _ = billiard_step(dom, PhasePoint(s - hs, xi))
                qxp, _ = billiard_step(dom, PhasePoint(s, xi + hx))
                qxm, _ = billiard_step(dom, PhasePoint(s, xi - hx))
                det = (sdiff(qsp.s, qsm.s, L) / (2 * hs) * (qxp.xi - qxm.xi) / (2 * hx)
                       - (qsp.xi - qsm.xi) / (2 * hs) * sdiff(qxp.s, qxm.s, L) / (2 * hx))
                assert abs(det - 1.0) < 1e-6

    def test_glancing_guard(self):
        dom = ConvexDomain.disk()
        with pytest.raises(GlancingError):
            billiard_step(dom, PhasePoint(0.0, 1.0 - 5e-13))
        with pytest.raises(GlancingError):
            billiard_step(dom, PhasePoint(0.0, -(1.0 - 5e-13)))
        # just inside the cutoff is allowed
        billiard_step(dom, PhasePoint(0.0, 1.0 - 1e-9))


class TestOrbit:
    def test_period_two_diameter(self):
        seg = orbit(ConvexDomain.disk(), PhasePoint(0.25, 0.0), 2)
        assert abs(sdiff(seg.points[2].s, 0.25, 2 * math.pi)) < 1e-11
        assert abs(seg.points[2].xi) < 1e-12
        assert all(abs(c - 2.0) < 1e-12 for c in seg.chords)

    def test_period_three_triangle(self):
        # arccos(xi) = pi/3 closes up an inscribed equilateral triangle
        seg = orbit(ConvexDomain.disk(), PhasePoint(0.25, 0.5), 3)
        assert abs(sdiff(seg.points[3].s, 0.25, 2 * math.pi)) < 1e-10
        assert all(abs(c - math.sqrt(3)) < 1e-12 for c in seg.chords)

    def test_ellipse_first_integral(self):
        # xi itself is not conserved off the disk, but the product of
        # angular momenta about the foci is
        dom = ConvexDomain.ellipse(1.5, 1.0)
        for s, xi in ((0.3, 0.45), (2.2, -0.7), (5.0, 0.85)):
            seg = orbit(dom, PhasePoint(s, xi), 25)
            xis = [p.xi for p in seg.points]
            assert max(xis) - min(xis) > 1e-3
            prods = []
            for qq in seg.points[:-1]:
                p, d = dom.ray(qq)
                prods.append(foci_momentum_product(1.5, 1.0, (p[0], p[1]), (d[0], d[1])))
            assert max(prods) - min(prods) < 1e-8

    def test_mean_chord_disk(self):
        assert abs(mean_chord(orbit(ConvexDomain.disk(), PhasePoint(0.0, 0.0), 4)) - 2.0) < 1e-12
        assert abs(mean_chord(orbit(ConvexDomain.disk(), PhasePoint(0.1, 0.6), 7)) - 1.6) < 1e-12

    def test_mean_chord_bounds(self):
        seg = orbit(ConvexDomain.ellipse(1.5, 1.0), PhasePoint(0.3, 0.45), 12)
        assert min(seg.chords) <= mean_chord(seg) <= max(seg.chords)

    def test_orbit_validation(self):
        dom = ConvexDomain.disk()
        with pytest.raises(ValueError):
            orbit(dom, PhasePoint(0.0, 0.0), 0)
        with pytest.raises(ValueError):
            orbit(dom, PhasePoint(0.0, 0.0), 2.5)

    def test_orbit_determinism(self):
        dom = ConvexDomain.ellipse(1.5, 1.0)
        a = orbit(dom, PhasePoint(0.3, 0.45), 9)
        b = orbit(dom, PhasePoint(0.3, 0.45), 9)
        assert a.points == b.points
        assert a.chords == b.chords

    def test_orbit_csv_roundtrip(self):
        seg = orbit(ConvexDomain.ellipse(1.5, 1.0), PhasePoint(0.3, 0.45), 5)
        buf = io.StringIO()
        write_orbit_csv(seg, buf)
        rows = list(csv.reader(io.StringIO(buf.getvalue())))
        assert rows[0] == ["k", "s", "xi", "chord"]
        assert len(rows) == 7
        assert rows[1][3] == ""
        for k, row in enumerate(rows[1:]):
            assert int(row[0]) == k
            assert float(row[1]) == seg.points[k].s
            assert float(row[2]) == seg.points[k].xi
            if k > 0:
                assert float(row[3]) == seg.chords[k - 1]


class TestGlancingExpansion:
    def test_disk_exact(self):
        # on the disk both remainders vanish: xi is exactly conserved and
        # chord = 2 sqrt(1 - xi**2) exactly
        dom = ConvexDomain.disk()
        qs = [PhasePoint(0.37 * dom.perimeter, 1.0 - e) for e in np.logspace(-1, -4, 10)]
        rep = glancing_expansion_check(dom, qs)
        assert rep.normal_defect.max() < 1e-12
        assert rep.chord_defect.max() < 1e-12

    def test_ellipse_exponents(self):
        dom = ConvexDomain.ellipse(1.2, 1.0)
        qs = [PhasePoint(0.37 * dom.perimeter, 1.0 - e) for e in np.logspace(-1, -4, 10)]
        rep = glancing_expansion_check(dom, qs)
        assert rep.normal_exponent >= 0.9
        assert rep.chord_exponent >= 0.9
        # remainder ratios defect / eps stay bounded
        assert rep.normal_ratio.max() < 10.0
        assert rep.chord_ratio.max() < 10.0

    def test_empty_sequence_rejected(self):
        with pytest.raises(ValueError):
            glancing_expansion_check(ConvexDomain.disk(), [])
