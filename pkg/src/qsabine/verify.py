"""Acceptance suite: every advertised numerical property, measured.

Ten independent checks, one per headline claim of the package, each
returning a pass/fail verdict together with the measured numbers so a
failure report is actionable.  The checks recompute everything from the
public API; nothing is read from fixtures.  ``run_all`` executes them in
order and is what the ``qsabine verify`` command calls.

Four checks carry wall-time budgets (TIME_LIMITS); the budgets are
reported alongside the verdicts rather than folded into them, so a
slow machine degrades visibly instead of flipping numerics to FAIL.
"""
from __future__ import annotations

import cmath
import dataclasses
import math
import time
from typing import Callable, List, Optional

import numpy as np

from . import specfun as sf
from .billiards import (
    ConvexDomain,
    PhasePoint,
    billiard_step,
    glancing_expansion_check,
)
from .disk import (
    DampingDisk,
    DeltaDisk,
    TransparentDisk,
    newton_refine,
    scan,
    seed_normal,
)
from .reflectivity import (
    BoundaryDamping,
    DeltaPotential,
    TransparentObstacle,
    brewster,
)
from .sabine import glancing_bands, sabine_bounds, sabine_quotient

__all__ = ["CriterionResult", "run_all", "TIME_LIMITS"]

TIME_LIMITS = {
    "airy-bessel-identities": 10.0,
    "billiard-map": 30.0,
    "seed-convergence-rate": 60.0,
    "transparent-band-membership": 600.0,
}

_CBRT2 = 2.0 ** (1.0 / 3.0)


def _sdiff(a: float, b: float, period: float) -> float:
    """Signed difference a - b on a circle of the given period."""
    d = (a - b) % period
    return d - period if d > period / 2.0 else d


@dataclasses.dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    measured: str
    elapsed: float


def _check_airy_bessel_identities(workers: int) -> tuple:
    # Connection formula and the outgoing-projection identity on the
    # real axis, then the cross-order Wronskian on a random box.
    conn = proj = 0.0
    for s in np.linspace(-20.0, 5.0, 200):
        ai = sf.airy(s).value
        am = sf.airy_minus(s).value
        rec = cmath.exp(-1j * math.pi / 3) * am + cmath.exp(1j * math.pi / 3) * am.conjugate()
        conn = max(conn, abs(ai - rec))
        lhs = (cmath.exp(-5j * math.pi / 6) * am).imag
        proj = max(proj, abs(lhs + ai / 2.0))
    rng = np.random.default_rng(2024)
    worst = 0.0
    accepted = 0
    attempts = 0
    while accepted < 100 and attempts < 2000:
        attempts += 1
        n = int(rng.integers(0, 5001))
        radius = float(np.exp(rng.uniform(np.log(1.0), np.log(5000.0))))
        im = float(rng.uniform(-50.0, 50.0))
        re = math.sqrt(max(radius * radius - im * im, 0.25))
        z = complex(re, im)
        if not 1.0 <= abs(z) <= 5000.0:
            continue
        try:
            q = sf.bessel_quad(n, z)
        except sf.ScaledMagnitudeError:
            continue
        worst = max(worst, q.wronskian_defect())
        accepted += 1
    ok = conn < 1e-9 and proj < 1e-9 and worst < 1e-9 and accepted == 100
    measured = (f"connection {conn:.1e}, projection {proj:.1e}, "
                f"wronskian {worst:.1e} over {accepted} samples (all < 1e-9)")
    return ok, measured


def _check_glancing_symbols(workers: int) -> tuple:
    table = sf.airy_zeros(10)
    worst_sl = max(abs(sf.friedlander_symbols(z).single_layer - 1.0)
                   for z in table.zeros)
    s = sf.friedlander_symbols(-25.0)
    r_sl = abs(s.single_layer - 1.0)
    r_dl = abs(s.double_layer / 25.0 - 1.0)
    r_mx = abs(abs(s.mixed) / 5.0 - 1.0)
    ok = worst_sl < 1e-8 and r_sl < 0.01 and r_dl < 0.01 and r_mx < 0.01
    measured = (f"single layer at zeros off by {worst_sl:.1e} (< 1e-8); "
                f"x=-25 ratios off by {r_sl:.1e}/{r_dl:.1e}/{r_mx:.1e} (< 1%)")
    return ok, measured


def _check_band_heights(workers: int) -> tuple:
    table = sf.airy_zeros(10)
    worst = 0.0
    for z, imphi in zip(table.zeros, table.im_phi_minus):
        am = abs(sf.airy_minus(z).value)
        aip = abs(sf.airy(z).derivative)
        closed = -1.0 / (8.0 * math.pi ** 2 * am ** 3 * aip)
        worst = max(worst, abs(imphi - closed) / abs(closed))
    ok = worst < 1e-8
    return ok, f"band height vs closed form, max rel {worst:.1e} (< 1e-8) over 10 zeros"


def _check_billiard_map(workers: int) -> tuple:
    disk = ConvexDomain.disk()
    rng = np.random.default_rng(7)
    worst_chord = worst_xi = 0.0
    for _ in range(50):
        s, xi = rng.uniform(0.0, disk.perimeter), rng.uniform(-0.95, 0.95)
        q1, chord = billiard_step(disk, PhasePoint(s, xi))
        worst_chord = max(worst_chord, abs(chord - 2.0 * math.sqrt(1.0 - xi * xi)))
        worst_xi = max(worst_xi, abs(q1.xi - xi))
    worst_det = 0.0
    for dom in (disk, ConvexDomain.ellipse(1.5, 1.0)):
        L = dom.perimeter
        hs, hx = 1e-5 * L, 1e-5
        for _ in range(50):
            s, xi = rng.uniform(0.0, L), rng.uniform(-0.8, 0.8)
            qsp, _ = billiard_step(dom, PhasePoint(s + hs, xi))
            qsm, _ = billiard_step(dom, PhasePoint(s - hs, xi))
            qxp, _ = billiard_step(dom, PhasePoint(s, xi + hx))
            qxm, _ = billiard_step(dom, PhasePoint(s, xi - hx))
            det = (_sdiff(qsp.s, qsm.s, L) / (2 * hs) * (qxp.xi - qxm.xi) / (2 * hx)
                   - (qsp.xi - qsm.xi) / (2 * hs) * _sdiff(qxp.s, qxm.s, L) / (2 * hx))
            worst_det = max(worst_det, abs(det - 1.0))
    ell = ConvexDomain.ellipse(1.2, 1.0)
    qs = [PhasePoint(0.37 * ell.perimeter, 1.0 - e) for e in np.logspace(-1, -4, 10)]
    rep = glancing_expansion_check(ell, qs)
    ok = (worst_chord < 1e-12 and worst_xi < 1e-12 and worst_det < 1e-6
          and rep.normal_exponent >= 0.9 and rep.chord_exponent >= 0.9)
    measured = (f"disk chord/xi defects {worst_chord:.1e}/{worst_xi:.1e} (< 1e-12), "
                f"jacobian det off by {worst_det:.1e} (< 1e-6), glancing exponents "
                f"{rep.normal_exponent:.2f}/{rep.chord_exponent:.2f} (>= 0.9)")
    return ok, measured


def _check_seed_quotient(workers: int) -> tuple:
    disk = ConvexDomain.disk()
    worst = 0.0
    for c, alpha in ((2.0, 1.0), (2.0, 0.4), (0.5, 1.0), (0.5, 4.0)):
        model = TransparentObstacle(c, alpha)
        q = sabine_quotient(disk, model, PhasePoint(0.0, 0.0), 1)
        s = seed_normal(TransparentDisk(c, alpha), 3, 7)
        worst = max(worst, abs(s.imag - q))
    ok = worst < 1e-9
    return ok, f"seed height vs one-bounce quotient, max gap {worst:.1e} (< 1e-9), 4 parameter pairs"


def _check_seed_convergence(workers: int) -> tuple:
    problem = TransparentDisk(2.0, 1.0)
    slopes = []
    for n in (0, 3):
        drift, res_re = [], []
        for k in range(10, 41, 3):
            s = seed_normal(problem, n, k)
            r = newton_refine(problem, n, s, 0.2, tag="normal")
            drift.append(abs(r.lam - s))
            res_re.append(r.lam.real)
        slopes.append(float(np.polyfit(np.log(res_re), np.log(drift), 1)[0]))
    ok = all(sl <= -0.8 for sl in slopes)
    return ok, f"seed-to-root drift slopes {slopes[0]:+.3f}, {slopes[1]:+.3f} (<= -0.8)"


def _check_transparent_band(workers: int) -> tuple:
    problem = TransparentDisk(2.0, 1.0)
    model = TransparentObstacle(2.0, 1.0)
    disk = ConvexDomain.disk()
    results = scan(problem, (200.0, 300.0), -3.0, range(0, 361), workers=workers)
    band = sabine_bounds(disk, model)
    lo, hi = band.lower - 0.05, band.upper + 0.05
    im = np.array([r.lam.imag for r in results])
    inside = float(np.mean((im >= lo) & (im <= hi)))
    # One-bounce decay curve through the low-angle cloud.
    worst_dev = 0.0
    for r in results:
        tf = r.n / r.lam.real
        if tf > 0.4:
            continue
        pred = sabine_quotient(disk, model, PhasePoint(0.0, 2.0 * tf), 1)
        worst_dev = max(worst_dev, abs(r.lam.imag - pred))
    ok = inside >= 0.95 and worst_dev <= 0.1
    measured = (f"{100 * inside:.2f}% of {len(results)} resonances in band +-0.05 "
                f"(>= 95%), low-angle cloud off curve by {worst_dev:.1e} (<= 0.1)")
    return ok, measured


def _check_brewster_contrast(workers: int) -> tuple:
    xi_b = brewster(TransparentObstacle(2.0, 0.4))
    tm = scan(TransparentDisk(2.0, 0.4), (200.0, 260.0), -8.0, range(50, 100),
              workers=workers)
    te = scan(TransparentDisk(2.0, 1.0), (200.0, 260.0), -8.0, range(50, 100),
              workers=workers)
    te_floor = min(r.lam.imag for r in te)
    near = [r.lam.imag for r in tm if abs(2.0 * r.n / r.lam.real - xi_b) < 0.05]
    ok = bool(near) and all(v < 2.0 * te_floor for v in near)
    measured = (f"{len(near)} near-brewster resonances, Im <= {max(near):.3f} "
                f"vs doubled floor {2.0 * te_floor:.3f}" if near
                else "no resonances near the brewster tangency")
    return ok, measured


def _check_delta_glancing(workers: int) -> tuple:
    table = sf.airy_zeros(3)
    problem = DeltaDisk(1.0, 5.0 / 6.0)
    rows = []
    for n in (1000, 1600, 2500, 4000, 6300, 9800):
        hi = n + 5.5 * n ** (1.0 / 3.0)
        res = scan(problem, (n + 0.5, hi), -4.0, [n], tangent_floor=0.94,
                   workers=workers)
        h = 1.0 / n
        bands = glancing_bands(DeltaPotential(1.0, -5.0 / 6.0, h), 3)
        lead = [b.b_min * table.im_phi_minus[j] / h ** (5.0 / 3.0)
                for j, b in enumerate(bands)]
        for r in res:
            tf = r.n / r.lam.real
            if not 0.95 <= tf <= 1.0:
                continue
            jn = int(np.argmin([abs(r.lam.imag - level) for level in lead]))
            val = h ** (2.0 / 3.0) * (r.lam * h).imag / table.im_phi_minus[jn]
            b = bands[jn]
            rows.append((r.lam.real, r.lam.imag, jn,
                         b.b_min * 0.85 <= val <= b.b_max * 1.15))
    frac = float(np.mean([r[3] for r in rows])) if rows else 0.0
    band1 = [(re, -im) for re, im, jn, _ in rows if jn == 0]
    if len(band1) >= 2:
        x = np.log([p[0] for p in band1])
        y = np.log([p[1] for p in band1])
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = math.nan
    ok = bool(rows) and frac == 1.0 and abs(slope) <= 0.05
    measured = (f"{sum(r[3] for r in rows)}/{len(rows)} in band ({100 * frac:.1f}%, "
                f"need 100%), band-1 growth exponent {slope:+.3f} (|.| <= 0.05)")
    return ok, measured


def _check_damping_band(workers: int) -> tuple:
    results = scan(DampingDisk(2.0), (200.0, 300.0), -3.0, range(0, 361),
                   workers=workers)
    band = sabine_bounds(ConvexDomain.disk(), BoundaryDamping(2.0))
    lo, hi = band.lower - 0.05, band.upper + 0.05
    im = np.array([r.lam.imag for r in results])
    inside = float(np.mean((im >= lo) & (im <= hi)))
    ok = inside == 1.0
    measured = (f"{100 * inside:.2f}% of {len(results)} eigenvalues in "
                f"[{lo:.4f}, {hi:.4f}] (need 100%)")
    return ok, measured


_CHECKS: List[tuple] = [
    ("airy-bessel-identities", _check_airy_bessel_identities),
    ("glancing-symbols", _check_glancing_symbols),
    ("airy-zero-band-heights", _check_band_heights),
    ("billiard-map", _check_billiard_map),
    ("seed-quotient-consistency", _check_seed_quotient),
    ("seed-convergence-rate", _check_seed_convergence),
    ("transparent-band-membership", _check_transparent_band),
    ("brewster-contrast", _check_brewster_contrast),
    ("delta-glancing-bands", _check_delta_glancing),
    ("damping-band-membership", _check_damping_band),
]


def run_one(name: str, workers: int = 0) -> CriterionResult:
    """Run a single named criterion."""
    body = dict(_CHECKS).get(name)
    if body is None:
        raise KeyError(f"unknown criterion {name!r}")
    start = time.monotonic()
    passed, measured = body(workers)
    return CriterionResult(name, bool(passed), measured, time.monotonic() - start)


def run_all(workers: int = 0) -> List[CriterionResult]:
    """Run every criterion and return the results in suite order."""
    return [run_one(name, workers) for name, _ in _CHECKS]
