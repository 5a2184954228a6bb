"""Scattering resonances of the unit disk for three transmission problems.

For each angular mode n the outgoing solutions are governed by a secular
function f_n(lambda) built from Bessel and Hankel factors; resonances are
its zeros in the open lower half plane.  Three variants are supported:

  transparent   wave-speed contrast c and coupling alpha across the
                circle:  f = c^-1 Jn'(lambda/c) Hn(lambda)
                             - alpha Hn'(lambda) Jn(lambda/c)
  delta         a frequency-scaled delta potential of strength
                V(lambda) = v0 lambda^v_exponent on the circle, in the
                Wronskian-reduced form  f = Jn Hn - 2i/(pi V)
  damping       an absorbing boundary condition with damping a:
                f = Jn' - i a Jn

Zeros are located by a trust-region Newton iteration started from
asymptotic seed families (normal-incidence and transverse phase
conditions, Airy corrections for nearly glancing modes) and the result
of a windowed scan is certified complete per mode by argument-principle
counts over the scan rectangle, with subdivision and reseeding where the
count disagrees with the roots in hand.
"""

from __future__ import annotations

import cmath
import csv
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import pi
from typing import Iterable, Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import hankel1, jv

from .specfun import ScaledMagnitudeError, airy_zeros, bessel_quad, phi_minus

__all__ = [
    "TransparentDisk",
    "DeltaDisk",
    "DampingDisk",
    "DiskProblem",
    "Resonance",
    "NoConvergenceError",
    "IncompleteScanWarning",
    "secular",
    "seed_normal",
    "seed_transverse",
    "seed_glancing",
    "newton_refine",
    "scan",
    "mode_symmetry_defect",
    "RESONANCE_CSV_HEADER",
    "write_resonance_csv",
]

_log = logging.getLogger(__name__)

_CBRT2 = 2.0 ** (1.0 / 3.0)

# Newton tolerances: a start point already this converged is a fixed
# point; iteration stops at the looser value; kept roots must beat the
# Resonance invariant.
_RESIDUAL_FIXED = 1e-12
_RESIDUAL_DONE = 1e-10

# Trust radius for normal/transverse family seeds.  Adjacent roots of
# one family are at least ~pi apart, and the uniqueness guard needs the
# trust disk small enough that the Hankel growth across it does not
# inflate the f'' bound; 0.2 passes the guard while still absorbing the
# O(1/Re lambda) seed error down to Re lambda ~ 10.
_SEED_TRUST = 0.2

# Airy-cluster starts carry larger model error (the expansion variable
# is only ~n^(-1/6) small), but neighboring cluster roots are at least
# ~1.4 n^(1/3) apart, so a wider trust disk is both needed and safe.
_GLANCING_TRUST = 1.5

# Scan plumbing: duplicate threshold, smallest cell worth splitting, and
# recursion cap for the completeness pass.
_DEDUP_TOL = 1e-6
_MIN_CELL = 1e-3
_MAX_DEPTH = 48

_SEED_TAGS = ("normal", "transverse", "glancing", "continuation")


class NoConvergenceError(RuntimeError):
    """Newton iteration failed; ``trace`` holds the visited points."""

    def __init__(self, message: str, trace: Iterable[complex]):
        super().__init__(message)
        self.trace = tuple(complex(z) for z in trace)


class IncompleteScanWarning(UserWarning):
    """Argument-principle count and located roots disagree in a cell."""

    def __init__(self, n: int, box: tuple, expected, found: int):
        self.n = int(n)
        self.box = tuple(float(b) for b in box)
        self.expected = expected
        self.found = int(found)
        re_lo, re_hi, im_lo, im_hi = self.box
        super().__init__(
            f"mode n={n}: cell [{re_lo:.6f}, {re_hi:.6f}] x [{im_lo:.6f}, "
            f"{im_hi:.6f}] has winding count {expected} but {found} roots"
        )


@dataclass(frozen=True)
class TransparentDisk:
    """Transmission across the unit circle with wave speed c inside.

    The interior field is a combination of J_n(lambda/c), the exterior
    one of H_n(lambda); continuity of the field and of alpha times the
    normal derivative couples them.
    """

    c: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0.0):
            raise ValueError("wave speed c must be finite and positive")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError("coupling alpha must be finite and positive")

    @property
    def tag(self) -> str:
        return "transparent"


@dataclass(frozen=True)
class DeltaDisk:
    """Delta potential on the unit circle with frequency-scaled strength.

    The potential multiplies the boundary trace by V(lambda) =
    v0 lambda^v_exponent (principal branch), so the field is continuous
    while its normal derivative jumps by -V times the trace.
    """

    v0: float
    v_exponent: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.v0) and self.v0 > 0.0):
            raise ValueError("potential amplitude v0 must be finite and positive")
        if not math.isfinite(self.v_exponent):
            raise ValueError("potential exponent must be finite")

    def strength(self, lam: complex) -> complex:
        return self.v0 * complex(lam) ** self.v_exponent

    @property
    def tag(self) -> str:
        return "delta"


@dataclass(frozen=True)
class DampingDisk:
    """Absorbing boundary condition u_r = i a u on the unit circle."""

    a: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise ValueError("damping a must be finite and positive")

    @property
    def tag(self) -> str:
        return "damping"


DiskProblem = Union[TransparentDisk, DeltaDisk, DampingDisk]


@dataclass(frozen=True)
class Resonance:
    """One zero of the secular function in the lower half plane.

    residual is |f| at the zero relative to the local magnitude scale of
    the terms of f, so it stays meaningful under the exponential growth
    of the Hankel factor below the real axis.  seed records which start
    family produced the zero; guarded is the trust-region certificate of
    the refinement (uniqueness of the zero in the start disk).
    """

    lam: complex
    n: int
    residual: float
    seed: str
    problem: str
    guarded: bool = True

    def __post_init__(self):
        if not (self.lam.imag < 0.0 and self.lam.real > 0.0):
            raise ValueError(f"resonance must lie in the lower right quadrant: {self.lam!r}")
        if not (0.0 <= self.residual < 1e-8):
            raise ValueError(f"residual {self.residual!r} out of range")
        if self.n < 0:
            raise ValueError("mode index must be >= 0")
        if self.seed not in _SEED_TAGS:
            raise ValueError(f"unknown seed tag {self.seed!r}")
        if self.tangent_freq > 1.2:
            raise ValueError(
                f"tangent frequency {self.tangent_freq!r} exceeds 1.2: not a disk resonance"
            )

    @property
    def tangent_freq(self) -> float:
        """Mode index over real part, n / Re lambda."""
        return self.n / self.lam.real


# ---------------------------------------------------------------------------
# secular functions


def _second_derivative(n: int, z: complex, f: complex, fp: complex) -> complex:
    """f'' for any cylinder function via the Bessel equation."""
    return -(1.0 - (n * n) / (z * z)) * f - fp / z


def _secular_parts(problem: DiskProblem, n: int, lam: complex):
    """(f, f', scale) at one point, scale being the residual normalizer."""
    lam = complex(lam)
    if isinstance(problem, TransparentDisk):
        c = problem.c
        alpha = problem.alpha
        w = lam / c
        inner = bessel_quad(n, w)
        outer = bessel_quad(n, lam)
        jpp = _second_derivative(n, w, inner.j, inner.j_prime)
        hpp = _second_derivative(n, lam, outer.h1, outer.h1_prime)
        f = inner.j_prime * outer.h1 / c - alpha * outer.h1_prime * inner.j
        fp = (
            jpp * outer.h1 / (c * c)
            + inner.j_prime * outer.h1_prime / c
            - alpha * (hpp * inner.j + outer.h1_prime * inner.j_prime / c)
        )
        scale = abs(inner.j_prime * outer.h1 / c) + abs(alpha * outer.h1_prime * inner.j)
    elif isinstance(problem, DeltaDisk):
        quad = bessel_quad(n, lam)
        v = problem.strength(lam)
        vp = problem.v0 * problem.v_exponent * lam ** (problem.v_exponent - 1.0)
        f = quad.j * quad.h1 - 2j / (pi * v)
        fp = quad.j_prime * quad.h1 + quad.j * quad.h1_prime + (2j / pi) * vp / (v * v)
        scale = abs(quad.j * quad.h1) + abs(2.0 / (pi * v))
    elif isinstance(problem, DampingDisk):
        quad = bessel_quad(n, lam)
        jpp = _second_derivative(n, lam, quad.j, quad.j_prime)
        f = quad.j_prime - 1j * problem.a * quad.j
        fp = jpp - 1j * problem.a * quad.j_prime
        scale = abs(quad.j_prime) + abs(problem.a * quad.j)
    else:
        raise TypeError(f"not a disk problem: {problem!r}")
    return f, fp, (scale if scale > 0.0 else 1.0)


def secular(problem: DiskProblem, n: int, lam: complex) -> tuple:
    """Secular function and its lambda-derivative at one point.

    The derivative is analytic, assembled from the Bessel derivative
    recurrence and the Bessel differential equation; no differencing.
    """
    f, fp, _ = _secular_parts(problem, n, lam)
    return f, fp


def residual(problem: DiskProblem, n: int, lam: complex) -> float:
    """|f| relative to the local magnitude scale of its terms."""
    f, _, scale = _secular_parts(problem, n, lam)
    return abs(f) / scale


def _jv_pair(n: int, z: np.ndarray):
    j = jv(n, z)
    return j, jv(n - 1, z) - (n / z) * j


def _h1_pair(n: int, z: np.ndarray):
    h = hankel1(n, z)
    return h, hankel1(n - 1, z) - (n / z) * h


def _secular_array(problem: DiskProblem, n: int, z: np.ndarray):
    """Vectorized (f, f') along contours; callers keep z inside the
    guarded argument box of the scalar path."""
    z = np.asarray(z, dtype=complex)
    if isinstance(problem, TransparentDisk):
        c = problem.c
        alpha = problem.alpha
        w = z / c
        j, jp = _jv_pair(n, w)
        h, hp = _h1_pair(n, z)
        jpp = -(1.0 - (n * n) / (w * w)) * j - jp / w
        hpp = -(1.0 - (n * n) / (z * z)) * h - hp / z
        f = jp * h / c - alpha * hp * j
        fp = jpp * h / (c * c) + jp * hp / c - alpha * (hpp * j + hp * jp / c)
    elif isinstance(problem, DeltaDisk):
        j, jp = _jv_pair(n, z)
        h, hp = _h1_pair(n, z)
        v = problem.v0 * z ** problem.v_exponent
        vp = problem.v0 * problem.v_exponent * z ** (problem.v_exponent - 1.0)
        f = j * h - 2j / (pi * v)
        fp = jp * h + j * hp + (2j / pi) * vp / (v * v)
    elif isinstance(problem, DampingDisk):
        j, jp = _jv_pair(n, z)
        jpp = -(1.0 - (n * n) / (z * z)) * j - jp / z
        f = jp - 1j * problem.a * j
        fp = jpp - 1j * problem.a * jp
    else:
        raise TypeError(f"not a disk problem: {problem!r}")
    return f, fp


def mode_symmetry_defect(problem: DiskProblem, n: int, lam: complex) -> float:
    """Relative mismatch of |f| between modes n and -n.

    Bessel reflection sends every order-n factor to (-1)^n times itself,
    so the secular functions of n and -n share zero sets (single-factor
    conditions flip sign at odd n, product conditions are unchanged) and
    scans may restrict to n >= 0.  Magnitudes are compared so that the
    unimodular prefactor drops out.
    """
    z = np.array([complex(lam)])
    f_pos, _ = _secular_array(problem, n, z)
    f_neg, _ = _secular_array(problem, -n, z)
    denom = abs(f_pos[0]) or 1.0
    return abs(abs(f_neg[0]) - abs(f_pos[0])) / denom


# ---------------------------------------------------------------------------
# asymptotic seeds


def seed_normal(problem: TransparentDisk, n: int, k: int) -> complex:
    """Start point of the normal-incidence family of the transparent disk.

    Re lambda_0 = c (2 - sgn(1 - alpha c) + 2 n + 4 k) pi / 4 and
    Im lambda_0 = (c/2) log|(1 - alpha c)/(1 + alpha c)|, the reflection
    strength of a diameter-bouncing wave.
    """
    if not isinstance(problem, TransparentDisk):
        raise TypeError("normal-incidence seeds exist for the transparent problem only")
    ac = problem.alpha * problem.c
    if abs(ac - 1.0) < 1e-14:
        raise ValueError(
            "alpha c = 1 is degenerate: the normal reflection coefficient vanishes"
        )
    sigma = 1.0 if ac < 1.0 else -1.0
    re = problem.c * (2.0 - sigma + 2.0 * n + 4.0 * k) * pi / 4.0
    im = 0.5 * problem.c * math.log(abs((1.0 - ac) / (1.0 + ac)))
    return complex(re, im)


def _phase_integral(c: float, r: float) -> float:
    """F(r) = sqrt(r^2/c^2 - 1) - arcsec(r/c), increasing for r > c."""
    return math.sqrt(r * r / (c * c) - 1.0) - math.acos(c / r)


def _invert_phase(c: float, target: float) -> float:
    """The unique r > c with F(r) = target > 0."""
    lo = c * (1.0 + 1e-13)
    hi = c * (target + pi / 2.0 + 1.0)
    return brentq(lambda r: _phase_integral(c, r) - target, lo, hi, xtol=1e-13)


def _branch_sign(c: float, alpha: float, r: float) -> float:
    nu = math.sqrt(r * r / (c * c) - 1.0)
    return 1.0 if nu >= alpha * math.sqrt(r * r - 1.0) else -1.0


def _transverse_value(problem: TransparentDisk, n: int, r: float) -> complex:
    """Seed at radius ratio r = Re lambda / n on the transverse family."""
    if r <= 1.0:
        raise ValueError(
            "totally reflecting chord (r <= 1): the resonance sits exponentially"
            " close to the real axis and has no transverse-family start"
        )
    nu = math.sqrt(r * r / (problem.c * problem.c) - 1.0)
    ww = problem.alpha * math.sqrt(r * r - 1.0)
    if nu == ww:
        raise ValueError(
            "Brewster-tangent direction: the transverse reflection coefficient vanishes"
        )
    im = r / (2.0 * nu) * math.log(abs((nu - ww) / (nu + ww)))
    return complex(n * r, im)


def seed_transverse(problem: TransparentDisk, p: int, q: int, m: int) -> complex:
    """Start point on the transverse family of rotation number p/q.

    The footprint polygon has mq sides; the radius ratio r solves the
    phase condition sqrt(r^2/c^2 - 1) - arcsec(r/c) =
    -(4 p m - sgn) pi / (4 q m) on the branch whose reflection sign sgn
    is self-consistent at the root, and lambda_0 = (qm) r + i times the
    transverse reflection decay.
    """
    if not isinstance(problem, TransparentDisk):
        raise TypeError("transverse seeds exist for the transparent problem only")
    if q < 1 or m < 1:
        raise ValueError("need q >= 1 and m >= 1")
    n = q * m
    k = p * m
    for sigma in (1.0, -1.0):
        target = -(4.0 * k - sigma) * pi / (4.0 * n)
        if target <= 0.0:
            continue
        r = _invert_phase(problem.c, target)
        if r <= 1.0:
            raise ValueError(
                "totally reflecting rotation number: the chord parameter "
                f"r = {r:.6g} <= 1 leaves no transmission loss to seed from"
            )
        if _branch_sign(problem.c, problem.alpha, r) == sigma:
            return _transverse_value(problem, n, r)
    raise ValueError(
        f"no transverse seed for p={p}, q={q}: the phase target is not "
        "reachable (the winding part p must be negative)"
    )


def seed_glancing(problem: DeltaDisk, n: int, j: int) -> complex:
    """Start point of the j-th glancing resonance of the delta problem.

    Near lambda = n the mode sits an Airy length below the turning
    point; the potential shifts the j-th Airy zero by delta1 =
    2^(1/3) n^(2/3) / V and leaks at second order in delta1 through the
    outgoing log-derivative Phi_-.
    """
    if not isinstance(problem, DeltaDisk):
        raise TypeError("glancing seeds exist for the delta problem only")
    if n < 1 or j < 1:
        raise ValueError("need mode n >= 1 and band index j >= 1")
    zeta = float(airy_zeros(j).zeros[j - 1])
    v = problem.v0 * float(n) ** problem.v_exponent
    n23 = float(n) ** (2.0 / 3.0)
    delta1 = _CBRT2 * n23 / v
    if delta1 > 0.75:
        raise ValueError(
            "potential too weak at this order for a glancing expansion "
            f"(first correction {delta1:.3g} is not small)"
        )
    u = zeta + delta1 - phi_minus(zeta) * delta1 * delta1
    return n * (1.0 - u / (_CBRT2 * n23))


# ---------------------------------------------------------------------------
# Newton refinement


def _newton_guard(problem, n, lam0, eps, a, b, scale0) -> bool:
    """Disk-uniqueness certificate a + d eps^2 < eps b < 1.

    a, b are |f|, |f'| at the center and d bounds |f''| on the trust
    disk, sampled through f' differences at eight boundary points; all
    three normalized by the center scale so the test is meaningful at
    any magnitude.
    """
    ring = lam0 + eps * np.exp(1j * np.arange(8) * (pi / 4.0))
    h = 1e-3 * eps
    _, fps = _secular_array(problem, n, np.concatenate([ring + h, ring - h]))
    if not np.all(np.isfinite(fps)):
        _log.debug("newton guard fail at n=%d, %s: f' not finite on the ring", n, lam0)
        return False
    d = 1.5 * float(np.max(np.abs(fps[:8] - fps[8:]))) / (2.0 * h) / scale0
    ok = bool(a + d * eps * eps < eps * b < 1.0)
    _log.debug(
        "newton guard %s at n=%d, %s: a=%.3e b=%.3e d=%.3e eps=%.3e",
        "pass" if ok else "fail", n, lam0, a, b, d, eps,
    )
    return ok


def newton_refine(
    problem: DiskProblem,
    n: int,
    lambda_0: complex,
    epsilon: float,
    *,
    tag: str = "continuation",
) -> Resonance:
    """Refine a start point to a resonance within trust radius epsilon.

    Stops once the scaled residual is below 1e-10.  A start point that
    is already below 1e-12 is returned unchanged.  The disk-uniqueness
    guard is evaluated at the start; on failure the iteration still runs
    but the result is marked unguarded, as is any zero that lands
    outside the trust disk.

    Raises NoConvergenceError (with the visited points attached) on a
    vanishing derivative, three consecutive steps longer than epsilon,
    50 iterations without convergence, or convergence outside the open
    lower right quadrant.
    """
    if not (math.isfinite(epsilon) and epsilon > 0.0):
        raise ValueError("trust radius must be positive")
    lam = complex(lambda_0)
    f, fp, scale = _secular_parts(problem, n, lam)
    if not cmath.isfinite(f):
        raise NoConvergenceError("secular function not finite at the start point", (lam,))
    if abs(f) / scale < _RESIDUAL_FIXED:
        return Resonance(
            lam=lam, n=n, residual=abs(f) / scale, seed=tag,
            problem=problem.tag, guarded=True,
        )
    guard_ok = _newton_guard(problem, n, lam, epsilon, abs(f) / scale, abs(fp) / scale, scale)
    trace = [lam]
    oversize = 0
    for _ in range(50):
        if fp == 0:
            raise NoConvergenceError("derivative of the secular function vanished", trace)
        step = f / fp
        lam = lam - step
        trace.append(lam)
        if abs(step) > epsilon:
            oversize += 1
            if oversize >= 3:
                raise NoConvergenceError(
                    f"diverging from {lambda_0!r}: three consecutive steps "
                    "longer than the trust radius", trace,
                )
        else:
            oversize = 0
        f, fp, scale = _secular_parts(problem, n, lam)
        if not cmath.isfinite(f):
            raise NoConvergenceError("secular function not finite during iteration", trace)
        if abs(f) / scale < _RESIDUAL_DONE:
            if not (lam.imag < 0.0 and lam.real > 0.0):
                raise NoConvergenceError(
                    f"converged to {lam!r}, outside the lower right quadrant", trace,
                )
            return Resonance(
                lam=lam, n=n, residual=abs(f) / scale, seed=tag, problem=problem.tag,
                guarded=bool(guard_ok and abs(lam - complex(lambda_0)) <= epsilon),
            )
    raise NoConvergenceError("no convergence within 50 iterations", trace)


# ---------------------------------------------------------------------------
# seed enumeration for scans


def _normal_k_range(c, n, sigma, re_lo, re_hi):
    """Integers k whose normal seed has Re lambda_0 in [re_lo, re_hi]."""
    base = 2.0 - sigma + 2.0 * n
    k_lo = math.ceil((4.0 * re_lo / (c * pi) - base) / 4.0)
    k_hi = math.floor((4.0 * re_hi / (c * pi) - base) / 4.0)
    return range(k_lo, k_hi + 1)


def _transparent_seeds(problem, n, re_lo, re_hi, q_max):
    c, alpha = problem.c, problem.alpha
    out = []
    if abs(alpha * c - 1.0) > 1e-14:
        sigma = 1.0 if alpha * c < 1.0 else -1.0
        for k in _normal_k_range(c, n, sigma, re_lo, re_hi):
            lam0 = seed_normal(problem, n, k)
            if lam0.real > 0.0:
                out.append((lam0, "normal", _SEED_TRUST))
    if n >= 1:
        out.extend(_transverse_sweep(problem, n, re_lo, re_hi, q_max))
        out.extend(_transparent_glancing(problem, n, re_lo, re_hi))
    return out


def _transverse_sweep(problem, n, re_lo, re_hi, q_max):
    """Transverse starts for mode n with Re lambda_0 in window.

    Phase targets with reduced rotation denominator q <= q_max are the
    transverse family proper; the rest of the integer sweep reuses the
    same phase condition as plain continuation starts.
    """
    c, alpha = problem.c, problem.alpha
    r_hi = re_hi / n
    if r_hi <= c * (1.0 + 1e-9):
        return []
    out = []
    t_hi = _phase_integral(c, r_hi)
    for sigma in (1.0, -1.0):
        # F(r) = -(4k - sigma) pi / (4n) in (0, t_hi]
        k_lo = math.ceil(sigma / 4.0 - n * t_hi / pi)
        for k in range(k_lo, 0):
            target = -(4.0 * k - sigma) * pi / (4.0 * n)
            if not 0.0 < target <= t_hi:
                continue
            r = _invert_phase(c, target)
            if r <= 1.0 + 1e-12:
                # Totally reflecting chord: the root hugs the real axis,
                # above any admissible scan ceiling.
                continue
            if _branch_sign(c, alpha, r) != sigma:
                continue
            try:
                lam0 = _transverse_value(problem, n, r)
            except ValueError:
                continue
            if lam0.real < re_lo:
                continue
            q = n // math.gcd(n, -k)
            out.append((lam0, "transverse" if q <= q_max else "continuation",
                        _SEED_TRUST))
    return out


def _transparent_glancing(problem, n, re_lo, re_hi):
    """Airy-corrected starts where the interior ray grazes the circle.

    For lambda near c n the interior factor degenerates to an Airy
    function; the first zeros sit at w = n + |a_j| n^(1/3) / 2^(1/3)
    with the outgoing leak -i c / (alpha sqrt(c^2 - 1)) from the Debye
    phase of the exterior Hankel factor.  Only meaningful for c > 1.
    """
    c, alpha = problem.c, problem.alpha
    if c <= 1.0 or n < 4:
        return []
    cluster_lo = c * n
    cluster_hi = c * (n + 6.0 * n ** (1.0 / 3.0))
    if cluster_hi < re_lo or cluster_lo > re_hi:
        return []
    leak = c / (alpha * math.sqrt(c * c - 1.0))
    out = []
    for zeta in airy_zeros(6).zeros:
        w = n + abs(float(zeta)) * n ** (1.0 / 3.0) / _CBRT2
        lam0 = complex(c * w, -leak)
        if re_lo <= lam0.real <= re_hi:
            out.append((lam0, "glancing", _GLANCING_TRUST))
    return out


def _exterior_phase(r: float) -> float:
    """sqrt(r^2 - 1) - arcsec(r), the free exterior angular phase."""
    return math.sqrt(r * r - 1.0) - math.acos(1.0 / r)


def _invert_exterior_phase(target: float) -> float:
    lo = 1.0 + 1e-13
    hi = target + pi / 2.0 + 1.0
    return brentq(lambda r: _exterior_phase(r) - target, lo, hi, xtol=1e-13)


def _damping_seeds(problem, n, re_lo, re_hi):
    """Phase-condition starts for the damping problem.

    The boundary phase theta = n F1(r) - pi/4 satisfies e^{2 i theta} =
    (t + a r)/(t - a r) with t = sqrt(r^2 - 1); for n = 0 this is the
    exact normal-incidence family, for n >= 1 the same condition at
    finite incidence.  Nearly glancing modes get Airy starts instead:
    lambda = n + |a_j| n^(1/3)/2^(1/3) - i/a.
    """
    a = problem.a
    out = []
    if n == 0:
        if abs(a - 1.0) < 1e-14:
            return out
        if a > 1.0:
            im = 0.5 * math.log((a - 1.0) / (a + 1.0))
            offset = 0.75
        else:
            im = 0.5 * math.log((1.0 - a) / (1.0 + a))
            offset = 0.25
        k_lo = math.ceil(re_lo / pi - offset)
        k_hi = math.floor(re_hi / pi - offset)
        for k in range(k_lo, k_hi + 1):
            re = (k + offset) * pi
            if re > 0.0:
                out.append((complex(re, im), "normal", _SEED_TRUST))
        return out
    # bulk: solve Re theta = pi k (+ pi/2 on the overdamped branch)
    r_hi = re_hi / n
    if r_hi > 1.0 + 1e-9:
        t_hi = _exterior_phase(r_hi)
        k_hi = math.floor((t_hi * n - pi / 4.0) / pi) + 1
        for k in range(0, k_hi + 1):
            for extra in (0.0, 0.5):
                target = (pi * (k + extra) + pi / 4.0) / n
                if not 0.0 < target <= t_hi:
                    continue
                r = _invert_exterior_phase(target)
                t = math.sqrt(r * r - 1.0)
                if abs(t - a * r) < 1e-12 * a * r:
                    continue
                ratio = (t + a * r) / (t - a * r)
                # branch bookkeeping: ratio > 0 pairs with the plain
                # phase, ratio < 0 with the half-integer shift
                if (ratio > 0.0) != (extra == 0.0):
                    continue
                if ratio == 0.0 or not math.isfinite(ratio):
                    continue
                im = -r / (2.0 * t) * math.log(abs(ratio))
                if im >= 0.0:
                    continue
                lam0 = complex(n * r, im)
                if re_lo <= lam0.real <= re_hi:
                    out.append((lam0, "normal", _SEED_TRUST))
    # glancing cluster
    if n >= 4 and n + 6.0 * n ** (1.0 / 3.0) >= re_lo and n <= re_hi:
        for zeta in airy_zeros(6).zeros:
            lam0 = complex(n + abs(float(zeta)) * n ** (1.0 / 3.0) / _CBRT2, -1.0 / a)
            if re_lo <= lam0.real <= re_hi:
                out.append((lam0, "glancing", _GLANCING_TRUST))
    return out


def _delta_seeds(problem, n, re_lo, re_hi, glancing_depth):
    """Glancing Airy starts plus bulk phase-condition starts."""
    out = []
    if n >= 1:
        for j in range(1, glancing_depth + 1):
            try:
                lam0 = seed_glancing(problem, n, j)
            except ValueError:
                break
            if re_lo <= lam0.real <= re_hi:
                trust = max(0.5, 0.12 * float(n) ** (1.0 / 3.0))
                out.append((lam0, "glancing", trust))
    # bulk: e^{2 i theta} = 2 i lambda t / (r V) - 1, theta = n F1 - pi/4
    if n == 0:
        def theta_of(lam):
            return lam - pi / 4.0
        def lam_of(theta):
            return theta + pi / 4.0
        t_lo, t_hi = theta_of(re_lo), theta_of(re_hi)
    else:
        r_hi = re_hi / n
        if r_hi <= 1.0 + 1e-6:
            return out
        r_lo = max(re_lo / n, 1.0 + 1e-6)
        t_lo, t_hi = n * _exterior_phase(r_lo) - pi / 4.0, n * _exterior_phase(r_hi) - pi / 4.0
        def lam_of(theta):
            return n * _invert_exterior_phase((theta + pi / 4.0) / n)
    for k in range(math.ceil(t_lo / pi - 1.0), math.floor(t_hi / pi) + 2):
        # fixed point of Re theta = pi k + arg(rhs)/2, two passes
        theta_re = pi * k + pi / 2.0
        if not t_lo - pi <= theta_re <= t_hi + pi:
            continue
        lam_re = None
        for _ in range(2):
            if not t_lo - pi <= theta_re <= t_hi + pi:
                break
            try:
                lam_re = lam_of(theta_re)
            except ValueError:
                lam_re = None
                break
            t = math.sqrt(max(lam_re * lam_re - n * n, 0.0)) or lam_re
            rhs = 2j * t / problem.strength(lam_re) - 1.0
            if rhs == 0.0:
                lam_re = None
                break
            theta_re = pi * k + 0.5 * cmath.phase(rhs)
        if lam_re is None:
            continue
        t = math.sqrt(max(lam_re * lam_re - n * n, 0.0)) or lam_re
        rhs = 2j * t / problem.strength(lam_re) - 1.0
        im = -0.5 * math.log(abs(rhs)) / (t / lam_re)
        if im >= 0.0:
            continue
        lam0 = complex(lam_re, im)
        if re_lo <= lam0.real <= re_hi:
            out.append((lam0, "continuation", _SEED_TRUST))
    return out


def _seed_points(problem, n, re_lo, re_hi, q_max, glancing_depth):
    pad = 3.0
    if isinstance(problem, TransparentDisk):
        return _transparent_seeds(problem, n, re_lo - pad, re_hi + pad, q_max)
    if isinstance(problem, DampingDisk):
        return _damping_seeds(problem, n, re_lo - pad, re_hi + pad)
    if isinstance(problem, DeltaDisk):
        return _delta_seeds(problem, n, re_lo - pad, re_hi + pad, glancing_depth)
    raise TypeError(f"not a disk problem: {problem!r}")


# ---------------------------------------------------------------------------
# argument-principle completeness


_GL_CACHE: dict = {}


def _gl(m: int):
    if m not in _GL_CACHE:
        _GL_CACHE[m] = np.polynomial.legendre.leggauss(m)
    return _GL_CACHE[m]


def _winding_number(problem, n, box):
    """Zero count of f inside the box, or None if the contour integral
    refuses to settle on an integer (e.g. a zero hugging the edge)."""
    re_lo, re_hi, im_lo, im_hi = box
    corners = [
        complex(re_lo, im_lo), complex(re_hi, im_lo),
        complex(re_hi, im_hi), complex(re_lo, im_hi),
    ]
    for m in (64, 128, 256, 512):
        nodes, weights = _gl(m)
        zs, ws = [], []
        for start, stop in zip(corners, corners[1:] + corners[:1]):
            mid = 0.5 * (start + stop)
            half = 0.5 * (stop - start)
            zs.append(mid + half * nodes)
            ws.append(half * weights)
        z = np.concatenate(zs)
        f, fp = _secular_array(problem, n, z)
        if not (np.all(np.isfinite(f)) and np.all(f != 0.0)):
            return None
        val = complex(np.sum(np.concatenate(ws) * fp / f)) / (2j * pi)
        count = round(val.real)
        if count >= 0 and abs(val - count) < 0.2:
            return count
    return None


def _count_zeros(problem, n, box):
    count = _winding_number(problem, n, box)
    if count is None:
        # a hair of slack moves the contour off any offending zero; the
        # in-box test stays on the original edges either way
        re_lo, re_hi, im_lo, im_hi = box
        dr = 1e-9 * (re_hi - re_lo)
        di = 1e-9 * (im_hi - im_lo)
        count = _winding_number(problem, n, (re_lo - dr, re_hi + dr, im_lo - di, im_hi + di))
    return count


def _in_box(lam: complex, box) -> bool:
    re_lo, re_hi, im_lo, im_hi = box
    return re_lo <= lam.real <= re_hi and im_lo <= lam.imag <= im_hi


def _absorb(roots: list, cand: Resonance, box) -> bool:
    """Keep cand if it lies in the scan box and is not a duplicate."""
    if not _in_box(cand.lam, box):
        return False
    for i, known in enumerate(roots):
        if abs(known.lam - cand.lam) <= _DEDUP_TOL:
            if cand.residual < known.residual:
                roots[i] = cand
            return False
    roots.append(cand)
    return True


def _split(box, n, depth):
    re_lo, re_hi, im_lo, im_hi = box
    jitter = ((n * 2654435761 + depth * 40503) % 9 - 4) / 4.0
    frac = 0.5 + 0.03 * jitter
    if (re_hi - re_lo) >= (im_hi - im_lo):
        mid = re_lo + frac * (re_hi - re_lo)
        return (re_lo, mid, im_lo, im_hi), (mid, re_hi, im_lo, im_hi)
    mid = im_lo + frac * (im_hi - im_lo)
    return (re_lo, re_hi, im_lo, mid), (re_lo, re_hi, mid, im_hi)


def _hunt(problem, n, box, roots, scan_box):
    """Newton casts from interior points of a suspicious cell."""
    re_lo, re_hi, im_lo, im_hi = box
    eps = max(10.0 * _MIN_CELL, math.hypot(re_hi - re_lo, im_hi - im_lo))
    starts = [
        (0.5, 0.5), (0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75),
    ]
    for fx, fy in starts:
        z0 = complex(re_lo + fx * (re_hi - re_lo), im_lo + fy * (im_hi - im_lo))
        try:
            cand = newton_refine(problem, n, z0, eps)
        except (NoConvergenceError, ScaledMagnitudeError, ValueError):
            continue
        _absorb(roots, cand, scan_box)


def _complete_cell(problem, n, box, roots, scan_box, incomplete, depth=0):
    count = _count_zeros(problem, n, box)
    inside = sum(1 for r in roots if _in_box(r.lam, box))
    if count is not None:
        if count == inside:
            return
        if count > inside and math.hypot(box[1] - box[0], box[3] - box[2]) < 2.0:
            _hunt(problem, n, box, roots, scan_box)
            inside = sum(1 for r in roots if _in_box(r.lam, box))
            if count == inside:
                return
    if depth < _MAX_DEPTH and max(box[1] - box[0], box[3] - box[2]) > _MIN_CELL:
        for child in _split(box, n, depth):
            _complete_cell(problem, n, child, roots, scan_box, incomplete, depth + 1)
        return
    incomplete.append((n, box, count, inside))


def _scan_mode(problem, n, re_window, im_floor, im_ceiling, tangent_cap,
               tangent_floor, q_max, glancing_depth):
    """All resonances of one angular mode in the window, plus any cells
    where completeness could not be certified."""
    re_lo, re_hi = re_window
    if n > 0:
        re_lo = max(re_lo, n / tangent_cap)
        if tangent_floor > 0.0:
            re_hi = min(re_hi, n / tangent_floor)
    if not re_lo < re_hi:
        return [], []
    box = (re_lo, re_hi, im_floor, im_ceiling)
    roots: list = []
    for lam0, tag, trust in _seed_points(problem, n, re_lo, re_hi, q_max, glancing_depth):
        if lam0.imag < im_floor - 1.0:
            continue
        try:
            cand = newton_refine(problem, n, lam0, trust, tag=tag)
        except (NoConvergenceError, ScaledMagnitudeError, ValueError):
            continue
        _absorb(roots, cand, box)
    incomplete: list = []
    _complete_cell(problem, n, box, roots, box, incomplete)
    roots.sort(key=lambda r: r.lam.real)
    return roots, incomplete


def _scan_mode_star(args):
    return _scan_mode(*args)


def scan(
    problem: DiskProblem,
    re_window,
    im_floor: float,
    n_range,
    *,
    im_ceiling: float = -1e-6,
    tangent_cap: float = 1.2,
    tangent_floor: float = 0.0,
    q_max: int = 12,
    glancing_depth: int = 4,
    workers: int = 0,
) -> list:
    """All resonances in a window, certified complete mode by mode.

    Every mode n in n_range is swept over the rectangle
    [re_window] x [im_floor, im_ceiling], clipped per mode to tangent
    frequencies n / Re lambda in [tangent_floor, tangent_cap].  Seeds of
    every applicable asymptotic family are refined by guarded Newton;
    an argument-principle count over the rectangle then certifies the
    root list, with binary subdivision and fresh Newton casts wherever
    the count disagrees.  Cells whose count never reconciles are
    reported through IncompleteScanWarning.

    workers > 1 distributes modes over processes; results are merged in
    a stable (Re lambda, n) order either way, so the output is
    deterministic for a fixed configuration.
    """
    re_lo, re_hi = float(re_window[0]), float(re_window[1])
    if not 1.0 < re_lo < re_hi:
        raise ValueError("need 1 < re_window[0] < re_window[1]")
    if re_hi > 1.98e4:
        raise ValueError("window exceeds the guarded special-function box")
    if isinstance(problem, TransparentDisk) and re_lo < problem.c:
        raise ValueError(
            "window must start at or above c: the interior argument "
            "lambda / c would leave the guarded special-function box"
        )
    if not im_floor < im_ceiling < 0.0:
        raise ValueError("need im_floor < im_ceiling < 0")
    if im_floor < -50.0:
        raise ValueError("im_floor below the guarded special-function box")
    if not 0.0 <= tangent_floor < tangent_cap:
        raise ValueError("need 0 <= tangent_floor < tangent_cap")
    modes = sorted({int(n) for n in n_range})
    if not modes:
        return []
    if modes[0] < 0:
        raise ValueError("modes are indexed by n >= 0 (negative n is redundant)")
    if modes[-1] > 20000:
        raise ValueError("mode index beyond the guarded special-function box")
    jobs = [
        (problem, n, (re_lo, re_hi), float(im_floor), float(im_ceiling),
         float(tangent_cap), float(tangent_floor), int(q_max), int(glancing_depth))
        for n in modes
    ]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            outcomes = list(pool.map(_scan_mode_star, jobs))
    else:
        outcomes = [_scan_mode_star(job) for job in jobs]
    found: list = []
    for (mode_roots, incomplete) in outcomes:
        found.extend(mode_roots)
        for (n, box, count, inside) in incomplete:
            warnings.warn(IncompleteScanWarning(n, box, count, inside))
    found.sort(key=lambda r: (r.lam.real, r.n))
    return found


# ---------------------------------------------------------------------------
# CSV emission


RESONANCE_CSV_HEADER = (
    "problem", "n", "re_lambda", "im_lambda", "residual", "seed", "tangent_freq",
)


def write_resonance_csv(resonances, stream) -> None:
    """Dump a resonance table as CSV.

    Floats are written with repr so the dump round-trips exactly and is
    byte-identical across runs of the same configuration.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RESONANCE_CSV_HEADER)
    for r in resonances:
        writer.writerow([
            r.problem, r.n, repr(r.lam.real), repr(r.lam.imag),
            repr(r.residual), r.seed, repr(r.tangent_freq),
        ])
