"""Strictly convex planar billiards and the boundary ball map.

The boundary of a domain is a closed curve gamma(s) parametrized by
arclength s in [0, L) and traversed counterclockwise.  Phase points
live on the open coball bundle of the boundary: an arclength coordinate
together with a tangential frequency xi, |xi| < 1.  One application of
the billiard ball map lifts (s, xi) to the inward unit direction

    d = xi T(s) + sqrt(1 - xi**2) N(s),

follows the ray to its unique second boundary intersection, and reads
the new tangential frequency off the exit tangent.  The Euclidean
distance between the two footpoints is the chord length of the step.

Domains are built from a smooth underlying parametrization.  Arclength
is accumulated with composite Gauss-Legendre quadrature and inverted by
a guarded Newton iteration, so positions, unit tangents and curvatures
are available directly in the arclength variable.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "GLANCING_MARGIN",
    "GlancingError",
    "PhasePoint",
    "OrbitSegment",
    "ConvexDomain",
    "billiard_step",
    "orbit",
    "mean_chord",
    "GlancingReport",
    "glancing_expansion_check",
    "ORBIT_CSV_HEADER",
    "write_orbit_csv",
]

# The map degenerates on the glancing set |xi| = 1; reject anything closer
# than this rather than extrapolate.
GLANCING_MARGIN = 1e-12

# Forward offset (in units of the perimeter) that excludes the starting
# footpoint from the exit-point bracket.
_START_OFFSET = 1e-9

_ARC_PANELS = 64
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class GlancingError(ValueError):
    """Raised when the billiard map is evaluated too close to |xi| = 1."""


@dataclass(frozen=True)
class PhasePoint:
    """Point of the open coball bundle of the boundary.

    Attributes
    ----------
    s : float
        Arclength coordinate, interpreted mod the domain perimeter.
    xi : float
        Tangential frequency, |xi| < 1 strictly.  The normal component
        sqrt(1 - xi**2) is then well defined.
    """

    s: float
    xi: float

    def __post_init__(self):
        if not (math.isfinite(self.s) and math.isfinite(self.xi)):
            raise ValueError("phase point coordinates must be finite")
        if abs(self.xi) >= 1.0:
            raise ValueError(f"|xi| = {abs(self.xi)!r} must be < 1")


@dataclass(frozen=True)
class OrbitSegment:
    """Orbit q, beta(q), ..., beta^N(q) together with its N chords.

    chords[k] is the Euclidean distance between the footpoints of
    points[k] and points[k + 1], in domain units.
    """

    points: tuple
    chords: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "chords", tuple(float(c) for c in self.chords))
        if len(self.points) != len(self.chords) + 1:
            raise ValueError("an orbit needs exactly one more point than chords")
        if any(not c > 0.0 for c in self.chords):
            raise ValueError("all chords must be positive")

    def __len__(self):
        return len(self.chords)


class ConvexDomain:
    """Strictly convex planar domain with an arclength boundary chart.

    Use the named constructors :meth:`disk`, :meth:`ellipse` or
    :meth:`from_support`.  The raw initializer wires a counterclockwise
    parametrization p(theta), theta in [0, theta_period), with speed
    |p'(theta)| > 0 and an analytic curvature callable into cumulative
    arclength tables; all public accessors then take arclength.

    Attributes
    ----------
    perimeter : float
        Total boundary length L.
    kappa_min : float
        Minimum curvature over a fine probe grid; construction fails
        unless it is strictly positive.
    """

    def __init__(self, pos: Callable, vel: Callable, kappa: Callable,
                 theta_period: float, name: str):
        self._pos = pos
        self._vel = vel
        self._kap = kappa
        self._period = float(theta_period)
        self.name = str(name)

        edges = np.linspace(0.0, self._period, _ARC_PANELS + 1)
        half = 0.5 * np.diff(edges)
        mids = 0.5 * (edges[:-1] + edges[1:])
        nodes = mids[:, None] + half[:, None] * _GL_NODES[None, :]
        speeds = self._speed(nodes.ravel()).reshape(nodes.shape)
        panel = half * (speeds @ _GL_WEIGHTS)
        self._theta_edges = edges
        self._arc_edges = np.concatenate([[0.0], np.cumsum(panel)])
        self.perimeter = float(self._arc_edges[-1])

        probe = np.linspace(0.0, self._period, 4096, endpoint=False)
        with np.errstate(divide="ignore", invalid="ignore"):
            kmin = float(np.min(np.asarray(self._kap(probe), dtype=float)))
        if not (math.isfinite(kmin) and kmin > 0.0):
            raise ValueError(f"boundary is not strictly convex: min curvature {kmin!r}")
        self.kappa_min = kmin

    # -- named constructors ------------------------------------------------

    @classmethod
    def disk(cls, radius: float = 1.0) -> "ConvexDomain":
        """Disk of the given radius centered at the origin."""
        if not radius > 0.0:
            raise ValueError("radius must be positive")
        r = float(radius)

        def pos(th):
            return r * np.stack([np.cos(th), np.sin(th)], axis=-1)

        def vel(th):
            return r * np.stack([-np.sin(th), np.cos(th)], axis=-1)

        def kappa(th):
            return np.full_like(np.asarray(th, dtype=float), 1.0 / r)

        return cls(pos, vel, kappa, 2.0 * math.pi, f"disk(radius={r!r})")

    @classmethod
    def ellipse(cls, a: float, b: float) -> "ConvexDomain":
        """Axis-aligned ellipse x**2/a**2 + y**2/b**2 = 1."""
        if not (a > 0.0 and b > 0.0):
            raise ValueError("semi-axes must be positive")
        a, b = float(a), float(b)

        def pos(th):
            return np.stack([a * np.cos(th), b * np.sin(th)], axis=-1)

        def vel(th):
            return np.stack([-a * np.sin(th), b * np.cos(th)], axis=-1)

        def kappa(th):
            s, c = np.sin(th), np.cos(th)
            return a * b / (a * a * s * s + b * b * c * c) ** 1.5

        return cls(pos, vel, kappa, 2.0 * math.pi, f"ellipse(a={a!r}, b={b!r})")

    @classmethod
    def from_support(cls, h: Callable, hp: Callable, hpp: Callable,
                     name: str = "support") -> "ConvexDomain":
        """Domain from a support function h(phi) with derivatives hp, hpp.

        The boundary point with outward normal (cos phi, sin phi) is
        h*n + h'*t; the radius of curvature there is h + h'', which must
        stay strictly positive.  All three callables must accept numpy
        arrays.
        """

        def pos(phi):
            n = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
            t = np.stack([-np.sin(phi), np.cos(phi)], axis=-1)
            hv = np.asarray(h(phi), dtype=float)
            hpv = np.asarray(hp(phi), dtype=float)
            return hv[..., None] * n + hpv[..., None] * t

        def vel(phi):
            t = np.stack([-np.sin(phi), np.cos(phi)], axis=-1)
            rho = np.asarray(h(phi), dtype=float) + np.asarray(hpp(phi), dtype=float)
            return rho[..., None] * t

        def kappa(phi):
            rho = np.asarray(h(phi), dtype=float) + np.asarray(hpp(phi), dtype=float)
            return 1.0 / rho

        return cls(pos, vel, kappa, 2.0 * math.pi, name)

    # -- arclength chart ---------------------------------------------------

    def _speed(self, theta):
        v = np.asarray(self._vel(np.asarray(theta, dtype=float)))
        return np.linalg.norm(v, axis=-1)

    def _arc_of_theta(self, theta):
        """Cumulative arclength from theta = 0; expects a 1-d array."""
        th = np.asarray(theta, dtype=float)
        k = np.clip(np.searchsorted(self._theta_edges, th, side="right") - 1,
                    0, _ARC_PANELS - 1)
        a = self._theta_edges[k]
        half = 0.5 * (th - a)
        nodes = (a + half)[:, None] + half[:, None] * _GL_NODES[None, :]
        speeds = self._speed(nodes.ravel()).reshape(nodes.shape)
        return self._arc_edges[k] + half * (speeds @ _GL_WEIGHTS)

    def _theta_of_arc(self, s):
        """Invert the arclength map on a 1-d array, Newton to 1e-13."""
        t = np.mod(np.asarray(s, dtype=float), self.perimeter)
        k = np.clip(np.searchsorted(self._arc_edges, t, side="right") - 1,
                    0, _ARC_PANELS - 1)
        a, b = self._theta_edges[k], self._theta_edges[k + 1]
        sa, sb = self._arc_edges[k], self._arc_edges[k + 1]
        theta = a + (t - sa) * (b - a) / (sb - sa)
        tol = 1e-13 * max(1.0, self.perimeter)
        for _ in range(40):
            res = self._arc_of_theta(theta) - t
            if np.max(np.abs(res)) < tol:
                break
            theta = theta - res / self._speed(theta)
        else:
            raise RuntimeError("arclength inversion did not converge")
        return theta

    @staticmethod
    def _match(out, s):
        return out[0] if np.ndim(s) == 0 else out

    def position(self, s):
        """Boundary point gamma(s), shape (2,) or (n, 2)."""
        th = self._theta_of_arc(np.atleast_1d(s))
        return self._match(self._pos(th), s)

    def tangent(self, s):
        """Unit tangent gamma'(s)."""
        th = self._theta_of_arc(np.atleast_1d(s))
        v = np.asarray(self._vel(th))
        return self._match(v / np.linalg.norm(v, axis=-1, keepdims=True), s)

    def inward_normal(self, s):
        """Unit inward normal, the counterclockwise rotation of the tangent."""
        t = np.atleast_2d(self.tangent(np.atleast_1d(s)))
        return self._match(np.stack([-t[:, 1], t[:, 0]], axis=-1), s)

    def curvature(self, s):
        """Curvature kappa(s) > 0."""
        th = self._theta_of_arc(np.atleast_1d(s))
        return self._match(np.asarray(self._kap(th), dtype=float), s)

    def second_derivative(self, s):
        """gamma''(s) = kappa(s) * inward normal, by the Frenet relation."""
        k = np.atleast_1d(self.curvature(s))
        n = np.atleast_2d(self.inward_normal(s))
        return self._match(k[:, None] * n, s)

    def ray(self, q: PhasePoint):
        """Footpoint and inward unit direction of the lift of q."""
        s0 = q.s % self.perimeter
        p0 = self.position(s0)
        t0 = self.tangent(s0)
        n0 = np.array([-t0[1], t0[0]])
        d = q.xi * t0 + math.sqrt(1.0 - q.xi * q.xi) * n0
        return p0, d

    def __repr__(self):
        return f"ConvexDomain({self.name})"


def billiard_step(domain: ConvexDomain, q: PhasePoint):
    """One application of the billiard ball map.

    Parameters
    ----------
    domain : ConvexDomain
    q : PhasePoint
        Starting point; |xi| must stay below 1 - GLANCING_MARGIN.

    Returns
    -------
    q_next : PhasePoint
        Image of q under the map.
    chord : float
        Euclidean distance between the two footpoints.

    Notes
    -----
    The exit point is the unique zero of the signed cross product
    G(s) = d x (gamma(s) - gamma(s0)) on (s0, s0 + L): by strict
    convexity the full line meets the boundary only at the footpoint
    and the exit, and G < 0 just after s0, G > 0 just before s0 + L.
    """
    if abs(q.xi) >= 1.0 - GLANCING_MARGIN:
        raise GlancingError(f"billiard map undefined this close to glancing: xi = {q.xi!r}")
    L = domain.perimeter
    s0 = q.s % L
    p0, d = domain.ray(q)

    def crossing(s):
        r = domain.position(s) - p0
        return d[0] * r[1] - d[1] * r[0]

    lo = s0 + _START_OFFSET * L
    hi = s0 + (1.0 - _START_OFFSET) * L
    s1 = brentq(crossing, lo, hi, xtol=1e-13, rtol=4.0 * np.finfo(float).eps)
    s1 = s1 % L
    p1 = domain.position(s1)
    chord = float(np.hypot(p1[0] - p0[0], p1[1] - p0[1]))
    t1 = domain.tangent(s1)
    xi1 = float(d[0] * t1[0] + d[1] * t1[1])
    return PhasePoint(float(s1), xi1), chord


def orbit(domain: ConvexDomain, q: PhasePoint, n_steps: int) -> OrbitSegment:
    """Iterate the billiard map n_steps times from q.

    Deterministic: repeated calls with the same arguments produce
    identical segments.
    """
    n = int(n_steps)
    if n < 1 or n != n_steps:
        raise ValueError("n_steps must be a positive integer")
    points = [q]
    chords = []
    for _ in range(n):
        q, chord = billiard_step(domain, q)
        points.append(q)
        chords.append(chord)
    return OrbitSegment(tuple(points), tuple(chords))


def mean_chord(segment: OrbitSegment) -> float:
    """Arithmetic mean of the chord lengths of an orbit segment."""
    if len(segment.chords) == 0:
        raise ValueError("orbit segment has no chords")
    return float(np.mean(segment.chords))


@dataclass(frozen=True)
class GlancingReport:
    """Empirical check of the near-glancing expansions.

    For each starting point with eps = 1 - xi**2 the report records the
    defect of the conserved normal component,
    |sqrt(1 - xi_next**2) - sqrt(1 - xi**2)|, and the defect of the
    curvature chord law, |chord - (2/kappa) sqrt(1 - xi**2)| with kappa
    at the starting footpoint.  Both defects should be O(eps); the
    exponents are log-log regression slopes against eps (math.inf when
    every defect is below 1e-13, i.e. exact to rounding).
    """

    eps: np.ndarray
    normal_defect: np.ndarray
    chord_defect: np.ndarray
    normal_exponent: float
    chord_exponent: float

    @property
    def normal_ratio(self):
        return self.normal_defect / self.eps

    @property
    def chord_ratio(self):
        return self.chord_defect / self.eps


def glancing_expansion_check(domain: ConvexDomain,
                             q_sequence: Iterable[PhasePoint]) -> GlancingReport:
    """Measure both near-glancing remainders along a sequence of points.

    The sequence should approach |xi| -> 1 (eps = 1 - xi**2 decreasing)
    for the fitted exponents to be meaningful.
    """
    qs = list(q_sequence)
    if not qs:
        raise ValueError("need at least one phase point")
    eps, ndef, cdef = [], [], []
    for q in qs:
        q1, chord = billiard_step(domain, q)
        e = 1.0 - q.xi * q.xi
        nu0 = math.sqrt(e)
        nu1 = math.sqrt(1.0 - q1.xi * q1.xi)
        kap = float(domain.curvature(q.s % domain.perimeter))
        eps.append(e)
        ndef.append(abs(nu1 - nu0))
        cdef.append(abs(chord - 2.0 * nu0 / kap))
    eps = np.asarray(eps)
    ndef = np.asarray(ndef)
    cdef = np.asarray(cdef)

    def slope(defect):
        mask = defect > 1e-13
        if np.count_nonzero(mask) < 2:
            return math.inf
        return float(np.polyfit(np.log(eps[mask]), np.log(defect[mask]), 1)[0])

    return GlancingReport(eps, ndef, cdef, slope(ndef), slope(cdef))


ORBIT_CSV_HEADER = ("k", "s", "xi", "chord")


def write_orbit_csv(segment: OrbitSegment, stream) -> None:
    """Dump an orbit as CSV rows (k, s, xi, chord).

    The chord on row k connects points k - 1 and k; row 0 has an empty
    chord field.  Floats are written with repr so the dump round-trips
    exactly and is byte-identical across runs.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(ORBIT_CSV_HEADER)
    for k, q in enumerate(segment.points):
        chord = "" if k == 0 else repr(segment.chords[k - 1])
        writer.writerow([k, repr(q.s), repr(q.xi), chord])
