"""Sabine-law resonance bands from billiard dynamics and boundary reflectivity.

The central object is the Sabine quotient of an N-step billiard orbit:
the accumulated log-reflectivity r_N = sum_k log|r(xi_k, s_k)|^2 divided
by twice the interior travel time, 2 c^{-1} l_N, of the chord sum l_N.
Extremizing the quotient over phase space bounds the imaginary parts of
scattering resonances from above and below.  This module computes the
quotient itself, its inf/sup band over a refining phase-space grid, its
glancing limit along the boundary, and the near-glancing Airy bands of
the delta-potential problem.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .billiards import ConvexDomain, GlancingError, PhasePoint, orbit
from .reflectivity import (
    BREWSTER_WINDOW,
    TOTAL_TRANSMISSION,
    BoundaryDamping,
    DeltaPotential,
    ReflectivityModel,
    TransparentObstacle,
    brewster,
    log_reflectivity,
)
from .specfun import airy_zeros

__all__ = [
    "GlancingBand",
    "SabineBand",
    "band_report",
    "glancing_bands",
    "glancing_limit",
    "sabine_bounds",
    "sabine_quotient",
    "wave_speed",
]

_CBRT2 = 2.0 ** (1.0 / 3.0)


def wave_speed(model: ReflectivityModel) -> float:
    """Interior wave speed of a reflectivity model (1 except for obstacles)."""
    if isinstance(model, TransparentObstacle):
        return model.c
    return 1.0


def _prefix_quotients(
    domain: ConvexDomain,
    model: ReflectivityModel,
    start: PhasePoint,
    n_max: int,
) -> np.ndarray:
    """Sabine quotients of the first N = 1..n_max steps of one orbit.

    Returns an array of shape (n_max,).  A reflectivity zero anywhere on
    the orbit makes every quotient from that bounce onward -inf; -inf
    plus a finite float stays -inf under cumulative summation, so no
    special casing is needed.
    """
    seg = orbit(domain, start, n_max)
    logs = np.array(
        [log_reflectivity(model, p.xi, p.s) for p in seg.points[1:]], dtype=float
    )
    chords = np.asarray(seg.chords, dtype=float)
    speed = wave_speed(model)
    return speed * np.cumsum(logs) / (2.0 * np.cumsum(chords))


def sabine_quotient(
    domain: ConvexDomain,
    model: ReflectivityModel,
    start: PhasePoint,
    n_steps: int,
) -> float:
    """Sabine quotient r_N / (2 c^{-1} l_N) of the orbit from ``start``.

    r_N is the mean accumulated log-reflectivity sum log|r|^2 over the N
    bounces following ``start`` and l_N the mean chord length; the common
    1/N cancels.  Returns -inf when the orbit crosses a point of total
    transmission.  Raises GlancingError if the orbit leaves the domain of
    the billiard map, and ValueError for a non-positive step count.
    """
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ValueError("n_steps must be a positive integer")
    return float(_prefix_quotients(domain, model, start, n_steps)[-1])


def _reflectivity_zeros(model: ReflectivityModel) -> Tuple[float, ...]:
    """Angles 0 <= xi < 1 where |r| vanishes, when they can be located.

    Transparent obstacles have at most the Brewster angle; constant
    damping a < 1 vanishes at xi = sqrt(1 - a^2) and matched damping
    a = 1 at normal incidence.  Zeros of position-dependent profiles are
    not searched for analytically; exact grid hits still propagate -inf.
    """
    if isinstance(model, TransparentObstacle):
        xi_b = brewster(model)
        return () if xi_b is None else (xi_b,)
    if isinstance(model, BoundaryDamping) and not callable(model.a):
        a = float(model.a)
        if a < 1.0:
            return (math.sqrt(1.0 - a * a),)
        if a == 1.0:
            return (0.0,)
    return ()


def _default_collar(model: ReflectivityModel) -> float:
    # The delta reflectivity is uniform only up to |xi| <= 1 - h^eps, so
    # its grid stays a soft power of h away from glancing; the other
    # models admit a hard collar.  Clamped so that h of order 1 still
    # yields a usable grid.
    if isinstance(model, DeltaPotential):
        return min(max(model.h**0.2, 1e-6), 0.5)
    return 1e-6


@dataclasses.dataclass(frozen=True)
class SabineBand:
    """Inf/sup band of the Sabine quotient over a phase-space grid.

    ``lower`` is sup_N inf over the grid and ``upper`` is inf_N sup, so
    lower <= upper always.  ``lower`` is -inf when the model has a
    reachable reflectivity zero (Brewster angle or matched damping); the
    zero's neighborhood is excised from the grid before taking the sup,
    and ``brewster_excluded`` records that this happened.
    """

    lower: float
    upper: float
    n_max: int
    wave_speed: float
    xi_points: int
    s_points: int
    collar: float
    brewster_excluded: bool
    refinements: int

    def __post_init__(self) -> None:
        if not self.lower <= self.upper:
            raise ValueError("band endpoints out of order")
        if self.upper > 0.0:
            raise ValueError("the Sabine quotient is nonpositive")

    @property
    def xi_grid(self) -> str:
        return (
            f"{self.xi_points} points on [0, {1.0 - self.collar!r}], "
            f"{self.s_points} footpoints, {self.refinements} refinements"
        )


def _reduce_columns(vals: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-N inf and sup over the grid axis, ignoring glancing failures."""
    n_max = vals.shape[1]
    infs = np.empty(n_max)
    sups = np.empty(n_max)
    for k in range(n_max):
        col = vals[:, k]
        col = col[~np.isnan(col)]
        if col.size == 0:
            raise RuntimeError(
                "every phase-space sample hit the glancing guard; "
                "increase the collar"
            )
        infs[k] = col.min()
        finite = col[np.isfinite(col)]
        if finite.size == 0:
            raise ValueError(
                "reflectivity vanishes on the whole sample grid "
                "(degenerate model); the sup side is undefined"
            )
        sups[k] = finite.max()
    return infs, sups


def sabine_bounds(
    domain: ConvexDomain,
    model: ReflectivityModel,
    n_max: int = 8,
    xi_points: int = 33,
    s_points: int = 4,
    collar: Optional[float] = None,
    zero_window: float = BREWSTER_WINDOW,
    tol: float = 1e-3,
    max_refine: int = 6,
) -> SabineBand:
    """Extremize the Sabine quotient over a refining (footpoint, xi) grid.

    The xi grid is uniform on [0, 1 - collar] with any analytically known
    reflectivity zeros excised by ``zero_window``; footpoints are uniform
    on the boundary.  Both grids double until the band endpoints move by
    less than ``tol``, after which an interior extremum (if any) is
    sharpened by bounded 1-d minimization between its grid neighbors.
    Raises RuntimeError if the band fails to stabilize within
    ``max_refine`` doublings.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError("n_max must be a positive integer")
    if xi_points < 3 or s_points < 1:
        raise ValueError("grid needs at least 3 xi points and 1 footpoint")
    if collar is None:
        collar = _default_collar(model)
    if not 0.0 < collar < 1.0:
        raise ValueError("collar must lie in (0, 1)")

    zeros = _reflectivity_zeros(model)
    # A zero reachable inside the grid range makes the true inf -inf no
    # matter how the excision window is chosen.
    fiat_lower = any(z <= 1.0 - collar for z in zeros)

    cache: dict = {}
    perim = domain.perimeter

    def evaluate(xi_vals: np.ndarray, s_vals: np.ndarray) -> np.ndarray:
        rows = []
        for s in s_vals:
            for xi in xi_vals:
                key = (float(s), float(xi))
                if key not in cache:
                    try:
                        cache[key] = _prefix_quotients(
                            domain, model, PhasePoint(key[0], key[1]), n_max
                        )
                    except GlancingError:
                        cache[key] = np.full(n_max, np.nan)
                rows.append(cache[key])
        return np.array(rows)

    def masked_grid(level: int) -> Tuple[np.ndarray, np.ndarray]:
        p = (xi_points - 1) * 2**level + 1
        full = np.linspace(0.0, 1.0 - collar, p)
        keep = np.ones(p, dtype=bool)
        for z in zeros:
            keep &= np.abs(full - z) >= zero_window
        if not keep.any():
            raise ValueError(
                "the zero excision window covers the whole xi grid "
                "(degenerate model)"
            )
        s_vals = np.linspace(0.0, perim, s_points * 2**level, endpoint=False)
        return full[keep], s_vals

    lower = upper = math.nan
    infs = sups = None
    vals = xi_vals = s_vals = None
    level = 0
    converged = False
    for level in range(max_refine + 1):
        prev_lower, prev_upper = lower, upper
        xi_vals, s_vals = masked_grid(level)
        vals = evaluate(xi_vals, s_vals)
        infs, sups = _reduce_columns(vals)
        lower = TOTAL_TRANSMISSION if fiat_lower else float(np.max(infs))
        upper = float(np.min(sups))
        if level > 0:
            # Finer grids only widen the bracket.
            assert lower <= prev_lower + 1e-9 and upper >= prev_upper - 1e-9
            if _endpoints_close(lower, prev_lower, tol) and _endpoints_close(
                upper, prev_upper, tol
            ):
                converged = True
                break
    if not converged:
        raise RuntimeError(
            f"Sabine band did not stabilize to {tol} within "
            f"{max_refine} grid doublings"
        )

    lower, upper = _sharpen_extrema(
        domain, model, vals, xi_vals, s_vals, infs, sups, lower, fiat_lower
    )
    brewster_excluded = fiat_lower or math.isinf(lower)
    return SabineBand(
        lower=lower,
        upper=upper,
        n_max=n_max,
        wave_speed=wave_speed(model),
        xi_points=len(xi_vals),
        s_points=len(s_vals),
        collar=collar,
        brewster_excluded=brewster_excluded,
        refinements=level,
    )


def _endpoints_close(a: float, b: float, tol: float) -> bool:
    if math.isinf(a) and math.isinf(b):
        return True
    if math.isinf(a) or math.isinf(b):
        return False
    return abs(a - b) < tol


def _sharpen_extrema(
    domain: ConvexDomain,
    model: ReflectivityModel,
    vals: np.ndarray,
    xi_vals: np.ndarray,
    s_vals: np.ndarray,
    infs: np.ndarray,
    sups: np.ndarray,
    lower: float,
    fiat_lower: bool,
) -> Tuple[float, float]:
    """Bisection polish of interior grid extrema, one per band side.

    Grid sampling overestimates the inf and underestimates the sup, so
    polishing can only widen the band.  Extrema attained at the grid
    ends, next to an excision window, or on a -inf column are left as
    sampled.
    """
    n_max = vals.shape[1]
    spacing = xi_vals[1] - xi_vals[0] if len(xi_vals) > 1 else 0.0

    def polish(n_index: int, row_index: int, sign: float) -> Optional[float]:
        s0 = float(s_vals[row_index // len(xi_vals)])
        j = row_index % len(xi_vals)
        if j == 0 or j == len(xi_vals) - 1:
            return None
        if xi_vals[j + 1] - xi_vals[j - 1] > 2.5 * spacing:
            return None  # an excision window sits between the neighbors

        def objective(xi: float) -> float:
            try:
                q = _prefix_quotients(
                    domain, model, PhasePoint(s0, float(xi)), n_index + 1
                )[n_index]
            except GlancingError:
                return math.inf
            return sign * q if math.isfinite(q) else math.inf

        res = minimize_scalar(
            objective,
            bounds=(float(xi_vals[j - 1]), float(xi_vals[j + 1])),
            method="bounded",
            options={"xatol": 1e-8},
        )
        return sign * float(res.fun) if math.isfinite(res.fun) else None

    n_lower = int(np.argmax(infs))
    n_upper = int(np.argmin(sups))

    if not fiat_lower and math.isfinite(infs[n_lower]):
        col = vals[:, n_lower]
        row = int(np.nanargmin(col))
        polished = polish(n_lower, row, +1.0)
        if polished is not None and polished < infs[n_lower]:
            infs = infs.copy()
            infs[n_lower] = polished
            lower = float(np.max(infs))

    col = np.where(np.isfinite(vals[:, n_upper]), vals[:, n_upper], -np.inf)
    row = int(np.argmax(col))
    polished = polish(n_upper, row, -1.0)
    if polished is not None and polished > sups[n_upper]:
        sups = sups.copy()
        sups[n_upper] = polished
    upper = float(np.min(sups))
    assert lower <= upper
    return lower, upper


def glancing_limit(
    domain: ConvexDomain, model: TransparentObstacle, s: float
) -> float:
    """Limit of the Sabine quotient along orbits from s as xi -> 1.

    For a slow obstacle (c < 1) grazing rays are totally reflected and
    the limit is 0.  For c > 1 the per-bounce loss log|r|^2 and the
    chord length both vanish linearly in sqrt(1 - xi^2) and the quotient
    tends to -c kappa(s) / (alpha sqrt(c^2 - 1)), proportional to the
    boundary curvature at the footpoint.
    """
    if not isinstance(model, TransparentObstacle):
        raise TypeError("the glancing limit is defined for transparent obstacles")
    if model.c < 1.0:
        return 0.0
    kappa = float(domain.curvature(float(s)))
    return -model.c * kappa / (model.alpha * math.sqrt(model.c**2 - 1.0))


@dataclasses.dataclass(frozen=True)
class GlancingBand:
    """One near-glancing resonance band of the delta-potential problem.

    Band j sits at Im lambda ~ (Q/|s_v|^2) ((2 h Q)^{1/3} (1 + a1)
    ImPhi_-(zeta_j) + h Im V1) where s_v = v0 h^{1 + alpha_exp} is the
    semiclassical coupling, zeta_j the j-th Airy zero, and Q ranges over
    the glancing set.  ``b_min``/``b_max`` are the values of the scale
    factor B = 2^{1/3} Q^{4/3} / (v0 h^{alpha_exp})^2 at the endpoints of
    the Q range; ``gap_below`` reports whether band j separates from
    band j+1 (B_min/B_max above the Airy ratio).
    """

    j: int
    zeta_j: float
    im_phi_j: float
    b_min: float
    b_max: float
    im_lambda_min: float
    im_lambda_max: float
    gap_below: bool
    v0: float
    alpha_exp: float
    a1: float
    im_v1: float
    q_min: float
    q_max: float

    def __post_init__(self) -> None:
        if not self.im_lambda_min <= self.im_lambda_max < 0.0:
            raise ValueError("glancing band must be a negative interval")
        if not 0.0 < self.b_min <= self.b_max:
            raise ValueError("band scale factors out of order")

    def predicted_im_lambda(self, h: float, q: Optional[float] = None) -> float:
        """Band-center prediction at semiclassical parameter h.

        ``q`` defaults to the midpoint of the Q range (its only value
        when the range is degenerate, as on the disk).
        """
        if q is None:
            q = 0.5 * (self.q_min + self.q_max)
        return _band_value(
            self.v0, self.alpha_exp, self.a1, self.im_v1, float(h), float(q), self.im_phi_j
        )


def _band_value(
    v0: float,
    alpha_exp: float,
    a1: float,
    im_v1: float,
    h: float,
    q: float,
    im_phi: float,
) -> float:
    sigma_hv = v0 * h ** (1.0 + alpha_exp)
    return (q / sigma_hv**2) * (
        (2.0 * h * q) ** (1.0 / 3.0) * (1.0 + a1) * im_phi + h * im_v1
    )


def glancing_bands(
    model: DeltaPotential,
    m_bands: int = 3,
    q_range: Tuple[float, float] = (1.0, 1.0),
    h: Optional[float] = None,
    a1: float = 0.0,
    im_v1: float = 0.0,
) -> Tuple[GlancingBand, ...]:
    """Predict the first ``m_bands`` near-glancing resonance bands.

    Each band is the range of the band expression as Q sweeps
    ``q_range`` (constant 1 on the unit disk, where every band is a
    point).  ``h`` defaults to the model's semiclassical parameter; the
    optional ``a1`` and ``im_v1`` feed the subprincipal corrections of
    generalized models and default to 0.  Requires a constant-amplitude
    potential; bands of a vanishing potential are undefined.
    """
    if not isinstance(model, DeltaPotential):
        raise TypeError("glancing bands are defined for delta potentials")
    if callable(model.v0):
        raise TypeError("glancing bands need a constant potential amplitude")
    v0 = float(model.v0)
    if v0 <= 0.0:
        raise ValueError("glancing bands of a vanishing potential are undefined")
    h_val = model.h if h is None else float(h)
    if h_val <= 0.0:
        raise ValueError("h must be positive")
    m = int(m_bands)
    if not 1 <= m <= 99:
        raise ValueError("m_bands must lie in 1..99")
    q_lo, q_hi = (float(q_range[0]), float(q_range[1]))
    if q_lo > q_hi:
        q_lo, q_hi = q_hi, q_lo
    if q_lo <= 0.0:
        raise ValueError("Q must be positive on the glancing set")

    table = airy_zeros(m + 1)
    sigma_v = v0 * h_val**model.alpha_exp
    q_grid = np.linspace(q_lo, q_hi, 33)
    bands = []
    for j in range(1, m + 1):
        im_phi = table.im_phi_minus[j - 1]
        vals = np.array(
            [
                _band_value(v0, model.alpha_exp, a1, im_v1, h_val, q, im_phi)
                for q in q_grid
            ]
        )
        band = GlancingBand(
            j=j,
            zeta_j=float(table.zeros[j - 1]),
            im_phi_j=float(im_phi),
            b_min=_CBRT2 * q_lo ** (4.0 / 3.0) / sigma_v**2,
            b_max=_CBRT2 * q_hi ** (4.0 / 3.0) / sigma_v**2,
            im_lambda_min=float(vals.min()),
            im_lambda_max=float(vals.max()),
            gap_below=bool(
                table.im_phi_minus[j - 1] / table.im_phi_minus[j]
                < (q_lo / q_hi) ** (4.0 / 3.0)
            ),
            v0=v0,
            alpha_exp=model.alpha_exp,
            a1=a1,
            im_v1=im_v1,
            q_min=q_lo,
            q_max=q_hi,
        )
        if bands:
            # At fixed Q the Airy zeros push successive bands strictly down.
            assert band.predicted_im_lambda(h_val, q_hi) < bands[-1].predicted_im_lambda(
                h_val, q_hi
            )
        bands.append(band)
    return tuple(bands)


def band_report(
    problem: str,
    params: dict,
    band: SabineBand,
    glancing: Sequence[GlancingBand] = (),
) -> dict:
    """JSON-ready summary of a Sabine band and optional glancing bands."""
    return {
        "problem": str(problem),
        "params": dict(params),
        "lower": None if math.isinf(band.lower) else band.lower,
        "upper": band.upper,
        "n_max": band.n_max,
        "grid": {
            "xi_points": band.xi_points,
            "s_points": band.s_points,
            "collar": band.collar,
            "brewster_excluded": band.brewster_excluded,
            "refinements": band.refinements,
        },
        "bands": [
            {
                "j": g.j,
                "im_lambda_min": g.im_lambda_min,
                "im_lambda_max": g.im_lambda_max,
            }
            for g in glancing
        ],
    }
