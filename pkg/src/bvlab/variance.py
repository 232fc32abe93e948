"""Integral means and asymptotic-variance estimators for exterior series.

The asymptotic variance of g is the growth rate of the circle means
I(R) = (1/2pi) int |g(R e^(i theta))|^2 d theta against log(1/(R-1)) as
R -> 1+.  By orthogonality I(R) = sum |b_k|^2 R^(-2k) exactly, so all
estimators here are coefficient sums:

  * variance_lacunary  - Cesaro limit of squared moduli over log(base);
  * variance_block     - increments of I(R) between self-similar scales;
  * variance_block_mass- per-block l2 coefficient mass over log(base),
                         exact for eventually self-similar series;
  * cesaro_sigma4      - fourth-order average of the third derivative
                         against the hyperbolic density, radial quadrature.

Scales below the resolution cutoff of the input raise UnresolvedScaleError.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import expm1, fsum, log1p

import numpy as np

from .errors import UnresolvedScaleError, ValidationError
from .laurent import ExteriorLaurent

METHODS = ("lacunary_exact", "block_increment", "block_mass", "cesaro4")


@dataclass(frozen=True)
class VarianceEstimate:
    """Variance value with method tag and per-scale convergence diagnostics."""

    value: float
    method: str
    diagnostics: tuple[tuple[int, float], ...]
    converged: bool
    tolerance: float

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")

    def to_doc(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "converged": self.converged,
            "tolerance": self.tolerance,
            "diagnostics": [[i, v] for i, v in self.diagnostics],
        }


def _tail_average(values: list[float]) -> float:
    tail = values[-max(1, (len(values) + 1) // 2):]
    return fsum(tail) / len(tail)


def _running_tail(values: list[float]) -> list[float]:
    return [_tail_average(values[:i + 1]) for i in range(len(values))]


def _consecutive_converged(values: list[float], tol: float) -> bool:
    if len(values) < 2:
        return False
    a, b = values[-2], values[-1]
    return abs(b - a) <= tol * max(abs(a), abs(b), 1e-30)


def _aitken(values: list[float]) -> list[float]:
    """Aitken delta-squared acceleration, elementwise with safe fallbacks.

    Block increments of self-similar series converge geometrically (ratio
    1/d), which Aitken removes exactly; for already-converged sequences the
    denominator degenerates and the raw value is kept.
    """
    out = list(values)
    for i in range(2, len(values)):
        x0, x1, x2 = values[i - 2], values[i - 1], values[i]
        denom = (x2 - x1) - (x1 - x0)
        if abs(denom) > 1e-9 * max(abs(x2 - x1), abs(x1 - x0), 1e-30):
            acc = x2 - (x2 - x1) ** 2 / denom
            if math.isfinite(acc):
                out[i] = acc
    return out


def integral_means_log(g: ExteriorLaurent, log_R: float) -> float:
    """I(R) from log R; use this form for scales within an ulp of the circle."""
    if not log_R > 0.0:
        raise ValidationError("integral means require R > 1")
    terms = []
    for k in sorted(g.coeffs):
        e = -2.0 * k * log_R
        if e < -745.0:
            continue
        terms.append(abs(g.coeffs[k]) ** 2 * math.exp(e))
    return fsum(terms)


def integral_means(g: ExteriorLaurent, R: float) -> float:
    """Circle mean of |g|^2 at radius R > 1, an exact coefficient sum."""
    if not R > 1.0:
        raise ValidationError("integral means require R > 1")
    return integral_means_log(g, math.log(R))


def variance_lacunary(moduli, d: float, tolerance: float = 1e-3) -> VarianceEstimate:
    """Cesaro mean of squared moduli divided by log d.

    Exact for lacunary series whose frequencies grow with ratio d; the
    diagnostics record running Cesaro means at geometric checkpoints.
    """
    if not d > 1.0:
        raise ValidationError("lacunary base must exceed 1")
    moduli = [float(m) for m in moduli]
    log_d = math.log(d)
    if not moduli:
        return VarianceEstimate(0.0, "lacunary_exact", ((0, 0.0),), True, tolerance)
    squares = [m * m for m in moduli]
    step = max(1, len(squares) // 32)
    checkpoints = sorted(set(range(step, len(squares) + 1, step)) | {len(squares)})
    diagnostics = [(n, fsum(squares[:n]) / n / log_d) for n in checkpoints]
    values = [v for _, v in diagnostics]
    return VarianceEstimate(values[-1], "lacunary_exact", tuple(diagnostics),
                            _consecutive_converged(values, tolerance), tolerance)


def variance_block(g: ExteriorLaurent, d: int, R0: float, n_blocks: int,
                   tolerance: float = 1e-3) -> VarianceEstimate:
    """Variance from increments of I(R) between the scales R0^(1/d^k).

    Each increment [I(R_(k+1)) - I(R_k)] / [log(1/(R_(k+1)-1)) - log(1/(R_k-1))]
    measures the coefficient mass of one self-similar block; the reported
    value averages the last ceil(n/2) increments.
    """
    if d < 2 or not R0 > 1.0 or n_blocks < 1:
        raise ValidationError("need d >= 2, R0 > 1 and at least one block")
    log_R = [math.log(R0) / d**k for k in range(n_blocks + 1)]
    r_minus_1 = [expm1(l) for l in log_R]
    if g.max_freq < 10.0 / r_minus_1[-1]:
        raise UnresolvedScaleError(
            f"series cutoff {g.max_freq} cannot resolve R - 1 = {r_minus_1[-1]:.3e}; "
            f"needs max_freq >= {10.0 / r_minus_1[-1]:.3e}")
    means = [integral_means_log(g, l) for l in log_R]
    scales = [math.log(1.0 / x) for x in r_minus_1]
    increments = []
    for k in range(n_blocks):
        increments.append((means[k + 1] - means[k]) / (scales[k + 1] - scales[k]))
    running = _running_tail(_aitken(increments))
    diagnostics = tuple(enumerate(running))
    return VarianceEstimate(running[-1], "block_increment", diagnostics,
                            _consecutive_converged(running, tolerance), tolerance)


def variance_block_mass(g: ExteriorLaurent, tolerance: float = 1e-3) -> VarianceEstimate:
    """Per-block l2 coefficient mass over log(base).

    Requires self-similarity metadata on ``g``; block l covers frequencies in
    [n_l, n_(l+1)).  Only blocks fully below the resolution cutoff count.
    Exact for eventually self-similar series since I(R) has no cross terms.
    """
    ss = g.self_similarity
    if ss is None:
        raise ValidationError("block-mass estimator needs self-similarity metadata")
    edges = ss.block_edges(g.max_freq)
    # keep blocks [n_l, n_(l+1)) with n_(l+1) <= max_freq + 1
    complete = len(edges) - 1
    if edges and edges[-1] * ss.base <= g.max_freq + 1:
        complete = len(edges)
    if complete < 1:
        raise UnresolvedScaleError("no complete self-similar block below the cutoff")
    log_d = math.log(ss.base)
    buckets: list[list[float]] = [[] for _ in range(complete)]
    for k in sorted(g.coeffs):
        if k < edges[0]:
            continue
        idx = _block_index(k, edges, ss.base)
        if idx < complete:
            buckets[idx].append(abs(g.coeffs[k]) ** 2)
    masses = [fsum(b) for b in buckets]
    per_block = [m / log_d for m in masses]
    running = _running_tail(per_block)
    diagnostics = tuple(enumerate(running))
    return VarianceEstimate(running[-1], "block_mass", diagnostics,
                            _consecutive_converged(running, tolerance), tolerance)


def _block_index(k: int, edges: list[int], base: int) -> int:
    lo, hi = 0, len(edges)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if edges[mid] <= k:
            lo = mid
        else:
            hi = mid
    return lo


def third_derivative(g: ExteriorLaurent) -> ExteriorLaurent:
    """Termwise third derivative: b_k maps to -k(k+1)(k+2) b_k at k + 3."""
    return g.third_derivative()


def cesaro_sigma4(v: ExteriorLaurent, R0: float, d: int, tolerance: float = 1e-3,
                  quad_rtol: float = 1e-6) -> VarianceEstimate:
    """Fourth-order average of v''' against the hyperbolic density.

    Per fundamental annulus A(R^(1/d), R) the estimate is

        (8/3) * [int |v'''|^2 ((r^2-1)/2)^3 r dr] / [int (2r/(r^2-1)) dr],

    the angular integral being exact by orthogonality.  The radial integral
    is done by adaptive panels in log(r - 1); per-annulus values over deeper
    annuli are the diagnostics and stabilize for self-similar input.
    """
    if d < 2 or not R0 > 1.0:
        raise ValidationError("need d >= 2 and R0 > 1")
    v3 = v.third_derivative()
    mass = {k: abs(c) ** 2 for k, c in v3.coeffs.items()}
    values = []
    k = 0
    while True:
        log_hi = math.log(R0) / d**k
        log_lo = log_hi / d
        if 10.0 / expm1(log_lo) > v.max_freq:
            break
        num = _radial_fourth_order_integral(mass, log_lo, log_hi, quad_rtol)
        den = math.log(expm1(2 * log_hi) / expm1(2 * log_lo))
        values.append((8.0 / 3.0) * num / den)
        k += 1
        if k > 64:
            break
    if not values:
        raise UnresolvedScaleError("series cutoff cannot resolve one fundamental annulus")
    running = _running_tail(values)
    diagnostics = tuple(enumerate(running))
    return VarianceEstimate(running[-1], "cesaro4", diagnostics,
                            _consecutive_converged(running, tolerance), tolerance)


def _radial_fourth_order_integral(mass: dict[int, float], log_lo: float,
                                  log_hi: float, rtol: float) -> float:
    """int_(r_lo)^(r_hi) [sum_m M_m r^(-2m)] ((r^2-1)/2)^3 r dr in u = log(r-1)."""
    if not mass:
        return 0.0
    freqs = np.array(sorted(mass), dtype=float)
    weights = np.array([mass[int(m)] for m in sorted(mass)])
    u_lo = math.log(expm1(log_lo))
    u_hi = math.log(expm1(log_hi))

    def segment(n_panels: int) -> float:
        nodes, gw = np.polynomial.legendre.leggauss(16)
        total = []
        for i in range(n_panels):
            a = u_lo + (u_hi - u_lo) * i / n_panels
            b = u_lo + (u_hi - u_lo) * (i + 1) / n_panels
            u = 0.5 * (b - a) * nodes + 0.5 * (a + b)
            x = np.exp(u)                     # r - 1
            log_r = np.log1p(x)
            expo = -2.0 * np.outer(freqs, log_r)
            powsum = weights @ np.exp(np.maximum(expo, -745.0))
            r = 1.0 + x
            w = ((r * r - 1.0) / 2.0) ** 3 * r * x   # x = dr/du
            total.append(0.5 * (b - a) * float(np.dot(gw, powsum * w)))
        return fsum(total)

    n = max(4, int(math.ceil((u_hi - u_lo) / 0.5)))
    prev = segment(n)
    for _ in range(6):
        n *= 2
        cur = segment(n)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


def growth_slope(g: ExteriorLaurent, R_lo: float, R_hi: float, n_pts: int = 40) -> float:
    """Least-squares slope of I(R) against log(1/(R-1)) on a geometric grid.

    For g arising as a transform of a Beltrami coefficient bounded by one,
    the slope cannot exceed 1 up to finite-window effects.
    """
    if not 1.0 < R_lo < R_hi or n_pts < 2:
        raise ValidationError("need 1 < R_lo < R_hi and at least two points")
    xs, ys = [], []
    for i in range(n_pts):
        t = i / (n_pts - 1)
        r_minus_1 = math.exp((1 - t) * math.log(R_lo - 1.0) + t * math.log(R_hi - 1.0))
        xs.append(math.log(1.0 / r_minus_1))
        ys.append(integral_means_log(g, log1p(r_minus_1)))
    x_mean = fsum(xs) / n_pts
    y_mean = fsum(ys) / n_pts
    cov = fsum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    var = fsum((x - x_mean) ** 2 for x in xs)
    return cov / var


def hardy_check(taylor, r: float) -> float:
    """Residual of the radial-derivative identity for interior Taylor series.

    With M(r) = sum |a_k|^2 r^(2k), the left side (1/4r) d/dr (r dM/dr) is
    evaluated from the termwise first and second derivatives, the right side
    is the mean of |g'|^2; the identity is exact term by term, so the
    residual only measures floating-point noise.
    """
    if not 0.0 < r < 1.0:
        raise ValidationError("need 0 < r < 1")
    items = sorted((int(k), complex(c)) for k, c in dict(taylor).items())
    m1 = fsum(2 * k * abs(c) ** 2 * r ** (2 * k - 1) for k, c in items if k)
    m2 = fsum(2 * k * (2 * k - 1) * abs(c) ** 2 * r ** (2 * k - 2) for k, c in items if k)
    lhs = (m1 + r * m2) / (4.0 * r)
    rhs = fsum(k * k * abs(c) ** 2 * r ** (2 * k - 2) for k, c in items if k)
    return abs(lhs - rhs)


def bloch_seminorm(g: ExteriorLaurent, radii=None, n_angles: int = 48) -> float:
    """Grid lower bound for sup (|z|^2 - 1) |g'(z)| over the exterior disk."""
    gp = g.derivative()
    if radii is None:
        radii = [1.0 + math.exp(u) for u in np.linspace(math.log(1e-4), math.log(40.0), 60)]
    best = 0.0
    for R in radii:
        w = R * R - 1.0
        for j in range(n_angles):
            th = 2 * math.pi * (j + 0.31) / n_angles
            z = R * complex(math.cos(th), math.sin(th))
            best = max(best, w * abs(gp.eval(z)))
    return best
