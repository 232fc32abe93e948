"""Second-order term of the Neumann expansion of the deformation derivative.

For a Beltrami coefficient mu the log-derivative of the deformed map expands
as t*S(mu) + t^2*w + O(t^3) with

    w = S(mu * S(mu)) - (1/2) (S(mu))^2    on |z| > 1,

and the variance of w adds to the first-order variance.  For shell fields
both pieces are exact sparse Laurent series: the product field mu * S(mu)
stays in the monomial-annulus class, so its transform is again a finite
coefficient computation, and the self-product is a sparse convolution.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from math import fsum

from .annular import PiecewiseField, beurling, beurling_exterior, multiply
from .constructions import ShellParams, build_shell
from .errors import UnresolvedTruncationError, ValidationError
from .formulas import sigma2_shell
from .laurent import ExteriorLaurent, convolve
from .variance import VarianceEstimate, variance_block_mass

COEFF_FLOOR = 1e-14  # sparsity floor for product coefficients, documented drop


@dataclass(frozen=True)
class Order2Field:
    """w as an exterior series plus the l2 mass dropped beyond the cutoff."""

    w: ExteriorLaurent
    tail_mass: float
    flagged: bool


@dataclass(frozen=True)
class Order2Report:
    first_order: float
    second_order: float
    total: float
    params: ShellParams
    shells_used: int
    max_freq_used: int
    tail_mass: float
    second_order_estimate: VarianceEstimate
    stability: float | None = None

    def to_doc(self) -> dict:
        doc = {
            "d": self.params.d,
            "rho0": self.params.rho0,
            "n0": self.params.first_frequency,
            "shells": self.shells_used,
            "max_freq": self.max_freq_used,
            "first_order": self.first_order,
            "second_order": self.second_order,
            "total": self.total,
            "tail_mass": self.tail_mass,
            "second_order_diagnostics": self.second_order_estimate.to_doc(),
        }
        if self.stability is not None:
            doc["stability"] = self.stability
        return doc


def order2_field(mu: PiecewiseField, max_freq: int, floor: float = COEFF_FLOOR,
                 flag_tol: float = 1e-9) -> Order2Field:
    """Compute w = S(mu*S(mu)) - (1/2)(S(mu))^2 truncated at ``max_freq``."""
    if max_freq < 1:
        raise ValidationError("max_freq must be >= 1")
    s_pw = beurling(mu)
    product = multiply(mu, s_pw)
    first = beurling_exterior(product)            # exact finite series
    s_ext = beurling_exterior(mu)
    square, dropped_sq = convolve(s_ext, s_ext, max_freq, floor)

    coeffs: dict[int, complex] = {}
    dropped = [dropped_sq]
    for k, c in first.coeffs.items():
        if k > max_freq:
            dropped.append(abs(c) ** 2)
        else:
            coeffs[k] = c
    for k, c in square.coeffs.items():
        coeffs[k] = coeffs.get(k, 0) - 0.5 * c
    coeffs = {k: c for k, c in coeffs.items() if abs(c) >= floor}
    tail = fsum(dropped)
    total_mass = fsum(abs(c) ** 2 for c in coeffs.values())
    flagged = tail > flag_tol * max(total_mass, 1e-300)
    return Order2Field(ExteriorLaurent(coeffs, max_freq), tail, flagged)


def _second_order(params: ShellParams) -> tuple[VarianceEstimate, Order2Field, ShellParams]:
    eff = params.clipped_to_max_freq()
    if eff.shells < 2:
        raise ValidationError("need at least two shells below the frequency cutoff")
    mu = build_shell(eff)
    mf = min(eff.max_freq, 2 * eff.frequency(eff.shells - 1))
    field = order2_field(mu, mf)
    w = field.w.with_self_similarity(eff.degree, eff.first_frequency)
    return variance_block_mass(w), field, eff


def order2_bound(params: ShellParams, refine: bool = False,
                 flag_tail: bool = True) -> Order2Report:
    """First- plus second-order lower bound for the shell coefficient.

    ``refine`` doubles the shell count and frequency cutoff and reports the
    relative change of the total, the stability diagnostic of the truncation.
    """
    est, field, eff = _second_order(params)
    if flag_tail and field.flagged:
        raise UnresolvedTruncationError(
            f"dropped tail mass {field.tail_mass:.3e} above tolerance")
    first = sigma2_shell(eff.d, eff.rho0)
    total = first + est.value
    stability = None
    if refine:
        doubled = replace(params, shells=2 * eff.shells,
                          max_freq=min(2 * params.max_freq, 2**63 - 1))
        est2, _, _ = _second_order(doubled)
        total2 = first + est2.value
        stability = abs(total2 - total) / max(abs(total), 1e-300)
    return Order2Report(first, est.value, total, params, eff.shells,
                        field.w.max_freq, field.tail_mass, est, stability)


def _search_eval(params: ShellParams) -> Order2Report:
    return order2_bound(params, refine=False)


def parameter_search(grid, jobs: int = 1) -> tuple[Order2Report, list[Order2Report]]:
    """Evaluate a deterministic grid of shell parameters.

    Returns the best report and the full leaderboard sorted by descending
    total (ties broken by the parameter triple).  The grid order is fixed, so
    serial and parallel runs produce identical results.
    """
    grid = list(grid)
    if not grid:
        raise ValidationError("empty parameter grid")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_search_eval, grid))
    else:
        reports = [_search_eval(p) for p in grid]
    board = sorted(reports, key=lambda r: (-r.total, r.params.d, r.params.rho0,
                                           r.params.first_frequency))
    return board[0], board


def shell_grid(degrees, rho0_values, n0_values, shells: int,
               max_freq: int) -> list[ShellParams]:
    """Cartesian parameter grid in deterministic order.

    ``rho0_values`` entries may be the string "optimal", resolved per degree;
    ``n0_values`` may contain None for the per-degree default.
    """
    from .formulas import optimal_rho0

    grid = []
    for d in degrees:
        for rho in rho0_values:
            rho_val = optimal_rho0(d) if rho == "optimal" else float(rho)
            for n0 in n0_values:
                grid.append(ShellParams(d=d, rho0=rho_val, n0=n0,
                                        shells=shells, max_freq=max_freq))
    return grid
