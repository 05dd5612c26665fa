"""Closed-form radius-bound constants for nearly stable CMC hypersurfaces.

Everything here is scalar arithmetic: admissible ranges for the conformal
exponent k, the coefficients A and B entering the distance bound
c = pi * sqrt(A / B), and the optimization of c over k.  Interval
endpoints and dimension thresholds are kept as exact rationals; the rest
is floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DimensionError,
    EmptyIntervalError,
    HypothesisViolation,
    NoApplicableBound,
    PreconditionViolation,
)

SUPPORTED_DIMENSIONS = (2, 3, 4)

# Golden-section constants (see the classic bounded scalar search).
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

#: Relative offset used to stay strictly inside the open k-interval.
INTERIOR_OFFSET = 1e-9


def _check_dimension(n: int) -> None:
    if n not in SUPPORTED_DIMENSIONS:
        raise DimensionError(f"hypersurface dimension must be one of {SUPPORTED_DIMENSIONS}, got {n}")


def delta_threshold(n: int) -> Fraction:
    """Largest near-stability parameter for which the k-interval is nonempty.

    Solves 5(n-1)/(4n(1-d)) = 4/(n-1) for d, exactly.
    """
    _check_dimension(n)
    return 1 - Fraction(5 * (n - 1) ** 2, 16 * n)


@dataclass(frozen=True)
class KInterval:
    """Open admissible interval for the conformal exponent k."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo >= self.hi:
            raise EmptyIntervalError(f"empty k-interval: ({self.lo}, {self.hi})")

    def contains(self, k: float) -> bool:
        """Strict interior membership (the endpoints are excluded)."""
        return self.lo < Fraction(k) < self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def interior(self, offset: float = INTERIOR_OFFSET) -> tuple[float, float]:
        """Floating-point sub-interval clamped `offset * width` inside each end."""
        pad = float(self.width) * offset
        return float(self.lo) + pad, float(self.hi) - pad


def k_interval(n: int, delta) -> KInterval:
    """Admissible range 5(n-1)/(4n(1-d)) < k < 4/(n-1), as exact rationals.

    Raises EmptyIntervalError when delta is at or above delta_threshold(n).
    """
    _check_dimension(n)
    d = Fraction(delta)
    if not 0 <= d < 1:
        raise PreconditionViolation(f"delta must lie in [0, 1), got {delta}")
    lo = Fraction(5 * (n - 1), 4 * n) / (1 - d)
    hi = Fraction(4, n - 1)
    if lo >= hi:
        raise EmptyIntervalError(
            f"no admissible k for n={n}, delta={delta}: requires delta < {delta_threshold(n)}"
        )
    return KInterval(lo, hi)


def coeff_A(n: int, k: float) -> float:
    """Gradient-side coefficient A(n, k) = 4(k(2-n) + (n-1)) / (4 - k(n-1))."""
    _check_dimension(n)
    denom = 4.0 - k * (n - 1)
    if denom <= 0.0:
        raise HypothesisViolation(f"k must satisfy k < 4/(n-1) = {4 / (n - 1)}, got k={k}")
    return 4.0 * (k * (2 - n) + (n - 1)) / denom


def coeff_B(n: int, k: float, delta: float, H: float, K_inf: float) -> float:
    """Potential-side coefficient B; may be nonpositive (callers gate on sign).

    B = (kn(1-d) - n^2 + 5n - 5) H^2 + (kn(1-d) + n - 1) min(0, K_inf);
    the curvature term drops out automatically when K_inf >= 0.
    """
    _check_dimension(n)
    p = k * n * (1.0 - delta)
    return (p - n * n + 5 * n - 5) * H * H + (p + n - 1) * min(0.0, K_inf)


def mean_curvature_threshold(K_inf: float) -> float:
    """Strict lower bound 2*sqrt(|min(0, K_inf)|) that |H| must exceed."""
    return 2.0 * math.sqrt(abs(min(0.0, K_inf)))


def check_quotient_bound(n: int, k: float, delta: float) -> float:
    """Quotient (kn(1-d)+n-1) / (kn(1-d)-n^2+5n-5); stays below 4 inside the interval."""
    _check_dimension(n)
    p = k * n * (1.0 - delta)
    denom = p - n * n + 5 * n - 5
    if denom <= 0.0:
        raise PreconditionViolation(
            f"quotient denominator nonpositive ({denom}); k below admissible range"
        )
    return (p + n - 1) / denom


@dataclass(frozen=True)
class BoundInput:
    """Parameters of a radius-bound query.

    H is a mean curvature (1/length), K_inf a lower bound on ambient
    sectional curvature (1/length^2), S_inf an optional lower bound on
    ambient scalar curvature (only meaningful for n = 2).
    """

    n: int
    delta: float
    H: float
    K_inf: float = 0.0
    S_inf: float | None = None

    def __post_init__(self) -> None:
        _check_dimension(self.n)
        if not 0.0 <= self.delta < 1.0:
            raise PreconditionViolation(f"delta must lie in [0, 1), got {self.delta}")


@dataclass(frozen=True)
class BoundResult:
    """A computed distance bound c = pi * sqrt(A / B) and its provenance."""

    k_star: float
    A: float
    B: float
    c: float
    source: str  # "sectional" or "scalar"
    hypotheses_met: dict[str, bool] = field(default_factory=dict)


def _sectional_hypotheses(inp: BoundInput) -> dict[str, bool]:
    return {
        "delta_threshold": Fraction(inp.delta) < delta_threshold(inp.n),
        "H_threshold": abs(inp.H) > mean_curvature_threshold(inp.K_inf),
    }


def radius_bound_fixed_k(inp: BoundInput, k: float) -> BoundResult:
    """Distance bound at a caller-chosen admissible k (sectional-curvature route)."""
    flags = _sectional_hypotheses(inp)
    if not flags["delta_threshold"]:
        raise HypothesisViolation(
            f"delta={inp.delta} is not below the n={inp.n} threshold {delta_threshold(inp.n)}"
        )
    interval = k_interval(inp.n, inp.delta)
    problems = []
    if not interval.contains(k):
        problems.append(f"k={k} is not strictly inside ({interval.lo}, {interval.hi})")
    if not flags["H_threshold"]:
        problems.append(
            f"|H|={abs(inp.H)} does not exceed the threshold {mean_curvature_threshold(inp.K_inf)}"
        )
    A = coeff_A(inp.n, k) if k < float(interval.hi) else float("nan")
    B = coeff_B(inp.n, k, inp.delta, inp.H, inp.K_inf)
    flags["B_positive"] = B > 0.0
    if not flags["B_positive"]:
        problems.append(f"B={B} is not positive")
    if problems:
        raise HypothesisViolation("; ".join(problems))
    c = math.pi * math.sqrt(A / B)
    return BoundResult(k_star=k, A=A, B=B, c=c, source="sectional", hypotheses_met=flags)


def _golden_section(f, a: float, b: float, tol: float) -> float:
    """Golden-section minimizer of a unimodal f on [a, b]; returns the argmin."""
    h = b - a
    if h <= tol:
        return 0.5 * (a + b)
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    yc, yd = f(c), f(d)
    while h > tol:
        h *= _INV_PHI
        if yc < yd:
            b, d, yd = d, c, yc
            c = a + _INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            d = a + _INV_PHI * h
            yd = f(d)
    return 0.5 * (a + b)


GRID_POINTS = 64


def radius_bound(inp: BoundInput) -> BoundResult:
    """Smallest sectional-route bound over the admissible k-interval.

    The theorem holds for every admissible k, so the infimum over k is the
    strongest verified claim.  Seeded by a dense grid scan, refined by
    golden-section search, clamped strictly inside the open interval.
    """
    flags = _sectional_hypotheses(inp)
    if not flags["delta_threshold"]:
        raise HypothesisViolation(
            f"delta={inp.delta} is not below the n={inp.n} threshold {delta_threshold(inp.n)}"
        )
    if not flags["H_threshold"]:
        raise HypothesisViolation(
            f"|H|={abs(inp.H)} does not exceed the threshold {mean_curvature_threshold(inp.K_inf)}"
        )
    interval = k_interval(inp.n, inp.delta)
    a, b = interval.interior()

    def objective(k: float) -> float:
        B = coeff_B(inp.n, k, inp.delta, inp.H, inp.K_inf)
        if B <= 0.0:
            return float("inf")
        return coeff_A(inp.n, k) / B

    grid = [a + (b - a) * i / (GRID_POINTS - 1) for i in range(GRID_POINTS)]
    values = [objective(k) for k in grid]
    i_best = min(range(GRID_POINTS), key=values.__getitem__)
    lo = grid[max(i_best - 1, 0)]
    hi = grid[min(i_best + 1, GRID_POINTS - 1)]
    k_star = _golden_section(objective, lo, hi, tol=1e-12 * (b - a))
    if objective(k_star) > values[i_best]:
        k_star = grid[i_best]
    return radius_bound_fixed_k(inp, k_star)


def radius_bound_scalar(delta: float, H: float, S_inf: float) -> BoundResult:
    """n = 2 bound from an ambient scalar-curvature lower bound S_inf.

    c = 2*pi*sqrt((1-d) / ((3-4d)(3H^2+S))), the fixed-exponent choice
    k = 1/(1-d); requires delta < 3/4 and 3H^2 + S_inf > 0.
    """
    flags = {"delta_threshold": delta < 0.75}
    B = 3.0 * H * H + S_inf
    flags["B_positive"] = B > 0.0
    problems = []
    if not flags["delta_threshold"]:
        problems.append(f"delta={delta} is not below 3/4")
    if not flags["B_positive"]:
        problems.append(f"3H^2 + S = {B} is not positive")
    if problems:
        raise HypothesisViolation("; ".join(problems))
    A = 4.0 * (1.0 - delta) / (3.0 - 4.0 * delta)
    c = 2.0 * math.pi * math.sqrt((1.0 - delta) / ((3.0 - 4.0 * delta) * B))
    return BoundResult(
        k_star=1.0 / (1.0 - delta), A=A, B=B, c=c, source="scalar", hypotheses_met=flags
    )


def best_bound(inp: BoundInput) -> BoundResult:
    """Minimum c among all bounds whose hypotheses hold for this input."""
    candidates: list[BoundResult] = []
    reasons: list[str] = []
    try:
        candidates.append(radius_bound(inp))
    except (HypothesisViolation, EmptyIntervalError) as exc:
        reasons.append(f"sectional: {exc}")
    if inp.n == 2 and inp.S_inf is not None:
        try:
            candidates.append(radius_bound_scalar(inp.delta, inp.H, inp.S_inf))
        except HypothesisViolation as exc:
            reasons.append(f"scalar: {exc}")
    elif inp.n != 2 and inp.S_inf is not None:
        reasons.append("scalar: only available for n = 2")
    if not candidates:
        raise NoApplicableBound("; ".join(reasons) or "no bound applies")
    return min(candidates, key=lambda r: r.c)
