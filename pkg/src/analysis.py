"""
Analysis
Local cosine behaviour around the maxima of L_n, the curvature factor k,
the angle representation L_n(x) = 2cos(2^n theta(x)), weighted orthogonality
by Gauss-Chebyshev quadrature, large-|x| asymptotics and the pi
approximation obtained from the largest zero.
"""

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from polycore import (
    BigReal,
    MapParams,
    build_poly,
    eval_map,
    guard_bits,
    to_mpf,
    working_context,
)
from radicals import ScaledZero, SignPattern
from utils.validators import (
    DomainError,
    PreconditionError,
    check_level,
    check_precision,
)


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Chebyshev rule: nodes x_j = 2cos((j - 1/2) pi / N)"""

    node_count: int
    precision: int = 128

    def __post_init__(self):
        check_level(self.node_count, 1, 'node_count')
        check_precision(self.precision)

    @classmethod
    def for_levels(cls, m: int, n: int, precision: int = 128) -> 'QuadratureSpec':
        """Smallest rule integrating L_m L_n exactly"""
        return cls((2 ** m + 2 ** n) // 2 + 1, precision)

    def is_exact_for(self, m: int, n: int) -> bool:
        return 2 * self.node_count > 2 ** m + 2 ** n


@dataclass(frozen=True)
class LocalModel:
    """2cos(2^(n-1) k (x - x0)) around a maximum x0 of L_n"""

    center: BigReal
    k: BigReal
    n: int

    def evaluate(self, x: BigReal) -> BigReal:
        precision = min(x.precision, self.k.precision)
        ctx = working_context(precision + 16)
        arg = ctx.ldexp(ctx.mpf(self.k.value) * (ctx.mpf(x.value) - ctx.mpf(self.center.value)),
                        self.n - 1)
        return BigReal(working_context(precision).mpf(2 * ctx.cos(arg)), precision)


@dataclass(frozen=True)
class SampleRow:
    x: BigReal
    value: BigReal
    model: BigReal

    @property
    def delta(self) -> float:
        return abs(float(self.value.value - self.model.value))


@dataclass(frozen=True)
class PiRow:
    n: int
    value: BigReal
    error: BigReal
    # error(n) / error(n - 1); None for the first row
    ratio: Optional[float] = None


@dataclass(frozen=True)
class OrthogonalityMatrix:
    bound: int
    spec: QuadratureSpec
    values: Tuple[Tuple[BigReal, ...], ...]
    max_off_diagonal: float
    max_diagonal_deviation: float

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.values], dtype=np.float64)

    def within(self, tolerance: float) -> bool:
        return self.max_off_diagonal < tolerance and self.max_diagonal_deviation < tolerance


# =============================================================================
#  Local structure at the origin and at maxima
# =============================================================================

def taylor_at_zero(params: MapParams, n: int, max_n: Optional[int] = None) -> Tuple[Fraction, Fraction, Fraction]:
    """First three exact coefficients of the expanded iterate"""
    check_level(n, 2)
    p = build_poly(params, n, max_n)
    return p.coefficient(0), p.coefficient(1), p.coefficient(2)


def expected_taylor(params: MapParams, n: int) -> Tuple[Fraction, Fraction, Fraction]:
    """(1/a, 0, -a 2^(2n-1)); for L this is (2, 0, -4^(n-1))"""
    check_level(n, 2)
    return params.constant, Fraction(0), -params.a * 2 ** (2 * n - 1)


def _inside_open_interval(x0: BigReal, what: str):
    ctx = working_context(x0.precision)
    if abs(ctx.mpf(x0.value)) >= 2:
        raise DomainError(f"{what} requires |x0| < 2, got {ctx.nstr(x0.value, 15)}")


def curvature_at_max(n: int, x0: BigReal) -> BigReal:
    """
    L_n''(x0) = 2^(2n+1) / (x0^2 - 4) at a maximum x0

    Raises:
        DomainError: |x0| >= 2
    """
    check_level(n, 2)
    _inside_open_interval(x0, 'curvature_at_max')
    ctx = working_context(x0.precision + 16)
    x = ctx.mpf(x0.value)
    value = ctx.ldexp(1, 2 * n + 1) / (x * x - 4)
    return BigReal(working_context(x0.precision).mpf(value), x0.precision)


def local_k(x0: BigReal, n: int = 2) -> LocalModel:
    """
    Frequency factor k = 1 / sqrt(1 - x0^2 / 4) of the local cosine model

    Raises:
        DomainError: |x0| >= 2
    """
    check_level(n, 1)
    _inside_open_interval(x0, 'local_k')
    ctx = working_context(x0.precision + 16)
    x = ctx.mpf(x0.value)
    k = 1 / ctx.sqrt(1 - x * x / 4)
    return LocalModel(center=x0, k=BigReal(working_context(x0.precision).mpf(k), x0.precision), n=n)


# =============================================================================
#  Angle representation
# =============================================================================

def _shifted_argument(ctx, x: BigReal, params: MapParams):
    a = to_mpf(ctx, params.a)
    xv = ctx.mpf(x.value)
    if abs(xv) > to_mpf(ctx, params.constant):
        raise DomainError(f"theta is defined for |x| <= {params.constant}, got {ctx.nstr(xv, 15)}")
    # Clamp rounding overshoot at the endpoints
    return max(ctx.mpf(-1), min(ctx.mpf(1), 2 * a * a * xv * xv - 1))


def theta_of_x(x: BigReal, params: Optional[MapParams] = None) -> BigReal:
    """
    theta = arccos(2a^2 x^2 - 1) / 2 in [0, pi/2]

    Satisfies M_n(x) = (1/a) cos(2^n theta) for every n (2cos for L).

    Raises:
        DomainError: |x| > 1/a
    """
    params = params or MapParams.lucas()
    ctx = working_context(x.precision + 16)
    t = _shifted_argument(ctx, x, params)
    return BigReal(working_context(x.precision).mpf(ctx.acos(t) / 2), x.precision)


def theta_arctan(x: BigReal, params: Optional[MapParams] = None) -> BigReal:
    """
    theta = arctan(sqrt(1 - t^2) / t) / 2 with t = 2a^2 x^2 - 1

    Agrees with theta_of_x for t > 0. For t < 0 the two differ by pi/2,
    which cos(2^n theta) absorbs only from n = 2 on.

    Raises:
        DomainError: |x| > 1/a, or t = 0 to within rounding (|x| = sqrt(2)/(2a))
    """
    params = params or MapParams.lucas()
    ctx = working_context(x.precision + 16)
    t = _shifted_argument(ctx, x, params)
    if abs(t) <= ctx.ldexp(1, -(x.precision - 8)):
        raise DomainError("arctan form is undefined where 2a^2 x^2 - 1 = 0")
    value = ctx.atan(ctx.sqrt(1 - t * t) / t) / 2
    return BigReal(working_context(x.precision).mpf(value), x.precision)


def cosine_form(params: MapParams, n: int, theta: BigReal) -> BigReal:
    """(1/a) cos(2^n theta)"""
    check_level(n, 0)
    ctx = working_context(theta.precision + n + 16)
    value = to_mpf(ctx, params.constant) * ctx.cos(ctx.ldexp(ctx.mpf(theta.value), n))
    return BigReal(working_context(theta.precision).mpf(value), theta.precision)


# =============================================================================
#  Orthogonality
# =============================================================================

def _node_values(bound: int, spec: QuadratureSpec):
    """Per node j (ascending), the values L_0 .. L_bound at 2cos(theta_j)"""
    ctx = working_context(spec.precision + guard_bits(bound))
    N = spec.node_count
    rows = []
    for j in range(1, N + 1):
        v = 2 * ctx.cospi(ctx.mpf(2 * j - 1) / (2 * N))
        column = [v]
        for _ in range(bound):
            v = v * v - 2
            column.append(v)
        rows.append(column)
    return ctx, rows


def _weighted_sum(ctx, rows, m: int, n: int, node_count: int):
    # Ascending node order keeps the sum reproducible
    total = ctx.fsum(row[m] * row[n] for row in rows)
    return ctx.pi * total / (4 * node_count)


def orthogonality_integral(m: int, n: int, spec: QuadratureSpec) -> BigReal:
    """
    (1/4) integral_{-2}^{2} L_m L_n / sqrt(4 - x^2) dx by Gauss-Chebyshev quadrature

    0 for m != n and pi/2 for m == n, up to rounding.

    Raises:
        PreconditionError: too few nodes for an exact rule
    """
    check_level(m, 0, 'm')
    check_level(n, 0)
    if not spec.is_exact_for(m, n):
        raise PreconditionError(
            f"{spec.node_count} nodes cannot integrate L_{m} L_{n} exactly; "
            f"need more than {(2 ** m + 2 ** n) // 2}"
        )
    ctx, rows = _node_values(max(m, n), spec)
    value = _weighted_sum(ctx, rows, m, n, spec.node_count)
    return BigReal(working_context(spec.precision).mpf(value), spec.precision)


def orthogonality_matrix(bound: int, spec: Optional[QuadratureSpec] = None) -> OrthogonalityMatrix:
    """
    All integrals for 0 <= m, n <= bound from a single set of node values

    Raises:
        PreconditionError: spec has too few nodes for (bound, bound)
    """
    check_level(bound, 0, 'bound')
    spec = spec or QuadratureSpec.for_levels(bound, bound)
    if not spec.is_exact_for(bound, bound):
        raise PreconditionError(
            f"{spec.node_count} nodes cannot integrate up to level {bound} exactly; "
            f"need more than {2 ** bound}"
        )

    start = time.time()
    ctx, rows = _node_values(bound, spec)
    out = working_context(spec.precision)
    half_pi = ctx.pi / 2

    values = []
    deviation = np.zeros((bound + 1, bound + 1), dtype=np.float64)
    for m in range(bound + 1):
        row = []
        for n in range(bound + 1):
            v = _weighted_sum(ctx, rows, m, n, spec.node_count)
            row.append(BigReal(out.mpf(v), spec.precision))
            deviation[m, n] = float(abs(v - half_pi) if m == n else abs(v))
        values.append(tuple(row))

    off_diagonal = deviation[~np.eye(bound + 1, dtype=bool)]
    logger.info(f"Orthogonality matrix up to level {bound} with {spec.node_count} nodes "
                f"in {time.time() - start:.2f}s")

    return OrthogonalityMatrix(
        bound=bound,
        spec=spec,
        values=tuple(values),
        max_off_diagonal=float(off_diagonal.max()) if off_diagonal.size else 0.0,
        max_diagonal_deviation=float(np.diag(deviation).max()),
    )


# =============================================================================
#  Asymptotics and pi
# =============================================================================

def asymptotic_ratio(params: MapParams, n: int, x: BigReal) -> BigReal:
    """
    M_n(x) / [(2a)^(2^(n-1) - 1) (2a x^2 - 1/a)^(2^(n-1))], tending to 1

    Raises:
        DomainError: |x| <= 1/a
    """
    check_level(n, 1)
    ctx = working_context(x.precision + guard_bits(n))
    xv = ctx.mpf(x.value)
    if abs(xv) <= to_mpf(ctx, params.constant):
        raise DomainError(f"asymptotic_ratio requires |x| > {params.constant}, "
                          f"got {ctx.nstr(xv, 15)}")

    lead = to_mpf(ctx, params.lead)
    half_degree = 2 ** (n - 1)
    asymptote = lead ** (half_degree - 1) * (lead * xv * xv - to_mpf(ctx, params.constant)) ** half_degree
    value = eval_map(params, n, BigReal(xv, x.precision + guard_bits(n))).value
    return BigReal(working_context(x.precision).mpf(value / asymptote), x.precision)


def pi_approx(n: int, precision: int, params: Optional[MapParams] = None) -> BigReal:
    """
    2^(n+1) sqrt(2 - r_n) with r_n the largest zero of L_n (= 2^(n+2) sin(pi/2^(n+2)))

    With params the largest zero of M^a_n is rescaled by 2a first, which
    gives the same value.
    """
    check_level(n, 1)
    check_precision(precision)
    params = params or MapParams.lucas()

    # 2 - r_n loses about 2n leading bits
    inner = precision + 2 * n + guard_bits(n)
    ctx = working_context(inner)
    largest = ScaledZero(SignPattern(1, (1,) * (n - 1)), params.zero_scale).value(inner)
    r = ctx.mpf(largest.value) * to_mpf(ctx, params.lead)
    value = ctx.ldexp(ctx.sqrt(2 - r), n + 1)
    return BigReal(working_context(precision).mpf(value), precision)


def pi_table(n_from: int, n_to: int, precision: int,
             params: Optional[MapParams] = None) -> List[PiRow]:
    """pi_approx for n_from..n_to with absolute error and successive error ratios"""
    check_level(n_from, 1, 'n_from')
    if n_to < n_from:
        raise DomainError(f"empty range {n_from}..{n_to}")

    ctx = working_context(precision + 16)
    out = working_context(precision)
    rows = []
    previous = None
    for n in range(n_from, n_to + 1):
        value = pi_approx(n, precision, params)
        error = abs(ctx.pi - ctx.mpf(value.value))
        ratio = float(error / previous) if previous else None
        rows.append(PiRow(n=n, value=value, error=BigReal(out.mpf(error), precision), ratio=ratio))
        previous = error
    return rows


# =============================================================================
#  Sample tables
# =============================================================================

def _grid(ctx, center, half_width, count: int):
    if count < 2:
        raise DomainError(f"sample count must be at least 2, got {count}")
    # Symmetric offsets so the centre is hit exactly
    return [center + (2 * i - (count - 1)) * half_width / (count - 1) for i in range(count)]


def cosine_compare_samples(n: int, half_width: BigReal, count: int,
                           params: Optional[MapParams] = None,
                           precision: Optional[int] = None) -> List[SampleRow]:
    """
    Rows (x, M_n(x), (1/a) cos(a 2^n x)) on a uniform grid over [-w, w]

    For L the model column is 2cos(2^(n-1) x).
    """
    check_level(n, 2)
    params = params or MapParams.lucas()
    precision = precision or half_width.precision
    ctx = working_context(precision + 16)
    out = working_context(precision)
    a = to_mpf(ctx, params.a)
    inv_a = to_mpf(ctx, params.constant)

    rows = []
    for xv in _grid(ctx, ctx.mpf(0), ctx.mpf(half_width.value), count):
        x = BigReal(out.mpf(xv), precision)
        model = inv_a * ctx.cos(ctx.ldexp(a * x.value, n))
        rows.append(SampleRow(x=x, value=eval_map(params, n, x), model=BigReal(out.mpf(model), precision)))
    return rows


def local_cosine_samples(n: int, x0: BigReal, half_width: BigReal, count: int) -> List[SampleRow]:
    """Rows (x, L_n(x), 2cos(2^(n-1) k (x - x0))) on a grid centred at a maximum x0"""
    check_level(n, 2)
    model = local_k(x0, n)
    precision = x0.precision
    ctx = working_context(precision + 16)
    params = MapParams.lucas()

    rows = []
    out = working_context(precision)
    for xv in _grid(ctx, ctx.mpf(x0.value), ctx.mpf(half_width.value), count):
        x = BigReal(out.mpf(xv), precision)
        rows.append(SampleRow(x=x, value=eval_map(params, n, x), model=model.evaluate(x)))
    return rows


def quartic_constant(rows: Sequence[SampleRow], window: float,
                     center: float = 0.0, order: int = 4) -> float:
    """
    Smallest C with |value - model| <= C |x - center|^order on the window

    Points within window * 1e-6 of the centre are excluded. Returns 0.0
    when no row falls inside.
    """
    x = np.array([float(r.x) for r in rows], dtype=np.float64) - center
    delta = np.array([r.delta for r in rows], dtype=np.float64)
    mask = (np.abs(x) > window * 1e-6) & (np.abs(x) <= window)
    if not mask.any():
        return 0.0
    return float(np.max(delta[mask] / np.abs(x[mask]) ** order))
