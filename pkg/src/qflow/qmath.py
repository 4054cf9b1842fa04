"""Scalar q-calculus and self-similar profile constants.

The deformed exponential/logarithm pair underlying Tsallis entropy:

    exp_q(t) = [1 + (1-q) t]_+^{1/(1-q)},    log_q(t) = (t^(1-q) - 1)/(1-q),

with exp_1 = exp and log_1 = log recovered in the limit.  For q < 1 the
bracket clips to exact 0 at the support edge; for q > 1 the exponent
1/(1-q) is negative and the convention 0^a = +inf (a < 0) applies, so the
pole returns +inf as a value rather than raising.

The porous medium equation d/dt rho = Lap(rho^(2-q)) has the self-similar
solution

    rho(t, x) = [A - B |x|^2 t^(-2 alpha)]_+^(1/(1-q)) * t^(-d alpha),

whose profile is a q-Gaussian once A, B and the scale constant C are chosen
to normalize mass.  ``make_params`` evaluates that constant pipeline:

    alpha = 1 / (d (1-q) + 2),
    C1    = 2 / (2 + (d+2)(1-q)),
    B     = (1-q) alpha / (2 (2-q)),
    A     = C0^(2 alpha (1-q)) * (alpha / ((2-q) C1))^(d alpha (1-q)),
    C     = (2-q) C1 A / alpha,

with C0 the normalization of the unit-scale q-Gaussian (a Gamma-function
ratio).  Parameters are valid on Q_d = (0, 1) u (1, (d+4)/(d+2)), where
the solution has finite mass and second moments.

Gamma functions are evaluated with the 13-term rational Lanczos
approximation (g = 6.0246800407767296, the coefficient set used by Boost
and CPython), through log-gamma so that arguments of order 1e4 (q near 1)
stay representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DomainError",
    "QParams",
    "q_domain_upper",
    "in_q_domain",
    "q_exp",
    "q_log",
    "q_log_pow",
    "lgamma_pos",
    "gamma_pos",
    "gamma_ratio",
    "c1_const",
    "c0_const",
    "alpha_const",
    "make_params",
]


class DomainError(ValueError):
    """Raised when an argument leaves the domain a formula is valid on."""


# Lanczos approximation, g = 6.024680040776729583740234375, in the rational
# form num(x)/den(x) with both polynomials of degree 12 (coefficients in
# ascending powers).  The square root of 2 pi is folded into the numerator,
# and den(x) = x (x+1) ... (x+11).  Relative error of the resulting Gamma is
# a few ulp over the arguments used here (all >= 0.5).
_LANCZOS_G = 6.024680040776729583740234375

_LANCZOS_NUM = (
    23531376880.410759688572007674451636754734846804940,
    42919803642.649098768957899047001988850926355848959,
    35711959237.355668049440185451547166705960488635843,
    17921034426.037209699919755754458931112671403265390,
    6039542586.3520280050642916443072979210699388420708,
    1439720407.3117216736632230727949123939715485786772,
    248874557.86205415651146038641322942321632125127801,
    31426415.585400194380614231628318205362874684987640,
    2876370.6289353724412254090516208496135991145378768,
    186056.26539522349504029498971604569928220784236328,
    8071.6720023658162106380029022722506138218516325024,
    210.82427775157934587250973392071336271166969580291,
    2.5066282746310002701649081771338373386264310793408,
)

_LANCZOS_DEN = (
    0.0,
    39916800.0,
    120543840.0,
    150917976.0,
    105258076.0,
    45995730.0,
    13339535.0,
    2637558.0,
    357423.0,
    32670.0,
    1925.0,
    66.0,
    1.0,
)


def _lanczos_sum(x: float) -> float:
    num = 0.0
    den = 0.0
    if x < 5.0:
        for i in range(len(_LANCZOS_NUM) - 1, -1, -1):
            num = num * x + _LANCZOS_NUM[i]
            den = den * x + _LANCZOS_DEN[i]
    else:
        # Horner in 1/x: rescales num and den by x^(1-n) so large x cannot
        # overflow the partial sums.
        for i in range(len(_LANCZOS_NUM)):
            num = num / x + _LANCZOS_NUM[i]
            den = den / x + _LANCZOS_DEN[i]
    return num / den


def lgamma_pos(x: float) -> float:
    """ln Gamma(x) for x > 0 via the Lanczos sum.

    For 0 < x < 0.5 one recurrence step ln Gamma(x) = ln Gamma(x+1) - ln x
    keeps the approximation on its accurate range.
    """
    if not x > 0.0:
        raise DomainError(f"lgamma_pos requires x > 0, got {x!r}")
    if x < 0.5:
        return lgamma_pos(x + 1.0) - math.log(x)
    y = x + _LANCZOS_G - 0.5
    return math.log(_lanczos_sum(x)) - _LANCZOS_G + (x - 0.5) * (math.log(y) - 1.0)


def gamma_pos(x: float) -> float:
    """Gamma(x) for x > 0, +inf once past the double-precision range."""
    if not x > 0.0:
        raise DomainError(f"gamma_pos requires x > 0, got {x!r}")
    if x > 171.63:
        return math.inf
    if x < 0.5:
        return gamma_pos(x + 1.0) / x
    y = x + _LANCZOS_G - 0.5
    r = _lanczos_sum(x) / math.exp(y)
    if x < 140.0:
        r *= y ** (x - 0.5)
    else:
        # split the power so the intermediate stays finite up to x ~ 171.6
        half = y ** (x / 2.0 - 0.25)
        r *= half
        r *= half
    return r


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a)/Gamma(b) for a, b > 0, stable for large arguments."""
    return math.exp(lgamma_pos(a) - lgamma_pos(b))


def q_domain_upper(d: int) -> float:
    """Upper endpoint of the admissible exponent range Q_d."""
    return (d + 4.0) / (d + 2.0)


def in_q_domain(q: float, d: int) -> bool:
    """True iff q lies in Q_d = (0, 1) u (1, (d+4)/(d+2))."""
    return 0.0 < q < q_domain_upper(d) and q != 1.0


def q_exp(t: float, q: float) -> float:
    """Deformed exponential exp_q(t) = [1 + (1-q) t]_+^(1/(1-q)).

    Returns exact 0.0 beyond the support edge for q < 1 and +inf at (or
    beyond) the bracket pole for q > 1; overflow of the finite branch also
    saturates to +inf.  q = 1 falls back to exp.
    """
    if q == 1.0:
        try:
            return math.exp(t)
        except OverflowError:
            return math.inf
    om = 1.0 - q
    if 1.0 + om * t <= 0.0:
        return 0.0 if om > 0.0 else math.inf
    e = math.log1p(om * t) / om
    if e > 709.0:
        return math.inf
    return math.exp(e)


def q_log(t: float, q: float) -> float:
    """Deformed logarithm log_q(t) = (t^(1-q) - 1)/(1-q) for t > 0.

    Inverse of q_exp on (0, inf).  Computed as expm1((1-q) ln t)/(1-q) so
    values near t = 1 and q near 1 keep full relative precision.
    """
    if not t > 0.0:
        raise DomainError(f"q_log requires t > 0, got {t!r}")
    if q == 1.0:
        return math.log(t)
    om = 1.0 - q
    try:
        return math.expm1(om * math.log(t)) / om
    except OverflowError:
        return math.inf if om > 0.0 else -math.inf


def q_log_pow(x: float, p: float, q: float) -> float:
    """log_q(x^p) for x > 0, without forming the intermediate power.

    Equals expm1((1-q) p ln x)/(1-q); used where x^p would lose precision
    (p small) or overflow.
    """
    if not x > 0.0:
        raise DomainError(f"q_log_pow requires x > 0, got {x!r}")
    if q == 1.0:
        return p * math.log(x)
    om = 1.0 - q
    try:
        return math.expm1(om * p * math.log(x)) / om
    except OverflowError:
        return math.inf if om > 0.0 else -math.inf


def c1_const(q: float, d: int) -> float:
    """C1(q, d) = 2 / (2 + (d+2)(1-q)).

    Defined and positive for all q < (d+4)/(d+2), which is wider than Q_d:
    the small-step coefficient formulas evaluate it at the conjugate
    exponent m = 3 - 2/q, which can be <= 0.
    """
    den = 2.0 + (d + 2.0) * (1.0 - q)
    if not den > 0.0:
        raise DomainError(f"c1_const requires q < {(d + 4) / (d + 2)}, got q={q!r}")
    return 2.0 / den


def c0_const(q: float, d: int) -> float:
    """Normalization constant C0(q, d) of the unit-scale q-Gaussian.

        q < 1:  Gamma(z + d/2)/Gamma(z) * ((1-q) C1 / (2 pi))^(d/2),
                z = (2-q)/(1-q),
        q > 1:  Gamma(z)/Gamma(z - d/2) * ((q-1) C1 / (2 pi))^(d/2),
                z = 1/(q-1).

    Like c1_const this is evaluable on all q < (d+4)/(d+2) except q = 1
    (the Gamma arguments stay positive there), not only on Q_d.
    """
    if q == 1.0:
        raise DomainError("c0_const is not defined at q = 1")
    c1 = c1_const(q, d)
    if q < 1.0:
        z = (2.0 - q) / (1.0 - q)
        return gamma_ratio(z + d / 2.0, z) * ((1.0 - q) * c1 / (2.0 * math.pi)) ** (d / 2.0)
    z = 1.0 / (q - 1.0)
    return gamma_ratio(z, z - d / 2.0) * ((q - 1.0) * c1 / (2.0 * math.pi)) ** (d / 2.0)


def alpha_const(q: float, d: int) -> float:
    """Self-similar scaling exponent alpha = 1 / (d (1-q) + 2)."""
    den = d * (1.0 - q) + 2.0
    if not den > 0.0:
        raise DomainError(f"alpha_const requires q < 1 + 2/d, got q={q!r}")
    return 1.0 / den


@dataclass(frozen=True)
class QParams:
    """Exponent q, dimension d, and the derived profile constants.

    m is the conjugate exponent 3 - 2/q of the second-order formulation.
    Instances are built by make_params, which restricts q to Q_d; the
    cached constants re-evaluate from (q, d) alone.
    """

    q: float
    d: int
    m: float
    alpha: float
    c1_q_d: float
    c0_q_d: float
    A: float
    B: float
    C: float

    def __post_init__(self) -> None:
        if not (isinstance(self.d, int) and self.d >= 1):
            raise DomainError(f"d must be a positive integer, got {self.d!r}")
        if not in_q_domain(self.q, self.d):
            raise DomainError(
                f"q={self.q!r} outside Q_{self.d} = (0, 1) u (1, {q_domain_upper(self.d)!r})"
            )


def make_params(q: float, d: int) -> QParams:
    """Validate q in Q_d and evaluate the constant pipeline.

    Raises DomainError for q outside (0, 1) u (1, (d+4)/(d+2)) or d < 1.
    """
    if not (isinstance(d, int) and d >= 1):
        raise DomainError(f"d must be a positive integer, got {d!r}")
    if not in_q_domain(q, d):
        raise DomainError(
            f"q={q!r} outside Q_{d} = (0, 1) u (1, {q_domain_upper(d)!r})"
        )
    m = 3.0 - 2.0 / q
    alpha = alpha_const(q, d)
    c1 = c1_const(q, d)
    c0 = c0_const(q, d)
    om = 1.0 - q
    big_a = c0 ** (2.0 * alpha * om) * (alpha / ((2.0 - q) * c1)) ** (d * alpha * om)
    big_b = om * alpha / (2.0 * (2.0 - q))
    big_c = (2.0 - q) * c1 * big_a / alpha
    return QParams(q=q, d=d, m=m, alpha=alpha, c1_q_d=c1, c0_q_d=c0, A=big_a, B=big_b, C=big_c)
