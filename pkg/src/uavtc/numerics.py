"""Special functions and adaptive quadrature used by the analytic formulas.

Kept free of any network semantics so accuracy can be tested in isolation.
All functions are pure and safe for concurrent use.
"""

import math
import warnings
from dataclasses import dataclass

from scipy import integrate as _sci_integrate
from scipy import special as _sci_special

from .errors import DomainError, NumericalError

_INF = float("inf")

# Switch from the Poisson-weighted series to direct quadrature once the
# series' leading exponent would underflow double precision.
_SERIES_EXPONENT_LIMIT = 600.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and subdivision budget for adaptive quadrature."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise DomainError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


DEFAULT_QUAD = QuadratureSpec()


def _check_finite(name, x):
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")


def bessel_i0(x: float) -> float:
    """Modified Bessel function of the first kind, order zero."""
    _check_finite("x", x)
    if x < 0.0:
        raise DomainError(f"bessel_i0 requires x >= 0, got {x!r}")
    return float(_sci_special.i0(x))


def qfunc(x: float) -> float:
    """Gaussian tail probability Q(x), via the complementary error function."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def marcum_q1(a: float, b: float) -> float:
    """First-order Marcum Q function, the Rician amplitude tail probability.

    Computed by the Poisson-weighted series over regularized gamma tails;
    for arguments large enough to underflow the series weights it falls
    back to direct quadrature of the Rician density.
    """
    _check_finite("a", a)
    _check_finite("b", b)
    if a < 0.0 or b < 0.0:
        raise DomainError(f"marcum_q1 requires a, b >= 0, got a={a!r}, b={b!r}")
    if b == 0.0:
        return 1.0
    ma = 0.5 * a * a
    mb = 0.5 * b * b
    if ma > _SERIES_EXPONENT_LIMIT or mb > _SERIES_EXPONENT_LIMIT:
        return _marcum_q1_quadrature(a, b)
    if a == 0.0:
        return math.exp(-mb)

    # t_k: Poisson(ma) pmf; s_k: Poisson(mb) cdf at k. Remaining mass of
    # t caps the truncation error because s_k <= 1.
    t = math.exp(-ma)
    p = math.exp(-mb)
    s = p
    acc = t * s
    t_cum = t
    k = 0
    while 1.0 - t_cum > 1e-16 and k < 100_000:
        k += 1
        t *= ma / k
        p *= mb / k
        s += p
        acc += t * s
        t_cum += t
    return min(1.0, acc)


def _marcum_q1_quadrature(a: float, b: float) -> float:
    """Tail integral of the Rician density, stabilized with the scaled Bessel."""

    def density(x):
        # x * exp(-(x^2+a^2)/2) * I0(ax) without overflow in I0
        return x * _sci_special.i0e(a * x) * math.exp(-0.5 * (x - a) ** 2)

    hi = max(a, b) + 40.0
    if b >= hi:
        return 0.0
    return min(1.0, integrate(density, b, hi, DEFAULT_QUAD))


def reg_lower_gamma(k: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(k, x)."""
    _check_finite("k", k)
    _check_finite("x", x)
    if k <= 0.0:
        raise DomainError(f"reg_lower_gamma requires k > 0, got {k!r}")
    if x < 0.0:
        raise DomainError(f"reg_lower_gamma requires x >= 0, got {x!r}")
    return float(_sci_special.gammainc(k, x))


def _truncate_upper(f, lo: float, abs_tol: float) -> float:
    """Find a finite cutoff where the integrand envelope has died out."""
    floor = min(abs_tol, 1e-12)
    t = max(2.0 * abs(lo), lo + 1.0, 1.0)
    for _ in range(64):
        if all(abs(f(t * (1.0 + 0.1 * j))) < floor for j in range(3)):
            return t * 1.2
        t *= 2.0
    return t


def integrate(f, lo: float, hi: float, spec: QuadratureSpec = DEFAULT_QUAD,
              points=None) -> float:
    """Adaptive quadrature of ``f`` over (lo, hi); hi may be +inf.

    Semi-infinite ranges are truncated where the integrand envelope falls
    below the absolute tolerance (the fading tails decay like exp(-x^2/2),
    so the truncation error is negligible at the stated tolerances).
    ``points`` may list interior break points (e.g. kinks) to help the
    subdivision. Raises NumericalError carrying the best estimate if the
    subdivision budget is exhausted.
    """
    if not lo < hi:
        raise DomainError(f"integrate requires lo < hi, got [{lo!r}, {hi!r}]")
    if math.isinf(hi):
        hi = _truncate_upper(f, lo, spec.abs_tol)
    if points is not None:
        points = [p for p in points if lo < p < hi] or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _sci_integrate.IntegrationWarning)
        out = _sci_integrate.quad(
            f, lo, hi,
            epsabs=spec.abs_tol, epsrel=spec.rel_tol,
            limit=spec.max_subdivisions, points=points, full_output=1,
        )
    value, abserr = float(out[0]), float(out[1])
    if len(out) >= 4:
        # a fourth element is quad's explanation of a failed tolerance
        tol = max(spec.abs_tol, spec.rel_tol * abs(value))
        if abserr > 10.0 * tol:
            raise NumericalError(
                f"quadrature did not converge: {str(out[3]).splitlines()[0]}",
                best_estimate=value,
            )
    return value
