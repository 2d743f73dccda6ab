"""Queue-side packet loss: deadline violation and buffer overflow.

Both formulas treat the per-slot transmission probability mu as a service
rate mu/t_slt. The delay tail is the M/M/1 sojourn exceedance; overflow
comes from a birth chain over buffer states whose stationary sum has the
closed form implemented here. Unstable regimes (offered load >= 1) return
loss 1 instead of raising, so optimizers can traverse them; callers flag
instability through is_unstable.
"""

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class TrafficParams:
    """Arrival, slotting and deadline/buffer parameters of one queue.

    b_eta is the buffer capacity measured in mean packet lengths (the
    capacity-times-length-rate product; only the product matters).
    """

    lambda_n: float = 80.0
    t_slt: float = 0.005
    t_th: float = 0.08
    b_eta: float = 100.0

    def __post_init__(self):
        for name in ("lambda_n", "t_slt", "t_th", "b_eta"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise DomainError(f"traffic parameter {name} must be positive, got {v!r}")
        if self.lambda_n * self.t_slt >= 1.0:
            raise DomainError(
                f"arrivals per slot {self.lambda_n * self.t_slt!r} must be < 1"
            )

    @property
    def load_per_slot(self) -> float:
        return self.lambda_n * self.t_slt


def offered_load(mu: float, tp: TrafficParams) -> float:
    """rho = lambda * t_slt / mu."""
    if mu <= 0.0:
        return math.inf
    return tp.load_per_slot / mu


def is_unstable(mu: float, tp: TrafficParams) -> bool:
    """True when no stationary backlog exists (offered load >= 1)."""
    return mu <= 0.0 or offered_load(mu, tp) >= 1.0


def p_delay(mu: float, tp: TrafficParams) -> float:
    """Probability a packet's delay exceeds the deadline.

    exp(-(mu/t_slt - lambda) * t_th), clamped to 1 whenever the service
    rate does not exceed the arrival rate (unstable queue).
    """
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mu must lie in [0,1], got {mu!r}")
    if mu == 0.0:
        return 1.0
    rate_margin = mu / tp.t_slt - tp.lambda_n
    if rate_margin <= 0.0:
        return 1.0
    return math.exp(-rate_margin * tp.t_th)


def p_overflow(mu: float, tp: TrafficParams) -> float:
    """Buffer overflow probability.

    ((1-rho) e^{-c(1-rho)}) / (1 - rho e^{-c(1-rho)}) with c = b_eta.
    Evaluated through expm1 so the 0/0 at rho -> 1 cancels analytically;
    the exact limit 1/(1+c) is used at rho == 1, and rho > 1 returns 1.
    """
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mu must lie in [0,1], got {mu!r}")
    if mu == 0.0:
        return 1.0
    rho = offered_load(mu, tp)
    if rho > 1.0:
        return 1.0
    c = tp.b_eta
    u = 1.0 - rho
    if u == 0.0:
        return 1.0 / (1.0 + c)
    # denominator 1 - rho e^{-cu} = -expm1(-cu) + u e^{-cu}, cancellation-free
    e = math.exp(-c * u)
    return u * e / (-math.expm1(-c * u) + u * e)


def markov_chain_pi(i: int, mu: float, tp: TrafficParams) -> float:
    """Unnormalized stationary weight of buffer state i (pi_0 = 1).

    rho^i times the probability that i-1 admissions did not overflow, via
    the Poisson(b_eta) partial sum. Used only to cross-validate the
    closed-form overflow probability by truncated summation.
    """
    if i < 0:
        raise DomainError(f"state index must be >= 0, got {i!r}")
    if i == 0:
        return 1.0
    rho = offered_load(mu, tp)
    return rho ** i * (1.0 - _poisson_cdf(i - 1, tp.b_eta))


def overflow_from_chain(mu: float, tp: TrafficParams,
                        tail_eps: float = 1e-15, max_states: int = 100_000) -> float:
    """Overflow probability by direct summation over the buffer chain.

    Truncates once the state weight drops below tail_eps. Serves as the
    independent oracle for the closed form in p_overflow.
    """
    rho = offered_load(mu, tp)
    if rho >= 1.0:
        raise DomainError("chain summation requires offered load < 1")
    c = tp.b_eta
    num = 0.0
    den = 0.0
    pmf = math.exp(-c)          # Poisson(c) pmf at j
    cdf_prev = 0.0              # Poisson cdf at i-1
    rho_i = 1.0
    for i in range(max_states):
        pi = rho_i * (1.0 - cdf_prev)
        # blocked-admission probability out of state i is pmf(i)/(1-cdf(i-1));
        # its product with pi collapses to rho^i * pmf(i)
        num += rho_i * pmf
        den += pi
        if pi < tail_eps and i > c:
            break
        cdf_prev += pmf
        pmf *= c / (i + 1)
        rho_i *= rho
    return num / den


def _poisson_cdf(k: int, m: float) -> float:
    if k < 0:
        return 0.0
    term = math.exp(-m)
    acc = term
    for j in range(1, k + 1):
        term *= m / j
        acc += term
    return min(acc, 1.0)
