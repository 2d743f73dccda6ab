"""Aggregate co-channel interference at a receiver: Monte Carlo moment
estimation, two-moment Gamma matching, and the outage probability integral.

Per slot an interferer transmits iff the max of its F fading draws clears
its threshold, lands on the tagged channel with probability 1/F (the
argmax is uniform by symmetry), and then contributes tx_power * gain^2 *
max^2. Each interferer draws from its own seeded substream, so estimates
are reproducible bit-for-bit and, crucially, monotone in the thresholds
under common random numbers.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .channel import (
    Fading,
    LinkChannel,
    Rayleigh,
    Rician,
    fading_cdf,
    fading_pdf,
    fading_tail_cutoff,
    sample_best_channel,
    transmit_prob,
)
from .errors import DegenerateFitError, DomainError
from .numerics import DEFAULT_QUAD, QuadratureSpec, integrate, reg_lower_gamma


@dataclass(frozen=True)
class InterferenceModel:
    """SINR threshold, thermal noise and moment-estimation settings."""

    gamma_th: float = 10.0
    noise_power: float = 8.00776e-14     # k_B * 290 K * 20 MHz
    moment_samples: int = 100_000
    moment_seed: int = 777

    def __post_init__(self):
        if self.gamma_th <= 0.0:
            raise DomainError("gamma_th must be positive")
        if self.noise_power <= 0.0:
            raise DomainError("noise_power must be positive")
        if self.moment_samples < 1:
            raise DomainError("moment_samples must be positive")


@dataclass(frozen=True)
class GammaFit:
    """Moment-matched Gamma parameters of the aggregate interference."""

    shape: float
    scale: float


def thermal_noise(temperature_k: float = 290.0, bandwidth_hz: float = 20e6) -> float:
    """kTW thermal noise power in watts."""
    return 1.380649e-23 * temperature_k * bandwidth_hz


@lru_cache(maxsize=256)
def _draw_tables(fam: Fading, F: int, samples: int, seed: int, key: int):
    """Per-interferer draw tables (best amplitude, tagged-channel hit).

    The substream is keyed by (seed, key) so an interferer keeps its draws
    when the surrounding set changes; memoized because the tables are
    reused across every threshold the optimizer probes.
    """
    rng = np.random.default_rng([seed, key])
    best, chan = sample_best_channel(fam, F, samples, rng)
    hit = chan == 0
    best.setflags(write=False)
    hit.setflags(write=False)
    return best, hit


def sample_interference(links, betas, F: int, samples: int, seed: int,
                        tx_power, stream_keys=None) -> np.ndarray:
    """Sampled aggregate interference on the tagged channel, one value per draw.

    ``links`` carry each interferer's path gain toward the tagged receiver
    and its own-link fading (the coefficient a node transmits with is the
    one its own threshold test selected). ``tx_power`` may be a scalar or
    one value per interferer; ``stream_keys`` pins substream identities
    (defaults to list position).
    """
    if samples < 1:
        raise DomainError("samples must be positive")
    links = list(links)
    betas = list(betas)
    if len(links) != len(betas):
        raise DomainError("links and betas must have equal length")
    powers = [float(tx_power)] * len(links) if np.isscalar(tx_power) else list(tx_power)
    keys = list(range(len(links))) if stream_keys is None else list(stream_keys)
    out = np.zeros(samples)
    for link, beta, p, key in zip(links, betas, powers, keys):
        if beta < 0.0:
            raise DomainError(f"interferer threshold must be >= 0, got {beta!r}")
        best, hit = _draw_tables(link.fading, F, samples, seed, key)
        weight = p * link.path_gain * link.path_gain
        kernels.interference_accumulate(out, best, hit, beta, weight)
    return out


def interference_moments(links, betas, F: int, samples: int, seed: int,
                         tx_power, stream_keys=None) -> tuple[float, float]:
    """First two raw moments (E[I], E[I^2]) of the sampled interference."""
    if not links:
        return 0.0, 0.0
    i_samples = sample_interference(links, betas, F, samples, seed,
                                    tx_power, stream_keys)
    return float(i_samples.mean()), float((i_samples * i_samples).mean())


def active_probability(links, betas, F: int) -> float:
    """Probability at least one interferer occupies the tagged channel."""
    idle = 1.0
    for link, beta in zip(links, betas):
        idle *= 1.0 - transmit_prob(link.fading, beta, F) / F
    return 1.0 - idle


def gamma_fit(m1: float, m2: float) -> GammaFit | None:
    """Match a Gamma distribution to the raw moment pair.

    Returns None for a zero mean (the no-interference path); raises for a
    degenerate variance.
    """
    if m1 < 0.0 or m2 < 0.0:
        raise DomainError("moments must be non-negative")
    if m1 == 0.0:
        return None
    var = m2 - m1 * m1
    if var <= 0.0:
        raise DegenerateFitError(
            f"moment pair (m1={m1!r}, m2={m2!r}) has non-positive variance"
        )
    return GammaFit(shape=m1 * m1 / var, scale=var / m1)


def interference_ccdf(x: float, k: float, theta: float) -> float:
    """Tail probability of the fitted Gamma; 1 for x <= 0.

    Non-positive arguments mean even zero interference fails the SINR
    inequality, so the exceedance event is certain.
    """
    if k <= 0.0 or theta <= 0.0:
        raise DomainError("Gamma parameters must be positive")
    if x <= 0.0:
        return 1.0
    return 1.0 - reg_lower_gamma(k, x / theta)


def p_outage(source_link: LinkChannel, beta_n: float, im: InterferenceModel,
             fit: GammaFit | None, quad: QuadratureSpec = DEFAULT_QUAD, *,
             F: int, tx_power: float, per_transmission: bool = False) -> float:
    """Probability a transmitted packet fails the SINR test.

    Integrates the best-of-F fading density of the source link over the
    transmit region [beta_n, inf), weighting by the fitted interference
    tail at the power the fading level leaves available. Per-slot by
    default (mass bounded by the transmit probability); the
    per-transmission convention divides by it.
    """
    if beta_n < 0.0:
        raise DomainError(f"threshold must be >= 0, got {beta_n!r}")
    fam = source_link.fading
    w = tx_power * source_link.path_gain * source_link.path_gain
    x0 = math.sqrt(im.gamma_th * im.noise_power / w)
    hi = fading_tail_cutoff(fam, F)
    if beta_n >= hi:
        return 0.0

    def max_cdf(x):
        return fading_cdf(fam, x) ** F

    if fit is None:
        # noise-only: the SINR fails exactly when the fading sits below x0
        if x0 <= beta_n:
            out = 0.0
        else:
            out = max_cdf(min(x0, hi)) - max_cdf(beta_n)
    else:
        s = w / im.gamma_th

        def integrand(x):
            y = s * x * x - im.noise_power
            v = interference_ccdf(y, fit.shape, fit.scale)
            return F * fading_cdf(fam, x) ** (F - 1) * fading_pdf(fam, x) * v

        out = integrate(integrand, beta_n, hi, quad, points=[x0])
        out = min(max(out, 0.0), 1.0)
    if per_transmission:
        mu = transmit_prob(fam, beta_n, F)
        out = out / mu if mu > 0.0 else 0.0
    return out
