"""Path loss, Rician/Rayleigh block fading, and the threshold-gated
transmission probability.

A node observes F i.i.d. fading coefficients per slot (one per channel),
transmits on the argmax channel iff the max clears its threshold beta, so
mu(beta) = 1 - CDF(beta)^F. The per-link Rician K factor blends between
the NLoS and LoS anchors through the line-of-sight probability.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sci_special

from .errors import DomainError, InfeasibleTrafficError
from .numerics import marcum_q1

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class RadioParams:
    """Radio-layer constants shared by every link of a scenario."""

    carrier_freq: float = 2.4e9
    d0: float = 10.0
    alpha_los: float = 2.0
    alpha_nlos: float = 3.5
    k_los: float = 15.0
    k_nlos: float = 1.0
    omega: float = 2.0
    num_channels: int = 14
    tx_power: float = 0.5

    def __post_init__(self):
        if self.d0 <= 0.0:
            raise DomainError("d0 must be positive")
        if not (self.alpha_nlos >= self.alpha_los > 0.0):
            raise DomainError("need alpha_nlos >= alpha_los > 0")
        if not (self.k_los >= self.k_nlos > 0.0):
            raise DomainError("need k_los >= k_nlos > 0")
        if self.omega <= 0.0:
            raise DomainError("omega must be positive")
        if self.num_channels < 1:
            raise DomainError("num_channels must be >= 1")
        if self.tx_power <= 0.0:
            raise DomainError("tx_power must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def ref_gain(self) -> float:
        """Squared amplitude gain at the reference distance."""
        lam = self.wavelength
        return lam * lam / (16.0 * math.pi * math.pi * self.d0 * self.d0)


@dataclass(frozen=True)
class Rician:
    """Rician amplitude fading with unit scatter variance; b = sqrt(2K)."""

    b: float

    @property
    def k_factor(self) -> float:
        return 0.5 * self.b * self.b


@dataclass(frozen=True)
class Rayleigh:
    """Rayleigh amplitude fading with mean-square omega."""

    omega: float


Fading = Rician | Rayleigh


@dataclass(frozen=True)
class LinkChannel:
    """Derived channel state of one transmitter-receiver path."""

    distance: float
    p_los: float
    path_gain: float            # amplitude (square root of path loss)
    fading: Fading
    link_type_source: str = "configured"   # or "threshold_rule"


def path_loss_exponent(p_los: float, rp: RadioParams) -> float:
    """LoS-probability blend of the two path loss exponents."""
    if not 0.0 <= p_los <= 1.0:
        raise DomainError(f"p_los must lie in [0,1], got {p_los!r}")
    return rp.alpha_los * p_los + rp.alpha_nlos * (1.0 - p_los)


def path_gain(d: float, alpha: float, rp: RadioParams) -> float:
    """Amplitude path gain sqrt(c (d0/d)^alpha); valid only for d >= d0."""
    if d < rp.d0:
        raise DomainError(
            f"distance {d!r} m is below the model's reference distance {rp.d0!r} m; "
            "clamp the geometry or reject the scenario"
        )
    return math.sqrt(rp.ref_gain * (rp.d0 / d) ** alpha)


def rician_k(p_los: float, rp: RadioParams) -> float:
    """Rician K factor blended exponentially between the NLoS and LoS anchors."""
    if not 0.0 <= p_los <= 1.0:
        raise DomainError(f"p_los must lie in [0,1], got {p_los!r}")
    return rp.k_nlos * math.exp(math.log(rp.k_los / rp.k_nlos) * p_los * p_los)


def fading_cdf(fam: Fading, x: float) -> float:
    """CDF of the per-channel fading amplitude."""
    if x < 0.0:
        raise DomainError(f"fading amplitude must be >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if isinstance(fam, Rayleigh):
        return -math.expm1(-x * x / fam.omega)
    return 1.0 - marcum_q1(fam.b, x)


def fading_pdf(fam: Fading, x: float) -> float:
    """Density of the per-channel fading amplitude."""
    if x < 0.0:
        raise DomainError(f"fading amplitude must be >= 0, got {x!r}")
    if isinstance(fam, Rayleigh):
        return 2.0 * x / fam.omega * math.exp(-x * x / fam.omega)
    # x e^{-(x^2+b^2)/2} I0(bx), stabilized through the scaled Bessel
    return x * math.exp(-0.5 * (x - fam.b) ** 2) * float(_sci_special.i0e(fam.b * x))


def fading_tail_cutoff(fam: Fading, F: int, eps: float = 1e-13) -> float:
    """Amplitude beyond which the max-of-F tail mass is below eps."""
    if isinstance(fam, Rayleigh):
        return math.sqrt(fam.omega * math.log(max(F, 1) / eps))
    return fam.b + math.sqrt(-2.0 * math.log(eps / max(F, 1)))


def transmit_prob(fam: Fading, beta: float, F: int) -> float:
    """Per-slot probability that the best of F channels clears beta."""
    if beta < 0.0:
        raise DomainError(f"threshold must be >= 0, got {beta!r}")
    if F < 1:
        raise DomainError(f"channel count must be >= 1, got {F!r}")
    if beta == 0.0:
        return 1.0
    return 1.0 - fading_cdf(fam, beta) ** F


def beta_upper_bound(fam: Fading, lambda_n: float, t_slt: float, F: int) -> float:
    """Largest threshold keeping the queue stabilizable (offered load <= 1).

    Rayleigh admits a closed form; the Rician bound is found by bisection
    on the monotone tail to 1e-8.
    """
    load = lambda_n * t_slt
    if not 0.0 < load < 1.0:
        raise InfeasibleTrafficError(
            f"arrivals per slot lambda_n*t_slt = {load!r} must lie in (0, 1); "
            "no threshold keeps the queue stable"
        )
    if F < 1:
        raise DomainError(f"channel count must be >= 1, got {F!r}")
    tail_target = 1.0 - (1.0 - load) ** (1.0 / F)
    if isinstance(fam, Rayleigh):
        return math.sqrt(-fam.omega * math.log(tail_target))
    lo, hi = 0.0, fam.b + 10.0
    while marcum_q1(fam.b, hi) > tail_target:
        hi += 10.0
    while hi - lo > 1e-8:
        mid = 0.5 * (lo + hi)
        if marcum_q1(fam.b, mid) > tail_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sample_fading(fam: Fading, normals: np.ndarray) -> np.ndarray:
    """Map standard-normal pairs (shape [..., 2]) to fading amplitudes."""
    g1 = normals[..., 0]
    g2 = normals[..., 1]
    if isinstance(fam, Rayleigh):
        return np.hypot(g1, g2) * math.sqrt(0.5 * fam.omega)
    return np.hypot(fam.b + g1, g2)


def sample_best_channel(fam: Fading, F: int, slots: int,
                        rng: np.random.Generator,
                        chunk: int = 65536) -> tuple[np.ndarray, np.ndarray]:
    """Per-slot best fading amplitude and its channel index.

    Draws F coefficients per slot (two normals each) and reduces to the
    max and argmax; chunked to bound memory. Deterministic given the
    generator state.
    """
    best = np.empty(slots, dtype=np.float64)
    chan = np.empty(slots, dtype=np.int8)
    done = 0
    while done < slots:
        n = min(chunk, slots - done)
        x = sample_fading(fam, rng.standard_normal((n, F, 2)))
        best[done:done + n] = x.max(axis=1)
        chan[done:done + n] = x.argmax(axis=1).astype(np.int8)
        done += n
    return best, chan
