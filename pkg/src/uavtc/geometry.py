"""Node placement and the blockage-driven line-of-sight probability model."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import qfunc


@dataclass(frozen=True)
class NodePosition:
    """A node's location in meters; z is height above ground."""

    x: float
    y: float
    z: float
    node_id: str = ""

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"coordinate {name} must be finite, got {v!r}")
        if self.z < 0.0:
            raise DomainError(f"height must be non-negative, got {self.z!r}")


@dataclass(frozen=True)
class Environment:
    """Blockage statistics of the deployment area.

    zeta is the structure-height scale, v the structure density per square
    meter, mu_env the width-to-spacing mix, area_side the square side length.
    """

    zeta: float = 20.0
    v: float = 3e-4
    mu_env: float = 0.5
    area_side: float = 100.0

    def __post_init__(self):
        for name in ("zeta", "v", "mu_env", "area_side"):
            val = getattr(self, name)
            if not (val > 0.0 and math.isfinite(val)):
                raise DomainError(f"environment parameter {name} must be positive, got {val!r}")


def distances(tx: NodePosition, rx: NodePosition) -> tuple[float, float, float]:
    """Horizontal, vertical and total distance between two nodes."""
    d_h = math.hypot(tx.x - rx.x, tx.y - rx.y)
    d_v = abs(tx.z - rx.z)
    return d_h, d_v, math.hypot(d_h, d_v)


def p_los(tx: NodePosition, rx: NodePosition, env: Environment) -> float:
    """Probability that the tx-rx path is line-of-sight.

    Two branches: equal heights use the total distance against the
    structure-height distribution; unequal heights weight the Gaussian
    tail difference of the two endpoint heights by the inverse vertical
    separation. Height equality is tested exactly (scenario files state
    heights exactly), and the base is clamped into [0, 1] because the
    tail-difference term can exceed the unit interval for small vertical
    separations.
    """
    d_h, d_v, d = distances(tx, rx)
    scale = math.sqrt(env.v * env.mu_env)
    if tx.z == rx.z:
        if d == 0.0:
            return 1.0
        base = 1.0 - math.exp(-tx.z * tx.z / (2.0 * env.zeta * env.zeta))
        exponent = d * scale
    else:
        # d_v > 0 here since heights differ
        diff = abs(qfunc(tx.z / env.zeta) - qfunc(rx.z / env.zeta))
        base = 1.0 - math.sqrt(2.0 * math.pi) * env.zeta / d_v * diff
        base = min(max(base, 0.0), 1.0)
        exponent = d_h * scale
    if exponent == 0.0:
        return 1.0
    if base == 0.0:
        return 0.0
    return base ** exponent


def place_nodes(count: int, env: Environment, seed: int,
                fixed: list[NodePosition] | None = None,
                ground_height: float = 1.5,
                min_spacing: float = 0.0) -> list[NodePosition]:
    """Drop ``count`` nodes uniformly in the square area, deterministically.

    ``fixed`` entries pass through unchanged and count toward the total.
    Remaining nodes are placed i.i.d. uniform (the conditional law of a
    Poisson process given its count) at ``ground_height``. A positive
    ``min_spacing`` rejection-resamples any point closer than that to an
    already placed one.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count!r}")
    fixed = list(fixed or [])
    if len(fixed) > count:
        raise DomainError("more fixed positions than the requested count")
    rng = np.random.default_rng(seed)
    out = list(fixed)
    idx = 0
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 10_000 * count:
            raise DomainError("min_spacing too large for the area; placement failed")
        x, y = rng.uniform(0.0, env.area_side, size=2)
        cand = NodePosition(float(x), float(y), ground_height, f"n{idx}")
        if min_spacing > 0.0 and any(
            distances(cand, other)[2] < min_spacing for other in out
        ):
            continue
        out.append(cand)
        idx += 1
    return out
