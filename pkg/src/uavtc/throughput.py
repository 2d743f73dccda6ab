"""Composition of the three loss probabilities into expected throughput."""

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class LossBreakdown:
    """Per-session loss components and the resulting throughput.

    ``r_n`` is the first-order throughput the optimizers maximize;
    ``p_loss_exact`` keeps the exact composition observable so the
    first-order approximation gap is always visible in reports.
    """

    mu: float
    p_dly: float
    p_ov: float
    p_out: float
    p_loss_exact: float
    p_loss_first_order: float
    r_n: float
    flags: frozenset[str] = frozenset()


def loss_exact(p_dly: float, p_ov: float, p_out: float) -> float:
    """Overall loss: overflow, else late, else outage."""
    for name, p in (("p_dly", p_dly), ("p_ov", p_ov), ("p_out", p_out)):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"{name} must lie in [0,1], got {p!r}")
    return p_ov + (1.0 - p_ov) * p_dly + (1.0 - p_ov) * (1.0 - p_dly) * p_out


def compose(mu: float, p_dly: float, p_ov: float, p_out: float,
            lambda_n: float, unstable: bool) -> LossBreakdown:
    """Assemble a LossBreakdown from the three losses."""
    exact = loss_exact(p_dly, p_ov, p_out)
    first_order = min(1.0, p_dly + p_ov + p_out)
    r = lambda_n * (1.0 - first_order)
    flags = set()
    if unstable:
        flags.add("unstable")
    if r < 0.0 or p_dly + p_ov + p_out > 1.0:
        flags.add("clamped")
        r = max(r, 0.0)
    return LossBreakdown(
        mu=mu, p_dly=p_dly, p_ov=p_ov, p_out=p_out,
        p_loss_exact=exact, p_loss_first_order=first_order,
        r_n=r, flags=frozenset(flags),
    )


def expected_throughput(scenario_or_model, beta, source: str) -> LossBreakdown:
    """Loss breakdown of one source session under a threshold assignment.

    Accepts a Scenario or an already-built NetworkModel; ``beta`` maps
    node ids to thresholds (a PolicyVector works too).
    """
    from .network import NetworkModel

    model = (scenario_or_model if isinstance(scenario_or_model, NetworkModel)
             else NetworkModel(scenario_or_model))
    return model.loss_breakdown(source, beta)


def first_order_r(breakdown: LossBreakdown) -> float:
    return breakdown.r_n


def approximation_gap_bound(p_dly: float, p_ov: float, p_out: float) -> float:
    """Union-bound cross-term cap on |first-order - exact| loss."""
    return p_dly * p_ov + p_dly * p_out + p_ov * p_out
