"""Slot-level Monte Carlo oracle for the analytic loss formulas.

Per slot each transmitter enqueues Poisson arrivals (exponential lengths
against the buffer budget), draws its F fading coefficients, transmits
the head packet on the argmax channel when the max clears its threshold,
and the receiver tests SINR against the actual co-channel transmitters
(no Gamma approximation). Packets whose waiting age reaches the deadline
are dropped at slot end; a failed SINR discards the transmitted packet.

All randomness is pre-drawn from one seeded generator in a fixed order
(per node: arrival counts, packet lengths, then fading), so identical
seeds give bit-identical reports on either kernel backend.

The saturated traffic model replaces the queues with always-backlogged
sources. It isolates the channel and interference statistics, which is
the regime the analytic outage formula describes (its activity factors
are queue-blind transmission probabilities).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import sample_best_channel
from .errors import DomainError, ScenarioError
from .network import NetworkModel

_RING_SIZE = 1 << 14


@dataclass(frozen=True)
class SimConfig:
    """Run length, warmup, seed and traffic model of one simulation."""

    num_slots: int = 1_000_000
    warmup_slots: int = 10_000
    seed: int = 4242
    saturated: bool = False

    def __post_init__(self):
        if not self.num_slots > self.warmup_slots >= 0:
            raise DomainError("need num_slots > warmup_slots >= 0")


@dataclass(frozen=True)
class NodeStats:
    """Empirical per-session estimates with 95% CI half-widths."""

    mu: float
    mu_ci: float
    p_dly: float
    p_dly_ci: float
    p_ov: float
    p_ov_ci: float
    p_out: float
    p_out_ci: float
    r: float
    r_ci: float
    counts: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SimReport:
    nodes: dict[str, NodeStats]
    slots: int
    warmup: int
    seed: int
    saturated: bool
    per_transmission: bool
    flow_conserved: bool


def _ci_half(successes: int, trials: int) -> float:
    """95% binomial half-width with a continuity floor so it stays positive."""
    n = max(trials, 1)
    p = (successes + 0.5) / (n + 1.0)
    return 1.96 * math.sqrt(p * (1.0 - p) / n)


def simulate(scenario, beta, cfg: SimConfig) -> SimReport:
    """Run the slot-level oracle and return empirical loss estimates."""
    model = scenario if isinstance(scenario, NetworkModel) else NetworkModel(scenario)
    sc = model.scenario
    beta = model.validate_beta(beta)
    txs = model.transmitters
    n_tx = len(txs)
    slots = cfg.num_slots
    radio = sc.radio
    F = radio.num_channels

    w = np.zeros((n_tx, n_tx))
    for i, sid in enumerate(txs):
        own = model.own_link[sid]
        w[i, i] = radio.tx_power * own.path_gain * own.path_gain
        rx = model.receiver_of[sid]
        for m, mid in enumerate(txs):
            if mid == sid or mid == rx:
                continue
            cross = model.cross_link(mid, sid)
            w[m, i] = radio.tx_power * cross.path_gain * cross.path_gain

    beta_vec = np.array([beta[t] for t in txs])
    rng = np.random.default_rng(cfg.seed)
    arrivals = np.zeros((n_tx, slots), dtype=np.int16)
    best = np.empty((n_tx, slots))
    chan = np.empty((n_tx, slots), dtype=np.int8)
    lengths_parts = []
    len_off = np.zeros(n_tx + 1, dtype=np.int64)
    for i, sid in enumerate(txs):
        if not cfg.saturated:
            lam_slot = model.traffic[sid].load_per_slot
            arrivals[i] = rng.poisson(lam_slot, slots).astype(np.int16)
            lengths_parts.append(rng.exponential(1.0, int(arrivals[i].sum())))
            len_off[i + 1] = len_off[i] + lengths_parts[-1].size
        best[i], chan[i] = sample_best_channel(model.own_link[sid].fading,
                                               F, slots, rng)
    lengths = (np.concatenate(lengths_parts) if lengths_parts
               else np.zeros(1))

    # deadline and buffer budget are shared scenario traffic parameters;
    # per-node overrides are honored via the per-node columns below
    t_th_slots = np.array([
        int(round(model.traffic[t].t_th / model.traffic[t].t_slt)) for t in txs
    ])
    cap_len = np.array([model.traffic[t].b_eta for t in txs])

    stats = kernels.slot_loop(
        slots, cfg.warmup_slots, arrivals, lengths, len_off,
        best, chan, beta_vec, w,
        sc.interference.noise_power, sc.interference.gamma_th,
        t_th_slots, cap_len, cfg.saturated, _RING_SIZE,
    )

    meas_slots = slots - cfg.warmup_slots
    per_tx = sc.outage_per_transmission
    nodes = {}
    flow_ok = True
    for i, sid in enumerate(txs):
        (arr_f, ov_f, dl_f, tx_f, succ_f, out_f, queued, ring_ov,
         gate_m, arr_m, ov_m, dl_m, tx_m, succ_m, out_m) = stats[i]
        if not cfg.saturated and (
            ring_ov != 0 or arr_f != tx_f + ov_f + dl_f + queued
        ):
            flow_ok = False
        t_slt = model.traffic[sid].t_slt
        out_den = tx_m if per_tx else meas_slots
        nodes[sid] = NodeStats(
            mu=gate_m / meas_slots,
            mu_ci=_ci_half(gate_m, meas_slots),
            p_dly=dl_m / arr_m if arr_m else 0.0,
            p_dly_ci=_ci_half(dl_m, arr_m),
            p_ov=ov_m / arr_m if arr_m else 0.0,
            p_ov_ci=_ci_half(ov_m, arr_m),
            p_out=out_m / out_den if out_den else 0.0,
            p_out_ci=_ci_half(out_m, out_den),
            r=succ_m / meas_slots / t_slt,
            r_ci=_ci_half(succ_m, meas_slots) / t_slt,
            counts={
                "arrivals": int(arr_f), "overflow": int(ov_f),
                "deadline": int(dl_f), "transmissions": int(tx_f),
                "successes": int(succ_f), "outages": int(out_f),
                "queued_end": int(queued),
                "m_gate": int(gate_m), "m_arrivals": int(arr_m),
                "m_overflow": int(ov_m), "m_deadline": int(dl_m),
                "m_transmissions": int(tx_m), "m_successes": int(succ_m),
                "m_outages": int(out_m),
            },
        )
    return SimReport(
        nodes=nodes, slots=slots, warmup=cfg.warmup_slots, seed=cfg.seed,
        saturated=cfg.saturated, per_transmission=per_tx,
        flow_conserved=flow_ok,
    )
