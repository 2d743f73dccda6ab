"""Scenario-derived network model: per-session links, cross-path weights,
interference fits, and the per-session loss breakdown the optimizers probe.

A node transmits iff it has a link target. Interferers of a session are
all other transmitters except the session's receiver (a node does not
interfere with its own reception). The coefficient an interferer applies
on every path is the one its own threshold test selected, so interference
links pair the cross-path gain with the interferer's own-link fading.
"""

import math

from .channel import (
    LinkChannel,
    Rayleigh,
    Rician,
    beta_upper_bound,
    path_gain,
    path_loss_exponent,
    rician_k,
    transmit_prob,
)
from .errors import ScenarioError
from .geometry import distances, p_los
from .interference import gamma_fit, interference_moments, p_outage
from .numerics import DEFAULT_QUAD
from .queueing import is_unstable, p_delay, p_overflow
from .throughput import LossBreakdown, compose

# fit-cache key resolution; at or below a tenth of every search step in use
BETA_QUANTUM = 1e-3


class NetworkModel:
    """Derived state of one scenario, with memoized interference fits."""

    def __init__(self, scenario):
        self.scenario = scenario
        env = scenario.environment
        radio = scenario.radio
        self.nodes = {n.node_id: n for n in scenario.nodes}
        if len(self.nodes) != len(scenario.nodes):
            raise ScenarioError("duplicate node ids in scenario")
        self._node_index = {n.node_id: i for i, n in enumerate(scenario.nodes)}

        self.transmitters = [n.node_id for n in scenario.nodes if n.link_target]
        if not self.transmitters:
            raise ScenarioError("scenario has no transmitting node")
        self.receiver_of = {}
        self.own_link = {}
        self.traffic = {}
        self.bounds = {}
        for tid in self.transmitters:
            spec = self.nodes[tid]
            if spec.link_target not in self.nodes:
                raise ScenarioError(
                    f"node {tid!r} links to unknown node {spec.link_target!r}"
                )
            if spec.link_target == tid:
                raise ScenarioError(f"node {tid!r} links to itself")
            self.receiver_of[tid] = spec.link_target
            self.own_link[tid] = self._build_link(tid, spec.link_target,
                                                  fading_cfg=spec.fading)
            self.traffic[tid] = scenario.traffic_for(tid)
            tp = self.traffic[tid]
            self.bounds[tid] = beta_upper_bound(
                self.own_link[tid].fading, tp.lambda_n, tp.t_slt,
                radio.num_channels,
            )

        # cross-path amplitude gains m -> receiver(session), built lazily
        self._cross_gain = {}
        self._fit_cache = {}
        del env

    # -- construction helpers -------------------------------------------

    def _build_link(self, tx_id: str, rx_id: str,
                    fading_cfg: str | None = None,
                    fading=None) -> LinkChannel:
        env = self.scenario.environment
        radio = self.scenario.radio
        tx = self.nodes[tx_id].position
        rx = self.nodes[rx_id].position
        _, _, d = distances(tx, rx)
        if d < radio.d0:
            raise ScenarioError(
                f"link {tx_id!r} -> {rx_id!r} is {d:.3f} m long, below the "
                f"path loss reference distance {radio.d0!r} m"
            )
        pl = p_los(tx, rx, env)
        alpha = path_loss_exponent(pl, radio)
        gain = path_gain(d, alpha, radio)
        source = "configured"
        if fading is None:
            cfg = fading_cfg or "auto"
            if cfg == "auto":
                cfg = "rician" if pl >= 0.5 else "rayleigh"
                source = "threshold_rule"
            if cfg == "rician":
                fading = Rician(b=math.sqrt(2.0 * rician_k(pl, radio)))
            elif cfg == "rayleigh":
                fading = Rayleigh(omega=radio.omega)
            else:
                raise ScenarioError(f"unknown fading family {cfg!r} on node {tx_id!r}")
        return LinkChannel(distance=d, p_los=pl, path_gain=gain,
                           fading=fading, link_type_source=source)

    # -- lookups ---------------------------------------------------------

    @property
    def source_id(self) -> str:
        sources = [n.node_id for n in self.scenario.nodes if n.role == "source"]
        if len(sources) != 1:
            raise ScenarioError(
                f"expected exactly one source node, found {len(sources)}"
            )
        return sources[0]

    def interferers_of(self, session: str) -> list[str]:
        rx = self.receiver_of[session]
        return [m for m in self.transmitters if m != session and m != rx]

    def cross_link(self, m: str, session: str) -> LinkChannel:
        """Path gain m -> receiver(session), carrying m's own-link fading."""
        rx = self.receiver_of[session]
        key = (m, rx)
        if key not in self._cross_gain:
            self._cross_gain[key] = self._build_link(
                m, rx, fading=self.own_link[m].fading
            )
        return self._cross_gain[key]

    def validate_beta(self, beta) -> dict[str, float]:
        """Check a threshold assignment against the per-node bounds."""
        beta = dict(getattr(beta, "beta", beta))
        out = {}
        for tid in self.transmitters:
            if tid not in beta:
                raise ScenarioError(f"threshold assignment is missing node {tid!r}")
            b = float(beta[tid])
            hi = self.bounds[tid]
            if not 0.0 <= b <= hi + 1e-12:
                raise ScenarioError(
                    f"threshold {b!r} for node {tid!r} violates its bound "
                    f"[0, {hi:.6f}]"
                )
            out[tid] = min(b, hi)
        return out

    # -- interference and the objective ----------------------------------

    def gamma_fit_for(self, session: str, beta) -> object | None:
        """Moment-matched interference fit at the session's receiver.

        Cached on the quantized interferer thresholds; draws ride on
        per-node substreams so the estimate is monotone in each threshold.
        """
        beta = dict(getattr(beta, "beta", beta))
        ints = self.interferers_of(session)
        if not ints:
            return None
        key = (session, tuple(round(beta[m] / BETA_QUANTUM) for m in ints))
        if key not in self._fit_cache:
            im = self.scenario.interference
            links = [self.cross_link(m, session) for m in ints]
            betas = [beta[m] for m in ints]
            keys = [self._node_index[m] for m in ints]
            m1, m2 = interference_moments(
                links, betas, self.scenario.radio.num_channels,
                im.moment_samples, im.moment_seed,
                self.scenario.radio.tx_power, stream_keys=keys,
            )
            self._fit_cache[key] = gamma_fit(m1, m2)
        return self._fit_cache[key]

    def loss_breakdown(self, session: str, beta) -> LossBreakdown:
        """All loss components and throughput of one session."""
        if session not in self.receiver_of:
            raise ScenarioError(f"node {session!r} is not a transmitter")
        beta = self.validate_beta(beta)
        radio = self.scenario.radio
        link = self.own_link[session]
        tp = self.traffic[session]
        b_n = beta[session]
        mu = transmit_prob(link.fading, b_n, radio.num_channels)
        dly = p_delay(mu, tp)
        ov = p_overflow(mu, tp)
        fit = self.gamma_fit_for(session, beta)
        out = p_outage(
            link, b_n, self.scenario.interference, fit, DEFAULT_QUAD,
            F=radio.num_channels, tx_power=radio.tx_power,
            per_transmission=self.scenario.outage_per_transmission,
        )
        return compose(mu, dly, ov, out, tp.lambda_n,
                       unstable=is_unstable(mu, tp))

    def session_r(self, session: str, beta) -> float:
        """First-order expected throughput of one session."""
        return self.loss_breakdown(session, beta).r_n
