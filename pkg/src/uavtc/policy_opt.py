"""Threshold optimization: centralized coordinate descent over grouped
coordinates, consensus rounds of local best responses, and the four
baseline policies.

Coordinate moves are greedy: probe one step in each direction (projected
onto the bounds), follow the strictly improving direction until
improvement stops. Ties keep the incumbent, which makes every run
deterministic; with the seeded interference draws the whole optimization
is a pure function of (scenario, config).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import Rayleigh, Rician
from .errors import DomainError, ScenarioError


@dataclass(frozen=True)
class BetaInit:
    """Starting point of the centralized search, one value per coordinate."""

    rice: float = 3.0
    ray: float = 2.0
    source: float = 4.0


@dataclass(frozen=True)
class OptimizerConfig:
    """Step sizes, iteration caps and stopping tolerances."""

    beta_ini: BetaInit = BetaInit()
    stp_m: float = 0.05          # interferer-group step (centralized)
    stp_n: float = 0.02          # source step (centralized)
    stp: float = 0.05            # per-node step (distributed)
    maxiter: int = 100
    epsilon_r: float = 1e-4      # throughput tolerance, packets/s
    epsilon_beta: float = 1e-3   # threshold tolerance, infinity norm
    beta_max_rice: float | None = None   # optional group caps
    beta_max_ray: float | None = None
    gauss_seidel: bool = False   # sequential instead of snapshot updates

    def __post_init__(self):
        for name in ("stp_m", "stp_n", "stp", "epsilon_r", "epsilon_beta"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"optimizer parameter {name} must be positive")
        if self.maxiter < 1:
            raise DomainError("maxiter must be at least 1")


@dataclass
class PolicyVector:
    """Per-node thresholds with their feasibility bounds."""

    beta: dict[str, float]
    bounds: dict[str, tuple[float, float]]

    def validate(self):
        for nid, b in self.beta.items():
            lo, hi = self.bounds[nid]
            if not lo <= b <= hi + 1e-12:
                raise ScenarioError(
                    f"threshold {b!r} for node {nid!r} violates its bound "
                    f"[{lo}, {hi:.6f}]"
                )
        return self

    def updated(self, changes: dict[str, float]) -> "PolicyVector":
        beta = dict(self.beta)
        beta.update(changes)
        return PolicyVector(beta, self.bounds)


@dataclass(frozen=True)
class Coordinate:
    """One search axis: a shared value over one or more node ids."""

    ids: tuple[str, ...]
    lo: float
    hi: float

    def get(self, pv: PolicyVector) -> float:
        return pv.beta[self.ids[0]]

    def set(self, pv: PolicyVector, value: float) -> PolicyVector:
        return pv.updated({nid: value for nid in self.ids})


@dataclass
class TraceRow:
    iteration: int
    beta: dict[str, float]
    r: object                    # float (centralized) or dict per node


@dataclass
class OptimizerTrace:
    rows: list[TraceRow] = field(default_factory=list)
    final: PolicyVector | None = None
    r_best: float = math.nan
    converged: bool = False
    iterations: int = 0


def _project(x: float, coord: Coordinate) -> float:
    return min(max(x, coord.lo), coord.hi)


def coordinate_search(objective, coord: Coordinate, stp: float,
                      pv: PolicyVector, r_best: float,
                      max_steps: int | None = None):
    """Greedy line search along one coordinate.

    Probes one projected step each way, walks the strictly improving
    direction, and never returns a value below the incoming incumbent.
    """
    if max_steps is None:
        max_steps = int(math.ceil((coord.hi - coord.lo) / stp)) + 4
    x = coord.get(pv)
    best_step = 0.0
    best_r = r_best
    for s in (stp, -stp):
        xn = _project(x + s, coord)
        if xn == x:
            continue
        r = objective(coord.set(pv, xn))
        if r > best_r:
            best_r = r
            best_step = s
    if best_step == 0.0:
        return pv, r_best
    direction = best_step
    x = _project(x + direction, coord)
    pv = coord.set(pv, x)
    r_best = best_r
    for _ in range(max_steps):
        xn = _project(x + direction, coord)
        if xn == x:
            break
        r = objective(coord.set(pv, xn))
        if r <= r_best:
            break
        x = xn
        pv = coord.set(pv, x)
        r_best = r
    return pv, r_best


def _memoized_session_objective(model, session: str):
    order = model.transmitters
    cache = {}

    def objective(pv: PolicyVector) -> float:
        key = tuple(pv.beta[t] for t in order)
        if key not in cache:
            cache[key] = model.session_r(session, pv.beta)
        return cache[key]

    return objective


def interferer_groups(model, source: str) -> tuple[list[str], list[str]]:
    """Rician and Rayleigh interferer id lists for the grouped search."""
    rice, ray = [], []
    for m in model.interferers_of(source):
        fam = model.own_link[m].fading
        (rice if isinstance(fam, Rician) else ray).append(m)
    return rice, ray


def group_cap(model, ids: list[str], configured: float | None) -> float:
    """Smallest member bound, optionally tightened by a configured cap."""
    cap = min(model.bounds[m] for m in ids)
    if configured is not None:
        cap = min(cap, configured)
    return cap


def ia_tc(model, cfg: OptimizerConfig, source: str | None = None) -> OptimizerTrace:
    """Centralized coordinate descent on the source session's throughput.

    Three coordinate axes: a shared threshold over Rician interferers, a
    shared one over Rayleigh interferers, then the source's own. Each
    iteration sweeps the axes in that order, skipping a group already at
    its cap; stops once an iteration improves throughput by less than
    epsilon_r.
    """
    source = source or model.source_id
    rice_ids, ray_ids = interferer_groups(model, source)
    objective = _memoized_session_objective(model, source)

    bounds = {t: (0.0, model.bounds[t]) for t in model.transmitters}
    beta = {}
    coords = {}
    ini = cfg.beta_ini
    if rice_ids:
        cap = group_cap(model, rice_ids, cfg.beta_max_rice)
        if ini.rice > cap:
            raise ScenarioError(
                f"initial Rician group threshold {ini.rice!r} exceeds the "
                f"group cap {cap:.6f}"
            )
        coords["rice"] = Coordinate(tuple(rice_ids), 0.0, cap)
        beta.update({m: ini.rice for m in rice_ids})
    if ray_ids:
        cap = group_cap(model, ray_ids, cfg.beta_max_ray)
        if ini.ray > cap:
            raise ScenarioError(
                f"initial Rayleigh group threshold {ini.ray!r} exceeds the "
                f"group cap {cap:.6f}"
            )
        coords["ray"] = Coordinate(tuple(ray_ids), 0.0, cap)
        beta.update({m: ini.ray for m in ray_ids})
    src_hi = model.bounds[source]
    if ini.source > src_hi:
        raise ScenarioError(
            f"initial source threshold {ini.source!r} exceeds its bound "
            f"{src_hi:.6f}"
        )
    coords["source"] = Coordinate((source,), 0.0, src_hi)
    beta[source] = ini.source
    # transmitters outside the groups and source keep their bound (silent)
    for t in model.transmitters:
        beta.setdefault(t, model.bounds[t])

    pv = PolicyVector(beta, bounds).validate()
    r_best = objective(pv)
    trace = OptimizerTrace()
    trace.rows.append(TraceRow(0, dict(pv.beta), r_best))
    iterations = 0
    for it in range(1, cfg.maxiter + 1):
        iterations = it
        r_prev = r_best
        for name in ("rice", "ray", "source"):
            coord = coords.get(name)
            if coord is None:
                continue
            if name != "source" and coord.get(pv) >= coord.hi:
                continue          # group already at its cap
            pv, r_best = coordinate_search(objective, coord,
                                           cfg.stp_n if name == "source" else cfg.stp_m,
                                           pv, r_best)
        trace.rows.append(TraceRow(it, dict(pv.beta), r_best))
        if abs(r_prev - r_best) < cfg.epsilon_r:
            trace.converged = True
            break
    trace.final = pv
    trace.r_best = r_best
    trace.iterations = iterations
    return trace


def local_coordinate_search(model, node: str, pv: PolicyVector,
                            stp: float, maxiter: int) -> tuple[float, float]:
    """Best response of one node over its own threshold, others frozen.

    Returns (best threshold, its throughput).
    """
    objective = _memoized_session_objective(model, node)
    coord = Coordinate((node,), 0.0, model.bounds[node])
    r0 = objective(pv)
    pv2, r = coordinate_search(objective, coord, stp, pv, r0,
                               max_steps=maxiter)
    return coord.get(pv2), r


def ia_dtc(model, cfg: OptimizerConfig) -> OptimizerTrace:
    """Consensus rounds of local best responses over all transmitters.

    Every threshold starts at its upper bound; a selfish pass fills the
    candidate vector; each round then snapshots the candidates and lets
    every node best-respond against the snapshot (Jacobi; set
    gauss_seidel for in-place sequential updates). Converges when no
    coordinate moved more than epsilon_beta.
    """
    txs = model.transmitters
    bounds = {t: (0.0, model.bounds[t]) for t in txs}
    pv_max = PolicyVector({t: model.bounds[t] for t in txs}, bounds)
    beta_can = {}
    for n in txs:
        beta_can[n], _ = local_coordinate_search(model, n, pv_max,
                                                 cfg.stp, cfg.maxiter)
    trace = OptimizerTrace()
    iterations = 0
    for it in range(cfg.maxiter):
        iterations = it + 1
        snapshot = PolicyVector(dict(beta_can), bounds)
        r_row = {n: model.session_r(n, snapshot.beta) for n in txs}
        trace.rows.append(TraceRow(it, dict(snapshot.beta), r_row))
        current = snapshot
        new_can = {}
        for n in txs:
            new_can[n], _ = local_coordinate_search(model, n, current,
                                                    cfg.stp, cfg.maxiter)
            if cfg.gauss_seidel:
                current = current.updated({n: new_can[n]})
        delta = max(abs(new_can[n] - snapshot.beta[n]) for n in txs)
        beta_can = new_can
        if delta < cfg.epsilon_beta:
            trace.converged = True
            break
    trace.final = PolicyVector(dict(beta_can), bounds)
    mean_r = sum(model.session_r(n, trace.final.beta) for n in txs) / len(txs)
    trace.r_best = mean_r
    trace.iterations = iterations
    return trace


BASELINE_KINDS = ("random", "aggressive", "selfish", "conservative")


def baseline_policy(kind: str, model, seed: int = 0,
                    cfg: OptimizerConfig | None = None) -> PolicyVector:
    """One of the four reference policies.

    random: uniform in [0, bound] per node (seeded). aggressive: zero
    thresholds, minimizing queue drops. selfish: every node best-responds
    to all others held at their bounds. conservative: 0.95 of each bound.
    """
    txs = model.transmitters
    bounds = {t: (0.0, model.bounds[t]) for t in txs}
    if kind == "random":
        rng = np.random.default_rng(seed)
        beta = {t: float(rng.uniform(0.0, model.bounds[t])) for t in txs}
    elif kind == "aggressive":
        beta = {t: 0.0 for t in txs}
    elif kind == "selfish":
        cfg = cfg or OptimizerConfig()
        pv_max = PolicyVector({t: model.bounds[t] for t in txs}, bounds)
        beta = {}
        for n in txs:
            beta[n], _ = local_coordinate_search(model, n, pv_max,
                                                 cfg.stp, cfg.maxiter)
    elif kind == "conservative":
        beta = {t: 0.95 * model.bounds[t] for t in txs}
    else:
        raise ScenarioError(
            f"unknown baseline {kind!r}; expected one of {BASELINE_KINDS}"
        )
    return PolicyVector(beta, bounds)
