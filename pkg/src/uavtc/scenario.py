"""Scenario files: schema, validation and ingestion (YAML or JSON).

A scenario holds the environment, radio, traffic and interference
parameters, the node list (positions, roles, link targets, fading
families), default thresholds, and the optimizer/simulation settings.
Bundled scenarios ship as package data and are addressed as
``bundled:<name>``.
"""

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import yaml

from .channel import RadioParams
from .errors import ScenarioError
from .geometry import Environment, NodePosition
from .interference import InterferenceModel, thermal_noise
from .policy_opt import BetaInit, OptimizerConfig
from .queueing import TrafficParams
from .simcheck import SimConfig

ROLES = ("source", "interferer", "uav-main", "uav-interferer")


@dataclass(frozen=True)
class NodeSpec:
    node_id: str
    position: NodePosition
    role: str
    link_target: str | None = None
    fading: str = "auto"            # rician | rayleigh | auto

    def __post_init__(self):
        if self.role not in ROLES:
            raise ScenarioError(
                f"node {self.node_id!r}: unknown role {self.role!r}; "
                f"expected one of {ROLES}"
            )


@dataclass(frozen=True)
class Scenario:
    name: str
    environment: Environment
    radio: RadioParams
    traffic: TrafficParams
    interference: InterferenceModel
    nodes: tuple[NodeSpec, ...]
    traffic_overrides: dict[str, TrafficParams] = field(default_factory=dict)
    beta_default: dict[str, float] = field(default_factory=dict)
    optimizer: OptimizerConfig = OptimizerConfig()
    sim: SimConfig = SimConfig()
    outage_per_transmission: bool = False
    seed: int = 0

    def __post_init__(self):
        ids = [n.node_id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ScenarioError("duplicate node ids in scenario")
        known = set(ids)
        for n in self.nodes:
            if n.link_target is not None and n.link_target not in known:
                raise ScenarioError(
                    f"node {n.node_id!r} references unknown link target "
                    f"{n.link_target!r}"
                )
        for nid in self.beta_default:
            if nid not in known:
                raise ScenarioError(
                    f"beta override references unknown node {nid!r}"
                )
        for nid in self.traffic_overrides:
            if nid not in known:
                raise ScenarioError(
                    f"traffic override references unknown node {nid!r}"
                )

    def traffic_for(self, node_id: str) -> TrafficParams:
        return self.traffic_overrides.get(node_id, self.traffic)

    def with_seed(self, seed: int) -> "Scenario":
        """Re-seed every stochastic component from one master seed."""
        return replace(
            self,
            seed=seed,
            interference=replace(self.interference, moment_seed=seed * 2 + 1),
            sim=replace(self.sim, seed=seed * 2 + 2),
        )


def _require(mapping: dict, key: str, ctx: str):
    if key not in mapping:
        raise ScenarioError(f"{ctx}: missing required key {key!r}")
    return mapping[key]


def _subset(mapping: dict, allowed: set[str], ctx: str) -> dict:
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioError(f"{ctx}: unknown keys {sorted(unknown)}")
    return mapping


def _build_interference(raw: dict) -> InterferenceModel:
    raw = _subset(dict(raw), {"gamma_th", "noise_power", "temperature",
                              "bandwidth", "moment_samples", "moment_seed"},
                  "interference")
    noise = raw.pop("noise_power", None)
    temperature = float(raw.pop("temperature", 290.0))
    bandwidth = float(raw.pop("bandwidth", 20e6))
    if noise is None:
        noise = thermal_noise(temperature, bandwidth)
    return InterferenceModel(noise_power=float(noise), **{
        k: (int(v) if k.startswith("moment") else float(v))
        for k, v in raw.items()
    })


def _build_optimizer(raw: dict) -> OptimizerConfig:
    raw = _subset(dict(raw), {"beta_ini", "stp_m", "stp_n", "stp", "maxiter",
                              "epsilon_r", "epsilon_beta", "beta_max_rice",
                              "beta_max_ray", "gauss_seidel"}, "optimizer")
    ini = raw.pop("beta_ini", {})
    if not isinstance(ini, dict):
        raise ScenarioError("optimizer.beta_ini must map {rice, ray, source}")
    ini = _subset(dict(ini), {"rice", "ray", "source"}, "optimizer.beta_ini")
    kwargs = {}
    for k, v in raw.items():
        if k == "maxiter":
            kwargs[k] = int(v)
        elif k == "gauss_seidel":
            kwargs[k] = bool(v)
        elif k in ("beta_max_rice", "beta_max_ray"):
            kwargs[k] = None if v is None else float(v)
        else:
            kwargs[k] = float(v)
    return OptimizerConfig(beta_ini=BetaInit(**{k: float(v) for k, v in ini.items()}),
                           **kwargs)


def _build_node(raw: dict, idx: int) -> NodeSpec:
    ctx = f"nodes[{idx}]"
    raw = _subset(dict(raw), {"id", "position", "role", "link_target", "fading"}, ctx)
    nid = str(_require(raw, "id", ctx))
    pos = _require(raw, "position", ctx)
    if not (isinstance(pos, (list, tuple)) and len(pos) == 3):
        raise ScenarioError(f"{ctx} ({nid}): position must be [x, y, z]")
    return NodeSpec(
        node_id=nid,
        position=NodePosition(float(pos[0]), float(pos[1]), float(pos[2]), nid),
        role=str(_require(raw, "role", ctx)),
        link_target=raw.get("link_target"),
        fading=str(raw.get("fading", "auto")),
    )


def from_dict(raw: dict, name: str = "scenario") -> Scenario:
    """Build and validate a Scenario from parsed file content."""
    if not isinstance(raw, dict):
        raise ScenarioError("scenario root must be a mapping")
    raw = _subset(dict(raw), {"name", "seed", "environment", "radio", "traffic",
                              "traffic_overrides", "interference", "nodes",
                              "beta", "optimizer", "sim", "outage_convention"},
                  "scenario")
    env_raw = dict(raw.get("environment", {}))
    if "mu" in env_raw:          # file key 'mu' maps to the mu_env field
        env_raw["mu_env"] = env_raw.pop("mu")
    env = Environment(**_subset(env_raw, {"zeta", "v", "mu_env", "area_side"},
                                "environment"))
    radio = RadioParams(**{
        k: (int(v) if k == "num_channels" else float(v))
        for k, v in _subset(dict(raw.get("radio", {})),
                            {"carrier_freq", "d0", "alpha_los", "alpha_nlos",
                             "k_los", "k_nlos", "omega", "num_channels",
                             "tx_power"}, "radio").items()
    })
    traffic = TrafficParams(**{k: float(v) for k, v in
                               _subset(dict(raw.get("traffic", {})),
                                       {"lambda_n", "t_slt", "t_th", "b_eta"},
                                       "traffic").items()})
    overrides = {
        nid: TrafficParams(**{**traffic.__dict__, **{k: float(v) for k, v in o.items()}})
        for nid, o in dict(raw.get("traffic_overrides", {})).items()
    }
    interference = _build_interference(raw.get("interference", {}))
    nodes_raw = _require(raw, "nodes", "scenario")
    nodes = tuple(_build_node(n, i) for i, n in enumerate(nodes_raw))
    convention = str(raw.get("outage_convention", "per-slot"))
    if convention not in ("per-slot", "per-transmission"):
        raise ScenarioError(
            f"outage_convention must be 'per-slot' or 'per-transmission', "
            f"got {convention!r}"
        )
    sim_raw = _subset(dict(raw.get("sim", {})),
                      {"num_slots", "warmup_slots", "seed", "saturated"}, "sim")
    sim = SimConfig(**{k: (bool(v) if k == "saturated" else int(v))
                       for k, v in sim_raw.items()})
    return Scenario(
        name=str(raw.get("name", name)),
        environment=env,
        radio=radio,
        traffic=traffic,
        traffic_overrides=overrides,
        interference=interference,
        nodes=nodes,
        beta_default={str(k): float(v)
                      for k, v in dict(raw.get("beta", {})).items()},
        optimizer=_build_optimizer(raw.get("optimizer", {})),
        sim=sim,
        outage_per_transmission=(convention == "per-transmission"),
        seed=int(raw.get("seed", 0)),
    )


def load(path: str | Path) -> Scenario:
    """Load a scenario from a YAML or JSON file, or ``bundled:<name>``."""
    text, name = _read_source(path)
    try:
        raw = (json.loads(text) if name.endswith(".json")
               else yaml.safe_load(text))
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot parse scenario {name!r}: {exc}") from exc
    return from_dict(raw, name=Path(name).stem)


def _read_source(path: str | Path) -> tuple[str, str]:
    spath = str(path)
    if spath.startswith("bundled:"):
        name = spath.split(":", 1)[1]
        ref = resources.files("uavtc").joinpath(f"data/{name}.yaml")
        if not ref.is_file():
            available = sorted(
                p.name.removesuffix(".yaml")
                for p in resources.files("uavtc").joinpath("data").iterdir()
                if p.name.endswith(".yaml")
            )
            raise ScenarioError(
                f"no bundled scenario {name!r}; available: {available}"
            )
        return ref.read_text(), f"{name}.yaml"
    p = Path(path)
    if not p.is_file():
        raise ScenarioError(f"scenario file not found: {spath}")
    return p.read_text(), p.name


def bundled_names() -> list[str]:
    ref = resources.files("uavtc").joinpath("data")
    return sorted(p.name.removesuffix(".yaml") for p in ref.iterdir()
                  if p.name.endswith(".yaml"))


def default_beta(scenario: Scenario, model) -> dict[str, float]:
    """Scenario's default thresholds, falling back to each node's bound."""
    beta = {}
    for tid in model.transmitters:
        beta[tid] = scenario.beta_default.get(tid, model.bounds[tid])
    return beta
