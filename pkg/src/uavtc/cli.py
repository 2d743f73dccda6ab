"""Command line interface: evaluate, optimize, sweep, simulate.

Outputs are plot-ready CSV/JSON with fixed column orders; every number in
a CSV cell carries 12 significant digits, JSON keeps full float precision
so saved thresholds round-trip exactly. All randomness flows from seeds
in the scenario file or the --seed flag; identical invocations produce
byte-identical files.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import policy_opt, scenario as scenario_mod, simcheck
from .errors import NumericalError, ScenarioError, UavtcError
from .network import NetworkModel
from .policy_opt import OptimizerTrace, PolicyVector

SWEEP_PARAMS = ("uav_alt", "num_nodes", "gamma_th")
ALGOS = ("ia-tc", "ia-dtc")


def fmt(x) -> str:
    """12-significant-digit cell formatting for CSV and tables."""
    if x is None:
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".12g")


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _write_json(path: Path, payload) -> str:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    _write_text(path, text)
    return text


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(c) if not isinstance(c, str) else c for c in row])
    return buf.getvalue()


def _load(args) -> tuple[scenario_mod.Scenario, NetworkModel]:
    sc = scenario_mod.load(args.scenario)
    if args.seed is not None:
        sc = sc.with_seed(args.seed)
    return sc, NetworkModel(sc)


def _beta_with_overrides(sc, model, pairs) -> dict[str, float]:
    beta = scenario_mod.default_beta(sc, model)
    for pair in pairs or []:
        if "=" not in pair:
            raise ScenarioError(f"--set-beta expects NODE=VALUE, got {pair!r}")
        nid, _, val = pair.partition("=")
        if nid not in model.transmitters:
            raise ScenarioError(
                f"--set-beta references unknown transmitter {nid!r}"
            )
        beta[nid] = float(val)
    return model.validate_beta(beta)


# -- evaluate ---------------------------------------------------------------

EVAL_COLUMNS = ("node", "role", "beta", "mu", "p_dly", "p_ov", "p_out",
                "p_loss_exact", "p_loss_first_order", "r", "flags")


def cmd_evaluate(args) -> int:
    sc, model = _load(args)
    beta = _beta_with_overrides(sc, model, args.set_beta)
    rows = []
    for node in sc.nodes:
        nid = node.node_id
        if nid in model.receiver_of:
            b = model.loss_breakdown(nid, beta)
            rows.append([nid, node.role, beta[nid], b.mu, b.p_dly, b.p_ov,
                         b.p_out, b.p_loss_exact, b.p_loss_first_order,
                         b.r_n, "|".join(sorted(b.flags))])
        else:
            rows.append([nid, node.role] + [None] * 8 + ["receiver"])
    text = _csv_text(EVAL_COLUMNS, rows)
    print(text, end="")
    if args.out:
        out = Path(args.out)
        if args.format == "json":
            payload = [dict(zip(EVAL_COLUMNS,
                                [c if isinstance(c, str) or c is None else float(c)
                                 for c in row])) for row in rows]
            _write_json(out / "evaluate.json", payload)
        else:
            _write_text(out / "evaluate.csv", text)
    return 0


# -- optimize ---------------------------------------------------------------

def _trace_csv(algo: str, trace: OptimizerTrace, model) -> str:
    if algo == "ia-tc":
        source = model.source_id
        rice_ids, ray_ids = policy_opt.interferer_groups(model, source)
        header = ("iteration", "beta_rice", "beta_ray", "beta_source", "r")
        rows = []
        for row in trace.rows:
            rows.append([
                row.iteration,
                row.beta[rice_ids[0]] if rice_ids else None,
                row.beta[ray_ids[0]] if ray_ids else None,
                row.beta[source],
                row.r,
            ])
        return _csv_text(header, rows)
    header = ("round", "node", "beta", "r")
    rows = []
    for row in trace.rows:
        for nid in model.transmitters:
            rows.append([row.iteration, nid, row.beta[nid],
                         row.r[nid] if isinstance(row.r, dict) else row.r])
    return _csv_text(header, rows)


def _result_payload(algo: str, model, pv: PolicyVector, converged: bool,
                    iterations: int) -> dict:
    r_per_node = {n: model.session_r(n, pv.beta) for n in model.transmitters}
    mean_r = sum(r_per_node.values()) / len(r_per_node)
    payload = {
        "algo": algo,
        "converged": converged,
        "iterations": iterations,
        "beta": {n: pv.beta[n] for n in model.transmitters},
        "bounds": {n: model.bounds[n] for n in model.transmitters},
        "r_per_node": r_per_node,
        "mean_r": mean_r,
    }
    try:
        payload["r_source"] = r_per_node[model.source_id]
    except ScenarioError:
        pass
    return payload


def _run_algo(sc, model, algo: str) -> tuple[PolicyVector, OptimizerTrace | None, bool, int]:
    if algo == "ia-tc":
        trace = policy_opt.ia_tc(model, sc.optimizer)
        return trace.final, trace, trace.converged, trace.iterations
    if algo == "ia-dtc":
        trace = policy_opt.ia_dtc(model, sc.optimizer)
        return trace.final, trace, trace.converged, trace.iterations
    if algo.startswith("baseline:"):
        kind = algo.split(":", 1)[1]
        pv = policy_opt.baseline_policy(kind, model, seed=sc.seed,
                                        cfg=sc.optimizer)
        return pv, None, True, 0
    raise ScenarioError(
        f"unknown algorithm {algo!r}; expected ia-tc, ia-dtc or baseline:<kind>"
    )


def cmd_optimize(args) -> int:
    sc, model = _load(args)
    pv, trace, converged, iterations = _run_algo(sc, model, args.algo)
    payload = _result_payload(args.algo, model, pv, converged, iterations)
    out = Path(args.out or ".")
    text = _write_json(out / "result.json", payload)
    if trace is not None:
        _write_text(out / "trace.csv",
                    _trace_csv(args.algo, trace, model))
    else:
        rows = [[nid, pv.beta[nid], payload["r_per_node"][nid]]
                for nid in model.transmitters]
        _write_text(out / "trace.csv", _csv_text(("node", "beta", "r"), rows))
    print(text, end="")
    return 0


# -- sweep --------------------------------------------------------------------

def apply_sweep(sc, param: str, value: float):
    """Return a scenario variant with one experiment axis changed."""
    if param == "uav_alt":
        new_nodes = []
        found = False
        for n in sc.nodes:
            if n.role == "uav-interferer":
                found = True
                pos = n.position
                n = replace(n, position=replace(pos, z=float(value)))
            new_nodes.append(n)
        if not found:
            raise ScenarioError("uav_alt sweep needs a uav-interferer node")
        return replace(sc, nodes=tuple(new_nodes))
    if param == "num_nodes":
        count = int(value)
        keep = [n for n in sc.nodes if n.role != "interferer"]
        if count < len(keep) or count > len(sc.nodes):
            raise ScenarioError(
                f"num_nodes={count} out of range [{len(keep)}, {len(sc.nodes)}]"
            )
        interferers = [n for n in sc.nodes if n.role == "interferer"]
        kept = interferers[: count - len(keep)]
        kept_ids = {n.node_id for n in keep} | {n.node_id for n in kept}
        new_nodes = tuple(n for n in sc.nodes if n.node_id in kept_ids)
        return replace(
            sc,
            nodes=new_nodes,
            beta_default={k: v for k, v in sc.beta_default.items() if k in kept_ids},
            traffic_overrides={k: v for k, v in sc.traffic_overrides.items()
                               if k in kept_ids},
        )
    if param == "gamma_th":
        return replace(sc, interference=replace(sc.interference,
                                                gamma_th=float(value)))
    raise ScenarioError(
        f"unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMS}"
    )


SWEEP_COLUMNS = ("param", "value", "algo", "converged", "iterations",
                 "beta_source", "r_source", "mean_r")


def _sweep_point(sc, param, value, algo):
    variant = apply_sweep(sc, param, value)
    model = NetworkModel(variant)
    pv, trace, converged, iterations = _run_algo(variant, model, algo)
    payload = _result_payload(algo, model, pv, converged, iterations)
    source = model.source_id
    row = [param, value, algo, str(converged).lower(), iterations,
           pv.beta[source], payload["r_per_node"][source], payload["mean_r"]]
    return row, payload


def cmd_sweep(args) -> int:
    sc, _ = _load(args)
    values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    if not values:
        raise ScenarioError("--values must list at least one number")
    algo = args.algo or ("ia-tc" if args.param == "uav_alt" else "ia-dtc")
    with ThreadPoolExecutor(max_workers=min(4, len(values))) as pool:
        results = list(pool.map(
            lambda v: _sweep_point(sc, args.param, v, algo), values
        ))
    out = Path(args.out or ".")
    rows = []
    for (row, payload), value in zip(results, values):
        rows.append(row)
        tag = fmt(value).replace(".", "p")
        _write_json(out / f"result_{args.param}_{tag}.json", payload)
    text = _csv_text(SWEEP_COLUMNS, rows)
    _write_text(out / "sweep.csv", text)
    print(text, end="")
    return 0


# -- simulate -----------------------------------------------------------------

SIM_METRICS = ("mu", "p_dly", "p_ov", "p_out", "r")


def _beta_from_source(sc, model, spec_str: str) -> dict[str, float]:
    if spec_str in ("default", ""):
        return model.validate_beta(scenario_mod.default_beta(sc, model))
    if spec_str.startswith("file:"):
        path = Path(spec_str.split(":", 1)[1])
        if not path.is_file():
            raise ScenarioError(f"beta file not found: {path}")
        payload = json.loads(path.read_text())
        beta = payload.get("beta", payload)
        return model.validate_beta({str(k): float(v) for k, v in beta.items()})
    if spec_str.startswith("optimizer"):
        _, _, algo = spec_str.partition(":")
        pv, _, _, _ = _run_algo(sc, model, algo or "ia-dtc")
        return dict(pv.beta)
    raise ScenarioError(
        f"unknown --beta-source {spec_str!r}; expected default, "
        "file:<path> or optimizer[:algo]"
    )


def cmd_simulate(args) -> int:
    sc, model = _load(args)
    beta = _beta_from_source(sc, model, args.beta_source)
    cfg = sc.sim
    if args.slots is not None:
        cfg = replace(cfg, num_slots=args.slots,
                      warmup_slots=min(cfg.warmup_slots, args.slots // 10))
    if args.saturated:
        cfg = replace(cfg, saturated=True)
    report = simcheck.simulate(model, beta, cfg)
    nodes_payload = {}
    table_rows = []
    for nid in model.transmitters:
        b = model.loss_breakdown(nid, beta)
        st = report.nodes[nid]
        analytic = {"mu": b.mu, "p_dly": b.p_dly, "p_ov": b.p_ov,
                    "p_out": b.p_out, "r": b.r_n}
        empirical = {"mu": st.mu, "p_dly": st.p_dly, "p_ov": st.p_ov,
                     "p_out": st.p_out, "r": st.r}
        ci = {"mu": st.mu_ci, "p_dly": st.p_dly_ci, "p_ov": st.p_ov_ci,
              "p_out": st.p_out_ci, "r": st.r_ci}
        rel = {}
        for m in SIM_METRICS:
            rel[m] = ((analytic[m] - empirical[m]) / empirical[m]
                      if empirical[m] else None)
        nodes_payload[nid] = {
            "analytic": analytic, "empirical": empirical, "ci95": ci,
            "rel_err": rel, "counts": st.counts,
            "beta": beta[nid], "flags": sorted(b.flags),
        }
        for m in SIM_METRICS:
            table_rows.append([nid, m, analytic[m], empirical[m], ci[m],
                               rel[m]])
    payload = {
        "scenario": sc.name,
        "slots": report.slots,
        "warmup": report.warmup,
        "seed": report.seed,
        "saturated": report.saturated,
        "outage_convention": ("per-transmission" if report.per_transmission
                              else "per-slot"),
        "flow_conserved": report.flow_conserved,
        "nodes": nodes_payload,
    }
    out = Path(args.out or ".")
    _write_json(out / "simreport.json", payload)
    text = _csv_text(("node", "metric", "analytic", "empirical",
                      "ci95_half_width", "rel_err"), table_rows)
    print(text, end="")
    if not report.flow_conserved:
        print("warning: flow conservation violated", file=sys.stderr)
    return 0


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavtc",
        description=("Interference-aware expected-throughput analysis and "
                     "fading-threshold optimization for shared-spectrum "
                     "UAV/ground networks."),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True,
                       help="scenario file (YAML/JSON) or bundled:<name>")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed overriding the scenario seeds")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("evaluate", help="per-node loss breakdown at fixed thresholds")
    common(p)
    p.add_argument("--set-beta", action="append", metavar="NODE=VALUE",
                   help="override a node's threshold (repeatable)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="run a threshold optimizer")
    common(p)
    p.add_argument("--algo", default="ia-tc",
                   help="ia-tc, ia-dtc or baseline:<random|aggressive|selfish|conservative>")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="optimize across one experiment axis")
    common(p)
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--values", required=True,
                   help="comma-separated parameter values")
    p.add_argument("--algo", default=None,
                   help="optimizer per point (default: ia-tc for uav_alt, else ia-dtc)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate",
                       help="slot-level Monte Carlo vs analytic comparison")
    common(p)
    p.add_argument("--beta-source", default="default",
                   help="default, file:<path> or optimizer[:algo]")
    p.add_argument("--slots", type=int, default=None,
                   help="override the scenario's slot count")
    p.add_argument("--saturated", action="store_true",
                   help="always-backlogged sources (channel-statistics mode)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ScenarioError, UavtcError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
