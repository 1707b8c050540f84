"""Command line entry point: ``prcircuits run | verify | presets list``.

Configs are JSON objects validated against :data:`CONFIG_SCHEMA`; command
line flags override config keys.  Every CSV starts with a comment line
carrying the config hash, seed and package version, followed by a header
row.  Exit codes: 0 ok, 1 criterion failure or module error, 2 usage error.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import itertools
import json
import os
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, acceptance, cluster, markov, measures, statevec, symmetric, twirl
from .errors import NoDecayWindow, PRCircuitError
from .schedule import make_schedule

EXPERIMENTS = ("gap-sweep", "spectrum", "trajectory", "ensemble", "scaling", "twirl", "cluster-cost")

_number = {"type": "number"}
_grid = {
    "oneOf": [
        _number,
        {"type": "array", "items": _number, "minItems": 1},
        {
            "type": "object",
            "properties": {"start": _number, "stop": _number, "step": {"type": "number", "exclusiveMinimum": 0}},
            "required": ["start", "stop", "step"],
            "additionalProperties": False,
        },
    ]
}
_str_or_list = lambda enum: {  # noqa: E731
    "oneOf": [{"enum": list(enum)}, {"type": "array", "items": {"enum": list(enum)}, "minItems": 1}]
}
_int_or_list = {
    "oneOf": [
        {"type": "integer", "minimum": 1},
        {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
    ]
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "topology": _str_or_list(("open", "closed", "star", "aa")),
        "gate": _str_or_list(("CZ", "XY")),
        "n": _int_or_list,
        "c": _grid,
        "p": _grid,
        "iterations": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "initial": {"enum": ["computational", "all-computational", "psi", "ghz", "cluster-chain"]},
        "a": _grid,
        "policy": _str_or_list(statevec.POLICIES),
        "local": _str_or_list(("HaarSU2", "HZ", "ZXZ")),
        "local_c": {"type": "number", "minimum": 0, "maximum": 1},
        "p_policy": {"enum": list(symmetric.P_POLICIES)},
        "c_central": _number,
        "c_outer": _number,
        "scenarios": {
            "type": "array",
            "items": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
            "minItems": 1,
        },
        "p_fusion": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "svg": {"type": "boolean"},
        "out": {"type": "string"},
    },
    "required": ["experiment"],
    "additionalProperties": False,
}

DEFAULTS = {
    "topology": "open",
    "gate": "CZ",
    "n": 8,
    "c": 1.0 / 3.0,
    "p": 1.0,
    "iterations": 30,
    "samples": 100,
    "initial": "computational",
    "a": 0.0,
    "policy": "independent",
    "local": "HaarSU2",
    "p_policy": "fixed",
    "c_central": 0.0,
    "c_outer": 1.0 / 3.0,
    "scenarios": [[0.98, 0.547], [0.705, 0.2735]],
    "p_fusion": 0.5,
    "seed": 0,
    "svg": False,
}

# keys that do not change results and stay out of the config hash
_NOT_HASHED = ("out", "svg")

C_STEP = {"start": 0.0, "stop": 1.0, "step": 0.01}


def _cfg(**kw):
    return kw


PRESETS = {
    "fig1": [
        _cfg(experiment="ensemble", name="cz-hz", gate="CZ", local="HZ", initial="all-computational"),
        _cfg(experiment="ensemble", name="xy-haar", gate="XY", local="HaarSU2", initial="all-computational", iterations=15),
        _cfg(experiment="ensemble", name="cz-haar", gate="CZ", local="HaarSU2", initial="all-computational"),
    ],
    "fig2": [
        _cfg(experiment="gap-sweep", name="cz", topology=["open", "closed", "star", "aa"], n=[6, 8], c=C_STEP),
        _cfg(experiment="gap-sweep", name="xy", topology=["open", "closed"], gate="XY", n=[6, 8], c=C_STEP),
    ],
    "topologies-haar": [
        _cfg(experiment="ensemble", name="haar", topology=["open", "closed", "star", "aa"], initial="all-computational")
    ],
    "topologies-hz": [
        _cfg(experiment="ensemble", name="hz", topology=["open", "closed", "star", "aa"], local="HZ", initial="all-computational")
    ],
    "xy-chains": [
        _cfg(experiment="ensemble", name="xy", topology=["open", "closed"], gate="XY", iterations=15, initial="all-computational")
    ],
    "open-p-sweep": [
        _cfg(experiment="gap-sweep", name="open", c=C_STEP, p={"start": 0.5, "stop": 1.0, "step": 0.05})
    ],
    "closed-p-sweep": [
        _cfg(
            experiment="gap-sweep",
            name="closed",
            topology="closed",
            c={"start": 0.0, "stop": 0.15, "step": 0.01},
            p={"start": 0.6, "stop": 1.0, "step": 0.01},
        )
    ],
    "star-p-sweep": [
        _cfg(
            experiment="gap-sweep",
            name="star",
            topology="star",
            c={"start": 0.0, "stop": 0.3, "step": 0.02},
            p={"start": 0.4, "stop": 1.0, "step": 0.01},
        )
    ],
    "aa-p-sweep": [
        _cfg(experiment="gap-sweep", name="aa", topology="aa", c=C_STEP, p={"start": 0.3, "stop": 1.0, "step": 0.05})
    ],
    "fig9": [
        _cfg(experiment="scaling", name="saturating", topology="aa", c=[0.01, 0.1], p=[0.25, 0.35, 0.45], n=list(range(4, 41, 2))),
        _cfg(experiment="scaling", name="exponential", topology="aa", c=0.0, p=[0.2, 0.4, 0.5], n=list(range(4, 41, 2))),
        _cfg(experiment="scaling", name="deterministic", topology="aa", c=[0.0, 1.0 / 3.0], p=1.0, n=list(range(4, 61, 4))),
    ],
    "fig10": [
        _cfg(experiment="scaling", name="n-gates", topology="aa", c=0.0, p_policy="n-gates", n=list(range(8, 151, 2))),
        _cfg(experiment="scaling", name="one-gate", topology="aa", c=0.0, p_policy="one-gate", n=list(range(8, 51))),
    ],
    "qca": [
        _cfg(
            experiment="ensemble",
            name="qca",
            local=["HaarSU2", "HZ"],
            policy=["independent", "collective", "odd-even"],
            iterations=40,
        )
    ],
    "initial-states": [
        _cfg(experiment="ensemble", name="psi", initial="psi", a=[0.0, 0.02337, 0.1, 0.2, 0.3, 1.0], samples=500, iterations=40)
    ],
    "appA": [_cfg(experiment="cluster-cost", name="cost")],
    "appB": [_cfg(experiment="twirl", name="twirl", n=list(range(4, 13)), p=0.75)],
}


class UsageError(Exception):
    """Bad command line or config; exit code 2."""


# -- config handling -----------------------------------------------------------


def expand_grid(value) -> list[float]:
    if isinstance(value, dict):
        start, stop, step = value["start"], value["stop"], value["step"]
        pts = np.arange(start, stop + step / 2, step)
        return [float(x) for x in np.round(pts, 10)]
    if isinstance(value, (list, tuple)):
        return [float(x) for x in value]
    return [float(value)]


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def validate(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as err:
        where = "/".join(str(x) for x in err.absolute_path) or "<root>"
        raise UsageError(f"invalid config at {where}: {err.message}") from None


def resolve(cfg: dict) -> dict:
    """Fill defaults; the result is what gets hashed and recorded."""
    validate(cfg)
    out = copy.deepcopy(DEFAULTS)
    out.update(copy.deepcopy(cfg))
    out.setdefault("name", out["experiment"])
    return out


def config_hash(cfg: dict) -> str:
    body = {k: v for k, v in cfg.items() if k not in _NOT_HASHED}
    blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def parse_grid_flag(text: str):
    """``"0:1:0.01"`` (inclusive) or ``"0,0.1,0.5"``."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            return {"start": start, "stop": stop, "step": step}
        vals = [float(x) for x in text.split(",") if x]
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    return vals[0] if len(vals) == 1 else vals


def _split(text: str):
    parts = [x for x in text.split(",") if x]
    return parts[0] if len(parts) == 1 else parts


def flag_overrides(args) -> dict:
    over = {}
    if args.n is not None:
        try:
            ns = [int(x) for x in args.n.split(",") if x]
        except ValueError:
            raise UsageError(f"cannot parse n {args.n!r}") from None
        over["n"] = ns[0] if len(ns) == 1 else ns
    for key in ("c", "p", "a"):
        val = getattr(args, key)
        if val is not None:
            over[key] = parse_grid_flag(val)
    for key in ("topology", "gate", "policy", "local"):
        val = getattr(args, key)
        if val is not None:
            over[key] = _split(val)
    for key in ("experiment", "initial", "iterations", "samples", "seed", "local_c", "p_policy", "out"):
        val = getattr(args, key)
        if val is not None:
            over[key] = val
    if args.svg:
        over["svg"] = True
    for item in args.set or ():
        key, sep, raw = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects key=value, got {item!r}")
        try:
            over[key] = json.loads(raw)
        except json.JSONDecodeError:
            over[key] = raw
    return over


# -- experiments ---------------------------------------------------------------


def _local_dist(kind: str, local_c):
    if kind == "ZXZ":
        if local_c is None:
            raise UsageError("local ZXZ needs local_c")
        return statevec.LocalGateDistribution.for_c(local_c)
    return statevec.LocalGateDistribution(kind)


def _exp_gap_sweep(cfg, workers):
    cols = ["topology", "gate", "n", "c", "p", "gap", "rate"]
    rows = []
    for topo, gate, n in itertools.product(_as_list(cfg["topology"]), _as_list(cfg["gate"]), _as_list(cfg["n"])):
        res = markov.sweep(topo, gate, n, expand_grid(cfg["c"]), expand_grid(cfg["p"]), workers=workers)
        rows += [[topo, gate, n, c, p, g, r] for c, p, g, r in res.rows]
    summary = {}
    for topo, gate, n in itertools.product(_as_list(cfg["topology"]), _as_list(cfg["gate"]), _as_list(cfg["n"])):
        sel = [r for r in rows if r[:3] == [topo, gate, n]]
        best = max(sel, key=lambda r: r[5])
        summary[f"{topo}-{gate}-n{n}"] = {"c": best[3], "p": best[4], "gap": best[5]}
    return cols, rows, {"argmax": summary}


def _exp_spectrum(cfg, workers):
    cols = ["topology", "gate", "n", "c", "p", "index", "real", "imag", "modulus"]
    rows = []
    summary = {}
    for topo, gate, n, c, p in itertools.product(
        _as_list(cfg["topology"]), _as_list(cfg["gate"]), _as_list(cfg["n"]), expand_grid(cfg["c"]), expand_grid(cfg["p"])
    ):
        rep = markov.spectrum(markov.chain(topo, n, c, p, gate))
        ev = rep.eigenvalues[np.lexsort((np.round(rep.eigenvalues.imag, 12), -np.round(np.abs(rep.eigenvalues), 12)))]
        rows += [[topo, gate, n, c, p, i, float(z.real), float(z.imag), float(abs(z))] for i, z in enumerate(ev)]
        summary[f"{topo}-{gate}-n{n}-c{c}-p{p}"] = {"gap": rep.gap, "complete": rep.complete, "method": rep.method}
    return cols, rows, {"spectra": summary}


def _exp_trajectory(cfg, workers):
    cols = ["topology", "gate", "n", "c", "p", "iteration", "q", "q_distance"]
    rows = []
    for topo, gate, n, c, p in itertools.product(
        _as_list(cfg["topology"]), _as_list(cfg["gate"]), _as_list(cfg["n"]), expand_grid(cfg["c"]), expand_grid(cfg["p"])
    ):
        q = markov.q_trajectory(markov.chain(topo, n, c, p, gate), markov.computational_moments(n), cfg["iterations"])
        ref = measures.q_haar(n)
        rows += [[topo, gate, n, c, p, ell, float(v), float(abs(v - ref))] for ell, v in enumerate(q)]
    return cols, rows, {}


def _safe_fit(ell, dist, floor=None):
    try:
        f = measures.fit_rate(ell, dist, floor=floor)
    except NoDecayWindow:
        return None
    return {"rate": f.rate, "stderr": f.stderr, "window": list(f.window)}


def _exp_ensemble(cfg, workers):
    cols = [
        "topology", "gate", "n", "local", "policy", "p", "initial", "a",
        "iteration", "mean_q", "q_stderr", "q_distance", "pt_distance", "min_q",
    ]
    rows = []
    fits = {}
    a_values = expand_grid(cfg["a"]) if cfg["initial"] == "psi" else [None]
    combos = itertools.product(
        _as_list(cfg["topology"]),
        _as_list(cfg["gate"]),
        _as_list(cfg["n"]),
        _as_list(cfg["local"]),
        _as_list(cfg["policy"]),
        expand_grid(cfg["p"]),
        a_values,
    )
    for topo, gate, n, local, policy, p, a in combos:
        dist = _local_dist(local, cfg.get("local_c"))
        sched = make_schedule(topo, n, dist.c, p, gate)
        init = statevec.InitialState("psi", a) if a is not None else cfg["initial"]
        st = statevec.run_ensemble(sched, dist, policy, init, cfg["iterations"], cfg["samples"], cfg["seed"], workers)
        a_col = "" if a is None else a
        for i, ell in enumerate(st.iterations):
            rows.append(
                [topo, gate, n, local, policy, p, cfg["initial"], a_col, int(ell), float(st.mean_q[i]),
                 float(st.q_stderr[i]), float(st.q_distance[i]), float(st.pt_distance[i]), float(st.min_q[i])]
            )
        key = f"{topo}-{gate}-n{n}-{local}-{policy}-p{p}" + ("" if a is None else f"-a{a}")
        fits[key] = {"q_rate": _safe_fit(st.iterations, st.q_distance, measures.sampling_floor(st.q_stderr)), "pt_rate": _safe_fit(st.iterations, st.pt_distance)}
    return cols, rows, {"fits": fits}


def _exp_scaling(cfg, workers):
    cols = ["topology", "c", "p_policy", "p", "n", "gap"]
    rows = []
    fits = {}
    policy = cfg["p_policy"]
    p_values = expand_grid(cfg["p"]) if policy == "fixed" else [None]
    for topo, c, p in itertools.product(_as_list(cfg["topology"]), expand_grid(cfg["c"]), p_values):
        ns, gaps, fit = symmetric.scaling_study(topo, c, policy, _as_list(cfg["n"]), p)
        for n, g in zip(ns, gaps):
            rows.append([topo, c, policy, symmetric.policy_p(policy, int(n), p), int(n), float(g)])
        key = f"{topo}-c{c}-{policy}" + ("" if p is None else f"-p{p}")
        fits[key] = None if fit is None else {"model": fit.model, "params": {k: float(v) for k, v in fit.params.items()}, "residual": fit.residual}
    return cols, rows, {"fits": fits}


def _exp_twirl(cfg, workers):
    cols = ["n", "c_central", "c_outer", "p", "gap", "applications", "effective_gap"]
    rows = []
    for n, p in itertools.product(_as_list(cfg["n"]), expand_grid(cfg["p"])):
        rep = twirl.improved_twirl_gap(n, cfg["c_central"], cfg["c_outer"], p)
        rows.append([n, cfg["c_central"], cfg["c_outer"], p, rep.gap, rep.applications, rep.effective_gap])
    return cols, rows, {"clifford_twirl_gap": twirl.CLIFFORD_TWIRL_GAP}


def _exp_cluster_cost(cfg, workers):
    # costs are reported per C*n, so the qubit count drops out
    cols = ["p", "rate", "iterations", "attempts_per_Cn"]
    ranking = cluster.compare_scenarios([tuple(s) for s in cfg["scenarios"]], n=1, p_fusion=cfg["p_fusion"])
    rows = [[s.p, s.rate, s.iterations, s.attempts] for s in ranking]
    return cols, rows, {"cheapest_p": ranking[0].p}


RUNNERS = {
    "gap-sweep": _exp_gap_sweep,
    "spectrum": _exp_spectrum,
    "trajectory": _exp_trajectory,
    "ensemble": _exp_ensemble,
    "scaling": _exp_scaling,
    "twirl": _exp_twirl,
    "cluster-cost": _exp_cluster_cost,
}


# -- output --------------------------------------------------------------------


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def render_csv(cfg: dict, cols, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# config_sha256={config_hash(cfg)} seed={cfg['seed']} version={__version__}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(x) for x in r])
    return buf.getvalue()


def render_svg(experiment: str, cols, rows, path: Path) -> bool:
    """Convenience plot of the CSV data; returns False when matplotlib is missing."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return False
    idx = {c: i for i, c in enumerate(cols)}
    fig, ax = plt.subplots(figsize=(6, 4))
    if experiment == "gap-sweep":
        x, y, keys = "c", "gap", ("topology", "gate", "n", "p")
    elif experiment in ("trajectory", "ensemble"):
        x, y = "iteration", "q_distance" if experiment == "trajectory" else "pt_distance"
        keys = tuple(k for k in cols[: cols.index("iteration")])
        ax.set_yscale("log")
    elif experiment == "scaling":
        x, y, keys = "n", "gap", ("topology", "c", "p_policy", "p")
    else:
        plt.close(fig)
        return False
    groups = {}
    for r in rows:
        groups.setdefault(tuple(r[idx[k]] for k in keys if k != "p" or experiment != "scaling"), []).append(r)
    for label, grp in groups.items():
        xs = [r[idx[x]] for r in grp]
        ys = [r[idx[y]] for r in grp]
        ax.plot(xs, ys, label=" ".join(str(v) for v in label), lw=1)
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    if len(groups) <= 12:
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return True


def run_config(cfg: dict, out_dir: Path, workers: int) -> dict:
    runner = RUNNERS[cfg["experiment"]]
    t0 = time.perf_counter()
    cols, rows, summary = runner(cfg, workers)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{cfg['name']}.csv"
    csv_path.write_bytes(render_csv(cfg, cols, rows).encode("utf-8"))
    files = [csv_path.name]
    if cfg.get("svg"):
        svg_path = out_dir / f"{cfg['name']}.svg"
        if render_svg(cfg["experiment"], cols, rows, svg_path):
            files.append(svg_path.name)
        else:
            print("warning: matplotlib not available, skipping SVG", file=sys.stderr)
    return {
        "name": cfg["name"],
        "config": cfg,
        "config_sha256": config_hash(cfg),
        "seed": cfg["seed"],
        "files": files,
        "rows": len(rows),
        "summary": _jsonable(summary),
        "seconds": round(time.perf_counter() - t0, 3),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _write_json(path: Path, record: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(record), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _workers(args) -> int:
    if getattr(args, "workers", None):
        return max(1, args.workers)
    return acceptance.env_workers()


def cmd_run(args) -> int:
    if bool(args.preset) == bool(args.config):
        raise UsageError("give exactly one of --preset or --config")
    if args.preset:
        if args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}; see 'prcircuits presets list'")
        base = PRESETS[args.preset]
        label = args.preset
    else:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as err:
            raise UsageError(f"cannot read config: {err}") from None
        base = loaded if isinstance(loaded, list) else [loaded]
        label = Path(args.config).stem
    over = flag_overrides(args)
    configs = [resolve({**raw, **over}) for raw in base]
    out_dir = Path(over.get("out") or configs[0].get("out") or Path("runs") / label)
    record = {"version": __version__, "run": label, "status": "ok", "experiments": []}
    workers = _workers(args)
    for cfg in configs:
        try:
            res = run_config(cfg, out_dir, workers)
        except (PRCircuitError, ValueError, RuntimeError) as err:
            error = {
                "status": "error",
                "version": __version__,
                "experiment": cfg["name"],
                "config": cfg,
                "config_sha256": config_hash(cfg),
                "error_type": type(err).__name__,
                "message": str(err),
            }
            _write_json(out_dir / "error.json", error)
            print(json.dumps(_jsonable(error), sort_keys=True), file=sys.stderr)
            return 1
        record["experiments"].append(res)
        print(f"{cfg['name']}: {res['rows']} rows -> {out_dir / res['files'][0]} ({res['seconds']:.1f}s)")
    _write_json(out_dir / "run.json", record)
    return 0


def cmd_verify(args) -> int:
    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",") if x}
        except ValueError:
            raise UsageError(f"cannot parse --only {args.only!r}") from None
    t0 = time.perf_counter()
    results = acceptance.run_all(fast=args.fast, only=only, echo=lambda s: print(s, flush=True))
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed in {time.perf_counter() - t0:.1f}s")
    if failed:
        print("failed: " + ", ".join(str(n) for n in failed))
    return 1 if failed else 0


def cmd_presets(args) -> int:
    for name, cfgs in PRESETS.items():
        parts = ", ".join(f"{c['name']} ({c['experiment']})" for c in cfgs)
        print(f"{name:16s} {parts}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prcircuits", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset or a JSON config")
    run.add_argument("--preset")
    run.add_argument("--config", help="JSON file holding one config object or a list of them")
    run.add_argument("--out", help="output directory (default runs/<preset>)")
    run.add_argument("--workers", type=int, help=f"worker processes (default ${acceptance.WORKERS_ENV} or 1)")
    run.add_argument("--svg", action="store_true", help="also write SVG plots (needs matplotlib)")
    run.add_argument("--experiment", choices=EXPERIMENTS)
    run.add_argument("--topology")
    run.add_argument("--gate")
    run.add_argument("--n", help="qubit count or comma list")
    run.add_argument("--c", help="grid 'start:stop:step' or comma list")
    run.add_argument("--p", help="grid 'start:stop:step' or comma list")
    run.add_argument("--a", help="psi(a) parameters, grid or comma list")
    run.add_argument("--iterations", type=int)
    run.add_argument("--samples", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--initial")
    run.add_argument("--policy")
    run.add_argument("--local")
    run.add_argument("--local-c", dest="local_c", type=float)
    run.add_argument("--p-policy", dest="p_policy")
    run.add_argument("--set", action="append", metavar="KEY=JSON", help="override any config key")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run the acceptance criteria")
    ver.add_argument("--fast", action="store_true", help="skip Monte Carlo criteria")
    ver.add_argument("--only", help="comma list of criterion numbers")
    ver.set_defaults(func=cmd_verify)

    pre = sub.add_parser("presets", help="list presets")
    pre.add_argument("action", choices=["list"])
    pre.set_defaults(func=cmd_presets)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with 2 on usage errors
    try:
        return args.func(args)
    except UsageError as err:
        print(f"prcircuits: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
