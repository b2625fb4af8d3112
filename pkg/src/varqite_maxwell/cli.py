"""Command-line interface: ``varqite-maxwell <subcommand> [options]``.

Every file written starts with the effective configuration (TOML) so that a
run can be reproduced from its own output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import ansatz as az
from . import maxwell as mx
from .config import ConfigError, RunConfig, load
from .evolver import evolve
from .metrics import time_average_trace_error
from .resources import accounting_identity, cost_report
from .state_prep import discretization_error, fit_initial_state, spsa_fit, target_state

log = logging.getLogger("varqite_maxwell")

FIELDS = ("by", "bz", "ey", "ez")
TRAJ_COLUMNS = ("time", "field", "node_index", "value", "source")
SWEEP_COLUMNS = ("family", "n_qubits", "layers", "params", "epsilon_tr", "mode", "shots")


def _fmt(x) -> str:
    return repr(float(x))


def _commented(text: str) -> str:
    return "".join(f"# {line}\n" if line else "#\n" for line in text.splitlines())


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(path)


def _csv_text(cfg: RunConfig, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(_commented(cfg.echo()))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(cfg: RunConfig, payload: dict) -> str:
    return json.dumps({"config": cfg.echo(), **payload}, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# trajectories


def _traj_rows(snapshots, source: str):
    """``snapshots`` is a list of ``(time, flat_vector)``."""
    for t, u in snapshots:
        fs = mx.unflatten(np.real(u))
        for name in FIELDS:
            for i, v in enumerate(getattr(fs, name)):
                yield (_fmt(t), name, i, _fmt(v), source)


def _write_trajectory(cfg: RunConfig, out: Path, stem: str, sources) -> None:
    """``sources`` maps a source label to its snapshot list."""
    if "csv" in cfg.formats:
        rows = [r for label, snaps in sources.items() for r in _traj_rows(snaps, label)]
        _write(out / f"{stem}.csv", _csv_text(cfg, TRAJ_COLUMNS, rows))
    if "json" in cfg.formats:
        lines = [json.dumps({"config": cfg.echo()}, sort_keys=True)]
        for label, snaps in sources.items():
            for t, u in snaps:
                fs = mx.unflatten(np.real(u))
                rec = {"time": float(t), "source": label}
                rec.update({name: [float(v) for v in getattr(fs, name)] for name in FIELDS})
                lines.append(json.dumps(rec, sort_keys=True))
        _write(out / f"{stem}.jsonl", "\n".join(lines) + "\n")


def read_trajectory(path: str | Path, source: str | None = None):
    """Load a trajectory CSV into ``(times, vectors)`` for one source.

    Without ``source`` the first source appearing in the file is used.
    """
    groups: dict[str, dict[float, dict]] = {}
    with open(path, encoding="utf-8") as fh:
        body = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(body)
    if reader.fieldnames is None or tuple(reader.fieldnames) != TRAJ_COLUMNS:
        raise ValueError(f"{path}: expected columns {','.join(TRAJ_COLUMNS)}")
    for row in reader:
        src = row["source"]
        by_time = groups.setdefault(src, {})
        fields = by_time.setdefault(float(row["time"]), {f: {} for f in FIELDS})
        fields[row["field"]][int(row["node_index"])] = float(row["value"])
    if not groups:
        raise ValueError(f"{path}: no trajectory rows")
    if source is None:
        source = next(iter(groups))
    if source not in groups:
        raise ValueError(f"{path}: no rows with source {source!r}")
    times = sorted(groups[source])
    vecs = []
    for t in times:
        f = groups[source][t]
        vecs.append(np.concatenate([[f[name][i] for i in sorted(f[name])] for name in FIELDS]))
    return np.array(times), vecs


def reference_snapshots(cfg: RunConfig):
    """Classical trajectory sampled at the VarQITE snapshot times."""
    ev = cfg.evolution
    spacing = ev.dt * ev.snapshot_stride
    stride = spacing / cfg.maxwell.dt
    if abs(stride - round(stride)) > 1e-9 or round(stride) < 1:
        raise ConfigError("snapshot spacing evolution.dt * snapshot_stride must be a multiple "
                          "of the Maxwell dt")
    initial = mx.gaussian_initial(cfg.maxwell, cfg.center, cfg.width)
    t_final = ev.n_steps * ev.dt
    traj = mx.classical_solve(cfg.maxwell, initial, t_final, int(round(stride)))
    n_snap = ev.n_steps // ev.snapshot_stride + 1
    return [(t, mx.flatten(s)) for t, s in traj][:n_snap]


# ---------------------------------------------------------------------------
# subcommands


def _target(cfg: RunConfig):
    return target_state(cfg.maxwell, cfg.center, cfg.width)


def _fit(cfg: RunConfig):
    return spsa_fit(cfg.ansatz, _target(cfg), cfg.spsa, cfg.eps_init, polish_result=cfg.polish)


def cmd_reference(cfg: RunConfig, args) -> int:
    _write_trajectory(cfg, cfg.output_dir, "reference", {"classical": reference_snapshots(cfg)})
    return 0


def cmd_init_fit(cfg: RunConfig, args) -> int:
    spec = cfg.ansatz
    if args.auto_layers:
        spec, fit = fit_initial_state(lambda L: az.AnsatzSpec(spec.family, spec.n_qubits, L),
                                      _target(cfg), cfg.spsa, cfg.eps_init, args.auto_layers,
                                      polish_result=cfg.polish)
    else:
        fit = _fit(cfg)
    payload = {
        "family": spec.family,
        "n_qubits": spec.n_qubits,
        "layers": spec.layers,
        "theta": [float(x) for x in fit.theta0],
        "final_cost": fit.final_cost,
        "converged": fit.converged,
        "restart_costs": fit.restart_costs,
        "cost_history": [float(x) for x in fit.cost_history],
        "discretization_error": discretization_error(cfg.maxwell.n_grid, cfg.center, cfg.width,
                                                     cfg.maxwell.domain_length),
    }
    if not fit.converged:
        log.warning("initial fit did not reach eps_init=%g (cost %.3g)", cfg.eps_init, fit.final_cost)
    _write(cfg.output_dir / "params.json", _json_text(cfg, payload))
    return 0


def _load_params(cfg: RunConfig, path: str):
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    spec = az.AnsatzSpec(data["family"], int(data["n_qubits"]), int(data["layers"]))
    if spec.n_qubits != cfg.maxwell.n_qubits:
        raise ConfigError(f"parameter file is for {spec.n_qubits} qubits, config needs "
                          f"{cfg.maxwell.n_qubits}", path)
    return spec, np.array(data["theta"], dtype=float)


def _run_solve(cfg: RunConfig, spec=None, theta0=None):
    if spec is None:
        spec = cfg.ansatz
        theta0 = _fit(cfg).theta0
    gen = mx.assemble_generator(cfg.maxwell)
    traj = evolve(spec, theta0, gen.pauli_form, cfg.evolution)
    return spec, gen, traj


def cmd_solve(cfg: RunConfig, args) -> int:
    spec, theta0 = _load_params(cfg, args.params) if args.params else (None, None)
    spec, gen, traj = _run_solve(cfg, spec, theta0)
    u0 = mx.flatten(mx.gaussian_initial(cfg.maxwell, cfg.center, cfg.width))
    target = u0 / np.linalg.norm(u0)
    # fidelity cannot see a global sign; take it from the largest target amplitude
    peak = int(np.argmax(np.abs(target)))
    sign = 1.0 if np.real(traj.states[0].amplitudes[peak]) * target[peak] >= 0 else -1.0
    ref = reference_snapshots(cfg) if args.reference else None
    quantum = []
    for k, (t, st) in enumerate(zip(traj.times, traj.states)):
        scale = np.linalg.norm(ref[k][1]) if ref is not None else np.linalg.norm(u0)
        quantum.append((t, sign * scale * np.real(st.amplitudes)))
    sources = {"quantum": quantum}
    if ref is not None:
        sources["classical"] = ref
    _write_trajectory(cfg, cfg.output_dir, "trajectory", sources)
    summary = {
        "family": spec.family,
        "layers": spec.layers,
        "params": az.as_sequence(spec).n_params,
        "mode": str(cfg.evolution.mode),
        "steps": len(traj.diagnostics),
        "degenerate_steps": traj.degenerate_steps,
        "warning": traj.degenerate_steps > 0,
        "max_condition": max((d.condition for d in traj.diagnostics), default=0.0),
        "max_residual": max((d.residual for d in traj.diagnostics), default=0.0),
        "circuits": {"lambda": traj.ledger.lambda_circuits, "c": traj.ledger.c_circuits,
                     "shots": traj.ledger.shots},
        "thetas": [[float(x) for x in th] for th in traj.thetas],
    }
    if not cfg.evolution.mode.is_exact:
        summary["accounting_identity"] = accounting_identity(
            traj.ledger, spec, len(gen.pauli_form), len(traj.diagnostics), cfg.evolution.mode.shots)
    if ref is not None:
        rep = time_average_trace_error(traj.states, [u for _, u in ref], traj.times,
                                       [t for t, _ in ref], cfg.evolution.dt)
        summary["error_report"] = rep.to_dict()
    if summary["warning"]:
        log.warning("%d steps had no retained singular values", traj.degenerate_steps)
    _write(cfg.output_dir / "solve.json", _json_text(cfg, summary))
    return 0


def cmd_compare(cfg: RunConfig, args) -> int:
    ta, va = read_trajectory(args.files[0], args.source_a)
    tb, vb = read_trajectory(args.files[1], args.source_b)
    if len(ta) != len(tb):
        raise ValueError(f"snapshot counts differ: {len(ta)} vs {len(tb)}")
    dt = float(np.min(np.diff(ta))) if len(ta) > 1 else None
    rep = time_average_trace_error(va, vb, ta, tb, dt, {"a": args.files[0], "b": args.files[1]})
    _write(cfg.output_dir / "compare.json", _json_text(cfg, rep.to_dict()))
    rows = [(_fmt(t), _fmt(e), _fmt(f)) for t, e, f in
            zip(rep.times, rep.per_step_trace_error, rep.per_step_fidelity)]
    _write(cfg.output_dir / "compare.csv", _csv_text(cfg, ("time", "trace_error", "fidelity"), rows))
    print(f"epsilon_tr {rep.epsilon_tr!r}")
    return 0


def cmd_ansatz(cfg: RunConfig, args) -> int:
    spec = cfg.ansatz
    seq = az.build(spec)
    payload = {
        "family": spec.family,
        "n_qubits": spec.n_qubits,
        "layers": spec.layers,
        "params": seq.n_params,
        "gate_counts": az.gate_counts(spec),
        "logical_depth": az.logical_depth(spec),
        "gates": [{"kind": g.kind, "qubits": list(g.qubits)} for g in seq.gates],
    }
    _write(cfg.output_dir / "ansatz.json", _json_text(cfg, payload))
    return 0


def cmd_decompose(cfg: RunConfig, args) -> int:
    gen = mx.assemble_generator(cfg.maxwell)
    lines = [f"{_fmt(t.coefficient.real)} {_fmt(t.coefficient.imag)} {t.word}" for t in gen.pauli_form]
    _write(cfg.output_dir / "decompose.txt", _commented(cfg.echo()) + "\n".join(lines) + "\n")
    return 0


def cmd_cost(cfg: RunConfig, args) -> int:
    gen = mx.assemble_generator(cfg.maxwell)
    report = cost_report(cfg.ansatz, len(gen.pauli_form), cfg.evolution.t_final, cfg.evolution.dt,
                         args.epsilon)
    report["pauli_terms"] = len(gen.pauli_form)
    _write(cfg.output_dir / "cost.json", _json_text(cfg, report))
    return 0


def cmd_sweep(cfg: RunConfig, args) -> int:
    rows = []
    mode = cfg.evolution.mode
    for layers in range(1, int(cfg.raw["sweep"]["max_layers"]) + 1):
        sub = cfg.with_layers(layers)
        spec, _, traj = _run_solve(sub)
        ref = reference_snapshots(sub)
        rep = time_average_trace_error(traj.states, [u for _, u in ref], traj.times,
                                       [t for t, _ in ref], sub.evolution.dt)
        log.info("layers %d: epsilon_tr %.4f", layers, rep.epsilon_tr)
        rows.append((spec.family, spec.n_qubits, layers, az.param_count(spec),
                     _fmt(rep.epsilon_tr), str(mode), mode.shots))
    _write(cfg.output_dir / "sweep.csv", _csv_text(cfg, SWEEP_COLUMNS, rows))
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "reference": cmd_reference,
    "compare": cmd_compare,
    "init-fit": cmd_init_fit,
    "ansatz": cmd_ansatz,
    "decompose": cmd_decompose,
    "cost": cmd_cost,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration entry, e.g. ansatz.layers=4")
    common.add_argument("--seed", type=int, help="global seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--mode", help="exact or shots:M")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="varqite-maxwell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("reference", parents=[common], help="classical FDTD trajectory")
    p = sub.add_parser("init-fit", parents=[common], help="fit initial ansatz parameters")
    p.add_argument("--auto-layers", type=int, default=0, metavar="LMAX",
                   help="grow the layer count up to LMAX until the fit converges")
    p = sub.add_parser("solve", parents=[common], help="VarQITE time evolution")
    p.add_argument("--params", help="parameter JSON written by init-fit")
    p.add_argument("--reference", action="store_true",
                   help="also run the classical solver, rescale by its norm and report epsilon_tr")
    p = sub.add_parser("compare", parents=[common], help="trace error between two trajectory CSVs")
    p.add_argument("files", nargs=2)
    p.add_argument("--source-a")
    p.add_argument("--source-b")
    sub.add_parser("ansatz", parents=[common], help="ansatz structure report")
    sub.add_parser("decompose", parents=[common], help="Pauli decomposition of the generator")
    p = sub.add_parser("cost", parents=[common], help="circuit and query-cost report")
    p.add_argument("--epsilon", type=float, default=1e-2, help="target precision for the query estimate")
    sub.add_parser("sweep", parents=[common], help="epsilon_tr versus layer count")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.out is not None:
        overrides.append(f"output.directory={json.dumps(args.out)}")
    if args.mode is not None:
        overrides.append(f"evolution.mode={json.dumps(args.mode)}")
    try:
        cfg = load(args.config, overrides)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
