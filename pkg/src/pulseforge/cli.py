"""Command-line interface: search, verify, simulate, spectrum, sequences.

Every command prints one JSON document to stdout holding the fully resolved
configuration (defaults materialized) next to the result, so a run can be
reproduced from its own output.  Machine outputs are JSON; time and
frequency series are two-column CSV.  Exit codes: 0 success, 1 compute or
input failure, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import avgham, search, sequences, sim
from .milp import DEFAULT_NODE_LIMIT
from .model import DEFAULT_GAMMA, DEFAULT_GAMMA_BZ, pair_model

MODEL_DIMS = {"qubit": 2, "qutrit": 3}


def _check_writable(path):
    """Fail before compute, not after, when the output cannot be written."""
    existed = os.path.exists(path)
    try:
        with open(path, "a", encoding="ascii"):
            pass
    except OSError as exc:
        raise OSError(f"output path {path!r} is not writable: {exc}") from exc
    if not existed:
        os.remove(path)


def _emit(doc):
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _load_sequence(ref):
    """Registry name or JSON file path -> sequence; errors carry context."""
    if os.path.exists(ref) or ref.endswith(".json"):
        return sequences.from_file(ref)
    return sequences.load(ref)


def _cmd_search(args):
    d = MODEL_DIMS[args.model]
    _check_writable(args.out)
    dictionary = search.build_dictionary(d)
    sp = search.assemble(dictionary, args.target, alpha=args.alpha,
                         weight_cap=args.weight_cap, beta_min=args.beta_min)
    result = search.run_search(sp, node_limit=args.node_limit)
    config = {
        "model": args.model,
        "target": args.target,
        "alpha": args.alpha,
        "weight_cap": args.weight_cap,
        "beta_min": args.beta_min,
        "node_limit": args.node_limit,
        "classes": len(dictionary.entries),
        "out": args.out,
    }
    if result.weights is None:
        _emit({"command": "search", "config": config,
               "result": {"status": result.solver_status}})
        return 1
    doc = {
        "status": result.solver_status,
        "objective": result.objective,
        "nodes": result.nodes,
        "weights": {str(i): w for i, w in enumerate(result.weights) if w},
        "total_weight": sum(result.weights),
        "distinct_classes": sum(1 for w in result.weights if w),
        "report": result.report.to_json(),
        "sequence": sequences.sequence_to_json(result.sequence),
    }
    with open(args.out, "w", encoding="ascii") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _emit({"command": "search", "config": config, "result": doc["report"],
           "written": args.out})
    return 0


def _cmd_verify(args):
    seq = _load_sequence(args.sequence)
    report = avgham.verify(seq, tau=args.tau).to_json()
    config = {"sequence": args.sequence, "tau": args.tau, "out": args.out}
    if args.out:
        _check_writable(args.out)
        with open(args.out, "w", encoding="ascii") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    _emit({"command": "verify", "config": config, "result": report})
    return 0


def _cmd_simulate(args):
    seq = None if args.sequence in (None, "none") else _load_sequence(args.sequence)
    d = {"qubit": 2, "sq": 3, "dq": 3}[args.basis]
    if seq is not None and seq.d != d:
        raise ValueError(f"sequence {args.sequence!r} has d={seq.d}, "
                         f"basis {args.basis!r} needs d={d}")
    _check_writable(args.out)
    gamma = None if args.gamma == 0.0 else args.gamma
    model = pair_model(d, j=args.j, gamma_Bz=args.omega0)
    cfg = sim.SimConfig(model=model, seq=seq, basis=args.basis, tau=args.tau,
                        cycles=args.cycles, samples=args.samples,
                        seed=args.seed, gamma_param=gamma)
    trace = sim.ramsey(cfg, threads=args.threads)
    sim.trace_to_csv(trace, args.out)
    config = dict(trace.metadata)
    config.update({"j": args.j, "threads": args.threads, "out": args.out})
    _emit({"command": "simulate", "config": config,
           "result": {"rows": int(trace.times.size),
                      "final_signal": float(trace.signal[-1]),
                      "tail_envelope": sim.tail_envelope(trace)},
           "written": args.out})
    return 0


def _cmd_spectrum(args):
    trace = sim.trace_from_csv(args.fid)
    _check_writable(args.out)
    freqs, mags = sim.spectrum(trace, omega0=args.omega0)
    sim.write_series(args.out, ("freq", "magnitude"), (freqs, mags))
    peak = int(np.argmax(mags))
    config = {"fid": args.fid, "omega0": args.omega0, "out": args.out,
              "rows": int(trace.times.size)}
    _emit({"command": "spectrum", "config": config,
           "result": {"peak_freq": float(freqs[peak]),
                      "peak_magnitude": float(mags[peak]),
                      "dc_magnitude": float(mags[0]),
                      "bin_width": float(freqs[1] - freqs[0])},
           "written": args.out})
    return 0


def _cmd_sequences(args):
    if args.action == "list":
        rows = {}
        for name in sequences.names():
            ns = sequences.load(name)
            rows[name] = {"d": ns.d, "frames": len(ns.frames),
                          "total_weight": ns.total_weight,
                          "expected_beta": ns.expected_beta,
                          "expected_clean": ns.expected_clean,
                          "reconstructed": ns.reconstructed}
        _emit({"command": "sequences", "config": {"action": "list"},
               "result": rows})
        return 0
    out = args.out or f"{args.name}.json"
    _check_writable(out)
    ns = sequences.load(args.name)
    sequences.to_file(ns.sequence, out, name=ns.name)
    _emit({"command": "sequences",
           "config": {"action": "export", "name": args.name, "out": out},
           "result": {"written": out, "frames": len(ns.frames)}})
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="pulseforge",
        description="Pulse-sequence search, verification, and Ramsey simulation")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("search", help="MILP pulse-sequence search")
    ps.add_argument("--model", choices=sorted(MODEL_DIMS), required=True)
    ps.add_argument("--target", choices=search.TARGETS, required=True)
    ps.add_argument("--alpha", type=float, default=search.DEFAULT_ALPHA,
                    help="distinct-class penalty weight")
    ps.add_argument("--weight-cap", type=int, default=search.DEFAULT_WEIGHT_CAP)
    ps.add_argument("--beta-min", type=float, default=search.DEFAULT_BETA_MIN)
    ps.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)
    ps.add_argument("--out", default="result.json")
    ps.set_defaults(func=_cmd_search)

    pv = sub.add_parser("verify", help="average-Hamiltonian report")
    pv.add_argument("sequence", help="registry name or sequence JSON file")
    pv.add_argument("--tau", type=float, default=1.0)
    pv.add_argument("--out", default=None)
    pv.set_defaults(func=_cmd_verify)

    pm = sub.add_parser("simulate", help="ensemble Ramsey trace to CSV")
    pm.add_argument("--sequence", default="none",
                    help="registry name, JSON file, or 'none' for free evolution")
    pm.add_argument("--basis", choices=sim.BASES, required=True)
    pm.add_argument("--samples", type=int, default=None,
                    help="ensemble draws (default 10000 with --gamma > 0)")
    pm.add_argument("--cycles", type=int, default=sim.DEFAULT_CYCLES)
    pm.add_argument("--tau", type=float, default=None,
                    help="base interval (default: 20 points per fringe)")
    pm.add_argument("--seed", type=int, default=0)
    pm.add_argument("--gamma", type=float, default=DEFAULT_GAMMA,
                    help="coupling distribution scale; 0 disables draws")
    pm.add_argument("--j", type=float, default=0.0,
                    help="fixed pair coupling used when draws are disabled")
    pm.add_argument("--omega0", type=float, default=DEFAULT_GAMMA_BZ,
                    help="Zeeman angular frequency gamma*B_z")
    pm.add_argument("--threads", type=int, default=None,
                    help=f"worker count (default ${sim.THREADS_ENV} or 1)")
    pm.add_argument("--out", default="fid.csv")
    pm.set_defaults(func=_cmd_simulate)

    pf = sub.add_parser("spectrum", help="DFT magnitude of a trace CSV")
    pf.add_argument("fid", help="trace CSV from simulate")
    pf.add_argument("--omega0", type=float, default=DEFAULT_GAMMA_BZ)
    pf.add_argument("--out", default="spec.csv")
    pf.set_defaults(func=_cmd_spectrum)

    pq = sub.add_parser("sequences", help="registry listing and export")
    qsub = pq.add_subparsers(dest="action", required=True)
    ql = qsub.add_parser("list", help="tabulated registry data")
    ql.set_defaults(func=_cmd_sequences, action="list")
    qe = qsub.add_parser("export", help="write a registry sequence to JSON")
    qe.add_argument("name")
    qe.add_argument("--out", default=None)
    qe.set_defaults(func=_cmd_sequences, action="export")

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, RuntimeError,
            json.JSONDecodeError) as exc:
        print(f"pulseforge: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
