"""Command line front end for the experiment runner.

Subcommands: verify (one kind, one grid), sweep (same family at N and 2N),
trace (extrapolation proof chain), list-kinds.  Exit codes: 0 when every
requested gate passed, 2 when an exact-identity or stability gate failed,
3 when the configuration violates a hypothesis of the targeted statement.
"""

import argparse
import json
import sys

from . import harness
from .grid import GridSpec


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors, not gate failures; argparse's
    # default exit code 2 is reserved for failed identity gates
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(3)


def _parse_grid(text):
    parts = str(text).split(",")
    if len(parts) != 3:
        raise harness.InadmissibleConfigError(
            f"--grid expects 'n,N,L' (for example 1,1024,32), got {text!r}"
        )
    return GridSpec(int(parts[0]), int(parts[1]), float(parts[2]))


def _load_config(ns):
    data = {}
    if getattr(ns, "config", None):
        with open(ns.config, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise harness.InadmissibleConfigError("config file must hold a JSON object")
    if ns.kind is not None:
        data["kind"] = ns.kind
    if "kind" not in data:
        raise harness.InadmissibleConfigError(
            "no experiment kind given; pass it positionally or in the config file"
        )
    if ns.grid is not None:
        grid = _parse_grid(ns.grid)
        data["grid"] = {"n": grid.n, "N": grid.N, "L": grid.L}
    if ns.seed is not None:
        data["seed"] = ns.seed
    if getattr(ns, "family_size", None) is not None:
        data["family_size"] = ns.family_size
    return harness.ExperimentConfig.from_dict(data)


def _print_report(report, out=None):
    out = out if out is not None else sys.stdout
    cfg = report.config
    grid = cfg["grid"]
    out.write(
        f"kind {report.kind}  config {report.config_hash}  "
        f"grid n={grid['n']} N={grid['N']} L={grid['L']:g}  seed {cfg['seed']}\n"
    )
    for g in report.gates:
        status = "pass" if g.passed else "FAIL"
        out.write(f"  gate {g.name}: defect {g.defect:.3e} (tol {g.tol:.1e}) {status}\n")
    out.write(
        f"  rows {len(report.rows)}  ratio max {report.max_ratio:.6g}  "
        f"mean {report.mean_ratio:.6g}  min {report.min_ratio:.6g}\n"
    )
    if report.refinement_stability is not None:
        out.write(f"  refinement stability {report.refinement_stability:.4f}\n")
    for key in sorted(report.extras):
        value = report.extras[key]
        if isinstance(value, float):
            out.write(f"  {key} {value:.6g}\n")
        else:
            out.write(f"  {key} {value}\n")


def _maybe_emit(report, ns):
    if ns.out:
        harness.emit(report, ns.format, ns.out)
        print(f"wrote {ns.format} report to {ns.out}")


def _cmd_verify(ns):
    cfg = _load_config(ns)
    report = harness.run_experiment(cfg)
    _print_report(report)
    _maybe_emit(report, ns)
    return 0


def _cmd_sweep(ns):
    cfg = _load_config(ns)
    report = harness.sweep_refinement(cfg, factor=ns.factor)
    _print_report(report)
    _maybe_emit(report, ns)
    if report.refinement_stability > ns.stability_tol:
        print(
            f"refinement stability {report.refinement_stability:.4f} exceeds "
            f"{ns.stability_tol:g}",
            file=sys.stderr,
        )
        return 2
    return 0


def _cmd_trace(ns):
    grid = _parse_grid(ns.grid) if ns.grid is not None else None
    reports = harness.run_trace_family(
        grid=grid, instances=ns.instances, seed=ns.seed or 0
    )
    names = [step.name for step in reports[0].steps]
    print(f"traced {len(reports)} instances; per-step minimum slack:")
    failed = False
    for i, name in enumerate(names):
        slacks = [rep.steps[i].slack for rep in reports]
        ok = all(rep.steps[i].passed for rep in reports)
        failed = failed or not ok
        print(f"  {name}: min slack {min(slacks):.6g} {'pass' if ok else 'FAIL'}")
    print(f"note: {reports[0].note}")
    if ns.out:
        harness.emit_trace(reports, ns.format, ns.out)
        print(f"wrote {ns.format} trace to {ns.out}")
    if failed:
        print("a proof-chain step reported negative slack", file=sys.stderr)
        return 2
    return 0


def _cmd_list_kinds(ns):
    for kind in harness.KINDS:
        print(f"{kind:20s} {harness.KIND_DESCRIPTIONS[kind]}")
    return 0


def _add_common(sp, family=True):
    sp.add_argument("--config", help="JSON config file; explicit flags override its fields")
    sp.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    sp.add_argument("--grid", default=None, help="grid as n,N,L (default 1,1024,32)")
    sp.add_argument("--out", default=None, help="write the report to this path")
    sp.add_argument("--format", default="csv", choices=("csv", "json"))
    if family:
        sp.add_argument(
            "--family-size", dest="family_size", type=int, default=None,
            help="number of sampled functions or pairs",
        )


def build_parser():
    parser = _Parser(prog="fracleib", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run one experiment kind on one grid")
    p_verify.add_argument("kind", nargs="?", help="experiment kind; see list-kinds")
    _add_common(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_sweep = sub.add_parser("sweep", help="run the same family at N and factor*N")
    p_sweep.add_argument("kind", nargs="?", help="experiment kind; see list-kinds")
    p_sweep.add_argument("--factor", type=int, default=2)
    p_sweep.add_argument(
        "--stability-tol", dest="stability_tol", type=float, default=0.20,
        help="max allowed relative drift of the max ratio",
    )
    _add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_trace = sub.add_parser("trace", help="walk the extrapolation proof chain")
    p_trace.add_argument("--instances", type=int, default=50)
    p_trace.add_argument("--seed", type=int, default=None)
    p_trace.add_argument("--grid", default=None)
    p_trace.add_argument("--out", default=None)
    p_trace.add_argument("--format", default="csv", choices=("csv", "json"))
    p_trace.set_defaults(func=_cmd_trace)

    p_list = sub.add_parser("list-kinds", help="print the experiment catalog")
    p_list.set_defaults(func=_cmd_list_kinds)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        return ns.func(ns)
    except SystemExit as exc:
        code = exc.code
        return 0 if code is None else int(code)
    except harness.IdentityGateError as exc:
        print(f"identity gate failure: {exc}", file=sys.stderr)
        return 2
    except harness.InadmissibleConfigError as exc:
        print(f"inadmissible configuration: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main(argv=None))
