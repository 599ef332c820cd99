"""Command-line front end.

Exit codes follow a three-way protocol so the certificate commands double as
CI gates: 0 on success, 1 when a certified claim is violated, 2 on input or
validation errors.  Every file output carries enough configuration to
reproduce it: JSON reports embed a "config" object, delimited outputs get a
"<path>.meta.json" sidecar.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from ._util import fmt17, parallel_map

USAGE_ERROR = 2
CLAIM_VIOLATION = 1


def _fail_input(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return USAGE_ERROR


def _load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValueError(f"input file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ValueError(f"malformed JSON in {path}: {e}") from None


def _config_dict(args: argparse.Namespace, keys) -> dict:
    cfg = {"command": args.command}
    for k in keys:
        cfg[k] = getattr(args, k.replace("-", "_"))
    return cfg


def _write_sidecar(out_path: str, config: dict) -> None:
    with open(out_path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(config, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _emit_report(obj: dict, config: dict, out, fmt: str) -> None:
    obj = dict(obj)
    obj["config"] = config
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    del fmt  # reports are JSON regardless; csv applies to table outputs


def _states_from_args(args) -> "object":
    from .optimizer import random_density_pair
    from .qstate import parse_state_pair, to_real_basis, validate_pair

    if getattr(args, "input", None):
        obj = _load_json_file(args.input)
        pair = parse_state_pair(obj)
        result = validate_pair(pair)
        if not result.ok:
            raise ValueError("; ".join(result.violations))
        return to_real_basis(pair)
    if getattr(args, "seed", None) is None:
        raise ValueError("either --input or --seed is required")
    return random_density_pair(args.seed)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_mutual_info(args) -> int:
    import numpy as np

    from .measure import JointDistribution, mutual_information, parse_povm
    from .qstate import parse_state_pair, validate_pair

    obj = _load_json_file(args.input)
    pair = parse_state_pair(obj)
    result = validate_pair(pair)
    if not result.ok:
        raise ValueError("; ".join(result.violations))
    povm = parse_povm(obj)
    # evaluate in the input basis: the supplied measurement refers to it
    table = np.empty((2, povm.n))
    for r, rho in enumerate((pair.rho1, pair.rho2)):
        for j, pi in enumerate(povm.outcomes):
            table[r, j] = float(np.sum(rho * pi).real)
    bits = mutual_information(JointDistribution.from_table(table))
    print(repr(bits))
    return 0


def cmd_f_curve(args) -> int:
    from .stationary import StationaryParams, sample_curve

    try:
        params = StationaryParams(
            alpha1=args.alpha1,
            alpha2=1.0 - args.alpha1,
            xi1=args.xi1,
            eta1=args.eta1,
            xi2=args.xi2,
            eta2=args.eta2,
        )
    except ValueError as e:
        raise ValueError(f"invalid parameters ({e}); need 0 <= xi^2 < eta") from None
    if args.samples < 2:
        raise ValueError("--samples must be >= 2")
    ts, f, fp, fpp = sample_curve(params, args.t_min, args.t_max, args.samples)
    lines = ["t,f,fprime,fsecond"]
    for i in range(len(ts)):
        lines.append(
            ",".join((fmt17(ts[i]), fmt17(f[i]), fmt17(fp[i]), fmt17(fpp[i])))
        )
    text = "\n".join(lines) + "\n"
    cfg = _config_dict(
        args, ("alpha1", "xi1", "eta1", "xi2", "eta2", "t_min", "t_max", "samples")
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _write_sidecar(args.out, cfg)
    else:
        sys.stdout.write(text)
    if args.plot:
        from .plots import plot_f_curve

        if not args.out:
            raise ValueError("--plot requires --out (figure path derives from it)")
        plot_f_curve(ts, f, fp, fpp, args.out + ".png")
    return 0


def cmd_optimize(args) -> int:
    from .optimizer import verify_conjecture

    states = _states_from_args(args)
    report = verify_conjecture(
        states, restarts=args.restarts, seed=args.seed or 0, tol_gap=args.tol_gap
    )
    cfg = _config_dict(args, ("input", "seed", "restarts", "tol_gap"))
    _emit_report(report.to_dict(), cfg, args.out, args.format)
    if args.plot:
        from .plots import plot_vn_landscape

        if not args.out:
            raise ValueError("--plot requires --out (figure path derives from it)")
        vn_param, vn_bits = report.best_vn
        plot_vn_landscape(states, vn_param.theta, vn_bits, args.out + ".png")
    return 0


def _verify_one(args) -> int:
    from .optimizer import verify_conjecture

    states = _states_from_args(args)
    report = verify_conjecture(
        states,
        restarts=args.restarts,
        seed=args.seed or 0,
        tol_gap=args.tol_gap,
        stress=args.stress,
    )
    cfg = _config_dict(
        args, ("input", "seed", "restarts", "tol_gap", "samples", "stress")
    )
    _emit_report(report.to_dict(), cfg, args.out, args.format)
    if args.plot:
        from .plots import plot_vn_landscape

        if not args.out:
            raise ValueError("--plot requires --out (figure path derives from it)")
        vn_param, vn_bits = report.best_vn
        plot_vn_landscape(states, vn_param.theta, vn_bits, args.out + ".png")
    if not report.passed:
        print(
            f"violation: gap={report.gap_bits!r} collapsed={report.collapsed} "
            f"max_residual={report.max_residual!r}",
            file=sys.stderr,
        )
        return CLAIM_VIOLATION
    return 0


def _verify_sweep_worker(task):
    from .optimizer import random_density_pair, verify_conjecture

    seed, restarts, tol_gap, stress = task
    report = verify_conjecture(
        random_density_pair(seed),
        restarts=restarts,
        seed=seed,
        tol_gap=tol_gap,
        stress=stress,
    )
    return (seed, report.gap_bits, report.collapsed, report.max_residual, report.passed)


def cmd_verify(args) -> int:
    if args.samples is None:
        return _verify_one(args)
    if args.seed is None:
        raise ValueError("--samples sweeps require --seed")
    tasks = [
        (args.seed + i, args.restarts, args.tol_gap, args.stress)
        for i in range(args.samples)
    ]
    rows = parallel_map(_verify_sweep_worker, tasks)
    lines = ["seed,gap_bits,collapsed,max_residual"]
    for seed, gap, collapsed, resid, _ in rows:
        lines.append(f"{seed},{fmt17(gap)},{str(collapsed).lower()},{fmt17(resid)}")
    text = "\n".join(lines) + "\n"
    cfg = _config_dict(
        args, ("seed", "samples", "restarts", "tol_gap", "stress")
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _write_sidecar(args.out, cfg)
    else:
        sys.stdout.write(text)
    if args.plot:
        from .plots import plot_gap_sweep

        if not args.out:
            raise ValueError("--plot requires --out (figure path derives from it)")
        plot_gap_sweep([r[1] for r in rows], args.out + ".png")
    bad = [r for r in rows if not r[4]]
    n = len(rows)
    print(f"verified {n - len(bad)}/{n} pairs", file=sys.stderr)
    if bad:
        for seed, gap, collapsed, resid, _ in bad[:10]:
            print(
                f"violation at seed {seed}: gap={gap!r} collapsed={collapsed} "
                f"max_residual={resid!r}",
                file=sys.stderr,
            )
        return CLAIM_VIOLATION
    return 0


def _parse_grid(spec: str):
    from .polycert import GridSpec

    if spec is None:
        return GridSpec()
    parts = spec.lower().split("x")
    try:
        if len(parts) == 1:
            na = ns = nx = int(parts[0])
        elif len(parts) == 3:
            na, ns, nx = (int(p) for p in parts)
        else:
            raise ValueError
    except ValueError:
        raise ValueError(f"--grid must be N or NAxNSxNX, got {spec!r}") from None
    if min(na, ns, nx) < 1:
        raise ValueError("--grid resolutions must be >= 1")
    base = GridSpec()
    return GridSpec(
        alpha1=(base.alpha1[0], base.alpha1[1], na),
        xi_sq=(base.xi_sq[0], base.xi_sq[1], ns),
        X=(base.X[0], base.X[1], nx),
    )


def cmd_certify(args) -> int:
    from .polycert import certify_domain

    grid = _parse_grid(args.grid)
    run = certify_domain(grid)
    lines = []
    for c in run.certificates:
        lines.append(
            json.dumps(
                {
                    "alpha1": c.alpha1,
                    "xi_sq": c.xi_sq,
                    "X": c.X,
                    "delta": c.delta_formula,
                    "root_count": c.root_count,
                    "pass": c.passed,
                }
            )
        )
    lines.append(
        json.dumps(
            {
                "summary": True,
                "points": len(run.certificates),
                "passed": run.n_pass,
                "sign": run.sign,
                "base_root_count": run.base_root_count,
                "min_margin": run.min_margin,
            }
        )
    )
    text = "\n".join(lines) + "\n"
    cfg = _config_dict(args, ("grid",))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _write_sidecar(args.out, cfg)
    else:
        sys.stdout.write(text)
    if args.plot:
        from .plots import plot_certificate_margins

        if not args.out:
            raise ValueError("--plot requires --out (figure path derives from it)")
        plot_certificate_margins(run.certificates, args.out + ".png")
    print(
        f"certified {run.n_pass}/{len(run.certificates)} points, "
        f"min margin {run.min_margin!r}",
        file=sys.stderr,
    )
    if not run.ok:
        v = run.violations[0]
        print(
            f"violation at alpha1={v.alpha1!r} xi_sq={v.xi_sq!r} X={v.X!r}",
            file=sys.stderr,
        )
        return CLAIM_VIOLATION
    return 0


def _sweep_worker(seed: int):
    from .stationary import count_roots_of_f, random_params

    result = count_roots_of_f(random_params(seed))
    return (seed, result.count, result.identically_zero)


def cmd_sweep(args) -> int:
    if args.seed is None:
        raise ValueError("--seed is required (base seed of the draws)")
    seeds = range(args.seed, args.seed + args.samples)
    rows = parallel_map(_sweep_worker, list(seeds))
    lines = ["seed,root_count,identically_zero"]
    for seed, count, iz in rows:
        lines.append(f"{seed},{count},{str(iz).lower()}")
    text = "\n".join(lines) + "\n"
    cfg = _config_dict(args, ("seed", "samples"))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _write_sidecar(args.out, cfg)
    else:
        sys.stdout.write(text)
    if args.plot:
        from .plots import plot_root_count_hist

        if not args.out:
            raise ValueError("--plot requires --out (figure path derives from it)")
        plot_root_count_hist([r[1] for r in rows], args.out + ".png")
    counts = [r[1] for r in rows]
    worst = max(counts) if counts else 0
    print(f"max root count = {worst} over {len(rows)} draws", file=sys.stderr)
    bad = [r for r in rows if r[1] > 2]
    if bad:
        for seed, count, _ in bad[:10]:
            print(f"violation at seed {seed}: {count} roots", file=sys.stderr)
        return CLAIM_VIOLATION
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qaccess",
        description=(
            "Accessible information of two-state qubit ensembles: "
            "optimization, stationarity analysis, and certificates."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, seeded=False, report=False):
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument(
            "--plot",
            action="store_true",
            help="also render a figure next to --out (<out>.png)",
        )
        if seeded:
            p.add_argument("--seed", type=int, default=None, help="random seed")
        if report:
            p.add_argument(
                "--format",
                choices=("json", "csv"),
                default="json",
                help="report format (reports are JSON; tables are CSV)",
            )

    p = sub.add_parser("mutual-info", help="mutual information of a pair and a POVM")
    p.add_argument(
        "--input",
        required=True,
        help="JSON file with rho1, rho2 and kets or outcomes",
    )

    p = sub.add_parser("f-curve", help="sample the stationarity function f")
    p.add_argument("--alpha1", type=float, default=0.5)
    p.add_argument("--xi1", type=float, default=2.0)
    p.add_argument("--eta1", type=float, default=5.0)
    p.add_argument("--xi2", type=float, default=0.0)
    p.add_argument("--eta2", type=float, default=1.0)
    p.add_argument("--t-min", type=float, default=-10.0)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=2001)
    add_common(p)

    p = sub.add_parser("optimize", help="optimize measurements for one pair")
    p.add_argument("--input", default=None, help="state-pair JSON file")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--tol-gap", type=float, default=1e-6)
    add_common(p, seeded=True, report=True)

    p = sub.add_parser("verify", help="conjecture check: one pair or a seeded sweep")
    p.add_argument("--input", default=None, help="state-pair JSON file")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--tol-gap", type=float, default=1e-6)
    p.add_argument(
        "--samples",
        type=int,
        default=None,
        help="sweep this many seeded random pairs instead of one",
    )
    p.add_argument(
        "--stress",
        action="store_true",
        help="also run the 4-outcome stress search",
    )
    add_common(p, seeded=True, report=True)

    p = sub.add_parser("certify", help="discriminant certificate over the domain grid")
    p.add_argument(
        "--grid",
        default=None,
        help="resolution N or NAxNSxNX (default 50x50x50)",
    )
    add_common(p)

    p = sub.add_parser("sweep", help="root-count certificate over seeded draws")
    p.add_argument("--samples", type=int, default=10000)
    add_common(p, seeded=True)

    return parser


_HANDLERS = {
    "mutual-info": cmd_mutual_info,
    "f-curve": cmd_f_curve,
    "optimize": cmd_optimize,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ValueError as e:
        return _fail_input(str(e))
    except OSError as e:
        return _fail_input(str(e))


if __name__ == "__main__":
    sys.exit(main())
