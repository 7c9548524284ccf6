"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import coherence as coh
from . import dynamics as dyn
from .errors import HswError
from .graph import BASELINE_FAMILIES, build_baseline, compute_metrics, format_edgelist
from .hsw import build_hsw
from .spectral import (
    SpectrumResult,
    baseline_extremes,
    closed_form_spectrum,
    extremes,
    numeric_spectrum,
    transition_spectrum,
)


@dataclass
class CommandResult:
    exit_code: int
    artifacts: list[str] = field(default_factory=list)
    summary: str = ""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _add_graph_args(p: argparse.ArgumentParser, default_family: str = "hsw") -> None:
    p.add_argument("--family", choices=list(BASELINE_FAMILIES) + ["hsw"], default=default_family)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--g", type=int)
    p.add_argument("--n", type=int)


def _add_output_args(p: argparse.ArgumentParser, formats: tuple[str, ...]) -> None:
    p.add_argument("--out")
    p.add_argument("--format", choices=formats, default=formats[0])


def _parser() -> _Parser:
    parser = _Parser(prog="hswnet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a graph as an edge list or JSON descriptor")
    _add_graph_args(p)
    _add_output_args(p, ("edges", "json"))

    p = sub.add_parser("spectrum", help="Laplacian spectrum, optionally verified numerically")
    _add_graph_args(p)
    p.add_argument("--verify", action="store_true")
    _add_output_args(p, ("json", "csv"))

    p = sub.add_parser("coherence", help="first/second-order coherence and Kirchhoff index")
    _add_graph_args(p)
    p.add_argument("--order", type=int, choices=(1, 2), default=1)
    p.add_argument("--verify", action="store_true")
    _add_output_args(p, ("json",))

    p = sub.add_parser("bounds", help="coherence bounds and the Fiedler chain")
    _add_graph_args(p)
    _add_output_args(p, ("json",))

    p = sub.add_parser("scaling", help="closed-form coherence for g = 1..g_max")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--g", type=int, required=True, help="largest generation g_max")
    _add_output_args(p, ("csv", "json"))

    p = sub.add_parser("simulate", help="run one of the consensus protocols")
    _add_graph_args(p, default_family="hsw")
    p.add_argument("--protocol", choices=("noiseless", "delay", "noise1", "noise2"), required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--dt", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--burnin", type=int)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    _add_output_args(p, ("json", "csv"))

    p = sub.add_parser("compare", help="lambda_2 and lambda_N for the baseline families")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--g", type=int, help="also list M_g^r")
    p.add_argument("--verify", action="store_true")
    _add_output_args(p, ("csv", "json"))
    return parser


def _graph(args):
    """Return ``(graph, net_or_None, label)`` for the selected family."""
    if args.family == "hsw":
        if args.g is None:
            raise _UsageError("--family hsw needs --g")
        net = build_hsw(args.r, args.g)
        return net.graph, net, f"M_{args.g}^{args.r}"
    if args.n is None:
        raise _UsageError(f"--family {args.family} needs --n")
    return build_baseline(args.family, args.n), None, f"{args.family}({args.n})"


def _emit(text: str, args, artifacts: list[str], out: str | None = None) -> None:
    path = out if out is not None else args.out
    if path:
        Path(path).write_text(text)
        artifacts.append(str(path))
    else:
        sys.stdout.write(text)


def _exact_baseline_spectrum(family: str, n: int) -> list[float]:
    if family == "path":
        vals = [2 - 2 * math.cos(math.pi * k / n) for k in range(n)]
    elif family == "cycle":
        vals = [2 - 2 * math.cos(2 * math.pi * k / n) for k in range(n)]
    elif family == "star":
        vals = [0.0] + [1.0] * (n - 2) + [float(n)]
    else:
        vals = [0.0] + [float(n)] * (n - 1)
    return sorted(vals)


def cmd_generate(args, artifacts):
    graph, net, label = _graph(args)
    if args.format == "edges":
        text = format_edgelist(graph)
    elif net is not None:
        text = dumps(net.descriptor()) + "\n"
    else:
        text = dumps({"family": args.family, "n": graph.n, "m": graph.m}) + "\n"
    _emit(text, args, artifacts)
    return 0, f"{label}: n={graph.n} m={graph.m}"


def _spectrum_csv(spec: SpectrumResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "mult"])
    for lam, m in spec.pairs:
        w.writerow([format(lam, ".17g"), m])
    return buf.getvalue()


def cmd_spectrum(args, artifacts):
    graph, net, label = _graph(args)
    spec = closed_form_spectrum(args.r, args.g) if net is not None and args.g >= 1 else numeric_spectrum(graph)
    code = 0
    note = ""
    if args.verify:
        num = numeric_spectrum(graph)
        if net is not None and args.g >= 1:
            ok = len(num.pairs) == len(spec.pairs) and all(
                abs(a - b) <= 1e-8 and ma == mb for (a, ma), (b, mb) in zip(spec.pairs, num.pairs)
            )
        else:
            exact = _exact_baseline_spectrum(args.family, graph.n) if net is None else [0.0]
            ok = bool(np.max(np.abs(num.eigenvalues() - np.array(exact))) <= 1e-8)
        code = 0 if ok else 1
        note = " verify=" + ("pass" if ok else "FAIL")
    text = dumps(spec.as_dict()) + "\n" if args.format == "json" else _spectrum_csv(spec)
    _emit(text, args, artifacts)
    return code, f"{label}: {len(spec.pairs)} distinct eigenvalues ({spec.source}){note}"


def cmd_coherence(args, artifacts):
    graph, net, label = _graph(args)
    if net is not None:
        spec = closed_form_spectrum(args.r, args.g)
        closed = coh.h1_closed(args.r, args.g) if args.order == 1 else coh.h2_closed(args.r, args.g)
    else:
        spec = numeric_spectrum(graph)
        closed = None
    value = coh.coherence_from_spectrum(spec, args.order)
    R, h1_R = coh.kirchhoff_index(spec)
    out = {"graph": label, "n": graph.n, "order": args.order, "coherence": value, "kirchhoff": R,
           "h1_from_kirchhoff": h1_R}
    code = 0
    if closed is not None:
        out["closed_form"] = closed
        if args.verify:
            ok = abs(closed - value) <= 1e-12 * abs(value)
            out["verify"] = ok
            code = 0 if ok else 1
    _emit(dumps(out) + "\n", args, artifacts)
    return code, f"{label}: H{args.order} = {value:.17g}"


def cmd_bounds(args, artifacts):
    graph, _, label = _graph(args)
    spec = numeric_spectrum(graph)
    report = coh.bound_report(graph, spec, transition_spectrum(graph), compute_metrics(graph))
    out = {"graph": label} | report.as_dict()
    _emit(dumps(out) + "\n", args, artifacts)
    failed = [k for k, v in report.checks.items() if not v]
    return (0 if not failed else 1), f"{label}: " + ("all bounds hold" if not failed else "failed " + ",".join(failed))


def cmd_scaling(args, artifacts):
    rows = coh.scaling_table(args.r, args.g)
    if args.format == "csv":
        text = coh.scaling_csv(rows)
    else:
        text = dumps([row.__dict__ for row in rows]) + "\n"
    _emit(text, args, artifacts)
    return 0, f"scaling r={args.r}: {len(rows)} rows"


def cmd_compare(args, artifacts):
    rows = []
    n = args.n
    for fam in BASELINE_FAMILIES:
        graph = build_baseline(fam, n)
        rows.append((fam, graph))
    if args.g is not None:
        net = build_hsw(args.r, args.g)
        rows.append(("hsw", net.graph))
    table = []
    all_ok = True
    for fam, graph in rows:
        l2, ln = baseline_extremes(fam, graph.n)
        ext = extremes(numeric_spectrum(graph))
        ok = abs(l2 - ext.lambda2) <= 1e-9 and abs(ln - ext.lambdaN) <= 1e-9
        all_ok &= ok
        table.append({"family": fam, "n": graph.n, "lambda2_closed": l2, "lambdaN_closed": ln,
                      "lambda2_numeric": ext.lambda2, "lambdaN_numeric": ext.lambdaN, "match": ok})
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(table[0]))
        for row in table:
            w.writerow([format(v, ".17g") if isinstance(v, float) else str(v).lower() if isinstance(v, bool) else v
                        for v in row.values()])
        text = buf.getvalue()
    else:
        text = dumps(table) + "\n"
    _emit(text, args, artifacts)
    mismatched = [r["family"] for r in table if not r["match"]]
    code = 1 if (args.verify and mismatched) else 0
    return code, f"compare n={n}: " + ("all match" if not mismatched else "mismatch " + ",".join(mismatched))


def cmd_simulate(args, artifacts):
    graph, net, label = _graph(args)
    ext = extremes(numeric_spectrum(graph))
    summary = {"protocol": args.protocol, "graph": label, "n": graph.n}
    if args.protocol in ("noiseless", "delay"):
        dt = args.dt if args.dt is not None else 0.1 / ext.lambdaN
        steps = args.steps if args.steps is not None else math.ceil(40 / ext.lambda2 / dt)
        record = max(1, math.ceil(steps / 10_000))
        x0 = np.random.default_rng(args.seed).uniform(-1.0, 1.0, graph.n)
        cfg = dyn.SimConfig(dt=dt, steps=steps, seed=args.seed, eps=args.eps, record_every=record)
        if args.protocol == "noiseless":
            trace = dyn.simulate_noiseless(graph, x0, cfg)
            passed = trace.converged
        else:
            trace = dyn.simulate_delay(graph, x0, cfg)
            predicted = args.eps < ext.eps_max
            passed = trace.converged if predicted else trace.diverged
            summary["eps"] = args.eps
            summary["eps_max"] = ext.eps_max
            summary["predicted_converge"] = predicted
        summary |= {"dt": dt, "steps": steps, "trials": 1, "seed": args.seed,
                    "mean_x0": float(np.mean(x0)), "final_disagreement": float(trace.disagreement[-1]),
                    "max_mean_step": trace.max_mean_step,
                    "converged": trace.converged, "diverged": trace.diverged, "pass": passed}
        if args.format == "csv":
            if not args.out:
                raise _UsageError("--format csv needs --out for the trace")
            _emit(trace.to_csv(), args, artifacts)
            _emit(dumps(summary) + "\n", args, artifacts, out=str(Path(args.out).with_suffix(".json")))
        else:
            _emit(dumps(summary) + "\n", args, artifacts)
        state = "diverged" if trace.diverged else ("converged" if trace.converged else "not converged")
        return (0 if passed else 1), f"{label} {args.protocol}: {state}"

    order = 1 if args.protocol == "noise1" else 2
    base = dyn.default_noisy_config(graph, order, trials=args.trials, seed=args.seed, dt=args.dt)
    burn = args.burnin if args.burnin is not None else base.burn_in
    steps = args.steps if args.steps is not None else base.steps
    cfg = dyn.SimConfig(dt=base.dt, steps=steps, burn_in=burn, trials=args.trials, seed=args.seed)
    means = dyn.noisy_trial_means(graph, cfg, order)
    est = float(np.mean(means))
    err = float(np.std(means, ddof=1) / math.sqrt(len(means))) if len(means) > 1 else float("nan")
    target = coh.coherence_from_spectrum(numeric_spectrum(graph), order)
    passed = dyn.noisy_pass(est, err, target)
    summary |= {"dt": cfg.dt, "steps": cfg.steps, "burnin": cfg.burn_in, "trials": cfg.trials,
                "seed": cfg.seed, "estimate": est, "stderr": err, "target": target,
                "noise": "unit-intensity Brownian increments per agent", "pass": passed}
    if args.format == "csv":
        if not args.out:
            raise _UsageError("--format csv needs --out for the per-trial table")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "estimate"])
        for t, v in enumerate(means):
            w.writerow([t, format(float(v), ".17g")])
        _emit(buf.getvalue(), args, artifacts)
        _emit(dumps(summary) + "\n", args, artifacts, out=str(Path(args.out).with_suffix(".json")))
    else:
        _emit(dumps(summary) + "\n", args, artifacts)
    return (0 if passed else 1), f"{label} H{order}: estimate {est:.6g} vs {target:.6g}"


_COMMANDS = {
    "generate": cmd_generate,
    "spectrum": cmd_spectrum,
    "coherence": cmd_coherence,
    "bounds": cmd_bounds,
    "scaling": cmd_scaling,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


def run(argv: list[str] | None = None) -> CommandResult:
    artifacts: list[str] = []
    try:
        args = _parser().parse_args(argv)
        code, summary = _COMMANDS[args.command](args, artifacts)
    except _UsageError as exc:
        return CommandResult(2, artifacts, f"usage error: {exc}")
    except SystemExit as exc:  # --help
        return CommandResult(int(exc.code or 0), artifacts, "")
    except (HswError, ValueError, OverflowError) as exc:
        return CommandResult(2, artifacts, f"error: {exc}")
    return CommandResult(code, artifacts, summary)


def main(argv: list[str] | None = None) -> None:
    result = run(argv)
    print(result.summary, file=sys.stderr)
    sys.exit(result.exit_code)


if __name__ == "__main__":
    main()
