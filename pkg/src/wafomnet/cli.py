"""Command line entry point: ``wafomnet <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import check_divides, parse_range
from .f2 import GeneratingMatrixSet
from .genz import FAMILIES, H_PRESETS, GenzInstance, default_h, instance_for, log10_relerr, run_benchmark
from .integrate import IntegrationRequest, NonFiniteIntegrandError, qmc_integrate
from .io import MatrixFormatError, fmt_float, format_matrices, read_matrices, write_csv, write_manifest
from .search import SearchConfig, search_extensible
from .seqgen import PrimitivePoly, primitive_poly, search_sequential, seqgen_as_digital_net
from .wafom import build_tables, wafom_naive, wafom_tabled

log = logging.getLogger("wafomnet")


class UsageError(ValueError):
    pass


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _range(text: str) -> tuple[int, int]:
    try:
        return parse_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}: expected A..B") from exc


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return v


def _default_threads() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _load(path) -> GeneratingMatrixSet:
    if not Path(path).is_file():
        raise FileNotFoundError(f"matrix file not found: {path}")
    return read_matrices(path)


PROVENANCE_PREFIXES = ("# searched by wafomnet", "# sequential generator from wafomnet")


def _resolve_shift(args) -> bool:
    """Explicit ``--shift`` wins; otherwise shift only nets this tool searched."""
    if args.shift is not None:
        return args.shift
    with open(args.matrices) as fh:
        return any(line.startswith(PROVENANCE_PREFIXES) for line in fh)


def _depths(args, G: GeneratingMatrixSet) -> list[int]:
    if args.d is not None:
        lo = hi = args.d
    else:
        lo, hi = args.d_range
    if lo < 0 or hi > G.m:
        raise UsageError(f"depth must lie in [0, {G.m}] for this matrix file")
    return list(range(lo, hi + 1))


def _seqgen_out(template: str, d: int, multi: bool) -> str:
    if "{d}" in template:
        return template.format(d=d)
    if not multi:
        return template
    p = Path(template)
    return str(p.with_name(f"{p.stem}.d{d}{p.suffix}"))


# subcommands return the list of files they wrote


def cmd_search(args) -> list[str]:
    cfg = SearchConfig(
        n=args.n,
        m=args.m,
        S=args.s,
        M=args.trials,
        q=args.q,
        master_seed=args.seed,
        max_resident_d=args.max_resident_d,
        n_jobs=args.threads,
    )
    G, trace = search_extensible(cfg)
    note = [
        f"searched by wafomnet {__version__}: n={cfg.n} m={cfg.m} S={cfg.S}"
        f" M={cfg.M} q={cfg.q} seed={cfg.master_seed}"
    ]
    Path(args.out).write_text(format_matrices(G, note))
    written = [args.out]
    if args.trace:
        rows = [
            (r.d, float(r.best_wafom), _log10(r.best_wafom), r.rejections, float(r.seconds))
            for r in trace
        ]
        write_csv(args.trace, ["d", "best_wafom", "log10_wafom", "rejections", "seconds"], rows)
        written.append(args.trace)
    return written


def _log10(x: float) -> float:
    return math.log10(x) if x > 0 else -math.inf


def cmd_seqgen_search(args) -> list[str]:
    check_divides(args.n, args.q)
    if args.d is not None:
        ds = [args.d]
    else:
        lo, hi = args.d_range
        ds = list(range(lo, hi + 1))
    for d in ds:
        if not 2 <= d <= min(args.n, 32):
            raise UsageError(f"degree d={d} must lie in [2, {min(args.n, 32)}]")
    if args.poly is not None and len(ds) > 1:
        raise UsageError("--poly fixes a single degree; use --d")
    if args.trials_mode == "shared":
        base, extra = divmod(args.trials, len(ds))
        budget = [base + (i < extra) for i in range(len(ds))]
        if min(budget) < 1:
            raise UsageError("shared trial budget is smaller than the number of degrees")
    else:
        budget = [args.trials] * len(ds)
    tables = build_tables(args.n, args.q)
    written, rows = [], []
    for d, trials in zip(ds, budget):
        poly = PrimitivePoly(args.poly) if args.poly is not None else primitive_poly(d)
        if poly.degree != d:
            raise UsageError(f"polynomial {args.poly:#x} has degree {poly.degree}, not {d}")
        res = search_sequential(args.n, d, args.s, trials, args.q, args.seed, poly, tables)
        G = seqgen_as_digital_net(res.config, args.s)
        out = _seqgen_out(args.out, d, len(ds) > 1)
        note = [
            f"sequential generator from wafomnet {__version__}: poly={poly.mask:#x}"
            f" n={args.n} d={d} S={args.s} trials={trials} seed={args.seed}",
            f"wafom={fmt_float(res.wafom)}",
        ]
        Path(out).write_text(format_matrices(G, note))
        written.append(out)
        rows.append((d, float(res.wafom), _log10(res.wafom), trials, float(res.seconds)))
        log.info("seqgen d=%d wafom=%.6e", d, res.wafom)
    if args.summary:
        write_csv(args.summary, ["d", "wafom", "log10_wafom", "trials", "seconds"], rows)
        written.append(args.summary)
    return written


def cmd_wafom(args) -> list[str]:
    G = _load(args.matrices)
    check_divides(G.n, args.q)
    tables = build_tables(G.n, args.q) if args.method == "table" else None
    rows = []
    for d in _depths(args, G):
        t0 = time.perf_counter()
        if tables is None:
            w = wafom_naive(G, d, n_jobs=args.threads)
        else:
            w = wafom_tabled(G, d, tables, n_jobs=args.threads)
        rows.append((d, float(w.value), _log10(w.value), args.method, time.perf_counter() - t0))
    write_csv(args.out, ["d", "wafom", "log10_wafom", "method", "seconds"], rows)
    return [] if args.out in (None, "-") else [args.out]


def _load_params(path, family: str, S: int) -> GenzInstance:
    if not Path(path).is_file():
        raise FileNotFoundError(f"parameter file not found: {path}")
    data = json.loads(Path(path).read_text())
    try:
        inst = GenzInstance(data.get("family", family), data["a"], data["u"])
    except KeyError as exc:
        raise UsageError(f"{path}: parameter file needs keys 'a' and 'u'") from exc
    if inst.family != family:
        raise UsageError(f"{path}: family {inst.family!r} does not match --function")
    if inst.S != S:
        raise UsageError(f"{path}: parameters have S={inst.S}, matrices have S={S}")
    return inst


def cmd_integrate(args) -> list[str]:
    G = _load(args.matrices)
    kind, _, family = args.function.partition(":")
    if kind != "genz" or not family:
        raise UsageError("--function must look like genz:FAMILY")
    if family not in FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if args.d > G.m:
        raise UsageError(f"d={args.d} exceeds m={G.m}")
    if args.params is not None:
        inst = _load_params(args.params, family, G.S)
    else:
        h = args.h if args.h is not None else dict(zip(FAMILIES, default_h(G.S)))[family]
        inst, _ = instance_for(family, G.S, h, args.seed, 0)
    est = qmc_integrate(IntegrationRequest(G, args.d, inst, _resolve_shift(args)))
    exact = inst.exact()
    print(f"estimate {fmt_float(est)}")
    print(f"exact {fmt_float(exact)}")
    if exact != 0:
        print(f"relative_error {fmt_float(abs(est - exact) / abs(exact))}")
        print(f"log10_relerr {fmt_float(log10_relerr(exact, est))}")
    return []


def cmd_genz_bench(args) -> list[str]:
    G = _load(args.matrices)
    S = G.S if args.s is None else args.s
    if not 1 <= S <= G.S:
        raise UsageError(f"--s {S} must lie in [1, {G.S}] for this matrix file")
    G = GeneratingMatrixSet(G.n, G.columns[:S])
    lo, hi = args.d_range
    if lo < 0 or hi > G.m:
        raise UsageError(f"--d-range must lie in [0, {G.m}]")
    if args.h_preset is None:
        h = default_h(S)
    else:
        h = H_PRESETS[5 if args.h_preset == "paper5" else 10]
    families = FAMILIES if args.families is None else tuple(args.families.split(","))
    for f in families:
        if f not in FAMILIES:
            raise UsageError(f"unknown family {f!r}")
    res = run_benchmark(
        G,
        families,
        dict(zip(FAMILIES, h)),
        range(lo, hi + 1),
        args.samples,
        _resolve_shift(args),
        args.seed,
        None if args.baseline == "none" else args.baseline,
    )
    rows = [
        (r.family, r.d, float(r.median_log10_relerr), r.samples,
         None if r.baseline_median_log10_relerr is None else float(r.baseline_median_log10_relerr))
        for r in res.rows
    ]
    write_csv(
        args.out,
        ["family", "d", "median_log10_relerr", "samples", "baseline_median_log10_relerr"],
        rows,
    )
    return [] if args.out in (None, "-") else [args.out]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wafomnet", description="Low-WAFOM digital nets over F2.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker threads (results do not depend on this)")
    common.add_argument("--manifest", help="run manifest path (default: <out>.manifest.json)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", parents=[common], help="greedy extensible WAFOM search")
    s.add_argument("--n", type=int, default=30)
    s.add_argument("--m", type=int, default=25)
    s.add_argument("--s", type=int, default=5)
    s.add_argument("--trials", type=int, default=7000)
    s.add_argument("--q", type=int, default=3)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--max-resident-d", type=int, default=20)
    s.add_argument("--out", required=True)
    s.add_argument("--trace")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("seqgen-search", parents=[common], help="sequential generator U search")
    s.add_argument("--n", type=int, default=30)
    s.add_argument("--s", type=int, default=5)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--d", type=int)
    g.add_argument("--d-range", type=_range)
    s.add_argument("--trials", type=int, default=7000)
    s.add_argument("--trials-mode", choices=("per-d", "shared"), default="per-d")
    s.add_argument("--q", type=int, default=3)
    s.add_argument("--poly", type=lambda t: int(t, 0), help="primitive polynomial bit mask")
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--out", required=True, help="matrix file; '{d}' is replaced per degree")
    s.add_argument("--summary", help="optional CSV with one row per degree")
    s.set_defaults(func=cmd_seqgen_search)

    s = sub.add_parser("wafom", parents=[common], help="evaluate WAFOM of a matrix file")
    s.add_argument("--matrices", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--d", type=int)
    g.add_argument("--d-range", type=_range)
    s.add_argument("--q", type=int, default=3)
    s.add_argument("--method", choices=("naive", "table"), default="table")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_wafom)

    s = sub.add_parser("integrate", parents=[common], help="QMC estimate of one Genz integral")
    s.add_argument("--matrices", required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--function", required=True, help="genz:FAMILY")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--params", help="JSON file with 'a' and 'u' vectors")
    g.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--h", type=float, help="difficulty when drawing from --seed")
    s.add_argument("--shift", type=_on_off, default=None,
                   help="default: on for nets searched by this tool, off otherwise")
    s.set_defaults(func=cmd_integrate)

    s = sub.add_parser("genz-bench", parents=[common], help="Genz median-error benchmark")
    s.add_argument("--matrices", required=True)
    s.add_argument("--s", type=int)
    s.add_argument("--h-preset", choices=("paper5", "paper10"))
    s.add_argument("--d-range", type=_range, required=True)
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--shift", type=_on_off, default=None,
                   help="default: on for nets searched by this tool, off otherwise")
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--baseline", choices=("mc", "none"), default="mc")
    s.add_argument("--families", help="comma-separated subset")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_genz_bench)
    return p


def _manifest_path(args, written: list[str]) -> str | None:
    if args.manifest:
        return args.manifest
    if written:
        return written[0] + ".manifest.json"
    return None


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.threads < 1:
        parser.error("--threads must be positive")
    t0 = time.perf_counter()
    try:
        written = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"wafomnet {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, MatrixFormatError, NonFiniteIntegrandError, ValueError) as exc:
        print(f"wafomnet {args.command}: error: {exc}", file=sys.stderr)
        return 1
    path = _manifest_path(args, written)
    if path:
        flags = {k: v for k, v in vars(args).items() if k not in ("func", "manifest")}
        write_manifest(path, {
            "tool": "wafomnet",
            "version": __version__,
            "subcommand": args.command,
            "argv": argv,
            "flags": {k: list(v) if isinstance(v, tuple) else v for k, v in flags.items()},
            "seed": getattr(args, "seed", None),
            "numpy": np.__version__,
            "outputs": written,
            "wall_time_seconds": time.perf_counter() - t0,
        })
    return 0


if __name__ == "__main__":
    sys.exit(main())
