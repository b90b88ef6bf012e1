"""Command-line front end: sampling, rendering, verification, polymer and
free-energy studies, with reproducible file outputs.

Every invocation writes one run directory containing config.json (the
resolved configuration), manifest.json (versions and seeds), and the data
files.  Identical command lines with identical seeds produce byte-identical
outputs; files are staged to temporary names and renamed only on success.
Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy

from . import __version__
from .freeenergy import free_energy_mc
from .matching import Matching, turning_points, validate, vertical_slice, horizontal_slice
from .params import AdmissibilityError, ParamSet
from .polymers import (beta_rwre_endpoints_batch, crossings, sample_path_backward,
                       stat_loggamma, stat_strictweak, xmid_batch,
                       edge_gamma_sample_endpoints)
from .render import render_double_dimer, render_matching
from .rng import RngStream
from .shuffling import sample_final_matching, sample_matching_for_field
from .stats import lognormal_shuffle_log_covariance, pearson_r
from .suites import SUITES, match_suite
from .weights import sample_weight_field, upshuffle_arrays


class ConfigError(ValueError):
    pass


def _resolve_params(args, n: int, extra: int = 0) -> ParamSet:
    if getattr(args, "params", None):
        try:
            with open(args.params) as fh:
                ps = ParamSet.from_json(fh.read())
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ConfigError(f"bad params file {args.params}: {exc}") from None
        ps.validate(n)
        return ps
    if args.alpha is None or args.beta is None:
        raise ConfigError("either --params or both --alpha and --beta are required")
    if args.alpha <= 0 or args.beta <= 0:
        raise ConfigError("alpha and beta must be positive")
    return ParamSet.biased(args.alpha, args.beta, n, extra=extra)


class RunDir:
    """Collects output files and writes them atomically at the end."""

    def __init__(self, out: str):
        self.out = out
        self.files: dict[str, str] = {}

    def add(self, name: str, content: str):
        self.files[name] = content

    def commit(self):
        os.makedirs(self.out, exist_ok=True)
        for name, content in sorted(self.files.items()):
            tmp = os.path.join(self.out, f".tmp-{name}")
            final = os.path.join(self.out, name)
            with open(tmp, "w") as fh:
                fh.write(content)
            os.replace(tmp, final)


def _manifest(args, extra: dict | None = None) -> str:
    d = {
        "tool": "aztec-gamma",
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "command": args.command,
        "seed": getattr(args, "seed", None),
    }
    if extra:
        d.update(extra)
    return json.dumps(d, sort_keys=True, indent=1) + "\n"


def _config_echo(args) -> str:
    d = {k: v for k, v in vars(args).items() if k != "func"}
    return json.dumps(d, sort_keys=True, indent=1, default=str) + "\n"


def cmd_sample(args) -> int:
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    params = _resolve_params(args, args.n)
    run = RunDir(args.out)
    rows = []

    def one(r):
        rng = RngStream(args.seed, 10_000 + r)
        m = sample_final_matching(params, args.n, rng)
        return r, m

    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        results = list(pool.map(one, range(args.replicas)))
    results.sort(key=lambda t: t[0])
    header = ["replica", "n", "seed", "T_north", "T_east", "T_south", "T_west"]
    if args.slices:
        header += ["x_slices", "y_slices"]
    for r, m in results:
        run.add(f"matching-{r:04d}.txt", m.to_text())
        tp = turning_points(m)
        row = [r, args.n, args.seed, tp[0], tp[1], tp[2], tp[3]]
        if args.slices:
            xs = [sorted(vertical_slice(m, l)) for l in range(1, m.n + 1)]
            ys = [sorted(horizontal_slice(m, l)) for l in range(1, m.n + 1)]
            if args.format == "csv":
                row += ['"%s"' % json.dumps(xs), '"%s"' % json.dumps(ys)]
            else:
                row += [xs, ys]
        rows.append(row)
    _emit_rows(run, "observables", header, rows, args.format)
    run.add("config.json", _config_echo(args))
    run.add("manifest.json", _manifest(args))
    run.commit()
    return 0


def cmd_render(args) -> int:
    run = RunDir(args.out)
    if args.matchings:
        ms = []
        for path in args.matchings:
            with open(path) as fh:
                ms.append(Matching.from_text(fh.read()))
    else:
        if args.n is None:
            raise ConfigError("render needs matching files or a sample spec (--n)")
        params = _resolve_params(args, args.n)
        if args.double_dimer:
            # both samples must come from one quenched weight draw
            field = sample_weight_field(params, args.n, RngStream(args.seed, 9_999))
            ms = [sample_matching_for_field(field, RngStream(args.seed, 10_000 + r))
                  for r in range(2)]
        else:
            ms = [sample_final_matching(params, args.n, RngStream(args.seed, 10_000))]
    for m in ms:
        if not validate(m):
            raise ConfigError("input matching is not a perfect matching")
    if args.double_dimer:
        if len(ms) != 2:
            raise ConfigError("--double-dimer needs exactly two matchings")
        run.add("double-dimer.svg", render_double_dimer(ms[0], ms[1]))
    else:
        for i, m in enumerate(ms):
            run.add(f"matching-{i:04d}.svg", render_matching(m))
    run.add("config.json", _config_echo(args))
    run.add("manifest.json", _manifest(args))
    run.commit()
    return 0


VERIFY_GROUPS = {
    "oracle": ["partition", "transforms"],
    "matchings": ["slices", "dynamical", "east", "west-south"],
    "dist": ["burke", "preservation"],
    "free-energy": ["free-energy"],
    "scaling": ["scaling"],
    "fock": ["fock"],
    "all": list(SUITES),
}


def cmd_verify(args) -> int:
    if args.suite in VERIFY_GROUPS:
        names = VERIFY_GROUPS[args.suite]
    elif args.suite in SUITES:
        names = [args.suite]
    else:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from "
                          f"{sorted(set(VERIFY_GROUPS) | set(SUITES))}")
    config = {"tests": names, "seed": args.seed}
    if args.replicas:
        config["replicas"] = args.replicas
    if args.envs:
        config["envs"] = args.envs
    reports = match_suite(config)
    lines = [r.to_json() for r in reports]
    run = RunDir(args.out)
    run.add("reports.jsonl", "\n".join(lines) + "\n")
    run.add("summary.csv", "\n".join(
        ["test_id,statistic,threshold,passed"]
        + [f"{r.test_id},{r.statistic!r},{r.threshold!r},{int(r.passed)}"
           for r in reports]) + "\n")
    run.add("config.json", _config_echo(args))
    run.add("manifest.json", _manifest(args))
    run.commit()
    failed = [r.test_id for r in reports if not r.passed]
    for r in reports:
        print(("PASS" if r.passed else "FAIL"), r.test_id,
              f"stat={r.statistic:.4g}", f"thr={r.threshold:.4g}")
    return 1 if failed else 0


def _parse_sizes(args) -> list[int]:
    if getattr(args, "sizes", None):
        try:
            sizes = [int(v) for v in args.sizes.split(",") if v]
        except ValueError as exc:
            raise ConfigError(f"bad --sizes value: {exc}") from None
        if not sizes or any(v < 1 for v in sizes):
            raise ConfigError("--sizes needs positive integers")
        return sizes
    if args.n is None:
        raise ConfigError("either --n or --sizes is required")
    return [args.n]


def _emit_rows(run: RunDir, name: str, header: list[str], rows: list[list],
               fmt: str):
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(str(v) for v in row) for row in rows]
        run.add(f"{name}.csv", "\n".join(lines) + "\n")
    elif fmt == "jsonl":
        run.add(f"{name}.jsonl", "".join(
            json.dumps(dict(zip(header, row)), sort_keys=True) + "\n"
            for row in rows))
    else:
        raise ConfigError(f"unknown format {fmt!r} (csv or jsonl)")


def cmd_polymer(args) -> int:
    if args.alpha is None or args.beta is None or args.alpha <= 0 or args.beta <= 0:
        raise ConfigError("polymer needs positive --alpha and --beta")
    sizes = _parse_sizes(args)
    run = RunDir(args.out)
    header = ["n", "alpha", "beta", "x_mid", "v0", "v1", "w0", "w1", "seed"]
    rows: list[list] = []
    for si, n in enumerate(sizes):
        line = args.line if args.line is not None else n // 2
        if args.model in ("stat-loggamma", "stat-strictweak"):
            kind = "inv-gamma" if args.model == "stat-loggamma" else "strict-weak"
            if args.envs * n <= 200_000:
                # small runs: full crossing records from explicit paths
                maker = stat_loggamma if kind == "inv-gamma" else stat_strictweak
                for e in range(args.envs):
                    rng = RngStream(args.seed, 20_000 + 1000 * si + e)
                    env = maker(n, n, args.alpha, args.beta, rng)
                    pts = sample_path_backward(env, rng)
                    cs = crossings(pts, n, line, line)
                    rows.append([n, args.alpha, args.beta, cs.x_mid,
                                 cs.v0, cs.v1, cs.w0, cs.w1, args.seed])
            else:
                rng = RngStream(args.seed, 20_000 + 1000 * si)
                xm = xmid_batch(kind, n, args.alpha, args.beta, rng, args.envs)
                rows += [[n, args.alpha, args.beta, int(v), "", "", "", "",
                          args.seed] for v in xm]
        elif args.model == "beta-rwre":
            rng = RngStream(args.seed, 20_000 + 1000 * si)
            ends = beta_rwre_endpoints_batch(args.alpha, args.beta, n, rng,
                                             args.envs) - 1
            header = ["n", "alpha", "beta", "endpoint", "seed"]
            rows += [[n, args.alpha, args.beta, int(v), args.seed] for v in ends]
        elif args.model == "edge-gamma":
            rng = RngStream(args.seed, 20_000 + 1000 * si)
            params = ParamSet.biased(args.alpha, args.beta, n, extra=n)
            labels = edge_gamma_sample_endpoints(n, params, rng, args.envs)
            header = ["n", "alpha", "beta", "endpoint_label", "seed"]
            rows += [[n, args.alpha, args.beta, int(v), args.seed] for v in labels]
        else:
            raise ConfigError(f"unknown polymer model {args.model!r}")
    _emit_rows(run, "paths", header, rows, args.format)
    run.add("config.json", _config_echo(args))
    run.add("manifest.json", _manifest(args))
    run.commit()
    return 0


def cmd_free_energy(args) -> int:
    n = args.n
    params = _resolve_params(args, n)
    rng = RngStream(args.seed, 30_000)
    rep = free_energy_mc(params, n, args.T, args.replicas, rng)
    run = RunDir(args.out)
    run.add("free-energy.jsonl", rep.to_json() + "\n")
    run.add("config.json", _config_echo(args))
    run.add("manifest.json", _manifest(args))
    run.commit()
    print(f"F^a={rep.annealed:.6g} E[F]={rep.mean:.6g} "
          f"mc_mean={rep.empirical_mean:.6g} mc_var={rep.empirical_var:.6g}")
    return 0


def cmd_characterize(args) -> int:
    """Probe the one-step independence preservation of a weight family."""
    rng = RngStream(args.seed, 40_000)
    g = rng.generator
    reps = args.replicas
    if args.control == "gamma":
        a = g.gamma(0.8, size=(reps, 2, 2))
        b = g.gamma(0.9, size=(reps, 2, 2))
        reference = 0.0
    elif args.control == "lognormal":
        a = g.lognormal(size=(reps, 2, 2))
        b = g.lognormal(size=(reps, 2, 2))
        reference = lognormal_shuffle_log_covariance(1.0)["pearson_log"]
    else:
        raise ConfigError("--control must be gamma or lognormal")
    ua, ub = upshuffle_arrays(a, b)
    r_log = pearson_r(np.log(ua[:, 0, 0]), np.log(ub[:, 0, 0]))
    bound = 5.0 / np.sqrt(reps)
    detected = abs(r_log) > bound
    out = {
        "control": args.control,
        "replicas": reps,
        "r_log": r_log,
        "null_bound": bound,
        "reference_r": reference,
        "dependence_detected": bool(detected),
    }
    run = RunDir(args.out)
    run.add("characterize.json", json.dumps(out, sort_keys=True, indent=1) + "\n")
    run.add("config.json", _config_echo(args))
    run.add("manifest.json", _manifest(args))
    run.commit()
    print(json.dumps(out, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aztec-gamma")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_required=True):
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--params", help="ParamSet JSON file")
        sp.add_argument("--n", type=int, required=n_required)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="run-out")

    sp = sub.add_parser("sample", help="sample matchings and observables")
    common(sp)
    sp.add_argument("--replicas", type=int, default=1)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--slices", action="store_true")
    sp.add_argument("--format", default="csv", choices=["csv", "jsonl"])
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("render", help="render matchings to SVG")
    common(sp, n_required=False)
    sp.add_argument("matchings", nargs="*", help="matching text files")
    sp.add_argument("--double-dimer", action="store_true")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("--suite", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--replicas", type=int)
    sp.add_argument("--envs", type=int)
    sp.add_argument("--out", default="run-out")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("polymer", help="polymer path statistics")
    sp.add_argument("--model", required=True,
                    choices=["stat-loggamma", "stat-strictweak", "beta-rwre",
                             "edge-gamma"])
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--sizes", help="comma-separated size list (overrides --n)")
    sp.add_argument("--envs", type=int, default=1000)
    sp.add_argument("--line", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="run-out")
    sp.add_argument("--format", default="csv", choices=["csv", "jsonl"])
    sp.set_defaults(func=cmd_polymer)

    sp = sub.add_parser("free-energy", help="free-energy formulas and MC")
    common(sp)
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--replicas", type=int, default=1000)
    sp.set_defaults(func=cmd_free_energy)

    sp = sub.add_parser("characterize", help="independence-preservation probe")
    sp.add_argument("--control", default="gamma")
    sp.add_argument("--replicas", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="run-out")
    sp.set_defaults(func=cmd_characterize)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, AdmissibilityError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
