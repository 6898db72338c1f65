"""``sigjoin`` command line: gen | join | bench | cost.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager
from pathlib import Path

from . import _backend, bench, cost
from .errors import ConfigError, RelationError, SigJoinError
from .join import (GRACE_BASELINE, GRACE_SIGNATURE, HASH_BASELINE, HASH_SIGNATURE,
                   NESTED_LOOP, JoinSpec, join, materialize)
from .relation import (GenSpec, default_seed, emit_csv, generate_pair, load_csv,
                       read_schema, sidecar_path, write_schema)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

ALGO_NAMES = {
    "nested-loop": NESTED_LOOP,
    "hash": HASH_BASELINE,
    "sig-hash": HASH_SIGNATURE,
    "grace": GRACE_BASELINE,
    "sig-grace": GRACE_SIGNATURE,
}
for _canonical in list(ALGO_NAMES.values()):
    ALGO_NAMES[_canonical] = _canonical


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("list must not be empty")
    return vals


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


# -- gen ---------------------------------------------------------------------

def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    try:
        spec = GenSpec(args.rows_r, args.rows_s, args.attr_len, args.selectivity, args.row_bytes, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    gen = generate_pair(spec)
    for name, rel in (("R", gen.r), ("S", gen.s)):
        emit_csv(rel, out / f"{name}.csv")
        write_schema(rel.schema, out / f"{name}.schema")
    print(f"wrote {out / 'R.csv'} ({len(gen.r)} rows) and {out / 'S.csv'} ({len(gen.s)} rows)")
    print(f"planted matches: {gen.match_count} (expected {spec.expected_matches:.1f}, seed {seed})")
    return EXIT_OK


# -- join --------------------------------------------------------------------

def _load(path, schema_path):
    schema = read_schema(schema_path or sidecar_path(path))
    return load_csv(path, schema)


def cmd_join(args) -> int:
    r = _load(args.r, args.r_schema)
    s = _load(args.s, args.s_schema)
    left = args.left_key or args.key or r.schema.key_column
    right = args.right_key or args.key or s.schema.key_column
    algorithm = ALGO_NAMES[args.algo]
    sig_algo = algorithm in (HASH_SIGNATURE, GRACE_SIGNATURE)
    if args.mode and not sig_algo:
        raise UsageError(f"--mode applies only to signature algorithms, not {args.algo}")
    try:
        spec = JoinSpec(left, right, algorithm, (args.mode or "verify") if sig_algo else None,
                        args.partitions, (args.field, args.n_sig))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = join(r, s, spec)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        if args.materialize:
            w.writerow([f"r.{c}" for c in r.schema.names] + [f"s.{c}" for c in s.schema.names])
            for row in materialize(r, s, result):
                w.writerow([v.isoformat() if hasattr(v, "isoformat") else v for v in row])
        else:
            w.writerow(["r_index", "s_index"])
            w.writerows(result.pairs)
    st = result.stats
    print(f"algo={algorithm} mode={spec.mode or '-'} rows={len(result)} "
          f"build_ms={st.build_ns / 1e6:.3f} probe_ms={st.probe_ns / 1e6:.3f} "
          f"partition_ms={st.partition_ns / 1e6:.3f} peak_table_bytes={st.peak_table_bytes} "
          f"probes={st.probes} signature_matches={st.signature_matches} "
          f"verified_matches={'' if st.verified_matches is None else st.verified_matches} "
          f"collisions={'' if st.collisions is None else st.collisions} backend={_backend.BACKEND}",
          file=sys.stderr)
    return EXIT_OK


# -- bench -------------------------------------------------------------------

def cmd_bench(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    try:
        spec = GenSpec(args.rows_r, args.rows_s, max(args.attr_lens), args.selectivity, args.row_bytes, seed)
        run = bench.BenchRun(spec, tuple(args.attr_lens), args.repetitions, args.warmups, args.mode,
                             (args.field, args.n_sig))
        run.algorithms()
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    def progress(rows):
        sig = rows[-1]
        print(f"attr_len={sig['attr_len']:>4}  baseline={rows[0]['total_ms']:.2f} ms  "
              f"signature={sig['total_ms']:.2f} ms  speedup={sig['speedup']:.3f}", file=sys.stderr)

    rows = run.run(progress)
    with _output(args.out) as fh:
        bench.to_csv(rows, fh)
    return EXIT_OK


# -- cost --------------------------------------------------------------------

def _parse_sweep(text):
    name, sep, rng = text.partition("=")
    parts = rng.split(":")
    if not sep or len(parts) not in (2, 3):
        raise UsageError(f"--sweep expects name=start:stop[:step], got {text!r}")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"--sweep bounds must be numbers, got {text!r}") from None
    start, stop = nums[0], nums[1]
    step = nums[2] if len(nums) == 3 else 1.0
    if step <= 0:
        raise UsageError("--sweep step must be positive")
    values = []
    x = start
    while x <= stop + 1e-9:
        values.append(int(x) if float(x).is_integer() else x)
        x += step
    return name.strip(), values


def cmd_cost(args) -> int:
    base = cost.default_params() if args.default_profile else None
    params = cost.load_config(args.config, base) if args.config else (base or cost.CostParams())
    with _output(args.out) as fh:
        if args.sweep:
            name, values = _parse_sweep(args.sweep)
            name = cost._ALIASES.get(name.lower(), name)
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([name, *cost.COMPONENTS, "grace_temp_ios"])
            for v in values:
                p = cost.parse_config(f"{name} = {v}\n", params)
                bd = cost.evaluate(p)
                w.writerow([v, *(f"{x:.10g}" for _, x in cost.breakdown_rows(bd))])
        elif args.format == "text":
            fh.write(cost.format_breakdown(cost.evaluate(params)) + "\n")
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["component", "value"])
            for c, v in cost.breakdown_rows(cost.evaluate(params)):
                w.writerow([c, f"{v:.10g}"])
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sigjoin", description="Algebraic-signature equi-join toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a synthetic R/S pair")
    g.add_argument("--rows-r", type=int, default=10_000)
    g.add_argument("--rows-s", type=int, default=20_000)
    g.add_argument("--attr-len", type=int, default=100)
    g.add_argument("--selectivity", type=float, default=None,
                   help="join selectivity factor (default 1.5 / max(rows))")
    g.add_argument("--row-bytes", type=int, default=128)
    g.add_argument("--seed", type=int, default=None, help="default: $SIGJOIN_SEED or 0")
    g.add_argument("--out-dir", default=".")
    g.set_defaults(func=cmd_gen)

    j = sub.add_parser("join", help="join two CSV relations")
    j.add_argument("--r", required=True, help="build-side CSV")
    j.add_argument("--s", required=True, help="probe-side CSV")
    j.add_argument("--r-schema", help="schema sidecar (default: R path with .schema suffix)")
    j.add_argument("--s-schema")
    j.add_argument("--key", help="join column for both sides")
    j.add_argument("--left-key")
    j.add_argument("--right-key")
    j.add_argument("--algo", choices=sorted(ALGO_NAMES), default="sig-hash")
    j.add_argument("--mode", choices=("verify", "trust"), default=None)
    j.add_argument("--partitions", type=int, default=8)
    j.add_argument("--field", type=int, choices=(8, 16), default=16)
    j.add_argument("--n-sig", type=int, default=2)
    j.add_argument("--out", default="-")
    j.add_argument("--materialize", action="store_true", help="write joined tuples instead of index pairs")
    j.set_defaults(func=cmd_join)

    b = sub.add_parser("bench", help="sweep join-attribute length")
    b.add_argument("--attr-lens", type=_int_list, default=list(bench.DEFAULT_ATTR_LENS))
    b.add_argument("--rows-r", type=int, default=10_000)
    b.add_argument("--rows-s", type=int, default=20_000)
    b.add_argument("--selectivity", type=float, default=None)
    b.add_argument("--row-bytes", type=int, default=128)
    b.add_argument("--repetitions", type=int, default=3)
    b.add_argument("--warmups", type=int, default=1)
    b.add_argument("--mode", choices=("verify", "trust"), default="verify")
    b.add_argument("--field", type=int, choices=(8, 16), default=16)
    b.add_argument("--n-sig", type=int, default=2)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("cost", help="evaluate the analytic cost model")
    c.add_argument("--config", help="key=value parameter file")
    c.add_argument("--default-profile", action="store_true",
                   help="start from the bundled 10000x20000 profile before applying --config")
    c.add_argument("--sweep", help="name=start:stop[:step]; emits one row per value")
    c.add_argument("--format", choices=("csv", "text"), default="csv")
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_cost)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sigjoin {args.command}: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (RelationError, ConfigError, SigJoinError, OSError) as exc:
        print(f"sigjoin {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
