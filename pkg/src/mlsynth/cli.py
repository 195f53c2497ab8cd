"""Command-line front end: ``mlsynth gen|solve|compare``.

Exit codes: 0 success, 1 usage error, 2 infeasible or invalid input, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from mlsynth.builder import BuilderParams
from mlsynth.errors import MlsynthError
from mlsynth.exact import solve_exact
from mlsynth.harness import SuiteConfig, emit_report, run_comparison
from mlsynth.instance import DEFAULT_VARIANTS, generate_instance, read_instance, write_instance
from mlsynth.optimizer import SearchParams, solve_full_lsr_baseline, solve_multilayer

EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 1, 2, 3

log = logging.getLogger("mlsynth")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_grid(text: str) -> tuple[int, ...]:
    """``START:STOP:STEP`` with STOP inclusive, or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (int(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            return tuple(range(start, stop + 1, step))
        return tuple(int(x) for x in text.split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}, expected START:STOP:STEP") from None


def parse_variants(text: str) -> tuple[str, ...]:
    """A count of built-in presets (``8`` = all of them) or a comma list of names."""
    if text.isdigit():
        n = int(text)
        if n > len(DEFAULT_VARIANTS):
            raise argparse.ArgumentTypeError(f"only {len(DEFAULT_VARIANTS)} presets exist")
        return DEFAULT_VARIANTS[:n]
    return tuple(v for v in text.split(",") if v)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mlsynth", description="MPLS overlay synthesis on a multilayer graph")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a random instance file")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--variant", default="1", help="preset name or number 1-8")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("--in", dest="path", required=True)
    s.add_argument("--solver", choices=("multilayer", "baseline", "exact"), default="multilayer")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--k-paths", type=int, default=2)
    s.add_argument("--restarts", type=int, default=SearchParams.restarts)
    s.add_argument("--json", action="store_true", help="print the full solution as JSON")

    c = sub.add_parser("compare", help="baseline vs multilayer over a suite")
    c.add_argument("--grid", type=parse_grid, default="20:50:5")
    c.add_argument("--variants", type=parse_variants, default="8")
    c.add_argument("--seeds", type=int, default=3)
    c.add_argument("--out", default=None, help="report path (stdout when omitted)")
    c.add_argument("--format", choices=("csv", "json", "pretty"), default="csv")
    c.add_argument("--k-paths", type=int, default=2)
    c.add_argument("--restarts", type=int, default=SearchParams.restarts)
    c.add_argument("--search-seed", type=int, default=0)
    c.add_argument("--timing", action="store_true",
                   help="fill the runtime columns (the report then differs run to run)")
    c.add_argument("--verify", action="store_true",
                   help="re-check every solution and redundant graph; violations go to the json report")
    return p


def _solve(args) -> int:
    inst = read_instance(args.path)
    if args.solver == "baseline":
        sol = solve_full_lsr_baseline(inst)
    elif args.solver == "exact":
        sol = solve_exact(inst)
    else:
        sol = solve_multilayer(inst, BuilderParams(k_paths=args.k_paths),
                               SearchParams(restarts=args.restarts, seed=args.seed))
    if args.json:
        print(json.dumps(sol.to_dict(), indent=2, sort_keys=True))
    else:
        c = sol.cost
        print(f"solver      {sol.solver}")
        print(f"lsr nodes   {len(sol.lsr_nodes)}/{len(inst.nodes)}: {' '.join(sol.lsr_nodes)}")
        used = [l for l in sol.logical_links if l.channels]
        print(f"links used  {len(used)}, channels {sum(l.channels for l in used)}")
        print(f"cost        lsr {c.lsr_total} + channels {c.channel_total} = {c.grand_total}")
    return 0


def _compare(args) -> int:
    config = SuiteConfig(
        node_counts=args.grid,
        variants=args.variants,
        seeds=tuple(range(args.seeds)),
        builder=BuilderParams(k_paths=args.k_paths),
        search=SearchParams(restarts=args.restarts, seed=args.search_seed),
        timing=args.timing,
        verify=args.verify,
    )
    table = run_comparison(config)
    text = emit_report(table, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    for row in table.rows:
        if row.violations:
            log.warning("row n=%s %s seed=%s has %d violations", row.node_count, row.variant,
                        row.seed, row.violations)
        if row.error:
            log.warning("row n=%s %s seed=%s failed: %s", row.node_count, row.variant,
                        row.seed, row.error)
    s = table.summary
    if s["status"] == "OK":
        log.info("mean savings %.2f%% over %d rows (in 10-16%% band: %s)",
                 s["mean_savings_pct"], s["rows"], s["in_reference_band"])
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            write_instance(generate_instance(args.nodes, args.variant, args.seed), args.out)
            return 0
        if args.command == "solve":
            return _solve(args)
        return _compare(args)
    except MlsynthError as exc:
        log.error("%s", exc)
        return EXIT_IO if exc.code == "IO_ERROR" else EXIT_INFEASIBLE
    except OSError as exc:
        log.error("IO_ERROR: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
