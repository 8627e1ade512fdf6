"""Command line entry point.

    python main.py loops data/groups/S3.json --prime 3 --degrees 0..10
    python main.py tate data/groups/S3.json --prime 3 --window=-4..4
    python main.py check data/catalog.json

Negative windows need the `--window=-4..4` spelling.
"""
import argparse
import json
import logging
import sys
from typing import Callable, Tuple

import config
import gradedlc
import squeeze
from catalog import run_catalog
from db.database import close_cache, init_cache
from db.utils import cache_get, cache_key, cache_put
from errors import BudgetExceededError, ParseError, SqueezeError
from permgrp import Group, group_from_spec, load_group_spec
from records import BettiTable, GroupSpec, LeftTraceRecord, RightTraceRecord

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3

OUTPUT_FORMATS = """\
output (tab separated unless --json):
  loops, cohomology, tate, tate-classical:
    # kind=<kind> group=<name> p=<p> seed=<seed>
    n<TAB>dim           one row per degree n in the range
  localcoh (local cohomology, then Cech):
    # kind=<kind> p=<p> s=<variables>
    j<TAB>d<TAB>dim     cohomological degree j, internal degree d
  norm:
    verdict line, then the norm matrix one row per line
"""


# =====================================================
# HELPERS
# =====================================================

def parse_range(text: str) -> Tuple[int, int]:
    try:
        lo, hi = (int(part) for part in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}")
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def load_group_arg(args) -> Tuple[GroupSpec, Group]:
    spec = load_group_spec(args.group_file)
    group = group_from_spec(spec)
    if group.order % args.prime:
        print(f"⚠️ p={args.prime} does not divide |G|={group.order}; kG is semisimple", file=sys.stderr)
        logger.warning("prime %d does not divide the group order %d", args.prime, group.order)
    return spec, group


def emit(table, args):
    if args.json:
        print(table.model_dump_json(indent=2))
    else:
        sys.stdout.write(table.to_tsv())


def cached_table(kind: str, spec: GroupSpec, p: int, window: Tuple[int, int], seed: int,
                 compute: Callable[[], BettiTable]) -> BettiTable:
    key = cache_key(kind, spec, p, "k", window, seed)
    hit = cache_get(key, kind)
    if hit is not None:
        # entries are shared by groups with the same generators
        return BettiTable.model_validate_json(hit.payload).model_copy(update={"group": spec.name})
    table = compute()
    cache_put(key, kind, table.model_dump_json())
    return table


# =====================================================
# COMMANDS
# =====================================================

def cmd_loops(args) -> int:
    spec, group = load_group_arg(args)
    window = args.degrees
    length = window[1] + 1
    key = cache_key("left_trace", spec, args.prime, "k", (length,), args.seed)
    hit = cache_get(key, "left_trace")
    if hit is not None:
        trace = squeeze.left_trace_from_record(group, LeftTraceRecord.model_validate_json(hit.payload))
    else:
        trace = squeeze.left_squeezed_resolution(group, args.prime, length=length, seed=args.seed)
        cache_put(key, "left_trace", trace.to_record(spec).model_dump_json())
    emit(squeeze.squeezed_homology(trace, window, spec.name), args)
    return EXIT_OK


def cmd_cohomology(args) -> int:
    spec, group = load_group_arg(args)
    window = args.degrees
    length = window[1]
    key = cache_key("right_trace", spec, args.prime, "k", (length,), args.seed)
    hit = cache_get(key, "right_trace")
    if hit is not None:
        trace = squeeze.right_trace_from_record(group, RightTraceRecord.model_validate_json(hit.payload))
    else:
        trace = squeeze.right_squeezed_resolution(group, args.prime, length=length, seed=args.seed)
        cache_put(key, "right_trace", trace.to_record(spec).model_dump_json())
    emit(squeeze.squeezed_cohomology(trace, window, spec.name), args)
    return EXIT_OK


def cmd_tate(args) -> int:
    spec, group = load_group_arg(args)
    table = cached_table("tate", spec, args.prime, args.window, args.seed,
                         lambda: squeeze.tate_squeezed_homology(group, args.prime, args.window, args.seed))
    emit(table, args)
    return EXIT_OK


def cmd_tate_classical(args) -> int:
    spec, group = load_group_arg(args)
    table = cached_table("tate_classical", spec, args.prime, args.window, args.seed,
                         lambda: squeeze.classical_tate_dimensions(group, args.prime, args.window, args.seed))
    emit(table, args)
    return EXIT_OK


def cmd_norm(args) -> int:
    spec, group = load_group_arg(args)
    result = squeeze.norm_map(group, args.prime)
    if args.json:
        print(result.to_record(spec.name).model_dump_json(indent=2))
    else:
        reason = "p-nilpotent" if result.p_nilpotent else "not p-nilpotent"
        print(f"{result.verdict} ({reason})")
        for row in result.matrix.tolist():
            print("\t".join(str(x) for x in row))
    if not result.consistent:
        print(f"❌ norm verdict {result.verdict} contradicts p-nilpotence", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_localcoh(args) -> int:
    m = gradedlc.load_graded_module(args.module_file)
    gradedlc.hilbert_window(m)
    window = args.window
    local = gradedlc.local_cohomology(m, window)
    cech = gradedlc.cech_cohomology(m, window)
    bad = gradedlc.long_exact_sequence_check(m, window)
    if args.json:
        print(json.dumps({"local": local.model_dump(), "cech": cech.model_dump(), "les_failures": bad}, indent=2))
    else:
        sys.stdout.write(local.to_tsv())
        sys.stdout.write(cech.to_tsv())
    if bad:
        print(f"❌ long exact sequence fails in degrees {bad}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_check(args) -> int:
    report = run_catalog(args.catalog_file, workers=args.workers, seed=args.seed)
    if args.json:
        print(report.model_dump_json(indent=2))
    else:
        for r in report.results:
            mark = "✅" if r.passed else "❌"
            tag = f" [{r.provenance}]" if r.provenance else ""
            print(f"{mark} {r.job:<16} {r.name:<22} {r.detail}{tag}")
        print(f"\n{len(report.results) - len(report.failed)}/{len(report.results)} checks passed "
              f"in {report.seconds}s (peak RSS {report.peak_rss_mb} MB)")
    return EXIT_OK if report.passed else EXIT_FAILED


# =====================================================
# PARSER
# =====================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squeeze",
        description="Squeezed resolutions over finite groups",
        epilog=OUTPUT_FORMATS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def group_command(name, func, range_flag, default_range, help_text):
        p = sub.add_parser(name, help=help_text, epilog=OUTPUT_FORMATS,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("group_file")
        p.add_argument("--prime", type=int, required=True)
        p.add_argument(range_flag, type=parse_range, default=default_range, dest=range_flag.lstrip("-"))
        p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
        p.add_argument("--cache-dir", default=config.CACHE_DIR)
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)
        return p

    group_command("loops", cmd_loops, "--degrees", (0, 10), "loop space homology dims")
    group_command("cohomology", cmd_cohomology, "--degrees", (0, 10), "loop space cohomology dims")
    group_command("tate", cmd_tate, "--window", (-4, 4), "Tate squeezed homology dims")
    group_command("tate-classical", cmd_tate_classical, "--window", (-4, 4), "classical Tate cohomology dims")

    p = sub.add_parser("norm", help="norm map from H^0 to H_0")
    p.add_argument("group_file")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("localcoh", help="local and Cech cohomology of a graded module", epilog=OUTPUT_FORMATS,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("module_file")
    p.add_argument("--window", type=parse_range, default=(-10, 10))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_localcoh)

    p = sub.add_parser("check", help="run the acceptance catalog")
    p.add_argument("catalog_file")
    p.add_argument("--workers", type=int, default=config.CHECK_WORKERS)
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else config.LOG_LEVEL
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    try:
        if getattr(args, "cache_dir", ""):
            init_cache(args.cache_dir)
        return args.func(args)
    except ParseError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceededError as e:
        print(f"❌ {e} {e.diagnostics}", file=sys.stderr)
        return EXIT_BUDGET
    except SqueezeError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILED
    finally:
        close_cache()


if __name__ == "__main__":
    sys.exit(main())
