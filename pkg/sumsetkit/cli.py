import argparse
import logging
import sys
import time

from sumsetkit.applications import (
    CountingMode,
    bottleneck_partition,
    card_sums,
    count_sums,
    parse_graph,
)
from sumsetkit.core import MultisetInput, parse_multiset
from sumsetkit.cyclic_engine import cover_zm, mod_subset_sums
from sumsetkit.errors import (
    ConfigError,
    ContractViolation,
    GuardExceeded,
    NotRealizableError,
    ParseError,
)
from sumsetkit.integer_engine import Strategy, all_subset_sums, decide
from sumsetkit.witness import lexicographic_subset, recover_subset
from sumsetkit.worker import Worker

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNREALIZABLE = 3
EXIT_MISMATCH = 4

LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
LCG_MASK = (1 << 64) - 1

ALGORITHMS = [s.value for s in Strategy]


def read_input(path: str) -> str | bytes:
    """Raw file contents; the parsers reject anything outside ASCII digits."""
    if path == "-":
        stream = getattr(sys.stdin, "buffer", sys.stdin)
        return stream.read()
    with open(path, "rb") as file:
        return file.read()


def generate_instance(n: int, max_value: int, seed: int) -> list[int]:
    """``x <- a*x + c mod 2^64`` from ``x = seed``; value ``1 + (x >> 33) % max``."""
    x = seed & LCG_MASK
    values = []
    for _ in range(n):
        x = (LCG_MULTIPLIER * x + LCG_INCREMENT) & LCG_MASK
        values.append(1 + (x >> 33) % max_value)
    return values


def cmd_solve(args) -> int:
    S = parse_multiset(read_input(args.file))
    print("yes" if decide(S, args.target, args.algo) else "no")
    return EXIT_OK


def cmd_all(args) -> int:
    S = parse_multiset(read_input(args.file))
    for x in all_subset_sums(S, args.bound, args.algo):
        print(x)
    return EXIT_OK


def cmd_mod(args) -> int:
    S = parse_multiset(read_input(args.file))
    for x in mod_subset_sums(S.expanded(), args.modulus):
        print(x)
    return EXIT_OK


def cmd_count(args) -> int:
    S = parse_multiset(read_input(args.file))
    mode = CountingMode.EXACT if args.exact else CountingMode.MODULAR
    counts = count_sums(S.expanded(), args.bound, mode)
    for x in counts.support():
        print(x, counts[x])
    return EXIT_OK


def cmd_card(args) -> int:
    S = parse_multiset(read_input(args.file))
    for s, j in card_sums(S.expanded(), args.bound).members():
        print(s, j)
    return EXIT_OK


def cmd_witness(args) -> int:
    S = parse_multiset(read_input(args.file))
    sums = all_subset_sums(S, args.bound, args.algo, trace=True)
    recover_subset(sums, args.target)
    print(*lexicographic_subset(S.expanded(), args.target))
    return EXIT_OK


def cmd_bottleneck(args) -> int:
    result = bottleneck_partition(parse_graph(read_input(args.file)))
    print(result.bottleneck)
    print(*result.side_one)
    return EXIT_OK


def cmd_cover(args) -> int:
    for segment in cover_zm(args.modulus, args.length):
        print(segment.generator, segment.length)
    return EXIT_OK


def _bench_trial(trial: int, args, algorithms, progress_callback=None):
    S = MultisetInput.from_values(
        generate_instance(args.n, args.max_value, args.seed + trial)
    )
    rows = []
    for algo in algorithms:
        start = time.perf_counter()
        sums = all_subset_sums(S, args.bound, algo)
        rows.append((trial, algo, time.perf_counter() - start, sums.checksum()))
        progress_callback.emit((trial, algo))
    return rows


def cmd_bench(args) -> int:
    algorithms = [a.strip() for a in args.algo.split(",") if a.strip()]
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise ContractViolation(
                f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}"
            )
    if args.n < 0 or args.max_value < 1 or args.trials < 0:
        raise ContractViolation("--n and --trials must be >= 0, --max-value >= 1")

    print("trial algo seconds checksum")
    mismatch = False
    for trial in range(args.trials):
        rows = []
        failure = []
        worker = Worker(_bench_trial, trial, args, algorithms)
        worker.signals.progress.connect(
            lambda step: LOGGER.info("trial %d: %s done", *step)
        )
        worker.signals.result.connect(rows.extend)
        worker.signals.error.connect(failure.append)
        worker.run()
        if failure:
            raise failure[0][1]

        for trial_index, algo, seconds, checksum in rows:
            print(f"{trial_index} {algo} {seconds:.6f} {checksum}")
        if len({checksum for *_, checksum in rows}) > 1:
            LOGGER.error("trial %d: algorithms disagree", trial)
            mismatch = True
    return EXIT_MISMATCH if mismatch else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumsetkit", description="Subset sums, counts and witnesses."
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Log debug output to stderr."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name, handler, help_text, file_arg="file"):
        sub = commands.add_parser(name, help=help_text)
        if file_arg:
            sub.add_argument(
                file_arg, help="Input file, or '-' to read standard input."
            )
        sub.set_defaults(handler=handler)
        return sub

    def algo(sub):
        sub.add_argument("--algo", choices=ALGORITHMS, default=Strategy.AUTO.value)

    sub = command("solve", cmd_solve, "Decide whether a target sum is reachable.")
    sub.add_argument("--target", type=int, required=True)
    algo(sub)

    sub = command("all", cmd_all, "List every reachable sum up to a bound.")
    sub.add_argument("--bound", type=int, required=True)
    algo(sub)

    sub = command("mod", cmd_mod, "List every reachable residue modulo m.")
    sub.add_argument("--modulus", type=int, required=True)

    sub = command("count", cmd_count, "Count subsets per sum up to a bound.")
    sub.add_argument("--bound", type=int, required=True)
    sub.add_argument(
        "--exact", action="store_true", help="Exact counts instead of residues."
    )

    sub = command("card", cmd_card, "List reachable (sum, cardinality) pairs.")
    sub.add_argument("--bound", type=int, required=True)

    sub = command("witness", cmd_witness, "Print a subset reaching the target.")
    sub.add_argument("--bound", type=int, required=True)
    sub.add_argument("--target", type=int, required=True)
    algo(sub)

    command(
        "bottleneck", cmd_bottleneck, "Balanced cut with the lightest bottleneck."
    )

    sub = command("cover", cmd_cover, "Cover Z_m with segments.", file_arg=None)
    sub.add_argument("--modulus", type=int, required=True)
    sub.add_argument("--length", type=int, required=True)

    sub = command("bench", cmd_bench, "Time algorithms on seeded instances.", None)
    sub.add_argument("--n", type=int, default=100)
    sub.add_argument("--max-value", type=int, default=1000)
    sub.add_argument("--bound", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--algo", default="dp,main")
    sub.add_argument("--trials", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except NotRealizableError as e:
        print(f"sumsetkit: {e}", file=sys.stderr)
        return EXIT_UNREALIZABLE
    except (ParseError, ContractViolation, ConfigError, GuardExceeded) as e:
        print(f"sumsetkit: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"sumsetkit: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
