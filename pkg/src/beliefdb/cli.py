"""Command-line interface: ``beliefdb repl|exec|gen|stats|bench|dump``.

Exit codes: 0 success, 1 statement failure, 2 usage or I/O error,
3 corrupt database file.
"""

from __future__ import annotations

import argparse
import contextlib
import fcntl
import os
import sys
from collections.abc import Sequence

from . import bench
from .errors import BeliefDBError, SqlError, StoreFormatError
from .session import Session, StatementResult
from .store import Store, dumps, open_store, save, stats

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CORRUPT = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@contextlib.contextmanager
def db_lock(path: str):
    """Advisory lock on ``<db>.lock`` so two sessions never share a file."""
    try:
        fh = open(path + ".lock", "w")
    except OSError as e:
        raise CliError(f"cannot create lock file: {e}", EXIT_USAGE) from None
    try:
        try:
            fcntl.flock(fh, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            raise CliError(f"{path} is in use by another session", EXIT_USAGE) from None
        yield
    finally:
        fh.close()


def load_db(path: str) -> Store:
    if not os.path.exists(path):
        return Store()
    try:
        return open_store(path)
    except StoreFormatError as e:
        raise CliError(f"{path}: corrupt database: {e}", EXIT_CORRUPT) from None
    except (OSError, UnicodeDecodeError) as e:
        raise CliError(f"{path}: {e}", EXIT_USAGE) from None


def save_db(store: Store, path: str) -> None:
    tmp = path + ".tmp"
    try:
        save(store, tmp)
        os.replace(tmp, path)
    except OSError as e:
        raise CliError(f"cannot write {path}: {e}", EXIT_USAGE) from None


def explicit_count(store: Store) -> int:
    return sum(len(vw.explicit) for vw in store.val.values())


def describe_error(err: SqlError, text: str) -> str:
    """The message plus the offending source line with a caret."""
    if err.span is None:
        return f"error: {err}"
    lines = text.splitlines()
    out = [f"error: {err}"]
    if 0 < err.span.line <= len(lines):
        out.append("  " + lines[err.span.line - 1])
        out.append("  " + " " * (err.span.column - 1) + "^")
    return "\n".join(out)


def render(result: StatementResult, fmt: str) -> str:
    if result.rows is not None and fmt == "csv":
        return result.rows.to_csv().rstrip("\n")
    return result.message()


# ----- subcommands -----

def cmd_exec(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(f"cannot read {args.file}: {e}", EXIT_USAGE) from None
    with db_lock(args.db):
        store = load_db(args.db)
        session = Session(store)
        from .beliefsql import parse_script

        try:
            statements = parse_script(text)
        except SqlError as e:
            print(f"{args.file}: " + describe_error(e, text), file=sys.stderr)
            return EXIT_FAIL
        rejected = 0
        for stmt in statements:
            try:
                result = session.run(stmt)
            except SqlError as e:
                print(f"{args.file}: " + describe_error(e, text), file=sys.stderr)
                return EXIT_FAIL
            rejected += result.rejected
            if result.kind == "select" or not args.quiet:
                print(render(result, args.format))
        save_db(store, args.db)
    if args.strict and rejected:
        print(f"{rejected} statement(s) rejected", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _statement_complete(buffer: str) -> bool:
    quotes = buffer.count("'")
    return quotes % 2 == 0 and buffer.rstrip().endswith(";")


def cmd_repl(args) -> int:
    interactive = sys.stdin.isatty()
    with db_lock(args.db):
        store = load_db(args.db)
        session = Session(store)
        buffer = ""
        while True:
            if interactive:
                try:
                    line = input("beliefdb> " if not buffer else "     ...> ")
                except EOFError:
                    print()
                    break
            else:
                line = sys.stdin.readline()
                if not line:
                    break
                line = line.rstrip("\n")
            if not buffer and line.strip() in ("\\q", "\\quit", "exit", "quit"):
                break
            if not buffer and line.strip() == "\\stats":
                print(stats(store, explicit_count(store)))
                continue
            buffer += line + "\n"
            if not _statement_complete(buffer):
                continue
            text, buffer = buffer, ""
            try:
                results = session.execute(text)
            except SqlError as e:
                print(describe_error(e, text))
                continue
            for r in results:
                print(render(r, args.format))
            if any(r.mutates for r in results):
                save_db(store, args.db)
        save_db(store, args.db)
    return EXIT_OK


def _params(args, root_negatives: bool = True) -> bench.GenParams:
    try:
        depth = tuple(float(x) for x in args.depth.split(","))
        return bench.GenParams(
            m=args.m, n=args.n, depth_dist=depth, participation=args.participation,
            seed=args.seed, key_pool=args.key_pool, negative_prob=args.negative_prob,
            conflict_prob=args.conflict_prob, root_negatives=root_negatives,
        )
    except ValueError as e:
        raise CliError(f"invalid generator parameters: {e}", EXIT_USAGE) from None


def cmd_gen(args) -> int:
    out = args.out
    if out and out.endswith(".bdb"):
        params = _params(args)
        store = bench.build_store(bench.generate(params), params.m)
        save_db(store, out)
        print(stats(store, params.n))
        return EXIT_OK
    # BeliefSQL cannot state negatives at the root, so scripts never contain them
    params = _params(args, root_negatives=False)
    text = bench.statements_to_bsql(bench.generate(params), params.m)
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise CliError(f"cannot write {out}: {e}", EXIT_USAGE) from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stats(args) -> int:
    if not os.path.exists(args.db):
        raise CliError(f"{args.db}: no such database", EXIT_USAGE)
    store = load_db(args.db)
    n = args.n if args.n is not None else explicit_count(store)
    report = stats(store, n)
    print(f"m={report.m} N={report.N} n={n}")
    for name, count in report.counts.items():
        print(f"|{name}|={count}")
    print(f"total={report.total}")
    if report.overhead is not None:
        print(f"overhead={report.overhead:.4g}")
    return EXIT_OK


def cmd_dump(args) -> int:
    if not os.path.exists(args.db):
        raise CliError(f"{args.db}: no such database", EXIT_USAGE)
    text = dumps(load_db(args.db))
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise CliError(f"cannot write {args.out}: {e}", EXIT_USAGE) from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.kind == "overhead":
        try:
            ms = tuple(int(x) for x in args.ms.split(","))
        except ValueError:
            raise CliError("--ms takes comma-separated integers", EXIT_USAGE) from None
        cells = bench.run_overhead(bench.table1_grid(args.n, ms, args.seed), seeds=args.seeds)
        text = bench.overhead_csv(cells)
    else:
        if args.db:
            store = load_db(args.db)
            n = explicit_count(store)
        else:
            params = _params(args)
            store = bench.build_store(bench.generate(params), params.m)
            n = params.n
        if len(store.users) < 2:
            raise CliError("the query workload needs at least two users", EXIT_USAGE)
        users = sorted(store.users)[:2]
        report = bench.run_queries(store, bench.benchmark_queries(tuple(users)), args.repetitions, n)
        text = report.to_csv()
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise CliError(f"cannot write {args.report}: {e}", EXIT_USAGE) from None
    sys.stdout.write(text)
    return EXIT_OK


def _gen_flags(p: argparse.ArgumentParser, n_default: int) -> None:
    p.add_argument("--m", type=int, default=10, help="number of users")
    p.add_argument("--n", type=int, default=n_default, help="number of annotations")
    p.add_argument("--depth", default="0.3333333333333333,0.3333333333333333,0.3333333333333334",
                   help="comma-separated Pr[d=0],Pr[d=1],...")
    p.add_argument("--participation", choices=("uniform", "zipf"), default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--key-pool", type=int, default=None)
    p.add_argument("--negative-prob", type=float, default=0.2)
    p.add_argument("--conflict-prob", type=float, default=0.1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beliefdb", description="Belief database engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("repl", help="interactive BeliefSQL shell")
    p.add_argument("--db", required=True)
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.set_defaults(func=cmd_repl)

    p = sub.add_parser("exec", help="run a BeliefSQL script")
    p.add_argument("--db", required=True)
    p.add_argument("--file", required=True)
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.add_argument("--strict", action="store_true", help="exit 1 if any insert is rejected")
    p.add_argument("--quiet", action="store_true", help="print only query results")
    p.set_defaults(func=cmd_exec)

    p = sub.add_parser("gen", help="generate synthetic annotations")
    _gen_flags(p, 1000)
    p.add_argument("--out", help="output .bsql script or .bdb store (default: script on stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("stats", help="internal relation sizes and overhead")
    p.add_argument("--db", required=True)
    p.add_argument("--n", type=int, default=None, help="annotation count (default: explicit rows)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="overhead grid or query latency")
    p.add_argument("--kind", choices=("overhead", "queries"), default="overhead")
    p.add_argument("--ms", default="10,100", help="user counts for the overhead grid")
    p.add_argument("--seeds", type=int, default=1, help="databases averaged per cell")
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--db", help="query an existing store instead of generating one")
    p.add_argument("--report", help="also write the CSV report here")
    _gen_flags(p, 10_000)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("dump", help="print a store in its text format")
    p.add_argument("--db", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dump)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as e:
        print(f"beliefdb: {e}", file=sys.stderr)
        return e.code
    except BeliefDBError as e:
        print(f"beliefdb: {e}", file=sys.stderr)
        return EXIT_FAIL
    except KeyboardInterrupt:
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
