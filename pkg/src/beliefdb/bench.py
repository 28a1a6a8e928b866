"""Synthetic annotation workloads, size overhead and query latency.

Statements go into a single ``Sightings(sid, uid, species, date,
location)`` relation.  Each statement draws a depth from the depth
distribution, a path from the participation distribution and then a
signed tuple; draws that clash with the statements already generated
for the same path are redrawn, so the result is always consistent.
"""

from __future__ import annotations

import csv
import gc
import io
import math
import random
import statistics
import time
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field

from .core import NEG, POS, BeliefStatement, GroundTuple, Schema
from .query import Bcq, evaluate, parse_bcq, translate
from .store import SizeReport, Store, stats
from .update import insert

SCHEMA = Schema.of(Sightings=["sid", "uid", "species", "date", "location"])
SPECIES = (
    "bald eagle", "fish eagle", "crow", "raven", "osprey", "heron", "loon",
    "mallard", "wood duck", "kestrel", "merlin", "barn owl", "snowy owl",
    "blue jay", "cardinal", "goldfinch", "warbler", "sparrow", "swift", "wren",
)
LOCATIONS = (
    "Lake Placid", "Lake Forest", "Saranac Lake", "Mirror Lake", "Tupper Lake",
    "Long Lake", "Lake George", "Cranberry Lake", "Indian Lake", "Blue Mountain",
)
DATES = tuple(f"6-{d}-08" for d in range(1, 31))

# Constant of the size bound: total rows <= SIZE_BOUND_C * (n + m) * N.
SIZE_BOUND_C = 3

UNIFORM_THIRDS = (1 / 3, 1 / 3, 1 / 3)
TABLE1_DEPTHS = (UNIFORM_THIRDS, (0.8, 0.19, 0.01), (0.199, 0.8, 0.001))


@dataclass(frozen=True)
class GenParams:
    m: int
    n: int
    depth_dist: tuple[float, ...] = UNIFORM_THIRDS
    participation: str = "uniform"
    seed: int = 0
    key_pool: int | None = None
    negative_prob: float = 0.2
    conflict_prob: float = 0.1
    root_negatives: bool = True

    def __post_init__(self):
        object.__setattr__(self, "depth_dist", tuple(float(p) for p in self.depth_dist))
        if self.m < 1 or self.n < 0:
            raise ValueError("need m >= 1 and n >= 0")
        if any(p < 0 or p > 1 for p in self.depth_dist) or not math.isclose(sum(self.depth_dist), 1.0, abs_tol=1e-6):
            raise ValueError("depth distribution must be probabilities summing to 1")
        for p in (self.negative_prob, self.conflict_prob):
            if not 0 <= p <= 1:
                raise ValueError("probabilities must lie in [0, 1]")
        if self.participation not in ("uniform", "zipf"):
            raise ValueError("participation is 'uniform' or 'zipf'")
        if self.m == 1 and any(p > 0 for p in self.depth_dist[2:]):
            raise ValueError("a single user admits no belief paths deeper than 1")
        if self.key_pool is not None and self.key_pool < 1:
            raise ValueError("key pool must be positive")

    @property
    def keys(self) -> int:
        return self.key_pool if self.key_pool is not None else max(1, self.n // 10)

    def user_weights(self) -> list[float]:
        if self.participation == "uniform":
            return [1.0] * self.m
        return [2.0 ** -r for r in range(1, self.m + 1)]


def users_for(m: int) -> dict[int, str]:
    return {u: f"user{u}" for u in range(1, m + 1)}


def generate(params: GenParams) -> list[BeliefStatement]:
    """Exactly ``n`` statements forming a consistent belief database."""
    rng = random.Random(params.seed)
    users = list(range(1, params.m + 1))
    weights = params.user_weights()
    depths = list(range(len(params.depth_dist)))
    positives: dict[tuple, dict] = defaultdict(dict)  # path -> key -> tuple
    negatives: dict[tuple, set] = defaultdict(set)
    made: list[GroundTuple] = []
    out: list[BeliefStatement] = []
    fresh = 0

    def draw_path(d: int) -> tuple:
        path: list[int] = []
        while len(path) < d:
            u = rng.choices(users, weights)[0]
            if not path or path[-1] != u:
                path.append(u)
        return tuple(path)

    def random_tuple(key: str) -> GroundTuple:
        return GroundTuple("Sightings", (
            key,
            f"user{rng.choice(users)}",
            rng.choice(SPECIES),
            rng.choice(DATES),
            rng.choice(LOCATIONS),
        ))

    def draw_tuple(path):
        sign = NEG if rng.random() < params.negative_prob else POS
        if not path and not params.root_negatives:
            sign = POS
        if sign is NEG and made and rng.random() < 0.5:
            return made[rng.randrange(len(made))], sign
        if sign is POS and made and rng.random() < params.conflict_prob:
            base = made[rng.randrange(len(made))]
            species = rng.choice([s for s in SPECIES if s != base.values[2]])
            return GroundTuple("Sightings", base.values[:2] + (species,) + base.values[3:]), sign
        return random_tuple(f"s{rng.randrange(params.keys) + 1}"), sign

    def fits(path, t: GroundTuple, sign) -> bool:
        if sign is POS:
            return t.key not in positives[path] and t not in negatives[path]
        return t not in negatives[path] and positives[path].get(t.key) != t

    for _ in range(params.n):
        path = draw_path(rng.choices(depths, params.depth_dist)[0])
        for _attempt in range(50):
            t, sign = draw_tuple(path)
            if fits(path, t, sign):
                break
        else:
            fresh += 1
            t, sign = random_tuple(f"x{fresh}"), POS
        if sign is POS:
            positives[path][t.key] = t
        else:
            negatives[path].add(t)
        made.append(t)
        out.append(BeliefStatement(path, t, sign))
    return out


def build_store(statements: Sequence[BeliefStatement], m: int) -> Store:
    """Bulk-load through the incremental engine, shallow statements first."""
    store = Store(SCHEMA, users_for(m))
    for s in sorted(statements, key=lambda s: len(s.path)):
        insert(store, s.path, s.tuple, s.sign)
    return store


def size_bound_holds(report: SizeReport, n: int) -> bool:
    return report.total <= SIZE_BOUND_C * (n + report.m) * report.N


# ----- overhead grid -----

@dataclass
class OverheadCell:
    params: GenParams
    overhead: float
    report: SizeReport
    seeds: int = 1

    def row(self) -> dict:
        p = self.params
        return {
            "m": p.m, "n": p.n,
            "depth_dist": "/".join(f"{x:g}" for x in p.depth_dist),
            "participation": p.participation, "seed": p.seed, "seeds": self.seeds,
            "N": self.report.N, "total_rows": self.report.total,
            "overhead": round(self.overhead, 4),
        }


def run_overhead_cell(params: GenParams, seeds: int = 1) -> OverheadCell:
    values = []
    report = None
    for k in range(seeds):
        p = GenParams(**{**asdict(params), "seed": params.seed + k})
        statements = generate(p)
        report = stats(build_store(statements, p.m), len(statements))
        values.append(report.overhead or 0.0)
    return OverheadCell(params, statistics.fmean(values), report, seeds)


def table1_grid(n: int = 10_000, ms: Iterable[int] = (10, 100), seed: int = 0) -> list[GenParams]:
    return [
        GenParams(m, n, depth, part, seed)
        for depth in TABLE1_DEPTHS
        for m in ms
        for part in ("zipf", "uniform")
    ]


def run_overhead(grid: Iterable[GenParams], seeds: int = 1) -> list[OverheadCell]:
    return [run_overhead_cell(p, seeds) for p in grid]


# ----- query latency -----

def benchmark_queries(users: Sequence[int] = (1, 2)) -> dict[str, Bcq]:
    """The content, conflict and user queries over Sightings."""
    a, b = users
    walk = (a, b, a, b)
    out = {}
    for d in range(5):
        box = "[" + ".".join(str(u) for u in walk[:d]) + "]"
        out[f"q1_{d}"] = parse_bcq(f"q1_{d}(x,y) :- {box} Sightings+(x,_,y,_,_)")
    out["q2"] = parse_bcq(
        f"q2(x,y) :- [{b}.{a}] Sightings+(x,z,y,u,v), [{b}] Sightings-(x,z,y,u,v)"
    )
    out["q3"] = parse_bcq(
        f"q3(x) :- [x] Sightings-(y,z,u,v,'Lake Placid'), [{a}] Sightings+(y,z,u,v,'Lake Placid')"
    )
    return out


_SIGHTING_ATTRS = ("sid", "uid", "species", "date", "location")


def benchmark_sql(names: Sequence[str] = ("user1", "user2")) -> dict[str, str]:
    """BeliefSQL text of the benchmark queries, for users named ``names``."""
    a, b = names
    walk = (a, b, a, b)
    out = {}
    for d in range(5):
        prefix = "".join(f"BELIEF '{u}' " for u in walk[:d])
        out[f"q1_{d}"] = f"select S.sid, S.species from {prefix}Sightings as S"
    same = " and ".join(f"S1.{c} = S2.{c}" for c in _SIGHTING_ATTRS)
    out["q2"] = (
        f"select S1.sid, S1.species from BELIEF '{b}' BELIEF '{a}' Sightings as S1, "
        f"BELIEF '{b}' not Sightings as S2 where {same}"
    )
    out["q3"] = (
        f"select U.uid from Users as U, BELIEF U.uid not Sightings as S1, "
        f"BELIEF '{a}' Sightings as S2 where {same} and S2.location = 'Lake Placid'"
    )
    return out


@dataclass
class QueryTiming:
    name: str
    mean_ms: float
    stdev_ms: float
    result_size: int


@dataclass
class BenchReport:
    size: SizeReport | None
    overhead: float | None
    timings: list[QueryTiming] = field(default_factory=list)

    def timing(self, name: str) -> QueryTiming:
        return next(t for t in self.timings if t.name == name)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["query", "mean_ms", "stdev_ms", "result_size"])
        for t in self.timings:
            w.writerow([t.name, f"{t.mean_ms:.4f}", f"{t.stdev_ms:.4f}", t.result_size])
        return buf.getvalue()


def run_queries(store: Store, queries: dict[str, Bcq] | None = None, repetitions: int = 5,
                n: int | None = None) -> BenchReport:
    """Time translate + evaluate for each query, warm and in-process.

    Queries run in interleaved rounds so that background load affects
    all of them alike; garbage collection is paused while timing, as
    timeit does.
    """
    if queries is None:
        queries = benchmark_queries()
    samples: dict[str, list[float]] = {name: [] for name in queries}
    sizes = {name: len(evaluate(translate(q, store.schema), store)) for name, q in queries.items()}
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(max(1, repetitions)):
            for name, q in queries.items():
                t0 = time.perf_counter()
                evaluate(translate(q, store.schema), store)
                samples[name].append((time.perf_counter() - t0) * 1000)
    finally:
        if gc_was_enabled:
            gc.enable()
    timings = []
    for name, xs in samples.items():
        sd = statistics.stdev(xs) if len(xs) > 1 else 0.0
        timings.append(QueryTiming(name, statistics.fmean(xs), sd, sizes[name]))
    report = stats(store, n)
    return BenchReport(report, report.overhead, timings)


def overhead_csv(cells: Sequence[OverheadCell]) -> str:
    buf = io.StringIO()
    rows = [c.row() for c in cells]
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def statements_to_bsql(statements: Iterable[BeliefStatement], m: int) -> str:
    """A BeliefSQL bulk-load script for generated statements."""
    names = users_for(m)
    lines = ["create relation Sightings(sid str, uid str, species str, date str, location str);"]
    lines += [f"adduser '{names[u]}';" for u in sorted(names)]
    for s in statements:
        prefix = "".join(f"BELIEF '{names[u]}' " for u in s.path)
        if s.sign is NEG:
            if not s.path:
                raise ValueError("a negative statement at the root has no BeliefSQL form")
            prefix += "not "
        vals = ", ".join("'" + str(v).replace("'", "''") + "'" for v in s.tuple.values)
        lines.append(f"insert into {prefix}Sightings values ({vals});")
    return "\n".join(lines) + "\n"
