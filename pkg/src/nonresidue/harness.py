"""Scans over prime ranges that check the non-residue bounds against brute force.

Each scan is split by prime; workers share nothing and results are merged
in prime order, so a report depends only on its ``ScanConfig`` (the worker
count is deliberately left out of the serialised config).

Bounds are compared exactly.  With base = 4b + c (or 4 for runs),

    v <= 7/sqrt(5) * b * sqrt(t) + base
      <=>  v <= base  or  5 (v - base)^2 <= 49 b^2 t,

and the integer ``bound`` column is the largest value still inside the bound,
base + isqrt(49 b^2 t // 5).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from sympy import primerange

from .fieldcore import (
    RUN_CLASSES,
    ApSpec,
    PrimeFieldCtx,
    ap_classes,
    character_table,
    least_nonresidue_in_ap,
    longest_runs,
)
from .stepanov import SystemSpec, verify_lemma_commonsol, within_lemma_range

K_MODES = ("prime", "all", "fixed")
FORMATS = ("json", "csv")
SCAN_KINDS = ("theorem", "corollary", "lemma")
LEMMA_KINDS = ("planted", "random", "residue")

THEOREM_FIELDS = ["p", "k", "b", "c", "t", "index", "value", "bound", "holds", "margin",
                  "bound_real", "brauer_bound", "hudson_bound", "beats_brauer", "beats_hudson",
                  "k_ge_p_fifth"]
COROLLARY_FIELDS = ["p", "k", "b", "c", "t", "class", "value", "bound", "holds", "margin",
                    "bound_real", "brauer_bound"]
LEMMA_FIELDS = ["p", "k", "t", "r", "kind", "M", "N", "deg_F", "n_roots", "min_multiplicity",
                "count_bound", "lemma_bound", "multiplicity_ok", "count_ok", "lemma_ok", "holds",
                "ratio"]
FIELDS = {"theorem": THEOREM_FIELDS, "corollary": COROLLARY_FIELDS, "lemma": LEMMA_FIELDS}


@dataclass
class ScanConfig:
    primes: tuple[int, int] = (5, 1000)
    k_mode: str = "prime"
    fixed_k: int | None = None
    ap_grid: tuple[tuple[int, int], ...] = ((1, 1),)
    seed: int = 0
    jobs: int | None = None
    fmt: str = "json"
    output: str | None = None
    classes: tuple[str, ...] = ("residue", "nonresidue")
    samples_per_prime: int = 3
    t_max: int = 120

    def __post_init__(self):
        self.primes = tuple(self.primes)
        self.ap_grid = tuple(tuple(bc) for bc in self.ap_grid)
        self.classes = tuple(self.classes)
        lo, hi = self.primes
        if lo < 5 or hi < lo:
            raise ValueError(f"prime range {lo}..{hi} must start at 5 or above")
        if self.k_mode not in K_MODES:
            raise ValueError(f"k mode must be one of {K_MODES}")
        if self.k_mode == "fixed" and (self.fixed_k is None or self.fixed_k < 2):
            raise ValueError("fixed k mode needs k >= 2")
        if not self.ap_grid:
            raise ValueError("empty (b, c) grid")
        if any(b < 1 or c < 0 for b, c in self.ap_grid):
            raise ValueError("AP steps must be >= 1 and offsets >= 0")
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if not self.classes or any(c not in RUN_CLASSES for c in self.classes):
            raise ValueError(f"run classes must come from {RUN_CLASSES}")
        if self.samples_per_prime < 0 or self.t_max < 1:
            raise ValueError("bad lemma sampling parameters")

    def worker_count(self) -> int:
        if self.jobs is not None:
            return max(1, self.jobs)
        return max(1, int(os.environ.get("STEPANOV_JOBS", "1")))

    def as_report_dict(self, kind: str) -> dict:
        d = asdict(self)
        for key in ("jobs", "output", "fmt"):
            d.pop(key)
        d["primes"] = list(self.primes)
        d["ap_grid"] = [list(bc) for bc in self.ap_grid]
        d["classes"] = list(self.classes)
        if kind != "corollary":
            d.pop("classes")
        if kind != "lemma":
            d.pop("samples_per_prime")
            d.pop("t_max")
        return d

    def ks_for(self, ctx: PrimeFieldCtx) -> list[int]:
        if self.k_mode == "prime":
            return ctx.prime_divisors_p_minus_1()
        if self.k_mode == "all":
            return [k for k in ctx.divisors_p_minus_1() if k >= 2]
        return [self.fixed_k] if ctx.divides_group_order(self.fixed_k) else []


# exact bound arithmetic

def within_sqrt_bound(value: int, base: int, b: int, t: int) -> bool:
    """value <= 7/sqrt(5) * b * sqrt(t) + base, decided in integers."""
    excess = value - base
    return excess <= 0 or 5 * excess * excess <= 49 * b * b * t


def sqrt_bound_floor(base: int, b: int, t: int) -> int:
    return base + math.isqrt(49 * b * b * t // 5)


def sqrt_bound_real(base: int, b: int, t: int) -> float:
    return 7 / math.sqrt(5) * b * math.sqrt(t) + base


def theorem_bound(b: int, c: int, t: int) -> float:
    return sqrt_bound_real(4 * b + c, b, t)


def brauer_bound(p: int) -> float:
    return math.sqrt(2 * p) + 2


def hudson_bound(p: int, b: int) -> float:
    return 2 ** 2.75 * b ** 2.5 * p ** 0.4 + 6 * b ** 3 * p ** 0.2 + 2 * b * b


def _r6(x: float) -> float:
    return round(x, 6)


# per-prime workers

def _theorem_rows(p: int, config: ScanConfig) -> list[dict]:
    ctx = PrimeFieldCtx(p)
    rows = []
    for k in config.ks_for(ctx):
        t = (p - 1) // k
        for b, c in config.ap_grid:
            if b >= p:
                continue
            c %= p
            found = least_nonresidue_in_ap(ctx, k, ApSpec(b, c))
            bound = sqrt_bound_floor(4 * b + c, b, t)
            real = theorem_bound(b, c, t)
            brauer, hudson = brauer_bound(p), hudson_bound(p, b)
            rows.append({
                "p": p, "k": k, "b": b, "c": c, "t": t,
                "index": found.index, "value": found.value,
                "bound": bound,
                "holds": within_sqrt_bound(found.value, 4 * b + c, b, t),
                "margin": bound - found.value,
                "bound_real": _r6(real),
                "brauer_bound": _r6(brauer),
                "hudson_bound": _r6(hudson),
                "beats_brauer": real < brauer,
                "beats_hudson": real < hudson,
                "k_ge_p_fifth": k ** 5 >= p,
            })
    return rows


def _corollary_rows(p: int, config: ScanConfig) -> list[dict]:
    ctx = PrimeFieldCtx(p)
    rows = []
    for k in config.ks_for(ctx):
        t = (p - 1) // k
        table = character_table(ctx, k)
        bound = sqrt_bound_floor(4, 1, t)
        for b, c in config.ap_grid:
            if b >= p:
                continue
            c %= p
            runs = longest_runs(ap_classes(ctx, k, ApSpec(b, c), table))
            for cls in config.classes:
                value = runs[cls]
                rows.append({
                    "p": p, "k": k, "b": b, "c": c, "t": t, "class": cls,
                    "value": value, "bound": bound,
                    "holds": within_sqrt_bound(value, 4, 1, t),
                    "margin": bound - value,
                    "bound_real": _r6(sqrt_bound_real(4, 1, t)),
                    "brauer_bound": _r6(brauer_bound(p)),
                })
    return rows


def _lemma_system(rng: random.Random, ctx: PrimeFieldCtx, t: int, r: int, kind: str) -> SystemSpec:
    p = ctx.p
    if kind == "residue":
        # the progression application: a_i = b (i-1), theta_i = 1
        b = rng.randrange(1, p)
        return SystemSpec(ctx, t, tuple(b * i for i in range(r)), (1,) * r)
    shifts = tuple(rng.sample(range(p), r))
    if kind == "planted":
        alpha = rng.randrange(p)
        while any((alpha + a) % p == 0 for a in shifts):
            alpha = rng.randrange(p)
        targets = tuple(pow(alpha + a, t, p) for a in shifts)
    else:
        targets = tuple(rng.randrange(1, p) for _ in range(r))
    return SystemSpec(ctx, t, shifts, targets)


def _lemma_rows(p: int, config: ScanConfig) -> list[dict]:
    ctx = PrimeFieldCtx(p)
    rng = random.Random(f"{config.seed}:{p}")
    candidates = [(k, (p - 1) // k) for k in config.ks_for(ctx)
                  if (p - 1) // k <= config.t_max and within_lemma_range((p - 1) // k, 2)]
    rows = []
    if not candidates:
        return rows
    kind_offset = rng.randrange(len(LEMMA_KINDS))
    for i in range(config.samples_per_prime):
        k, t = rng.choice(candidates)
        r_max = 2
        while within_lemma_range(t, r_max + 1):
            r_max += 1
        r = rng.randint(2, r_max)
        kind = LEMMA_KINDS[(i + kind_offset) % len(LEMMA_KINDS)]
        rep = verify_lemma_commonsol(_lemma_system(rng, ctx, t, r, kind))
        rows.append({
            "p": p, "k": k, "t": t, "r": r, "kind": kind,
            "M": rep.M, "N": rep.N, "deg_F": rep.deg_F,
            "n_roots": rep.n_roots,
            "min_multiplicity": rep.min_multiplicity,
            "count_bound": rep.count_bound,
            "lemma_bound": _r6(float(rep.lemma_bound)),
            "multiplicity_ok": rep.multiplicity_ok,
            "count_ok": rep.count_ok,
            "lemma_ok": rep.lemma_ok,
            "holds": rep.holds,
            "ratio": _r6(rep.n_roots * (r - 1) / t),
        })
    return rows


_WORKERS = {"theorem": _theorem_rows, "corollary": _corollary_rows, "lemma": _lemma_rows}


def _run_chunk(args) -> list[dict]:
    kind, primes, config = args
    worker = _WORKERS[kind]
    return [row for p in primes for row in worker(p, config)]


def _scan(kind: str, config: ScanConfig) -> list[dict]:
    lo, hi = config.primes
    primes = list(primerange(lo, hi + 1))
    jobs = config.worker_count()
    if jobs == 1 or len(primes) < 2:
        return _run_chunk((kind, primes, config))
    # interleaved chunks balance small and large primes; re-sorted below
    chunks = [primes[i::jobs * 4] for i in range(jobs * 4)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_run_chunk, [(kind, ch, config) for ch in chunks if ch]))
    rows = [row for part in parts for row in part]
    order = {p: i for i, p in enumerate(primes)}
    rows.sort(key=lambda row: order[row["p"]])  # stable: per-prime order kept
    return rows


def scan_theorem(config: ScanConfig) -> list[dict]:
    return _scan("theorem", config)


def scan_corollary(config: ScanConfig) -> list[dict]:
    return _scan("corollary", config)


def scan_lemma(config: ScanConfig) -> list[dict]:
    return _scan("lemma", config)


def _ratio(row: dict, kind: str) -> float:
    if kind == "lemma":
        return row["ratio"]
    return row["value"] / row["bound_real"]


def build_report(kind: str, config: ScanConfig, rows: list[dict]) -> dict:
    summary = {
        "rows": len(rows),
        "violations": sum(not row["holds"] for row in rows),
        "max_margin_ratio": _r6(max((_ratio(row, kind) for row in rows), default=0.0)),
    }
    if kind == "theorem":
        summary["beats_hudson"] = sum(row["beats_hudson"] for row in rows)
        summary["beats_brauer"] = sum(row["beats_brauer"] for row in rows)
    elif kind == "corollary":
        summary["violations_by_class"] = {
            cls: sum(not row["holds"] for row in rows if row["class"] == cls)
            for cls in config.classes}
    return {"scan": kind, "config": config.as_report_dict(kind), "rows": rows, "summary": summary}


def run_scan(kind: str, config: ScanConfig) -> dict:
    if kind not in SCAN_KINDS:
        raise ValueError(f"unknown scan {kind!r}")
    return build_report(kind, config, _scan(kind, config))


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=FIELDS[report["scan"]], lineterminator="\n")
    writer.writeheader()
    for row in report["rows"]:
        writer.writerow({k: (int(v) if isinstance(v, bool) else v) for k, v in row.items()})
    return buf.getvalue()


def write_report(report: dict, fmt: str, path: str | None) -> str:
    text = render_report(report, fmt)
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc
    return text
