"""Attribute-length sweep comparing baseline and signature hash joins."""

from __future__ import annotations

import csv
import gc
import io
import statistics
from dataclasses import dataclass, field

from . import _backend
from .join import HASH_BASELINE, HASH_SIGNATURE, VERIFY, JoinSpec, hash_join
from .relation import GenSpec, generate_pair

DEFAULT_ATTR_LENS = (2, 7, 10, 50, 100)

COLUMNS = ("algo", "mode", "attr_len", "rows_r", "rows_s", "build_ms", "probe_ms", "total_ms",
           "peak_table_bytes", "result_rows", "collisions", "speedup",
           "seed", "selectivity", "row_bytes", "repetitions", "backend")


@dataclass
class BenchRun:
    spec: GenSpec
    attr_lens: tuple[int, ...] = DEFAULT_ATTR_LENS
    repetitions: int = 3
    warmups: int = 1
    mode: str = VERIFY
    sig_config: tuple[int, int] = (16, 2)
    results: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if not self.attr_lens:
            raise ValueError("attr_lens must not be empty")
        if self.repetitions < 3 or self.warmups < 0:
            raise ValueError("repetitions must be >= 3 and warmups >= 0")

    def algorithms(self) -> list[JoinSpec]:
        return [JoinSpec(algorithm=HASH_BASELINE, sig_config=self.sig_config),
                JoinSpec(algorithm=HASH_SIGNATURE, mode=self.mode, sig_config=self.sig_config)]

    def run(self, progress=None) -> list[dict]:
        self.results = []
        gen = None
        for length in self.attr_lens:
            # Drop the previous pair first so each length starts from a tidy heap.
            gen = None
            gc.collect()
            gen = generate_pair(GenSpec(self.spec.card_r, self.spec.card_s, length,
                                        self.spec.selectivity, self.spec.row_bytes, self.spec.seed))
            rows = self._measure(gen, length)
            self.results.extend(rows)
            if progress:
                progress(rows)
        return self.results

    def _measure(self, gen, length):
        algos = self.algorithms()
        samples = {a.algorithm: [] for a in algos}
        last = {}
        # Warm the key caches outside the timed region.
        gen.r.key_bytes()
        gen.s.key_bytes()
        for i in range(self.warmups + self.repetitions):
            # Alternate algorithms within each repetition so drift hits both.
            for a in algos:
                res = hash_join(gen.r, gen.s, a)
                if i >= self.warmups:
                    samples[a.algorithm].append(res.stats)
                last[a.algorithm] = res
        rows = []
        base_total = statistics.median(s.total_ns for s in samples[HASH_BASELINE])
        for a in algos:
            st = samples[a.algorithm]
            total = statistics.median(s.total_ns for s in st)
            res = last[a.algorithm]
            rows.append({
                "algo": a.algorithm,
                "mode": a.mode or "",
                "attr_len": length,
                "rows_r": self.spec.card_r,
                "rows_s": self.spec.card_s,
                "build_ms": statistics.median(s.build_ns for s in st) / 1e6,
                "probe_ms": statistics.median(s.probe_ns for s in st) / 1e6,
                "total_ms": total / 1e6,
                "peak_table_bytes": res.stats.peak_table_bytes,
                "result_rows": len(res),
                "collisions": "" if res.stats.collisions is None else res.stats.collisions,
                "speedup": base_total / total if total else float("nan"),
                "seed": self.spec.seed,
                "selectivity": self.spec.selectivity,
                "row_bytes": self.spec.row_bytes,
                "repetitions": self.repetitions,
                "backend": _backend.BACKEND,
            })
        return rows

    def speedups(self) -> dict[int, float]:
        """Signature speedup (baseline time / signature time) per attribute length."""
        return {r["attr_len"]: r["speedup"] for r in self.results if r["algo"] == HASH_SIGNATURE}


def to_csv(rows, fh=None) -> str | None:
    own = fh is None
    fh = fh or io.StringIO()
    w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in r.items()})
    return fh.getvalue() if own else None
