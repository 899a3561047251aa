"""Campaign configuration, execution and persistence."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from ..errors import DomainError
from ..jsonio import dump_json, load_json
from .suites import SUITES, SuiteContext, SuiteResult

__all__ = ["CampaignConfig", "CampaignReport", "run_campaign", "CSV_COLUMNS"]

CSV_COLUMNS = ("suite", "instances", "passes", "worst_residual", "notes")

DEFAULT_DIMS = [(4, 1, 6), (5, 2, 2), (6, 2, 3), (8, 2, 4), (9, 3, 2), (12, 2, 5), (16, 2, 8)]
DEFAULT_RIESZ_DIMS = [(4, 1, 4), (8, 2, 2), (9, 3, 1), (8, 1, 8), (12, 2, 3), (16, 2, 4)]


def _dims_list(value, name: str) -> list:
    out = []
    for t in value:
        t = tuple(int(v) for v in t)
        if len(t) != 3 or min(t) < 1:
            raise DomainError(f"{name}: every entry must be (d, N, n) with all values >= 1, got {t}")
        out.append(t)
    return out


@dataclass
class CampaignConfig:
    seeds: list = field(default_factory=lambda: list(range(10)))
    dims: list = field(default_factory=lambda: list(DEFAULT_DIMS))
    riesz_dims: list = field(default_factory=lambda: list(DEFAULT_RIESZ_DIMS))
    suites: Optional[list] = None  # None runs everything
    tol: Optional[float] = None
    out_dir: Optional[str] = None
    banach_samples: int = 300
    banach_p: Optional[float] = None
    banach_r1: Optional[float] = None
    banach_r2: Optional[float] = None

    def __post_init__(self):
        self.dims = _dims_list(self.dims, "dims")
        self.riesz_dims = _dims_list(self.riesz_dims, "riesz_dims")
        for d, N, n in self.dims:
            if n * N * N < d:
                raise DomainError(f"dims: (d={d}, N={N}, n={n}) cannot carry a frame (n*N^2 < d)")
        for d, N, n in self.riesz_dims:
            if n * N * N != d:
                raise DomainError(f"riesz_dims: (d={d}, N={N}, n={n}) violates n*N^2 = d")
        self.seeds = [int(s) for s in self.seeds]
        if any(s < 0 for s in self.seeds):
            raise DomainError("seeds must be nonnegative")
        if self.suites is not None:
            unknown = [s for s in self.suites if s not in SUITES]
            if unknown:
                raise DomainError(f"unknown suites: {', '.join(unknown)}; known: {', '.join(SUITES)}")
        if self.tol is not None and not (self.tol >= 0 and math.isfinite(self.tol)):
            raise DomainError(f"tol must be a finite nonnegative number, got {self.tol}")
        if self.banach_samples < 1:
            raise DomainError("banach_samples must be >= 1")

    @property
    def selected(self) -> list:
        return list(SUITES) if self.suites is None else [s for s in SUITES if s in self.suites]

    @classmethod
    def from_dict(cls, obj: dict) -> "CampaignConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known
        if extra:
            raise DomainError(f"unknown config keys: {', '.join(sorted(extra))}")
        return cls(**obj)

    @classmethod
    def load(cls, path) -> "CampaignConfig":
        return cls.from_dict(load_json(path))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = [list(t) for t in self.dims]
        d["riesz_dims"] = [list(t) for t in self.riesz_dims]
        return d


@dataclass
class CampaignReport:
    config: dict
    suites: list  # SuiteResult, in execution order
    meta: dict = field(default_factory=dict)

    @property
    def failed_instances(self) -> int:
        return sum(s.failed for s in self.suites)

    @property
    def exit_code(self) -> int:
        return 0 if self.failed_instances == 0 else 1

    def suite(self, name: str) -> SuiteResult:
        for s in self.suites:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_dict(self, with_meta: bool = True) -> dict:
        d = {
            "config": self.config,
            "suites": [s.to_dict() for s in self.suites],
            "failed_instances": self.failed_instances,
            "annotations": [f"{s.name}: {n}" for s in self.suites for n in s.notes],
        }
        if with_meta:
            d["meta"] = self.meta
        return d

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for s in self.suites:
            w.writerow([s.name, s.instances, s.passes, repr(float(s.worst_residual)), " | ".join(s.notes)])
        return buf.getvalue()

    def write(self, out_dir) -> dict:
        out = Path(out_dir)
        report = dump_json(self.to_dict(), out / "report.json")
        summary = out / "summary.csv"
        try:
            summary.write_text(self.csv_text(), encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {summary}: {exc.strerror}") from exc
        return {"report": str(report), "summary": str(summary)}


def run_campaign(config: CampaignConfig) -> CampaignReport:
    """Run the selected suites in their fixed order.

    A suite that raises is recorded as one failed instance with the error
    and the campaign continues.
    """
    ctx = SuiteContext(
        seeds=config.seeds, dims=config.dims, riesz_dims=config.riesz_dims,
        tol_override=config.tol, banach_samples=config.banach_samples,
        banach_p=config.banach_p, banach_r1=config.banach_r1, banach_r2=config.banach_r2,
    )
    started = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    results, timings = [], {}
    for name in config.selected:
        t = time.perf_counter()
        try:
            results.append(SUITES[name](ctx))
        except Exception as exc:  # keep going; the failure is reported
            r = SuiteResult(name, instances=1)
            r.failures.append({"instance": "suite", "error": f"{type(exc).__name__}: {exc}"})
            results.append(r)
        timings[name] = round(time.perf_counter() - t, 3)
    meta = {"started": started, "elapsed_s": round(time.perf_counter() - t0, 3), "suite_seconds": timings}
    report = CampaignReport(config.to_dict(), results, meta)
    if config.out_dir is not None:
        report.meta["files"] = report.write(config.out_dir)
    return report
