"""Verification records, reports, suite configuration files and output formats."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

# Tolerance classes by derivative depth.
TOLERANCE_CLASSES = {"closed": 1e-8, "fd": 1e-7, "fd2": 1e-6}

FORMATS = ("json", "csv", "md")


@dataclass
class Record:
    name: str
    identity: str
    residual: float
    tol: float
    tol_class: str
    passed: bool


@dataclass
class Report:
    suite: str
    group: str
    seed: int
    points: int
    records: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    timestamp: str = ""

    def add(self, name, identity, residual, tol_class="closed", tol=None, overrides=None):
        """Record the max residual of a check; ``overrides`` maps names or classes to tolerances."""
        overrides = overrides or {}
        if tol is None:
            tol = overrides.get(name, overrides.get(tol_class, TOLERANCE_CLASSES[tol_class]))
        else:
            tol = overrides.get(name, tol)
        residual = float(residual)
        ok = math.isfinite(residual) and residual <= tol
        self.records.append(Record(name, identity, residual, float(tol), tol_class, ok))
        return ok

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    def summary(self):
        finite = [r.residual for r in self.records if math.isfinite(r.residual)]
        return {
            "checks": len(self.records),
            "failed": sum(not r.passed for r in self.records),
            "passed": self.passed,
            "max_residual": max(finite, default=0.0),
        }

    def to_dict(self):
        return {
            "suite": self.suite,
            "group": self.group,
            "seed": self.seed,
            "points": self.points,
            "records": [asdict(r) for r in self.records],
            "summary": self.summary(),
            "timing": self.timing,
            "timestamp": self.timestamp,
        }


# Keys that vary between identical runs.
VOLATILE_KEYS = ("timing", "timestamp")


def to_json(report, stable=False):
    d = report.to_dict()
    if stable:
        for k in VOLATILE_KEYS:
            d.pop(k)
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


def to_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "group", "seed", "name", "identity", "residual", "tol", "tol_class",
                "passed"])
    for r in report.records:
        w.writerow([report.suite, report.group, report.seed, r.name, r.identity,
                    f"{r.residual:.6e}", f"{r.tol:.1e}", r.tol_class, int(r.passed)])
    return buf.getvalue()


def to_markdown(report):
    s = report.summary()
    lines = [
        f"# {report.suite} on {report.group}",
        "",
        f"seed {report.seed}, {report.points} points: "
        f"{s['checks'] - s['failed']}/{s['checks']} checks pass",
        "",
        "| check | identity | residual | tol | class | status |",
        "|---|---|---|---|---|---|",
    ]
    for r in report.records:
        status = "pass" if r.passed else "FAIL"
        lines.append(f"| {r.name} | `{r.identity}` | {r.residual:.3e} | {r.tol:.0e} | "
                     f"{r.tol_class} | {status} |")
    return "\n".join(lines) + "\n"


def render(report, fmt):
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "md":
        return to_markdown(report)
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")


def rows_to_csv(rows):
    """Plain-column CSV for a list of flat dicts with shared keys."""
    buf = io.StringIO()
    if not rows:
        return ""
    keys = list(rows[0])
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (f"{v:.12e}" if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


# --------------------------------------------------------------------------
# suite configuration


@dataclass
class SuiteConfig:
    suite: str
    group: str = "su2"
    seed: int = 1
    points: int = 10
    tol: dict = field(default_factory=dict)
    out: str = ""
    format: str = "json"

    def to_text(self):
        tol = ",".join(f"{k}={v!r}" for k, v in sorted(self.tol.items()))
        return (f"suite = {self.suite}\ngroup = {self.group}\nseed = {self.seed}\n"
                f"points = {self.points}\ntol = {tol}\nout = {self.out}\n"
                f"format = {self.format}\n")

    @classmethod
    def from_text(cls, text):
        """Parse ``key = value`` lines; blank lines and ``#`` comments are ignored."""
        values = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {n}: expected 'key = value'")
            key, val = (x.strip() for x in line.split("=", 1))
            values[key.replace("-", "_")] = val
        unknown = set(values) - {"suite", "group", "seed", "points", "tol", "out", "format"}
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "suite" not in values:
            raise ValueError("config needs a suite")
        return cls(
            suite=values["suite"],
            group=values.get("group", "su2"),
            seed=int(values.get("seed", 1)),
            points=int(values.get("points", 10)),
            tol=parse_tolerances(values.get("tol", "")),
            out=values.get("out", ""),
            format=values.get("format", "json"),
        )


def parse_tolerances(items):
    """``name=value`` pairs, given as a comma separated string or a list."""
    if isinstance(items, str):
        items = [x for x in items.split(",") if x.strip()]
    out = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"tolerance override {item!r} is not name=value")
        k, v = item.split("=", 1)
        out[k.strip()] = float(v)
    return out
