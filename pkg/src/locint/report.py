"""Check reports and their JSON/text renderings."""

import json
from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"


@dataclass
class CheckReport:
    check: str
    status: str
    dimensions: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    instance: object = None

    @property
    def passed(self):
        return self.status == PASS

    def to_dict(self):
        out = {"check": self.check, "status": self.status,
               "dimensions": dict(self.dimensions), "residuals": dict(self.residuals)}
        if self.details:
            out["details"] = self.details
        if self.instance is not None:
            out["instance"] = self.instance
        return out

    @classmethod
    def from_dict(cls, d):
        return cls(d["check"], d["status"], d.get("dimensions", {}), d.get("residuals", {}),
                   d.get("details", {}), d.get("instance"))


def status(ok):
    return PASS if ok else FAIL


@dataclass
class Report:
    """Ordered task results plus an environment echo (seed, caps, tolerances)."""

    entries: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(e.get("status") == PASS for e in self.entries)

    def to_dict(self):
        return {"environment": self.environment, "entries": self.entries,
                "summary": {"total": len(self.entries),
                            "failed": sum(e.get("status") != PASS for e in self.entries)}}

    @classmethod
    def from_dict(cls, d):
        return cls(list(d.get("entries", [])), dict(d.get("environment", {})))


def to_json(report):
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.3e}"
    return str(x)


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, list) and obj and all(isinstance(v, (int, float)) for v in obj):
        out.append((prefix, "[" + ", ".join(_fmt(v) for v in obj) + "]"))
    else:
        out.append((prefix, _fmt(obj)))


def to_text(report):
    lines = []
    env = report.environment
    if env:
        lines.append("environment: " + ", ".join(f"{k}={env[k]}" for k in sorted(env)))
    s = report.to_dict()["summary"]
    lines.append(f"{s['total']} entries, {s['failed']} failed")
    for i, e in enumerate(report.entries):
        name = e.get("task", e.get("check", "?"))
        lines.append("")
        lines.append(f"[{i}] {name}: {e.get('status')}")
        rows = []
        _flatten("", e.get("dimensions", {}), rows)
        if rows:
            lines.append("  dimensions")
            lines.extend(f"    {k:<40} {v}" for k, v in rows)
        rows = []
        _flatten("", e.get("residuals", {}), rows)
        if rows:
            lines.append("  residuals")
            lines.extend(f"    {k:<40} {v}" for k, v in rows)
        for sub in e.get("checks", []):
            mark = "ok " if sub.get("status") == PASS else "BAD"
            lines.append(f"  {mark} {sub.get('check')}")
            if sub.get("status") != PASS:
                rows = []
                _flatten("", sub.get("residuals", {}), rows)
                lines.extend(f"      {k:<38} {v}" for k, v in rows)
        if e.get("error"):
            lines.append(f"  error: {e['error']}")
    return "\n".join(lines) + "\n"
