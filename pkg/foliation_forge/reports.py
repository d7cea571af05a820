"""Run results and the files they are written to.

Every artifact is deterministic: rows come out in a fixed order, JSON keys are sorted, floats are
printed with 17 significant digits and rationals as num/den.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .defaults import SUMMARY_SCHEMA
from .utils import save_csv, save_json, to_jsonable

LOGGER = logging.getLogger(__name__)

SUMMARY_FILENAME = "summary.json"


@dataclass(frozen=True)
class CheckRecord:
    name: str
    passed: bool
    exact: bool
    measured: Dict = field(default_factory=dict)

    @classmethod
    def from_result(cls, result, name=None, **measured):
        values = {"residual": result.residual}
        if result.witness is not None:
            values["witness"] = result.witness
        values.update(result.detail)
        values.update(measured)
        return cls(name or result.name, bool(result.passed), result.exact, values)

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "exact": self.exact,
            "measured": to_jsonable(self.measured),
        }


@dataclass
class RunResults:
    command: str
    scenario: str
    seed: int
    checks: List[CheckRecord] = field(default_factory=list)
    tables: Dict[str, Tuple[Tuple, List]] = field(default_factory=dict)
    documents: Dict[str, Dict] = field(default_factory=dict)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failed(self):
        return [check for check in self.checks if not check.passed]

    def add_check(self, result, name=None, **measured):
        record = CheckRecord.from_result(result, name=name, **measured)
        self.checks.append(record)
        log = LOGGER.debug if record.passed else LOGGER.warning
        log(f"Check {record.name}: {'pass' if record.passed else 'FAIL'} {record.measured}")
        return record

    def add_table(self, name, header, rows):
        self.tables[name] = (tuple(header), list(rows))

    def merge(self, other):
        self.checks.extend(other.checks)
        self.tables.update(other.tables)
        self.documents.update(other.documents)
        return self

    def summary(self):
        artifacts = sorted(
            [f"{name}.csv" for name in self.tables] + [f"{name}.json" for name in self.documents]
        )
        return {
            "schema": SUMMARY_SCHEMA,
            "command": self.command,
            "scenario": self.scenario,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [check.as_dict() for check in self.checks],
            "artifacts": artifacts,
        }


def emit_report(results, output_path):
    """Write every table and document of ``results`` plus summary.json under ``output_path``."""
    output_path.mkdir(parents=True, exist_ok=True)
    for name, (header, rows) in sorted(results.tables.items()):
        save_csv(header, rows, output_path / f"{name}.csv")
    for name, document in sorted(results.documents.items()):
        save_json(document, output_path / f"{name}.json")
    summary_path = output_path / SUMMARY_FILENAME
    save_json(results.summary(), summary_path)
    return summary_path


def structure_document(P):
    """JSON-ready description of a Poisson structure (coefficients in polynomial text form)."""
    chart = P.chart
    return {
        "model": P.model_tag,
        "chart": {
            "names": list(chart.names),
            "bounds": [list(bounds) for bounds in chart.bounds],
            "periods": list(chart.periods),
        },
        "k": str(P.k.polynomial) if P.k.is_exact else "smooth",
        "casimirs": [str(F.polynomial) if F.is_exact else "smooth" for F in P.casimirs],
        "bivector": {
            f"{chart.names[i]}^{chart.names[j]}": (
                str(coefficient.polynomial) if coefficient.is_exact else "smooth"
            )
            for (i, j), coefficient in sorted(P.bivector.coefficients.items())
        },
    }
