"""Operation counters for the conversion pipeline and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass, fields, replace

__all__ = ["MetricsRecord", "CSV_FIELDS", "csv_header", "to_csv", "from_csv"]


@dataclass
class MetricsRecord:
    """Model-operation counts for one conversion run.

    Counters measure operations of the algorithm (table probes, re-keyed
    reals, ...), not machine work.  The ``*_ns`` fields carry wall time per
    phase so the cost of big-integer arithmetic stays visible next to them.
    """

    n: int = 0
    probes: int = 0
    match_steps: int = 0
    levels_pushed: int = 0
    max_top: int = 0
    merge_rekeys: int = 0
    ladder_writes: int = 0
    # bit length of the final scale factor
    max_key_bits: int = 0
    branch_count: int = 0
    insert_ns: int = 0
    merge_ns: int = 0
    finalize_ns: int = 0
    sort_ns: int = 0

    def snapshot(self) -> "MetricsRecord":
        """Point-in-time copy; later updates to ``self`` do not leak into it."""
        return replace(self)

    def counters(self) -> tuple:
        """Every field except the wall-clock timings."""
        return tuple(getattr(self, f) for f in CSV_FIELDS if not f.endswith("_ns"))


CSV_FIELDS: tuple[str, ...] = tuple(f.name for f in fields(MetricsRecord))


def csv_header() -> str:
    return ",".join(CSV_FIELDS)


def to_csv(record: MetricsRecord) -> str:
    """One CSV data row (no newline) in ``CSV_FIELDS`` order."""
    return ",".join(str(int(v)) for v in astuple(record))


def from_csv(text: str) -> list[MetricsRecord]:
    """Parse CSV text with a header row back into records.

    Extra columns (such as the derived column written by ``bench``) are
    ignored.
    """
    reader = csv.DictReader(io.StringIO(text))
    missing = set(CSV_FIELDS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"CSV is missing columns: {sorted(missing)}")
    return [MetricsRecord(**{k: int(row[k]) for k in CSV_FIELDS}) for row in reader]
