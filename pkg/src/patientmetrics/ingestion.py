"""Patient event records -> per-patient trees and a frequency table.

Input is a CSV with header ``patient_id,sex,age,event_code`` holding one row
per event occurrence. Read codes are cut down to their first three characters
before anything else sees them.
"""

from __future__ import annotations

import csv
import io
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

import numpy as np

from .pqgram import DUMMY
from .tree import LabeledTree

log = logging.getLogger(__name__)

COLUMNS = ("patient_id", "sex", "age", "event_code")
ROOT_LABEL = "patient"
CODE_LEVEL = 3


class IngestError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


@dataclass(frozen=True)
class EventRecord:
    patient_id: str
    sex: int
    age: int
    event_code: str


@dataclass(frozen=True)
class PatientEntry:
    patient_id: str
    sex: int
    ages: tuple[int, ...]
    # level-3 codes, one per occurrence, sorted
    events: tuple[str, ...]


@dataclass
class PatientDataset:
    patients: list[PatientEntry]
    skipped: int = 0
    errors: list[str] = field(default_factory=list)

    @property
    def ids(self) -> list[str]:
        return [p.patient_id for p in self.patients]

    def __len__(self) -> int:
        return len(self.patients)

    def __getitem__(self, patient_id: str) -> PatientEntry:
        for p in self.patients:
            if p.patient_id == patient_id:
                return p
        raise KeyError(patient_id)


@dataclass(frozen=True)
class FrequencyTable:
    ids: tuple[str, ...]
    columns: tuple[str, ...]
    rows: np.ndarray  # int64, shape (patients, columns)

    def row(self, patient_id: str) -> np.ndarray:
        return self.rows[self.ids.index(patient_id)]

    def as_dict(self, patient_id: str) -> dict[str, int]:
        return dict(zip(self.columns, (int(v) for v in self.row(patient_id))))

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["patient_id", *self.columns])
        for pid, row in zip(self.ids, self.rows):
            w.writerow([pid, *(int(v) for v in row)])


def truncate_code(code: str) -> str:
    return code[:CODE_LEVEL]


def _parse_row(row: dict, line: int) -> EventRecord:
    pid = (row.get("patient_id") or "").strip()
    if not pid:
        raise IngestError("empty patient_id", line)
    try:
        sex = int(row["sex"])
    except (TypeError, ValueError):
        raise IngestError(f"sex must be 1 or 2, got {row.get('sex')!r}", line) from None
    if sex not in (1, 2):
        raise IngestError(f"sex must be 1 or 2, got {sex}", line)
    try:
        age = int(row["age"])
    except (TypeError, ValueError):
        raise IngestError(f"age is not an integer: {row.get('age')!r}", line) from None
    if age < 0:
        raise IngestError(f"negative age {age}", line)
    code = (row.get("event_code") or "").strip()
    if not code:
        raise IngestError("empty event_code", line)
    code = truncate_code(code).strip()
    if "{" in code or "}" in code:
        raise IngestError(f"event_code may not contain braces: {code!r}", line)
    if code == DUMMY:
        raise IngestError(f"event_code {DUMMY!r} is reserved", line)
    return EventRecord(pid, sex, age, code)


def load_records(source: str | Path | TextIO, strict: bool = True) -> PatientDataset:
    """Group event rows by patient.

    In strict mode the first bad row raises :class:`IngestError`; otherwise bad
    rows are skipped and counted in ``PatientDataset.skipped``.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return load_records(fh, strict=strict)

    reader = csv.DictReader(source)
    missing = [c for c in COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise IngestError(f"missing column(s): {', '.join(missing)}", 1)

    sexes: dict[str, int] = {}
    ages: dict[str, set[int]] = {}
    events: dict[str, list[str]] = {}
    skipped = 0
    errors: list[str] = []
    for row in reader:
        line = reader.line_num
        try:
            rec = _parse_row(row, line)
            known = sexes.get(rec.patient_id)
            if known is not None and known != rec.sex:
                raise IngestError(
                    f"patient {rec.patient_id} has conflicting sex codes {known} and {rec.sex}", line
                )
        except IngestError as exc:
            if strict:
                raise
            skipped += 1
            errors.append(str(exc))
            continue
        sexes[rec.patient_id] = rec.sex
        ages.setdefault(rec.patient_id, set()).add(rec.age)
        events.setdefault(rec.patient_id, []).append(rec.event_code)

    if skipped:
        log.warning("skipped %d malformed row(s)", skipped)
    patients = [
        PatientEntry(pid, sexes[pid], tuple(sorted(ages[pid])), tuple(sorted(events[pid])))
        for pid in sorted(sexes)
    ]
    return PatientDataset(patients, skipped, errors)


def loads_records(text: str, strict: bool = True) -> PatientDataset:
    return load_records(io.StringIO(text), strict=strict)


def build_tree(patient: PatientEntry) -> LabeledTree:
    """Flat tree: sex node, one node per distinct age, one leaf per event."""
    kids = [LabeledTree(f"sex:{patient.sex}")]
    kids += [LabeledTree(f"age:{a}") for a in sorted(patient.ages)]
    kids += [LabeledTree(code) for code in sorted(patient.events)]
    return LabeledTree(ROOT_LABEL, tuple(kids))


def build_frequency_table(dataset: PatientDataset) -> FrequencyTable:
    if not dataset.patients:
        raise IngestError("empty dataset")
    codes = sorted({c for p in dataset.patients for c in p.events})
    all_ages = sorted({a for p in dataset.patients for a in p.ages})
    columns = tuple(codes) + tuple(f"age:{a}" for a in all_ages) + ("sex",)
    code_col = {c: i for i, c in enumerate(codes)}
    age_col = {a: len(codes) + i for i, a in enumerate(all_ages)}

    rows = np.zeros((len(dataset.patients), len(columns)), dtype=np.int64)
    for r, p in enumerate(dataset.patients):
        for code, count in Counter(p.events).items():
            rows[r, code_col[code]] = count
        for a in p.ages:
            rows[r, age_col[a]] = 1
        rows[r, -1] = p.sex
    return FrequencyTable(tuple(dataset.ids), columns, rows)
