"""Seeded synthetic patient-event records with planted groups of similar patients."""

from __future__ import annotations

import csv
import string
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .ingestion import COLUMNS, EventRecord

_FIRST = string.ascii_uppercase + string.digits
_REST = string.ascii_uppercase + string.digits + string.ascii_lowercase
_ID_CHARS = string.ascii_letters + string.digits + "@"


@dataclass
class SyntheticData:
    records: list[EventRecord]
    groups: dict[str, int]  # patient_id -> planted group, 1-based

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.records:
            w.writerow([r.patient_id, r.sex, r.age, r.event_code])

    def write_groups(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["patient_id", "group"])
        for pid in sorted(self.groups):
            w.writerow([pid, self.groups[pid]])


def _codes(rng: np.random.Generator, n: int) -> list[str]:
    out: list[str] = []
    seen = set()
    while len(out) < n:
        code = rng.choice(list(_FIRST)) + "".join(rng.choice(list(_REST), size=2))
        if code not in seen:
            seen.add(code)
            out.append(code)
    return out


def _patient_ids(rng: np.random.Generator, n: int) -> list[str]:
    ids: list[str] = []
    seen = set()
    while len(ids) < n:
        pid = "a" + "".join(rng.choice(list(_ID_CHARS), size=8))
        if pid not in seen:
            seen.add(pid)
            ids.append(pid)
    return ids


def generate(
    n_patients: int,
    n_codes: int,
    n_groups: int = 3,
    seed: int = 0,
    core_prob: float = 0.9,
    noise_prob: float = 0.05,
) -> SyntheticData:
    """Patients split evenly into ``n_groups`` planted groups.

    Each group owns a block of the code vocabulary, a sex and a pair of ages.
    Members carry most of their group's core codes (each with ``core_prob``)
    plus occasional extras; with probability ``noise_prob`` an event is drawn
    from the whole vocabulary instead. Raw codes sometimes carry a fourth
    character so level-3 truncation has work to do.
    """
    if min(n_patients, n_codes, n_groups) < 1:
        raise ValueError("n_patients, n_codes and n_groups must all be >= 1")
    rng = np.random.default_rng(seed)
    vocab = _codes(rng, n_codes)
    ids = _patient_ids(rng, n_patients)

    block = max(1, n_codes // n_groups)
    group_codes = []
    for g in range(n_groups):
        start = (g * block) % n_codes
        group_codes.append([vocab[(start + i) % n_codes] for i in range(block)])
    group_sex = [1 + g % 2 for g in range(n_groups)]
    group_ages = [(2 + 5 * g % 16, 3 + 5 * g % 16) for g in range(n_groups)]

    order = rng.permutation(n_patients)
    records: list[EventRecord] = []
    groups: dict[str, int] = {}
    for rank, idx in enumerate(order):
        g = rank * n_groups // n_patients
        pid = ids[idx]
        groups[pid] = g + 1
        sex = group_sex[g] if rng.random() < 0.9 else 3 - group_sex[g]
        ages = [group_ages[g][0]] if rng.random() < 0.7 else list(group_ages[g])
        own = group_codes[g]
        core = own[: min(3, len(own))]
        events = [c for c in core if rng.random() < core_prob]
        extra = own[len(core):]
        if extra:
            events += list(rng.choice(extra, size=int(rng.integers(0, 3))))
        if not events:
            events = [core[0]]
        events = [str(vocab[rng.integers(n_codes)]) if rng.random() < noise_prob else e for e in events]
        while len(events) < len(ages):
            events.append(events[0])
        for i, e in enumerate(events):
            # the first events pin every listed age to at least one row
            age = ages[i] if i < len(ages) else int(rng.choice(ages))
            raw = e + rng.choice(list(string.digits)) if rng.random() < 0.3 else e
            records.append(EventRecord(pid, sex, age, str(raw)))

    records.sort(key=lambda r: (r.patient_id, r.age, r.event_code))
    return SyntheticData(records, groups)
