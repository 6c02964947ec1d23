"""Experiment bookkeeping: sessions, the append-only ratings log, and the
rank correlation between listener ratings and objective scores."""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from scipy import stats

SCORE_MIN = 0.0
SCORE_MAX = 120.0


@dataclass(frozen=True)
class ExperimentSession:
    session_id: str
    listener_id: str
    stimulus_order: tuple[str, ...]
    references: dict[str, str]
    created_at: str

    def to_json(self) -> dict:
        return {
            "session_id": self.session_id,
            "listener_id": self.listener_id,
            "stimulus_order": list(self.stimulus_order),
            "references": self.references,
            "created_at": self.created_at,
        }


def new_session(listener_id: str, test_ids: list[str], references: dict[str, str], rng) -> ExperimentSession:
    order = list(test_ids)
    rng.shuffle(order)
    return ExperimentSession(
        session_id=uuid.uuid4().hex,
        listener_id=listener_id,
        stimulus_order=tuple(order),
        references=references,
        created_at=datetime.now(timezone.utc).isoformat(),
    )


@dataclass
class RatingsLog:
    """Append-only JSONL store; every accepted rating is flushed to disk."""

    path: Path
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self.path = Path(self.path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, record: dict) -> None:
        line = json.dumps(record)
        with self._lock:
            with self.path.open("a") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())

    def read_all(self) -> list[dict]:
        if not self.path.exists():
            return []
        records = []
        for line in self.path.read_text().splitlines():
            line = line.strip()
            if line:
                records.append(json.loads(line))
        return records

    def latest(self) -> list[dict]:
        """Deduplicate by (session_id, stimulus_id), keeping the last write."""
        by_key: dict[tuple[str, str], dict] = {}
        for rec in self.read_all():
            by_key[(rec["session_id"], rec["stimulus_id"])] = rec
        return list(by_key.values())


def correlate_scores(ratings: list[dict], objective_scores: dict[str, float]) -> dict:
    """Per-listener Spearman rank correlation between mean ratings and the
    objective scores over the common stimuli.

    Each rating record needs stimulus_id and score; listener_id is used for
    grouping when present, session_id otherwise.
    """
    by_listener: dict[str, dict[str, list[float]]] = {}
    for rec in ratings:
        listener = rec.get("listener_id") or rec.get("session_id", "unknown")
        by_listener.setdefault(listener, {}).setdefault(rec["stimulus_id"], []).append(
            float(rec["score"])
        )
    report: dict[str, dict] = {}
    for listener, per_stim in by_listener.items():
        common = sorted(set(per_stim) & set(objective_scores))
        if len(common) < 3:
            raise ValueError(
                f"listener {listener!r} has only {len(common)} stimuli in common "
                "with the objective scores (need >= 3)"
            )
        means = [sum(per_stim[s]) / len(per_stim[s]) for s in common]
        objective = [objective_scores[s] for s in common]
        rho = float(stats.spearmanr(means, objective).statistic)
        report[listener] = {"spearman": rho, "n": len(common), "stimuli": common}
    if not report:
        raise ValueError("no ratings to correlate")
    return {"per_listener": report}
