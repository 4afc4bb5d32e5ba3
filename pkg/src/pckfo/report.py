"""Structured verdicts shared by validation, proof checking and the oracle."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

# Verdict vocabulary.  Reports always carry one of these strings.
SAT = "sat"
UNSAT_AT_STATE = "unsat-at-state"
VALID_IN_SUITE = "valid-in-suite"
ACCEPTED = "accepted"
ACCEPTED_BOUNDED = "accepted-with-bounded-certificates"
REJECTED = "rejected"
NOT_FOUND = "not-found-within-budget"
OK = "ok"
INVALID = "invalid"


@dataclass
class CheckReport:
    """A verdict plus structured diagnostics and optional witness artifacts.

    `details` is a list of JSON-compatible dicts (one per finding or check);
    `artifacts` maps names to serialized witnesses that can be fed back in.
    """

    verdict: str
    details: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict in (SAT, VALID_IN_SUITE, ACCEPTED, ACCEPTED_BOUNDED, OK)

    def add(self, **kv) -> None:
        self.details.append(kv)

    def to_json(self) -> str:
        payload = {
            "verdict": self.verdict,
            "details": self.details,
            "artifacts": self.artifacts,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        for d in self.details:
            parts = [f"{k}={v}" for k, v in d.items()]
            lines.append("  " + " ".join(parts))
        for name in sorted(self.artifacts):
            lines.append(f"  artifact: {name}")
        return "\n".join(lines) + "\n"
