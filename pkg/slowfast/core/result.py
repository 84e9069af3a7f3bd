"""Aggregated outcome of a condition-checking run."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .verdicts import FAILED, MARGINAL, Verdict


@dataclass(slots=True)
class ConditionReport:
    system: str = ""
    verdicts: list[Verdict] = field(default_factory=list)
    seed: int | None = None

    def extend(self, other: ConditionReport | Iterable[Verdict]) -> None:
        if isinstance(other, ConditionReport):
            self.verdicts.extend(other.verdicts)
        else:
            self.verdicts.extend(other)

    def add(self, verdict: Verdict) -> Verdict:
        self.verdicts.append(verdict)
        return verdict

    def get(self, condition: str) -> Verdict | None:
        for verdict in self.verdicts:
            if verdict.condition == condition:
                return verdict
        return None

    @property
    def ok(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status in (FAILED, MARGINAL)]

    @property
    def margins(self) -> dict[str, float]:
        merged: dict[str, float] = {}
        for verdict in self.verdicts:
            for key, value in verdict.margins.items():
                name = f"{verdict.condition}.{key}"
                merged[name] = min(value, merged.get(name, value))
        return merged

    @property
    def sample_counts(self) -> dict[str, int]:
        return {v.condition: v.samples for v in self.verdicts}
