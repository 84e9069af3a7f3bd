"""Verdicts produced by the condition checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

CERTIFIED = "certified-at-samples"
FAILED = "failed"
MARGINAL = "marginal"
SKIPPED = "skipped"


def _point(witness: Sequence[float] | None) -> tuple[float, ...] | None:
    if witness is None:
        return None
    return tuple(float(v) for v in witness)


@dataclass(slots=True)
class Verdict:
    condition: str
    status: str
    witness: tuple[float, ...] | None = None
    margins: dict[str, float] = field(default_factory=dict)
    samples: int = 0
    detail: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in (CERTIFIED, SKIPPED)


@dataclass(slots=True, init=False)
class Certified(Verdict):
    def __init__(
        self, *, condition: str, margins: dict[str, float] | None = None,
        samples: int = 0, detail: str = "", extra: dict[str, Any] | None = None,
    ) -> None:
        Verdict.__init__(
            self, condition, CERTIFIED, None, dict(margins or {}), samples, detail, dict(extra or {})
        )


@dataclass(slots=True, init=False)
class Failed(Verdict):
    def __init__(
        self, *, condition: str, witness: Sequence[float], reason: str,
        margins: dict[str, float] | None = None, samples: int = 0,
        extra: dict[str, Any] | None = None,
    ) -> None:
        Verdict.__init__(
            self, condition, FAILED, _point(witness), dict(margins or {}), samples, reason,
            dict(extra or {}),
        )


@dataclass(slots=True, init=False)
class Marginal(Verdict):
    def __init__(
        self, *, condition: str, witness: Sequence[float], reason: str,
        margins: dict[str, float] | None = None, samples: int = 0,
    ) -> None:
        Verdict.__init__(
            self, condition, MARGINAL, _point(witness), dict(margins or {}), samples, reason
        )


@dataclass(slots=True, init=False)
class Skipped(Verdict):
    def __init__(self, *, condition: str, reason: str) -> None:
        Verdict.__init__(self, condition, SKIPPED, detail=reason)
