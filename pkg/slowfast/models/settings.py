"""Numerical tolerances and run configuration models."""

from __future__ import annotations

import configparser
import io
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from ..core.errors import ConfigError


class Tolerances(BaseModel):
    tol_y: float = Field(1e-10, gt=0)
    tol_fp: float = Field(1e-12, gt=0)
    rank_tol: float = Field(1e-8, gt=0)
    deflation_tol: float = Field(1e-8, gt=0)
    cond_max: float = Field(1e10, gt=1)
    flux_tol: float = Field(1e-10, ge=0)
    hurwitz_tol: float = Field(1e-12, ge=0)
    dedup_tol: float = Field(1e-6, gt=0)
    root_tol: float = Field(1e-10, gt=0)
    stability_margin: float = Field(1e-8, gt=0)
    membership_tol: float = Field(1e-9, gt=0)


class IntegratorConfig(BaseModel):
    """Step control for :func:`slowfast.services.integration_service.integrate`.

    Adaptive step counts follow the accuracy asked for, not stiffness: on
    ``x' = -1000x`` over ``[0, 0.01]`` the implicit method needs fewer than 200
    accepted steps at ``rtol=1e-4``, and the count grows like ``rtol**(-1/3)`` as
    ``rtol`` shrinks. Without ``h_init`` the first step is estimated from the field.
    """

    rtol: float = Field(1e-8, gt=0, le=1e-2)
    atol: float = Field(1e-10, gt=0)
    h_init: float | None = Field(None, gt=0)
    h_max: float = Field(0.1, gt=0)
    method: Literal["implicit", "explicit"] = "implicit"
    max_steps: int = Field(500_000, gt=0)
    adaptive: bool = True


class SweepConfig(BaseModel):
    grid: int = Field(512, ge=8)
    tail_slack: float = Field(0.25, ge=0)
    error_floor: float = Field(1e-10, ge=0)
    max_workers: int = Field(4, ge=1)


class RunConfig(BaseModel):
    """Everything a CLI run needs; serializes to a sectioned key = value file."""

    system: str
    overrides: dict[str, float] = Field(default_factory=dict)
    eps_list: list[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3, 1e-4])
    tau0: float = Field(0.1, gt=0)
    T: float = Field(50.0, gt=0)
    n_samples: int = Field(50, ge=2)
    seed: int = 0
    output_dir: str = "./output"
    force: bool = False
    timing: bool = True
    tolerances: Tolerances = Field(default_factory=Tolerances)
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)

    @field_validator("eps_list")
    @classmethod
    def _positive_eps(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("eps_list must not be empty")
        if any(e <= 0 for e in value):
            raise ValueError("eps values must be positive")
        if any(b >= a for a, b in zip(value, value[1:])):
            raise ValueError("eps_list must be strictly decreasing")
        return value

    @model_validator(mode="after")
    def _window(self) -> RunConfig:
        if self.tau0 >= self.T / 2:
            raise ValueError(f"tau0={self.tau0} must lie below T/2={self.T / 2}")
        return self

    def to_ini(self) -> str:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # type: ignore[assignment,method-assign]
        parser["run"] = {
            "system": self.system,
            "eps_list": ", ".join(repr(e) for e in self.eps_list),
            "tau0": repr(self.tau0),
            "T": repr(self.T),
            "n_samples": str(self.n_samples),
            "seed": str(self.seed),
            "output_dir": self.output_dir,
            "force": str(self.force).lower(),
            "timing": str(self.timing).lower(),
        }
        parser["parameters"] = {k: repr(v) for k, v in sorted(self.overrides.items())}
        for section in ("tolerances", "integrator", "sweep"):
            model = getattr(self, section)
            parser[section] = {
                k: ("" if v is None else repr(v) if isinstance(v, float) else str(v))
                for k, v in model.model_dump().items()
            }
        buffer = io.StringIO()
        parser.write(buffer)
        return buffer.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> RunConfig:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # type: ignore[assignment,method-assign]
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"unreadable config: {exc}") from exc
        if "run" not in parser:
            raise ConfigError("config needs a [run] section")
        run = dict(parser["run"])
        data: dict[str, object] = {k: v for k, v in run.items() if k != "eps_list"}
        try:
            if "eps_list" in run:
                data["eps_list"] = [float(v) for v in run["eps_list"].split(",") if v.strip()]
            if "parameters" in parser:
                data["overrides"] = {k: float(v) for k, v in parser["parameters"].items()}
        except ValueError as exc:
            raise ConfigError(f"non-numeric value in config: {exc}") from exc
        for section in ("tolerances", "integrator", "sweep"):
            if section in parser:
                data[section] = {k: (v if v != "" else None) for k, v in parser[section].items()}
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            raise ConfigError(str(exc)) from exc

    def write(self, path: str | Path) -> Path:
        target = Path(path)
        target.write_text(self.to_ini(), encoding="utf-8")
        return target

    @classmethod
    def read(cls, path: str | Path) -> RunConfig:
        return cls.from_ini(Path(path).read_text(encoding="utf-8"))


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_INTEGRATOR = IntegratorConfig()
