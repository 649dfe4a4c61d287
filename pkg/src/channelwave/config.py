"""Experiment configuration: a strict JSON schema validated with pydantic."""
from __future__ import annotations

import copy
import itertools
import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import InvalidArgument
from .radial_state import make_grid, preset_from_dict, sample_preset


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridConfig(_Strict):
    r_max: float = Field(gt=0)
    n: int = Field(ge=8)


class TimeConfig(_Strict):
    t_end: float = Field(ge=0)
    cfl: float = Field(default=0.9, gt=0, le=1)
    snapshot_stride: int = Field(default=16, ge=1)
    mode: Literal["nonlinear", "linear"] = "nonlinear"
    check_support: bool = True


class AnalysisConfig(_Strict):
    channel_radii: list[float] = Field(default_factory=list)
    channel_horizon: float | None = Field(default=None, ge=0)
    radiation_A: float | None = Field(default=None, gt=0)
    eps_supp: float | None = Field(default=None, gt=0)
    blowup_amp_threshold: float = Field(default=1e6, gt=0)
    blowup_norm_threshold: float = Field(default=1e3, gt=0)
    gamma: float = Field(default=1.1, gt=1)
    residual_threshold: float = Field(default=1e-2, gt=0)
    exterior_radii: list[float] = Field(default_factory=list)

    @field_validator("channel_radii", "exterior_radii")
    @classmethod
    def _nonneg(cls, v):
        if any(x < 0 for x in v):
            raise ValueError("radii must be >= 0")
        return v


class OutputConfig(_Strict):
    directory: str | None = None
    formats: list[Literal["ndjson", "csv"]] = Field(default_factory=lambda: ["ndjson", "csv"])


class ExperimentConfig(_Strict):
    grid: GridConfig
    time: TimeConfig
    initial_data: dict[str, Any]
    analysis: AnalysisConfig = AnalysisConfig()
    output: OutputConfig = OutputConfig()
    seed: int = 0

    @field_validator("initial_data")
    @classmethod
    def _preset(cls, v):
        try:
            # sampling on a tiny grid runs the preset's own checks
            sample_preset(preset_from_dict(v), make_grid(1.0, 8))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"bad initial_data: {exc}") from exc
        return v

    @model_validator(mode="after")
    def _radii_on_grid(self):
        for R in self.analysis.channel_radii + self.analysis.exterior_radii:
            if R > self.grid.r_max:
                raise ValueError(f"radius {R} exceeds r_max {self.grid.r_max}")
        return self

    @property
    def preset(self):
        return preset_from_dict(self.initial_data)


class SweepConfig(_Strict):
    """A template plus a grid of dotted-path parameter values (Cartesian product)."""

    template: dict[str, Any]
    parameters: dict[str, list[Any]] = Field(default_factory=dict)

    def cells(self) -> list[tuple[dict, dict]]:
        """(parameters, raw config) per cell, in deterministic order."""
        keys = sorted(self.parameters)
        if any(len(self.parameters[k]) == 0 for k in keys):
            return []
        out = []
        for combo in itertools.product(*(self.parameters[k] for k in keys)):
            raw = copy.deepcopy(self.template)
            params = dict(zip(keys, combo))
            for path, value in params.items():
                set_dotted(raw, path, value)
            out.append((params, raw))
        return out


def set_dotted(d: dict, path: str, value) -> None:
    parts = path.split(".")
    for p in parts[:-1]:
        d = d.setdefault(p, {})
        if not isinstance(d, dict):
            raise InvalidArgument(f"cannot set {path}: {p} is not a mapping")
    d[parts[-1]] = value


def _load_json(path) -> dict:
    try:
        with open(Path(path), encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidArgument(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"config {path} is not valid JSON: {exc.msg}") from exc


def parse_config(raw: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise InvalidArgument(f"invalid config: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    return parse_config(_load_json(path))


def load_sweep(path) -> SweepConfig:
    try:
        return SweepConfig.model_validate(_load_json(path))
    except ValidationError as exc:
        raise InvalidArgument(f"invalid sweep config: {exc}") from exc


__all__ = ["AnalysisConfig", "ExperimentConfig", "GridConfig", "OutputConfig", "SweepConfig",
           "TimeConfig", "load_config", "load_sweep", "parse_config", "set_dotted"]
