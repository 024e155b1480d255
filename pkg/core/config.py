"""Experiment configuration: validated pydantic models and the config parser.

Configuration is a nested JSON object; every level rejects unknown keys.
Omitted values fall back to the defaults below (square lattice of side 50,
5000 steps averaged over the last 500, 20 seeds from master seed 42).
"""

from __future__ import annotations

import copy
import json
import math
from typing import Any, Literal, Mapping

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .agents import FermiParams, QLearnParams
from .categories import TransitionParams
from .engine import NetworkSpec, Params
from .errors import ConfigError
from .game import MemoryParams, PayoffParams

AXIS_NAMES = ("p", "q", "M", "beta", "alpha", "gamma", "epsilon", "r")
AxisName = Literal["p", "q", "M", "beta", "alpha", "gamma", "epsilon", "r"]
ExperimentKind = Literal["single-run", "ensemble", "sweep2d", "size-sweep", "snapshot-run"]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class NetworkConfig(_Model):
    """Network family and size."""

    kind: Literal["lattice", "ws"] = Field("lattice", description="'lattice' or 'ws' (small world)")
    side: int = Field(50, ge=2, description="Lattice side (n = side^2)")
    n: int = Field(2500, ge=3, description="Small-world node count")
    ring_degree: int = Field(4, gt=0, description="Initial ring degree (even)")
    rewire_prob: float = Field(0.2, ge=0.0, le=1.0, description="Rewiring probability")

    @field_validator("ring_degree")
    @classmethod
    def _even(cls, v: int) -> int:
        if v % 2:
            raise ValueError("must be even")
        return v

    @model_validator(mode="after")
    def _ring_fits(self) -> NetworkConfig:
        if self.kind == "ws" and self.n <= self.ring_degree:
            raise ValueError(f"n ({self.n}) must exceed ring_degree ({self.ring_degree})")
        return self

    @property
    def size(self) -> int:
        return self.side * self.side if self.kind == "lattice" else self.n

    def to_spec(self) -> NetworkSpec:
        return NetworkSpec(
            kind=self.kind, side=self.side, n=self.n,
            ring_degree=self.ring_degree, rewire_prob=self.rewire_prob,
        )


class ModelParamsConfig(_Model):
    """Model constants."""

    r: float = Field(0.5, ge=0.0, le=1.0, description="Cost-to-benefit ratio")
    M: int = Field(5, ge=1, description="Memory length (rounds)")
    beta: float = Field(0.5, ge=0.0, le=1.0, description="Memory decay factor")
    kappa: float = Field(0.1, gt=0.0, description="Fermi noise")
    alpha: float = Field(0.8, ge=0.0, le=1.0, description="Q-learning rate")
    gamma: float = Field(0.2, ge=0.0, le=1.0, description="Q-learning discount")
    epsilon: float = Field(0.1, ge=0.0, le=1.0, description="Exploration rate")
    p: float = Field(0.5, ge=0.0, le=1.0, description="Learner -> profiteer probability")
    q: float = Field(0.5, ge=0.0, le=1.0, description="Profiteer -> learner probability")
    q_init: float = Field(0.0, allow_inf_nan=False, description="Initial Q-table value")

    def to_params(self) -> Params:
        return Params(
            payoff=PayoffParams(r=self.r),
            memory=MemoryParams(m=self.M, beta=self.beta),
            fermi=FermiParams(kappa=self.kappa),
            qlearn=QLearnParams(alpha=self.alpha, gamma=self.gamma, epsilon=self.epsilon, q_init=self.q_init),
            transition=TransitionParams(p=self.p, q=self.q),
        )


class SeedConfig(_Model):
    count: int = Field(20, ge=1, description="Independent runs per ensemble")
    master: int = Field(42, ge=0, description="Master seed")

    def derive(self) -> list[int]:
        """Per-run seeds spawned from the master seed."""
        state = np.random.SeedSequence(self.master).generate_state(self.count, dtype=np.uint32)
        return [int(s) for s in state]


class SweepAxis(_Model):
    name: AxisName
    min: float
    max: float
    points: int = Field(ge=2, description="Grid points (inclusive of both ends)")

    @model_validator(mode="after")
    def _range(self) -> SweepAxis:
        if self.max < self.min:
            raise ValueError(f"max ({self.max}) is below min ({self.min})")
        if self.name == "M":
            if self.min < 1:
                raise ValueError("M axis must start at >= 1")
            grid = self.values()
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError(
                    f"M axis {self.min:g}..{self.max:g} with {self.points} points repeats memory lengths {grid}"
                )
        elif not (0.0 <= self.min and self.max <= 1.0):
            raise ValueError(f"{self.name} axis must lie within [0, 1]")
        return self

    def values(self) -> list[float | int]:
        grid = np.linspace(self.min, self.max, self.points)
        if self.name == "M":
            return [int(round(v)) for v in grid]
        return [float(v) for v in grid]


class ExperimentConfig(_Model):
    kind: ExperimentKind = "ensemble"
    network: NetworkConfig = NetworkConfig()
    params: ModelParamsConfig = ModelParamsConfig()
    steps: int = Field(5000, ge=1)
    tail: int = Field(500, ge=1)
    seeds: SeedConfig = SeedConfig()
    axes: tuple[SweepAxis, ...] = ()
    sizes: tuple[int, ...] = ()
    snapshot_times: tuple[int, ...] = ()
    out: str = "results"
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _consistent(self) -> ExperimentConfig:
        if self.tail > self.steps:
            raise ValueError(f"tail ({self.tail}) exceeds steps ({self.steps})")
        if self.kind == "sweep2d":
            if len(self.axes) != 2:
                raise ValueError("sweep2d needs exactly two axes")
            if self.axes[0].name == self.axes[1].name:
                raise ValueError("sweep axes must name different parameters")
        if self.kind == "size-sweep":
            if not self.sizes:
                raise ValueError("size-sweep needs at least one size")
            for n in self.sizes:
                if self.network.kind == "lattice" and (n < 4 or math.isqrt(n) ** 2 != n):
                    raise ValueError(f"lattice size {n} is not a square of a side >= 2")
                if self.network.kind == "ws" and n <= self.network.ring_degree:
                    raise ValueError(f"size {n} must exceed ring_degree ({self.network.ring_degree})")
        if self.kind == "snapshot-run":
            if self.network.kind != "lattice":
                raise ValueError("snapshot-run requires a square lattice")
            if not self.snapshot_times:
                raise ValueError("snapshot-run needs at least one snapshot time")
        for t in self.snapshot_times:
            if not 0 <= t <= self.steps:
                raise ValueError(f"snapshot time {t} outside [0, {self.steps}]")
        return self

    def with_params(self, **updates: Any) -> ModelParamsConfig:
        """Validated copy of ``params`` with some values replaced."""
        return ModelParamsConfig(**{**self.params.model_dump(), **updates})

    def to_json(self) -> str:
        return self.model_dump_json()


def merge(base: Mapping[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    """Recursive dict merge; ``overrides`` wins."""
    out = copy.deepcopy(dict(base))
    for key, value in overrides.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), Mapping):
            out[key] = merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _field_name(loc: tuple) -> str:
    return ".".join(str(part) for part in loc) or "config"


def parse_config(
    source: str | Mapping[str, Any] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> ExperimentConfig:
    """Build a validated ``ExperimentConfig``.

    Args:
        source: JSON text, an already-decoded mapping, or None for defaults.
        overrides: Nested mapping applied on top of ``source``.

    Raises:
        ConfigError: naming the first offending field.
    """
    if source is None or (isinstance(source, str) and not source.strip()):
        data: dict[str, Any] = {}
    elif isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"malformed JSON ({e.msg} at line {e.lineno})") from e
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be a JSON object")
    else:
        data = dict(source)
    if overrides:
        data = merge(data, overrides)

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        raise ConfigError(_field_name(err["loc"]), err["msg"]) from e
