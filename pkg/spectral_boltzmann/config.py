"""
Run configuration

Schema for the JSON/TOML run files consumed by the command line. Every
section rejects unknown keys.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .ckernel import MAXWELL_BTILDE, CollisionParams
from .errors import ConfigError
from .scenarios import SCENARIOS, Scenario, build_scenario
from .vgrid import MIN_NODES, VelocityGrid, kernel_resolution

logger = logging.getLogger(__name__)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class GridSection(_Section):
    L: float = Field(10.0, gt=0)
    N: int = Field(48, ge=MIN_NODES)

    @field_validator("N")
    @classmethod
    def _even(cls, value: int) -> int:
        if value % 2:
            raise ValueError(f"N must be even, got {value}")
        return value


class CollisionSection(_Section):
    lam: float = Field(0.0, ge=0.0, le=1.0, alias="lambda")
    btilde: float = Field(MAXWELL_BTILDE, gt=0, alias="Btilde")
    g_tr: float = Field(8.0, gt=0)
    project: bool = True


class ScenarioSection(_Section):
    name: str = "maxwellian"
    params: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("name")
    @classmethod
    def _known(cls, value: str) -> str:
        if value not in SCENARIOS:
            raise ValueError(f"unknown scenario '{value}', available: {', '.join(sorted(SCENARIOS))}")
        return value


class IntegratorSection(_Section):
    kind: Literal["euler", "rk4", "ab4"] = "ab4"
    dt: float = Field(0.125, gt=0)
    t0: Optional[float] = None
    t_final: Optional[float] = None
    negativity_abort: Optional[float] = Field(None, gt=0)


class OutputsSection(_Section):
    directory: str = "runs"
    cadence: Optional[float] = Field(None, gt=0)
    slices: List[Literal["x", "y", "z"]] = Field(default_factory=lambda: ["x"])
    formats: List[Literal["field", "csv", "json"]] = Field(default_factory=lambda: ["field", "csv", "json"])


class AdvisorSection(_Section):
    method: Literal["I", "II"] = "I"
    tol: float = Field(0.1, gt=0)
    v_target: float = Field(4.0, gt=0)
    v_ref: float = Field(1.0, gt=0)
    gtr_ref: float = Field(6.0, gt=0)


class RunConfig(_Section):
    grid: GridSection = Field(default_factory=GridSection)
    collision: CollisionSection = Field(default_factory=CollisionSection)
    scenario: ScenarioSection = Field(default_factory=ScenarioSection)
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)
    outputs: OutputsSection = Field(default_factory=OutputsSection)
    advisor: AdvisorSection = Field(default_factory=AdvisorSection)

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        t0, t_final = self.integrator.t0, self.integrator.t_final
        if t0 is not None and t_final is not None:
            if t_final < t0:
                raise ValueError(f"integrator.t_final={t_final} precedes integrator.t0={t0}")
            if t_final > t0 and self.integrator.dt > t_final - t0:
                raise ValueError(f"integrator.dt={self.integrator.dt} exceeds the run length {t_final - t0}")
        ratio = kernel_resolution(self.grid.L, self.collision.g_tr)
        if ratio < 1.0:
            logger.warning(
                f"g_tr={self.collision.g_tr} gives a kernel wavelength 2*pi/g_tr={2 * math.pi / self.collision.g_tr:.4g} "
                f"below twice the Fourier spacing 2*dxi={2 * math.pi / self.grid.L:.4g}; "
                "the grid cannot resolve the weighting function"
            )
        return self

    def build_grid(self) -> VelocityGrid:
        return VelocityGrid(L=self.grid.L, N=self.grid.N)

    def collision_params(self) -> CollisionParams:
        return CollisionParams(g_tr=self.collision.g_tr, btilde=self.collision.btilde, lam=self.collision.lam)

    def build_scenario(self) -> Scenario:
        return build_scenario(self.scenario.name, self.scenario.params)

    def derived(self) -> Dict[str, float]:
        grid = self.build_grid()
        ratio = kernel_resolution(self.grid.L, self.collision.g_tr)
        return {
            "dv": grid.dv,
            "dzeta": grid.dzeta,
            "zeta_max": grid.zeta_max,
            "kernel_wavelength": 2.0 * math.pi / self.collision.g_tr,
            "nyquist_ratio": ratio,
            "nyquist_ok": ratio >= 1.0,
        }

    def output_times(self, t0: float, t_final: float) -> List[float]:
        cadence = self.outputs.cadence
        if cadence is None:
            return [t_final]
        count = int(math.floor((t_final - t0) / cadence + 1e-9))
        times = [t0 + j * cadence for j in range(count + 1)]
        if not math.isclose(times[-1], t_final, rel_tol=1e-9, abs_tol=1e-12):
            times.append(t_final)
        return times


def config_from_dict(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid run configuration:\n{e}") from e


def _load_toml(text: str) -> Dict[str, Any]:
    try:
        import tomllib
    except ImportError as e:
        raise ConfigError("TOML configuration needs Python 3.11 or newer; use JSON instead") from e
    return tomllib.loads(text)


def parse_config(path: Union[str, Path]) -> RunConfig:
    """Load and validate a run configuration from a .json or .toml file.

    Raises:
        ConfigError: If the file is missing, unparsable, or fails validation
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"Cannot read configuration {path}: {e}") from e
    try:
        if path.suffix.lower() == ".toml":
            data = _load_toml(text)
        else:
            data = json.loads(text)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"Cannot parse configuration {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration {path} must be a mapping at the top level")
    config = config_from_dict(data)
    logger.debug(f"Loaded configuration from {path}")
    return config
