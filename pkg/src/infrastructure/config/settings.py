from pathlib import Path
from typing import Any, Tuple, Type
import os

from pydantic import BaseModel, Field
from pydantic.functional_validators import field_validator
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    YamlConfigSettingsSource,
)

PROJECT_ROOT = Path(__file__).resolve().parents[3]
DEFAULT_CONFIG_FILE = PROJECT_ROOT / 'config' / 'config.yaml'


def resolve_config_file() -> Path:
    """Retorna el YAML activo: DTS_CONFIG_FILE o config/config.yaml."""
    override = os.environ.get('DTS_CONFIG_FILE')
    return Path(override) if override else DEFAULT_CONFIG_FILE


class AppInfo(BaseModel):
    name: str = "RiskyTimes - Defaultable Term Structures"
    version: str = "1.0.0"


class NumericsConfig(BaseModel):
    """
    Parámetros de los esquemas deterministas (RK4, cuadraturas, tolerancias).
    """
    riccati_step: float = Field(default=1e-3, gt=0)
    quadrature_nodes: int = Field(default=2001, ge=3)
    closed_form_tol: float = Field(default=1e-8, gt=0)
    grid_tol_factor: float = Field(default=10.0, gt=0)


class MonteCarloConfig(BaseModel):
    """
    Configuración de las simulaciones Monte Carlo.
    """
    n_paths: int = Field(default=100_000, ge=1)
    block_size: int = Field(default=10_000, ge=1)
    workers: int = Field(default=1, ge=1)
    z_threshold: float = Field(default=3.0, gt=0)
    min_paths: int = Field(default=1000, ge=1)
    euler_step: float = Field(default=1e-3, gt=0)


class FilterConfig(BaseModel):
    dt: float = Field(default=1e-3, gt=0)
    coverage_level: float = Field(default=0.95, gt=0, lt=1)


class OutputConfig(BaseModel):
    float_digits: int = Field(default=17, ge=1, le=17)
    default_format: str = "csv"
    output_dir: Path = Path("output")

    @field_validator('default_format')
    @classmethod
    def _formato_valido(cls, value: str) -> str:
        value = value.lower().strip()
        if value not in ('csv', 'json', 'xlsx'):
            raise ValueError(f"Formato de salida inválido: '{value}'")
        return value


class LoggingConfig(BaseModel):
    level: str = "INFO"
    log_to_file: bool = False
    logs_dir: Path = Path("logs")
    file_name: str = "riskytimes.log"

    @property
    def log_file(self) -> Path:
        return self.logs_dir / self.file_name


class AppConfig(BaseSettings):
    """
    Configuración general de la aplicación (Pydantic v2).

    Prioridad: argumentos explícitos > variables DTS_* > .env > YAML.
    """
    environment: str = Field(default='DEV')

    app: AppInfo = Field(default_factory=AppInfo)
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    monte_carlo: MonteCarloConfig = Field(default_factory=MonteCarloConfig)
    filter: FilterConfig = Field(default_factory=FilterConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    model_config = SettingsConfigDict(
        env_prefix='DTS_',
        env_nested_delimiter='__',
        env_file='.env',
        env_file_encoding='utf-8',
        extra='ignore',
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        yaml_settings = YamlConfigSettingsSource(settings_cls, yaml_file=resolve_config_file())
        return init_settings, env_settings, dotenv_settings, yaml_settings, file_secret_settings

    def with_overrides(self, **sections: Any) -> 'AppConfig':
        """
        Retorna una copia con campos de secciones reemplazados.

        Args:
            sections: {'numerics': {'riccati_step': 1e-4}, ...}
        """
        updates = {}
        for name, values in sections.items():
            if not values:
                continue
            current = getattr(self, name)
            updates[name] = current.model_copy(update=values)
        return self.model_copy(update=updates)

# Singleton
_config_instance: AppConfig | None = None

def get_config() -> AppConfig:
    global _config_instance
    if _config_instance is None:
        _config_instance = AppConfig()
    return _config_instance

def reset_config() -> None:
    """Invalida el singleton (útil en pruebas)."""
    global _config_instance
    _config_instance = None
