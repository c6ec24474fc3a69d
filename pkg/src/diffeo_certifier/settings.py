from pathlib import Path

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import find_dotenv

_root_path = Path(__file__).resolve().parent


class TemplatePaths(BaseModel):
    report: str = Field(
        default=_root_path.joinpath("report_templates", "report.jinja").as_posix()
    )
    sweep: str = Field(
        default=_root_path.joinpath("report_templates", "sweep.jinja").as_posix()
    )


class SamplingBudget(BaseModel):
    """Where det JF is evaluated when no sign certificate applies."""

    line_denominator: int = Field(default=8, gt=0)
    line_max_numerator: int = Field(default=64, ge=0)
    uniform_points: int = Field(default=500, ge=0)
    uniform_radius: int = Field(default=10, gt=0)
    point_denominator: int = Field(default=16, gt=0)
    random_lines: int = Field(default=50, ge=0)
    random_line_denominator: int = Field(default=2, gt=0)
    random_line_max_numerator: int = Field(default=16, ge=0)
    seed: int = 1729


class Settings(BaseSettings):
    sampling: SamplingBudget = SamplingBudget()
    transform_bound: int = Field(default=1, ge=1)
    transform_budget: int = Field(default=5000, ge=1)
    weights: str = "default"
    verify_determinant: bool = True
    template_paths: TemplatePaths = TemplatePaths()
    model_config = SettingsConfigDict(
        env_prefix="DIFFEO_",
        env_file=find_dotenv(),
        env_nested_delimiter="__",
        extra="ignore",
    )
