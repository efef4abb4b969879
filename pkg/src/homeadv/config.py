"""INI configuration for studies and simulations.

Example (every key optional; shown values are the defaults)::

    [study]
    quality_window = 2003, 2012
    rtq_lower = 0.9
    rtq_upper = 1.1
    coach_threshold = 10
    p_threshold = 0.10
    covariates = fatigue, density, own_fan_share, adv_fan_share,
                 red_card_balance, fouls, adv_fouls
    include_away = false

    [fit]
    max_iterations = 50
    convergence_tol = 1e-8
    ridge_epsilon = 0
    separation_threshold = 15

    [simulation]
    n_teams = 12
    seasons = 20
    first_season = 2003
    beta_home = 0.6
    beta_fatigue = 0
    beta_density = 0
    draw_share = 0.25
    neutral_share = 0
    seed = 0
    # optional
    team_strengths = -0.5, 0, 0.5, ...
    coach_effects = coach 01: 1.6, coach 02: -0.4
    coach_effect_scope = all
    same_strength_gap = 0.2
    n_coaches = 24

    [recovery]
    replications = 50
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from homeadv.errors import DataError
from homeadv.features import COVARIATES, DEFAULT_COACH_THRESHOLD
from homeadv.glm import FitOptions
from homeadv.metrics import DEFAULT_QUALITY_WINDOW, RTQ_LOWER, RTQ_UPPER
from homeadv.synth import SimParams


@dataclass(frozen=True)
class StudyConfig:
    quality_window: tuple[int, int] = DEFAULT_QUALITY_WINDOW
    rtq_lower: float = RTQ_LOWER
    rtq_upper: float = RTQ_UPPER
    coach_threshold: int = DEFAULT_COACH_THRESHOLD
    p_threshold: float = 0.10
    covariates: tuple[str, ...] = COVARIATES
    include_away: bool = False
    fit: FitOptions = field(default_factory=FitOptions)

    def __post_init__(self):
        if not 0 < self.rtq_lower <= self.rtq_upper:
            raise ValueError("need 0 < rtq_lower <= rtq_upper")
        if not 0 < self.p_threshold < 1:
            raise ValueError("p_threshold must lie in (0, 1)")
        if self.coach_threshold < 1:
            raise ValueError("coach_threshold must be >= 1")
        unknown = [c for c in self.covariates if c not in COVARIATES]
        if unknown:
            raise ValueError(f"unknown covariate(s): {', '.join(unknown)}")


@dataclass(frozen=True)
class Config:
    study: StudyConfig = field(default_factory=StudyConfig)
    simulation: SimParams = field(default_factory=SimParams)
    replications: int = 50


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace("\n", " ").split(",") if x.strip()]


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.replace("\n", " ").split(",") if x.strip())


def _coach_effects(text: str) -> dict[str, float]:
    out = {}
    for item in _names(text):
        name, _, val = item.rpartition(":")
        if not name:
            raise ValueError(f"coach effect {item!r} is not 'name: value'")
        out[name.strip()] = float(val)
    return out


def _check_keys(section, allowed, name):
    extra = sorted(set(section) - set(allowed))
    if extra:
        raise DataError(f"config [{name}]: unknown key(s) {', '.join(extra)}")


def load_config(path=None) -> Config:
    """Read an INI file; a missing path gives the defaults."""
    if path is None:
        return Config()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(Path(path), encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc.strerror}") from exc
    extra = sorted(set(parser.sections()) - {"study", "fit", "simulation", "recovery"})
    if extra:
        raise DataError(f"config: unknown section(s) {', '.join(extra)}")
    try:
        return _build(parser)
    except ValueError as exc:
        raise DataError(f"config {path}: {exc}") from None


def _build(parser: configparser.ConfigParser) -> Config:
    fit_kw: dict = {}
    if parser.has_section("fit"):
        sec = parser["fit"]
        _check_keys(sec, ("max_iterations", "convergence_tol", "ridge_epsilon", "separation_threshold"), "fit")
        if "max_iterations" in sec:
            fit_kw["max_iterations"] = sec.getint("max_iterations")
        for k in ("convergence_tol", "ridge_epsilon", "separation_threshold"):
            if k in sec:
                fit_kw[k] = sec.getfloat(k)

    study_kw: dict = {"fit": FitOptions(**fit_kw)}
    if parser.has_section("study"):
        sec = parser["study"]
        _check_keys(sec, [f.name for f in fields(StudyConfig) if f.name != "fit"], "study")
        if "quality_window" in sec:
            lo, hi = (int(v) for v in _floats(sec["quality_window"]))
            study_kw["quality_window"] = (lo, hi)
        for k in ("rtq_lower", "rtq_upper", "p_threshold"):
            if k in sec:
                study_kw[k] = sec.getfloat(k)
        if "coach_threshold" in sec:
            study_kw["coach_threshold"] = sec.getint("coach_threshold")
        if "covariates" in sec:
            study_kw["covariates"] = _names(sec["covariates"])
        if "include_away" in sec:
            study_kw["include_away"] = sec.getboolean("include_away")

    sim_kw: dict = {}
    if parser.has_section("simulation"):
        sec = parser["simulation"]
        _check_keys(sec, [f.name for f in fields(SimParams)], "simulation")
        for k in ("n_teams", "seasons", "first_season", "seed", "n_coaches"):
            if k in sec:
                sim_kw[k] = sec.getint(k)
        for k in ("beta_home", "beta_fatigue", "beta_density", "draw_share", "neutral_share", "same_strength_gap"):
            if k in sec:
                sim_kw[k] = sec.getfloat(k)
        if "team_strengths" in sec:
            sim_kw["team_strengths"] = tuple(_floats(sec["team_strengths"]))
        if "geography" in sec:
            vals = _floats(sec["geography"])
            sim_kw["geography"] = tuple(zip(vals[0::2], vals[1::2]))
        if "coach_effects" in sec:
            sim_kw["coach_effects"] = _coach_effects(sec["coach_effects"])
        if "coach_effect_scope" in sec:
            sim_kw["coach_effect_scope"] = sec["coach_effect_scope"].strip()

    replications = 50
    if parser.has_section("recovery"):
        _check_keys(parser["recovery"], ("replications",), "recovery")
        replications = parser["recovery"].getint("replications", 50)
        if replications < 1:
            raise ValueError("replications must be >= 1")

    return Config(StudyConfig(**study_kw), SimParams(**sim_kw), replications)
