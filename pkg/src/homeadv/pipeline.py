"""End-to-end study: quality, rankings, RTQ-stratified logistic fits, reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from homeadv.config import StudyConfig
from homeadv.errors import (
    DegenerateLabelsError,
    InsufficientDataError,
    SingularSystemError,
    UndefinedRatioError,
    UsageError,
)
from homeadv.features import Observation, build_design_matrix, build_observations
from homeadv.geo import Gazetteer
from homeadv.glm import FitResult, fit_logistic
from homeadv.ingest import Dataset, exclude_neutral
from homeadv.metrics import (
    HomeAwayRecord,
    Rankings,
    RtqBand,
    build_rankings,
    ha_per_points,
    ha_per_wins,
    home_away_record,
    quality_table,
    stratified_records,
)

log = logging.getLogger(__name__)

ALL = "All"
STRATA = (RtqBand.INFERIOR.value, RtqBand.SAME.value, RtqBand.SUPERIOR.value, ALL)
FORMATS = ("text", "csv", "json")


@dataclass
class HaSummary:
    record: HomeAwayRecord
    ha_per_wins: float | None
    ha_per_points: float | None

    @classmethod
    def of(cls, rec: HomeAwayRecord) -> "HaSummary":
        def safe(f):
            try:
                return f(rec)
            except UndefinedRatioError:
                return None

        return cls(rec, safe(ha_per_wins), safe(ha_per_points))

    def to_dict(self) -> dict:
        r = self.record
        rates = {}
        for key, num, den in (
            ("home_win_rate", r.wins_home, r.games_home),
            ("away_win_rate", r.wins_away, r.games_away),
        ):
            rates[key] = num / den if den else None
        return {
            "wins_home": r.wins_home,
            "draws_home": r.draws_home,
            "games_home": r.games_home,
            "wins_away": r.wins_away,
            "draws_away": r.draws_away,
            "games_away": r.games_away,
            **rates,
            "ha_per_wins": self.ha_per_wins,
            "ha_per_points": self.ha_per_points,
        }


@dataclass
class AnalysisReport:
    stratum: str
    n: int
    fit: FitResult | None
    significant_rows: list[dict]
    columns: list[str] = field(default_factory=list)
    dropped_columns: list[str] = field(default_factory=list)
    notice: str | None = None
    numerical_failure: bool = False
    warnings: list[str] = field(default_factory=list)
    ha: HaSummary | None = None
    # design-column means, the covariate profile of an average observation
    column_means: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "stratum": self.stratum,
            "n": self.n,
            "notice": self.notice,
            "numerical_failure": self.numerical_failure,
            "columns": list(self.columns),
            "dropped_columns": list(self.dropped_columns),
            "home_advantage": self.ha.to_dict() if self.ha else None,
            "significant": list(self.significant_rows),
            "fit": self.fit.to_dict() if self.fit else None,
            "warnings": list(self.warnings),
        }


@dataclass
class Study:
    reports: list[AnalysisReport]
    rankings: Rankings
    aggregate: HaSummary
    matches_total: int
    neutral_excluded: int
    p_threshold: float
    quality_window: tuple[int, int]
    warnings: list[str] = field(default_factory=list)

    def report(self, stratum: str) -> AnalysisReport:
        for r in self.reports:
            if r.stratum == stratum:
                return r
        raise KeyError(stratum)

    @property
    def counts(self) -> dict[str, int]:
        return {r.stratum: r.n for r in self.reports}

    @property
    def numerical_failure(self) -> bool:
        return any(r.numerical_failure for r in self.reports)

    def to_dict(self) -> dict:
        return {
            "matches_total": self.matches_total,
            "neutral_excluded": self.neutral_excluded,
            "quality_window": list(self.quality_window),
            "p_threshold": self.p_threshold,
            "counts": self.counts,
            "home_advantage": self.aggregate.to_dict(),
            "rankings": self.rankings.to_dict(),
            "strata": [r.to_dict() for r in self.reports],
            "warnings": list(self.warnings),
        }


def significant_rows(fit: FitResult, threshold: float) -> list[dict]:
    """Non-intercept coefficients with Wald p strictly below ``threshold``."""
    rows = []
    for c, b, p in zip(fit.columns, fit.coefficients, fit.p_values):
        if c != "intercept" and p < threshold:
            rows.append({"variable": c, "coefficient": float(b), "p_value": float(p)})
    return rows


def fit_stratum(stratum: str, observations: Sequence[Observation], config: StudyConfig) -> AnalysisReport:
    """Fit one stratum. Empty, single-class or singular strata yield a notice instead of a crash."""
    n = len(observations)
    if n == 0:
        return AnalysisReport(stratum, 0, None, [], notice="no observations in this stratum")
    design = build_design_matrix(observations, config.covariates, config.coach_threshold)
    base = dict(
        columns=design.columns,
        dropped_columns=design.dropped,
        warnings=list(design.notes),
        column_means=[float(v) for v in design.X.mean(axis=0)],
    )
    try:
        fit = fit_logistic(design.X, design.y, design.columns, config.fit)
    except DegenerateLabelsError as exc:
        return AnalysisReport(stratum, n, None, [], notice=f"degenerate fit: {exc}", **base)
    except InsufficientDataError as exc:
        return AnalysisReport(stratum, n, None, [], notice=f"degenerate fit: {exc}", **base)
    except SingularSystemError as exc:
        return AnalysisReport(
            stratum, n, None, [], notice=f"numerical failure: {exc}", numerical_failure=True, **base
        )
    report = AnalysisReport(stratum, n, fit, significant_rows(fit, config.p_threshold), **base)
    if not fit.converged:
        report.warnings.append(f"fit did not converge in {fit.iterations} iterations")
    if fit.separation_warnings:
        report.warnings.append("possible separation: " + ", ".join(fit.separation_warnings))
    return report


def partition(observations: Sequence[Observation]) -> dict[str, list[Observation]]:
    parts: dict[str, list[Observation]] = {s: [] for s in STRATA}
    for o in observations:
        parts[o.rtq.band.value].append(o)
    parts[ALL] = list(observations)
    return parts


def run_study(dataset: Dataset, gazetteer: Gazetteer, config: StudyConfig | None = None) -> Study:
    """Quality table, HA rankings and the four stratified fits.

    Quality uses every league match in the window, neutral venues included.
    Home-advantage indices and regressions use non-neutral fixtures only.
    """
    config = config or StudyConfig()
    bounds = (config.rtq_lower, config.rtq_upper)
    quality = quality_table(dataset, config.quality_window)
    analysis = exclude_neutral(dataset)
    rankings = build_rankings(analysis, quality)
    aggregate = HomeAwayRecord()
    for tid in sorted(analysis.teams):
        aggregate = aggregate + home_away_record(analysis, tid)
    by_band = stratified_records(analysis, quality, lower=config.rtq_lower, upper=config.rtq_upper)

    observations, notes = build_observations(dataset, quality, gazetteer, config.include_away, bounds)
    reports = []
    for stratum, obs in partition(observations).items():
        rep = fit_stratum(stratum, obs, config)
        rep.ha = HaSummary.of(aggregate if stratum == ALL else by_band[RtqBand(stratum)])
        reports.append(rep)
    warnings = list(rankings.warnings) + notes
    return Study(
        reports=reports,
        rankings=rankings,
        aggregate=HaSummary.of(aggregate),
        matches_total=len(dataset.matches),
        neutral_excluded=len(dataset.matches) - len(analysis.matches),
        p_threshold=config.p_threshold,
        quality_window=tuple(config.quality_window),
        warnings=warnings,
    )


def _pct(x: float | None) -> str:
    return "n/a" if x is None else f"{x:.2f}%"


def _num(x) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return ""
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def _study_text(study: Study) -> str:
    out = io.StringIO()
    agg = study.aggregate
    out.write("HOME ADVANTAGE STUDY\n")
    out.write(
        f"matches: {study.matches_total}; neutral venue excluded: {study.neutral_excluded}; "
        f"quality window: {study.quality_window[0]}-{study.quality_window[1]}\n"
    )
    r = agg.record
    hw = r.wins_home / r.games_home * 100 if r.games_home else None
    aw = r.wins_away / r.games_away * 100 if r.games_away else None
    out.write(
        f"home win rate {_pct(hw)}, away win rate {_pct(aw)}; "
        f"HA per wins {_pct(agg.ha_per_wins)}; HA per points {_pct(agg.ha_per_points)}\n\n"
    )
    out.write("HA rankings and technical quality\n")
    out.write(study.rankings.to_text())
    out.write(f"\nLogistic regression results (P < {study.p_threshold:g})\n")
    for rep in study.reports:
        title = f"{rep.stratum} quality" if rep.stratum != ALL else "No quality (all matches)"
        out.write(f"\n[{title}] N = {rep.n}")
        if rep.ha is not None:
            out.write(
                f"; HA per wins {_pct(rep.ha.ha_per_wins)}; HA per points {_pct(rep.ha.ha_per_points)}"
            )
        out.write("\n")
        if rep.fit is None:
            out.write(f"{rep.notice}\n")
            continue
        out.write(rep.fit.to_text(p_threshold=study.p_threshold))
        for w in rep.warnings:
            out.write(f"note: {w}\n")
    return out.getvalue()


def _coefficients_csv(study: Study) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["stratum", "variable", "coefficient", "std_error", "z", "p_value", "significant"])
    for rep in study.reports:
        if rep.fit is None:
            continue
        f = rep.fit
        for c, b, s, z, p in zip(f.columns, f.coefficients, f.std_errors, f.z_scores, f.p_values):
            sig = c != "intercept" and p < study.p_threshold
            w.writerow([rep.stratum, c, _num(float(b)), _num(float(s)), _num(float(z)), _num(float(p)), int(sig)])
    return buf.getvalue()


def _strata_csv(study: Study) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["stratum", "n", "ha_per_wins", "ha_per_points", "cox_snell_r2", "nagelkerke_r2",
         "converged", "notice"]
    )  # fmt: skip
    for rep in study.reports:
        f = rep.fit
        w.writerow([
            rep.stratum,
            rep.n,
            _num(rep.ha.ha_per_wins) if rep.ha else "",
            _num(rep.ha.ha_per_points) if rep.ha else "",
            _num(f.cox_snell) if f else "",
            _num(f.nagelkerke) if f else "",
            int(f.converged) if f else "",
            rep.notice or "",
        ])  # fmt: skip
    return buf.getvalue()


def render_report(study: Study, fmt: str = "text") -> dict[str, str]:
    """Render a study to named documents; identical input gives identical bytes."""
    if fmt == "text":
        return {"study.txt": _study_text(study)}
    if fmt == "csv":
        return {
            "rankings.csv": study.rankings.to_csv(),
            "coefficients.csv": _coefficients_csv(study),
            "strata.csv": _strata_csv(study),
        }
    if fmt == "json":
        return {"study.json": json.dumps(study.to_dict(), indent=2, ensure_ascii=False) + "\n"}
    raise UsageError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def render_rankings(rankings: Rankings, fmt: str = "text") -> dict[str, str]:
    if fmt == "text":
        return {"rankings.txt": rankings.to_text()}
    if fmt == "csv":
        return {"rankings.csv": rankings.to_csv()}
    if fmt == "json":
        return {"rankings.json": json.dumps(rankings.to_dict(), indent=2, ensure_ascii=False) + "\n"}
    raise UsageError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
