"""Load and validate flat-file datasets (matches, teams, stadiums)."""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from homeadv.domain import Match, Stadium, TeamRef, VenueClass, normalize_coach, venue_class
from homeadv.errors import DataError
from homeadv.geo import Gazetteer, haversine_km, load_gazetteer, travel_distance_km, write_gazetteer

log = logging.getLogger(__name__)

__all__ = [
    "MATCH_COLUMNS",
    "STADIUM_COLUMNS",
    "TEAM_COLUMNS",
    "Dataset",
    "IngestReport",
    "exclude_neutral",
    "haversine_km",
    "load_dataset",
    "load_dataset_dir",
    "load_gazetteer",
    "travel_distance_km",
    "write_dataset",
    "write_gazetteer",
]

MATCH_COLUMNS = (
    "season", "round", "date", "home_team", "away_team", "stadium",
    "goals_home", "goals_away", "attendance",
    "yellow_home", "yellow_away", "red_home", "red_away",
    "fouls_home", "fouls_away", "coach_home", "coach_away",
)  # fmt: skip
TEAM_COLUMNS = ("id", "name", "home_city", "home_stadium", "fan_share")
STADIUM_COLUMNS = ("id", "name", "city", "capacity", "latitude", "longitude")

_COUNT_COLUMNS = (
    ("goals_home", "goals"), ("goals_away", "goals"), ("attendance", "attendance"),
    ("yellow_home", "yellow cards"), ("yellow_away", "yellow cards"),
    ("red_home", "red cards"), ("red_away", "red cards"),
    ("fouls_home", "fouls"), ("fouls_away", "fouls"),
)  # fmt: skip

MATCHES_FILE = "matches.csv"
TEAMS_FILE = "teams.csv"
STADIUMS_FILE = "stadiums.csv"
GAZETTEER_FILE = "gazetteer.csv"


@dataclass(frozen=True)
class Dataset:
    teams: Mapping[str, TeamRef]
    stadiums: Mapping[str, Stadium]
    matches: tuple[Match, ...]
    provenance: Mapping[str, str] = field(default_factory=dict, compare=False)

    def with_matches(self, matches: Sequence[Match]) -> "Dataset":
        return replace(self, matches=tuple(matches))

    def venue(self, m: Match, team_id: str) -> VenueClass:
        return venue_class(m, self.teams[team_id], self.teams)

    def is_neutral(self, m: Match) -> bool:
        return self.venue(m, m.home_team) is VenueClass.NEUTRAL

    def seasons(self) -> list[int]:
        return sorted({m.season for m in self.matches})


@dataclass
class IngestReport:
    rows_read: int = 0
    rows_accepted: int = 0
    rows_rejected: int = 0
    neutral_excluded: int = 0
    warnings: list[tuple[int, str]] = field(default_factory=list)

    def reject(self, row: int, reason: str) -> None:
        self.rows_rejected += 1
        self.warnings.append((row, reason))

    def to_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_accepted": self.rows_accepted,
            "rows_rejected": self.rows_rejected,
            "neutral_excluded": self.neutral_excluded,
            "warnings": [{"row": r, "reason": why} for r, why in self.warnings],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _read_rows(path: Path, columns: Sequence[str]) -> list[dict[str, str]]:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns if c not in header]
        if missing:
            raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
        return list(reader)


def _load_teams(path: Path) -> dict[str, TeamRef]:
    teams: dict[str, TeamRef] = {}
    for lineno, row in enumerate(_read_rows(path, TEAM_COLUMNS), start=2):
        try:
            team = TeamRef(
                id=row["id"].strip(),
                name=row["name"].strip(),
                home_city=row["home_city"].strip(),
                home_stadium=row["home_stadium"].strip(),
                fan_share=float(row["fan_share"]),
            )
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        if team.id in teams:
            raise DataError(f"{path}:{lineno}: duplicate team id {team.id!r}")
        teams[team.id] = team
    if sum(t.fan_share for t in teams.values()) > 1.0 + 1e-9:
        raise DataError(f"{path}: fan shares sum above 1")
    return teams


def _load_stadiums(path: Path) -> dict[str, Stadium]:
    stadiums: dict[str, Stadium] = {}
    for lineno, row in enumerate(_read_rows(path, STADIUM_COLUMNS), start=2):
        try:
            st = Stadium(
                id=row["id"].strip(),
                name=row["name"].strip(),
                city=row["city"].strip(),
                capacity=int(row["capacity"]),
                latitude=float(row["latitude"]),
                longitude=float(row["longitude"]),
            )
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        if st.id in stadiums:
            raise DataError(f"{path}:{lineno}: duplicate stadium id {st.id!r}")
        stadiums[st.id] = st
    return stadiums


def _parse_match(row: Mapping[str, str], teams, stadiums) -> Match:
    """Build a Match or raise ValueError with a human-readable reason."""
    vals: dict = {}
    for col in ("season", "round"):
        try:
            vals[col] = int(row[col])
        except (TypeError, ValueError):
            raise ValueError(f"non-integer {col}") from None
    if vals["round"] < 1:
        raise ValueError("round must be positive")
    for col, label in _COUNT_COLUMNS:
        try:
            v = int(row[col])
        except (TypeError, ValueError):
            raise ValueError(f"non-integer {col}") from None
        if v < 0:
            raise ValueError(f"negative {label}")
        vals[col] = v
    try:
        vals["date"] = dt.date.fromisoformat((row["date"] or "").strip())
    except ValueError:
        raise ValueError("date not ISO-8601 (YYYY-MM-DD)") from None
    if abs(vals["date"].year - vals["season"]) > 1:
        raise ValueError("date outside season year +/- 1")
    home, away, stadium = (row[c].strip() for c in ("home_team", "away_team", "stadium"))
    if home == away:
        raise ValueError("home_team equals away_team")
    for team in (home, away):
        if team not in teams:
            raise ValueError(f"unknown team {team!r}")
    if stadium not in stadiums:
        raise ValueError(f"unknown stadium {stadium!r}")
    coaches = {c: normalize_coach(row[c] or "") for c in ("coach_home", "coach_away")}
    for c, v in coaches.items():
        if not v:
            raise ValueError(f"empty {c}")
    return Match(home_team=home, away_team=away, stadium=stadium, **coaches, **vals)


def load_dataset(match_file, team_file, stadium_file) -> tuple[Dataset, IngestReport]:
    """Parse the three tables into a validated, chronologically sorted Dataset.

    Team and stadium tables are reference data: any defect there aborts with
    ``DataError``. Match rows are validated one by one; a bad row is rejected
    (never repaired) and itemized in the report. Neutral-venue fixtures are
    kept in the dataset and counted in ``IngestReport.neutral_excluded``;
    analyses drop them with :func:`exclude_neutral`.
    """
    match_file, team_file, stadium_file = map(Path, (match_file, team_file, stadium_file))
    teams = _load_teams(team_file)
    stadiums = _load_stadiums(stadium_file)
    for t in teams.values():
        if t.home_stadium not in stadiums:
            raise DataError(f"{team_file}: team {t.id!r} home stadium {t.home_stadium!r} unknown")

    report = IngestReport()
    accepted: dict[tuple, Match] = {}
    for lineno, row in enumerate(_read_rows(match_file, MATCH_COLUMNS), start=2):
        report.rows_read += 1
        try:
            m = _parse_match(row, teams, stadiums)
        except ValueError as exc:
            report.reject(lineno, str(exc))
            continue
        if m.key in accepted:
            report.reject(lineno, "duplicate (season, round, home_team, away_team)")
            continue
        accepted[m.key] = m
        report.rows_accepted += 1

    matches = tuple(sorted(accepted.values(), key=lambda m: m.sort_key))
    provenance = {p.name: _digest(p) for p in (match_file, team_file, stadium_file)}
    ds = Dataset(teams=teams, stadiums=stadiums, matches=matches, provenance=provenance)
    report.neutral_excluded = sum(ds.is_neutral(m) for m in matches)
    if report.rows_rejected:
        log.warning("%d of %d match rows rejected", report.rows_rejected, report.rows_read)
    return ds, report


def load_dataset_dir(directory) -> tuple[Dataset, IngestReport]:
    d = Path(directory)
    return load_dataset(d / MATCHES_FILE, d / TEAMS_FILE, d / STADIUMS_FILE)


def load_gazetteer_dir(directory) -> dict[str, tuple[float, float]]:
    return load_gazetteer(Path(directory) / GAZETTEER_FILE)


def exclude_neutral(d: Dataset) -> Dataset:
    return d.with_matches([m for m in d.matches if not d.is_neutral(m)])


def _fmt_float(x: float) -> str:
    return repr(float(x))


def write_dataset(d: Dataset, directory, gazetteer: Gazetteer | None = None) -> None:
    """Serialize ``d`` in the ingest CSV schemas; output is deterministic."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / TEAMS_FILE, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TEAM_COLUMNS)
        for t in sorted(d.teams.values(), key=lambda t: t.id):
            w.writerow([t.id, t.name, t.home_city, t.home_stadium, _fmt_float(t.fan_share)])
    with open(out / STADIUMS_FILE, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STADIUM_COLUMNS)
        for s in sorted(d.stadiums.values(), key=lambda s: s.id):
            w.writerow(
                [s.id, s.name, s.city, s.capacity, _fmt_float(s.latitude), _fmt_float(s.longitude)]
            )
    with open(out / MATCHES_FILE, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MATCH_COLUMNS)
        for m in d.matches:
            w.writerow(
                [m.date.isoformat() if c == "date" else getattr(m, c) for c in MATCH_COLUMNS]
            )
    if gazetteer is not None:
        write_gazetteer(gazetteer, out / GAZETTEER_FILE)
