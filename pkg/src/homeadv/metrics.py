"""Home-advantage indices, technical quality and relative-quality bands."""

from __future__ import annotations

import csv
import enum
import io
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from homeadv.domain import MatchOutcome, Side, VenueClass, match_outcome, points_for
from homeadv.errors import UndefinedQualityError, UndefinedRatioError

log = logging.getLogger(__name__)

DEFAULT_QUALITY_WINDOW = (2003, 2012)
RTQ_LOWER = 0.9
RTQ_UPPER = 1.1


@dataclass(frozen=True)
class HomeAwayRecord:
    wins_home: int = 0
    games_home: int = 0
    draws_home: int = 0
    wins_away: int = 0
    games_away: int = 0
    draws_away: int = 0

    def __post_init__(self):
        if min(self.wins_home, self.games_home, self.draws_home,
               self.wins_away, self.games_away, self.draws_away) < 0:  # fmt: skip
            raise ValueError("record counts must be non-negative")
        if self.wins_home + self.draws_home > self.games_home:
            raise ValueError("home wins + draws exceed home games")
        if self.wins_away + self.draws_away > self.games_away:
            raise ValueError("away wins + draws exceed away games")

    def __add__(self, other: "HomeAwayRecord") -> "HomeAwayRecord":
        return HomeAwayRecord(
            self.wins_home + other.wins_home,
            self.games_home + other.games_home,
            self.draws_home + other.draws_home,
            self.wins_away + other.wins_away,
            self.games_away + other.games_away,
            self.draws_away + other.draws_away,
        )

    def swapped(self) -> "HomeAwayRecord":
        return HomeAwayRecord(
            self.wins_away, self.games_away, self.draws_away,
            self.wins_home, self.games_home, self.draws_home,
        )  # fmt: skip

    def home_win_rate(self) -> float:
        if self.games_home == 0:
            raise UndefinedRatioError("no home games")
        return self.wins_home / self.games_home

    def away_win_rate(self) -> float:
        if self.games_away == 0:
            raise UndefinedRatioError("no away games")
        return self.wins_away / self.games_away


def ha_per_wins(r: HomeAwayRecord) -> float:
    """Home win rate minus away win rate, in percentage points.

    Positive values mean the team wins more often at home; zero means no
    advantage. Raises ``UndefinedRatioError`` when either side has no games.
    """
    return (r.home_win_rate() - r.away_win_rate()) * 100.0


def ha_per_points(r: HomeAwayRecord) -> float:
    """Share of all league points that were earned at home, as a percentage (50 = no advantage)."""
    home_pts = 3 * r.wins_home + r.draws_home
    total = home_pts + 3 * r.wins_away + r.draws_away
    if total == 0:
        raise UndefinedRatioError("no points earned; home share undefined")
    return home_pts / total * 100.0


def team_quality(per_season: Iterable[tuple[float, float]]) -> float:
    """Points won over points disputed across the given seasons, times 100."""
    won = disputed = 0.0
    for w, d in per_season:
        if w < 0 or d < 0 or w > d:
            raise ValueError(f"invalid season tally (won={w}, disputed={d})")
        won += w
        disputed += d
    if disputed <= 0:
        raise UndefinedQualityError("no points disputed in the quality window")
    return won / disputed * 100.0


class RtqBand(enum.Enum):
    INFERIOR = "Inferior"
    SAME = "Same"
    SUPERIOR = "Superior"


@dataclass(frozen=True)
class RtqClass:
    band: RtqBand
    ratio: float


def classify_rtq(
    q_focal: float, q_opponent: float, lower: float = RTQ_LOWER, upper: float = RTQ_UPPER
) -> RtqClass:
    """Band the quality ratio focal/opponent; both bounds belong to Same.

    The band is not symmetric under swapping teams: a ratio in (1.1, 1/0.9]
    is Superior one way round but Same the other.
    """
    if q_opponent <= 0:
        raise UndefinedRatioError("opponent quality is zero")
    ratio = q_focal / q_opponent
    if ratio < lower:
        band = RtqBand.INFERIOR
    elif ratio > upper:
        band = RtqBand.SUPERIOR
    else:
        band = RtqBand.SAME
    return RtqClass(band, ratio)


@dataclass(frozen=True)
class QualityTable:
    quality: Mapping[str, float]
    window: tuple[int, int]

    def __contains__(self, team_id: str) -> bool:
        return team_id in self.quality

    def __getitem__(self, team_id: str) -> float:
        return self.quality[team_id]

    def get(self, team_id: str, default=None):
        return self.quality.get(team_id, default)


def season_points(dataset, team_id: str) -> dict[int, tuple[int, int]]:
    """Per-season (points won, points disputed) for ``team_id`` over every match it played."""
    tally: dict[int, list[int]] = defaultdict(lambda: [0, 0])
    for m in dataset.matches:
        if team_id not in (m.home_team, m.away_team):
            continue
        t = tally[m.season]
        t[0] += points_for(match_outcome(m), m.side_of(team_id))
        t[1] += 3
    return {s: (w, d) for s, (w, d) in sorted(tally.items())}


def quality_table(
    dataset,
    window: tuple[int, int] = DEFAULT_QUALITY_WINDOW,
    excluded_seasons: Mapping[str, Iterable[int]] | None = None,
) -> QualityTable:
    """Quality for every team with at least one match inside ``window`` (inclusive).

    Seasons a club spent outside the division are simply absent from the
    match data; ``excluded_seasons`` drops further team-seasons explicitly
    (for instance a relegation year).
    """
    first, last = window
    excluded = {t: set(s) for t, s in (excluded_seasons or {}).items()}
    won: dict[str, int] = defaultdict(int)
    disputed: dict[str, int] = defaultdict(int)
    for m in dataset.matches:
        if not first <= m.season <= last:
            continue
        outcome = match_outcome(m)
        for team, side in ((m.home_team, Side.HOME), (m.away_team, Side.AWAY)):
            if m.season in excluded.get(team, ()):
                continue
            won[team] += points_for(outcome, side)
            disputed[team] += 3
    q = {t: team_quality([(won[t], disputed[t])]) for t in sorted(disputed)}
    return QualityTable(quality=q, window=(first, last))


def _tally(matches, dataset, team_id: str, keep=None) -> HomeAwayRecord:
    wh = gh = dh = wa = ga = da = 0
    for m in matches:
        if team_id not in (m.home_team, m.away_team):
            continue
        venue = dataset.venue(m, team_id)
        if venue is VenueClass.NEUTRAL or (keep is not None and not keep(m, team_id)):
            continue
        outcome = match_outcome(m)
        pts = points_for(outcome, m.side_of(team_id))
        if venue is VenueClass.HOME:
            gh += 1
            wh += pts == 3
            dh += outcome is MatchOutcome.DRAW
        else:
            ga += 1
            wa += pts == 3
            da += outcome is MatchOutcome.DRAW
    return HomeAwayRecord(wh, gh, dh, wa, ga, da)


def home_away_record(dataset, team_id: str) -> HomeAwayRecord:
    """Home and away tallies for one team, ignoring neutral-venue fixtures."""
    return _tally(dataset.matches, dataset, team_id)


def stratified_records(
    dataset,
    quality: QualityTable,
    team_ids: Sequence[str] | None = None,
    lower: float = RTQ_LOWER,
    upper: float = RTQ_UPPER,
) -> dict[RtqBand, HomeAwayRecord]:
    """Pooled home/away records split by the focal team's relative-quality band.

    The band is taken from the focal team's side in each fixture, so an
    away match counts under Q_focal / Q_host.
    """
    ids = list(team_ids) if team_ids is not None else sorted(dataset.teams)
    out = {}
    for band in RtqBand:

        def keep(m, tid, band=band):
            opp = m.opponent_of(tid)
            if tid not in quality or opp not in quality:
                return False
            return classify_rtq(quality[tid], quality[opp], lower, upper).band is band

        total = HomeAwayRecord()
        for tid in ids:
            if tid in quality:
                total = total + _tally(dataset.matches, dataset, tid, keep)
        out[band] = total
    return out


@dataclass(frozen=True)
class RankingRow:
    team_id: str
    name: str
    value: float


@dataclass
class Rankings:
    ha_per_wins: list[RankingRow]
    ha_per_points: list[RankingRow]
    quality: list[RankingRow]
    warnings: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["position", "ranking", "team_id", "team", "value"])
        for label, rows in self._tables():
            for i, r in enumerate(rows, start=1):
                w.writerow([i, label, r.team_id, r.name, f"{r.value:.4f}"])
        return buf.getvalue()

    def to_text(self) -> str:
        tables = self._tables()
        n = max((len(rows) for _, rows in tables), default=0)
        cells = [["#"] + [h for label, _ in tables for h in (label, "value")]]
        for i in range(n):
            line = [str(i + 1)]
            for _, rows in tables:
                if i < len(rows):
                    line += [rows[i].name, f"{rows[i].value:.2f}%"]
                else:
                    line += ["", ""]
            cells.append(line)
        widths = [max(len(row[j]) for row in cells) for j in range(len(cells[0]))]
        lines = ["  ".join(c.ljust(wd) for c, wd in zip(row, widths)).rstrip() for row in cells]
        lines.insert(1, "  ".join("-" * wd for wd in widths))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        def rows(rs):
            return [{"team_id": r.team_id, "team": r.name, "value": r.value} for r in rs]

        return {
            "ha_per_wins": rows(self.ha_per_wins),
            "ha_per_points": rows(self.ha_per_points),
            "quality": rows(self.quality),
            "warnings": list(self.warnings),
        }

    def _tables(self):
        return [
            ("HA per wins", self.ha_per_wins),
            ("HA per points", self.ha_per_points),
            ("Technical quality", self.quality),
        ]


def _ranked(rows: list[RankingRow]) -> list[RankingRow]:
    return sorted(rows, key=lambda r: (-r.value, r.name))


def build_rankings(dataset, quality: QualityTable, team_ids: Sequence[str] | None = None) -> Rankings:
    """Three descending team tables: HA per wins, HA per points, technical quality.

    Ties break alphabetically by team name. Teams without a quality value,
    or whose home/away record leaves an index undefined, are left out of
    every table and a warning is recorded.
    """
    ids = list(team_ids) if team_ids is not None else sorted(dataset.teams)
    warnings: list[str] = []
    wins, points, qual = [], [], []
    for tid in ids:
        team = dataset.teams[tid]
        if tid not in quality:
            warnings.append(f"{team.name}: no quality in window {quality.window}; not ranked")
            continue
        rec = home_away_record(dataset, tid)
        try:
            w, p = ha_per_wins(rec), ha_per_points(rec)
        except UndefinedRatioError as exc:
            warnings.append(f"{team.name}: {exc}; not ranked")
            continue
        wins.append(RankingRow(tid, team.name, w))
        points.append(RankingRow(tid, team.name, p))
        qual.append(RankingRow(tid, team.name, quality[tid]))
    for w in warnings:
        log.warning(w)
    return Rankings(_ranked(wins), _ranked(points), _ranked(qual), warnings)
