"""Core value types: teams, stadiums, matches and derived outcomes."""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass
from typing import Mapping

from homeadv.errors import ParticipantMismatchError


class MatchOutcome(enum.Enum):
    HOME_WIN = "HomeWin"
    DRAW = "Draw"
    AWAY_WIN = "AwayWin"


class Side(enum.Enum):
    HOME = "Home"
    AWAY = "Away"


class VenueClass(enum.Enum):
    HOME = "Home"
    AWAY = "Away"
    NEUTRAL = "Neutral"


@dataclass(frozen=True)
class TeamRef:
    id: str
    name: str
    home_city: str
    home_stadium: str
    fan_share: float

    def __post_init__(self):
        if not 0.0 <= self.fan_share <= 1.0:
            raise ValueError(f"fan_share out of [0, 1] for team {self.id!r}: {self.fan_share}")


@dataclass(frozen=True)
class Stadium:
    id: str
    name: str
    city: str
    capacity: int
    latitude: float
    longitude: float

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError(f"stadium {self.id!r} capacity must be positive")
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"stadium {self.id!r} latitude out of range")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"stadium {self.id!r} longitude out of range")


@dataclass(frozen=True)
class Match:
    season: int
    round: int
    date: dt.date
    home_team: str
    away_team: str
    stadium: str
    goals_home: int
    goals_away: int
    attendance: int
    yellow_home: int
    yellow_away: int
    red_home: int
    red_away: int
    fouls_home: int
    fouls_away: int
    coach_home: str
    coach_away: str

    @property
    def key(self) -> tuple[int, int, str, str]:
        return (self.season, self.round, self.home_team, self.away_team)

    @property
    def sort_key(self) -> tuple:
        return (self.season, self.date, self.round, self.home_team, self.away_team)

    def goals_for(self, team_id: str) -> int:
        return self.goals_home if self._side(team_id) is Side.HOME else self.goals_away

    def _side(self, team_id: str) -> Side:
        if team_id == self.home_team:
            return Side.HOME
        if team_id == self.away_team:
            return Side.AWAY
        raise ParticipantMismatchError(
            f"team {team_id!r} did not play {self.home_team} v {self.away_team} ({self.date})"
        )

    def side_of(self, team_id: str) -> Side:
        """Return the fixture side (as listed, not venue-based) of ``team_id``."""
        return self._side(team_id)

    def opponent_of(self, team_id: str) -> str:
        return self.away_team if self._side(team_id) is Side.HOME else self.home_team


def normalize_coach(name: str) -> str:
    """Coach identity key: trimmed, inner whitespace collapsed, case-folded."""
    return " ".join(name.split()).casefold()


def match_outcome(m: Match) -> MatchOutcome:
    if m.goals_home > m.goals_away:
        return MatchOutcome.HOME_WIN
    if m.goals_home == m.goals_away:
        return MatchOutcome.DRAW
    return MatchOutcome.AWAY_WIN


def points_for(outcome: MatchOutcome, side: Side) -> int:
    """League points: 3 for a win, 1 for a draw, nothing for a defeat."""
    if outcome is MatchOutcome.DRAW:
        return 1
    won = MatchOutcome.HOME_WIN if side is Side.HOME else MatchOutcome.AWAY_WIN
    return 3 if outcome is won else 0


def venue_class(m: Match, focal: TeamRef, teams: Mapping[str, TeamRef]) -> VenueClass:
    """Classify where ``focal`` played ``m``.

    Home means the match stadium is the focal club's registered ground, Away
    that it is the opponent's, Neutral anything else (including a club
    hosting at a borrowed ground).
    """
    opponent = teams[m.opponent_of(focal.id)]
    if m.stadium == focal.home_stadium:
        return VenueClass.HOME
    if m.stadium == opponent.home_stadium:
        return VenueClass.AWAY
    return VenueClass.NEUTRAL
