"""Synthetic championships with known effects, for validating the estimators.

Match model
-----------
For a fixture between host ``h`` and visitor ``a`` the linear predictor is::

    eta = beta_home + s_h - s_a + beta_fatigue * fatigue_h
          + beta_density * density + coach_effect(coach_h)

and the outcome follows an ordered logit with symmetric cutpoints ``±c``::

    P(home win) = sigmoid(eta - c),  P(away win) = sigmoid(-eta - c)

with ``c = log((1 + draw_share) / (1 - draw_share))`` so that a balanced
fixture (eta = 0) is drawn with probability ``draw_share``, the mass taken
equally from both sides. The home-win indicator therefore follows an exact
logistic model whose intercept is ``beta_home - c``; slopes are untouched.

Nuisance fields, drawn independently of the result:

* attendance ~ capacity * Uniform(0.25, 1.0), rounded
* yellow cards ~ Poisson(2.0), red cards ~ Poisson(0.12), fouls ~ Poisson(16)
* goals: the loser (or both sides on a draw) scores Poisson(0.9); a winner
  adds 1 + Poisson(0.6) on top of the loser's tally
* rounds alternate 3 and 4 days apart starting 1 May of the season year
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from homeadv.domain import Match, Stadium, TeamRef, normalize_coach
from homeadv.features import fatigue as fatigue_km_per_day
from homeadv.geo import haversine_km
from homeadv.ingest import Dataset

# rough bounding box of Brazil; only used for default geography
_LAT_RANGE = (-30.0, -3.0)
_LON_RANGE = (-60.0, -35.0)


@dataclass(frozen=True)
class SimParams:
    n_teams: int = 12
    seasons: int = 20
    first_season: int = 2003
    team_strengths: Sequence[float] | None = None
    beta_home: float = 0.6
    beta_fatigue: float = 0.0
    beta_density: float = 0.0
    coach_effects: Mapping[str, float] = field(default_factory=dict)
    # "all": coach effects apply in every home match; "same": only when the
    # two true strengths are within same_strength_gap of each other
    coach_effect_scope: str = "all"
    same_strength_gap: float = 0.2
    n_coaches: int | None = None
    geography: Sequence[tuple[float, float]] | None = None
    draw_share: float = 0.25
    neutral_share: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_teams < 2:
            raise ValueError("n_teams must be >= 2")
        if self.seasons < 1:
            raise ValueError("seasons must be >= 1")
        if not 0.0 <= self.draw_share < 1.0:
            raise ValueError("draw_share must lie in [0, 1)")
        if not 0.0 <= self.neutral_share < 1.0:
            raise ValueError("neutral_share must lie in [0, 1)")
        if self.neutral_share > 0 and self.n_teams < 3:
            raise ValueError("neutral venues need at least 3 teams")
        if self.team_strengths is not None and len(self.team_strengths) != self.n_teams:
            raise ValueError("team_strengths length must equal n_teams")
        if self.geography is not None and len(self.geography) != self.n_teams:
            raise ValueError("geography length must equal n_teams")
        if self.coach_effect_scope not in ("all", "same"):
            raise ValueError("coach_effect_scope must be 'all' or 'same'")

    @property
    def draw_cutpoint(self) -> float:
        return math.log((1.0 + self.draw_share) / (1.0 - self.draw_share))

    @property
    def true_intercept(self) -> float:
        """Intercept of the home-win logistic model implied by the ordered model."""
        return self.beta_home - self.draw_cutpoint

    def strengths(self) -> list[float]:
        return list(self.team_strengths) if self.team_strengths is not None else [0.0] * self.n_teams

    def coach_pool(self) -> list[str]:
        k = self.n_coaches if self.n_coaches is not None else 2 * self.n_teams
        return [coach_name(i) for i in range(k)]


def coach_name(i: int) -> str:
    return f"coach {i + 1:02d}"


def team_id(i: int) -> str:
    return f"T{i + 1:02d}"


def round_robin(n_teams: int) -> list[list[tuple[int, int]]]:
    """Double round-robin by the circle method: 2(n-1) rounds (n even) of (home, away) pairs.

    Odd ``n`` gets a bye slot, giving ``2n`` rounds. Every ordered pair
    appears exactly once.
    """
    ids = list(range(n_teams))
    if n_teams % 2:
        ids.append(-1)
    m = len(ids)
    first_leg = []
    for r in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = ids[i], ids[m - 1 - i]
            if a < 0 or b < 0:
                continue
            # alternate venues so clubs do not host in long runs
            pairs.append((a, b) if (r + i) % 2 == 0 else (b, a))
        first_leg.append(pairs)
        ids = [ids[0]] + [ids[-1]] + ids[1:-1]
    second_leg = [[(b, a) for a, b in rnd] for rnd in first_leg]
    return first_leg + second_leg


def _geography(p: SimParams, rng: np.random.Generator) -> list[tuple[float, float]]:
    if p.geography is not None:
        return [(float(a), float(b)) for a, b in p.geography]
    lats = rng.uniform(*_LAT_RANGE, size=p.n_teams)
    lons = rng.uniform(*_LON_RANGE, size=p.n_teams)
    return [(round(float(a), 4), round(float(b), 4)) for a, b in zip(lats, lons)]


def _sigmoid(x: float) -> float:
    return 0.5 * (1.0 + math.tanh(0.5 * x))


def generate_season(p: SimParams) -> tuple[Dataset, dict[str, tuple[float, float]]]:
    """Simulate ``p.seasons`` double round-robin seasons.

    Returns the dataset and its gazetteer (one city per club). The seed
    fully determines the output.
    """
    rng = np.random.default_rng(p.seed)
    coords = _geography(p, rng)
    strengths = p.strengths()
    n = p.n_teams

    capacities = rng.integers(20_000, 80_001, size=n)
    shares = rng.uniform(0.01, 0.12, size=n)
    if shares.sum() > 0.95:
        shares *= 0.95 / shares.sum()
    gazetteer = {f"City {i + 1:02d}": coords[i] for i in range(n)}
    stadiums = {
        f"S{i + 1:02d}": Stadium(
            id=f"S{i + 1:02d}",
            name=f"Stadium {i + 1:02d}",
            city=f"City {i + 1:02d}",
            capacity=int(capacities[i]),
            latitude=coords[i][0],
            longitude=coords[i][1],
        )
        for i in range(n)
    }
    teams = {
        team_id(i): TeamRef(
            id=team_id(i),
            name=f"Team {i + 1:02d}",
            home_city=f"City {i + 1:02d}",
            home_stadium=f"S{i + 1:02d}",
            fan_share=round(float(shares[i]), 6),
        )
        for i in range(n)
    }
    city_of_stadium = {s.id: s.city for s in stadiums.values()}
    pool = p.coach_pool()
    effects = {normalize_coach(k): v for k, v in p.coach_effects.items()}
    cut = p.draw_cutpoint
    schedule = round_robin(n)

    matches: list[Match] = []
    for s_idx in range(p.seasons):
        season = p.first_season + s_idx
        coach_of = [pool[int(j)] for j in rng.integers(0, len(pool), size=n)]
        date = dt.date(season, 5, 1)
        last_seen: dict[int, tuple[str, dt.date]] = {}
        for r_idx, rnd in enumerate(schedule):
            if r_idx:
                date += dt.timedelta(days=3 if r_idx % 2 else 4)
            for h, a in rnd:
                stadium = f"S{h + 1:02d}"
                neutral = p.neutral_share > 0 and rng.random() < p.neutral_share
                if neutral:
                    third = [k for k in range(n) if k not in (h, a)]
                    stadium = f"S{third[int(rng.integers(len(third)))] + 1:02d}"
                site = city_of_stadium[stadium]
                prev = last_seen.get(h)
                fat = fatigue_km_per_day(
                    prev[0] if prev else None, site, (date - prev[1]).days if prev else None, gazetteer
                ).km_per_day
                last_seen[h] = (site, date)
                last_seen[a] = (site, date)

                cap = stadiums[stadium].capacity
                attendance = int(round(cap * rng.uniform(0.25, 1.0)))
                dens = attendance / cap
                eta = strengths[h] - strengths[a] + p.beta_fatigue * fat + p.beta_density * dens
                if not neutral:
                    eta += p.beta_home
                    same = abs(strengths[h] - strengths[a]) <= p.same_strength_gap
                    if p.coach_effect_scope == "all" or same:
                        eta += effects.get(coach_of[h], 0.0)
                p_home = _sigmoid(eta - cut)
                p_away = _sigmoid(-eta - cut)
                u = rng.random()
                base = int(rng.poisson(0.9))
                margin = 1 + int(rng.poisson(0.6))
                if u < p_home:
                    gh, ga = base + margin, base
                elif u < p_home + p_away:
                    gh, ga = base, base + margin
                else:
                    gh = ga = base
                yh, ya = rng.poisson(2.0, size=2)
                rh, ra = rng.poisson(0.12, size=2)
                fh, fa = rng.poisson(16.0, size=2)
                matches.append(
                    Match(
                        season=season,
                        round=r_idx + 1,
                        date=date,
                        home_team=team_id(h),
                        away_team=team_id(a),
                        stadium=stadium,
                        goals_home=gh,
                        goals_away=ga,
                        attendance=attendance,
                        yellow_home=int(yh),
                        yellow_away=int(ya),
                        red_home=int(rh),
                        red_away=int(ra),
                        fouls_home=int(fh),
                        fouls_away=int(fa),
                        coach_home=coach_of[h],
                        coach_away=coach_of[a],
                    )
                )
    matches.sort(key=lambda m: m.sort_key)
    return Dataset(teams=teams, stadiums=stadiums, matches=tuple(matches)), gazetteer


def replication_params(p: SimParams, index: int) -> SimParams:
    """Parameters of replication ``index``: same truth, seed ``p.seed + index``."""
    return replace(p, seed=p.seed + index)


def true_coefficients(p: SimParams, stratum: str | None = None) -> dict[str, float]:
    """Ground truth for the regression columns when team strengths are all equal.

    Unlisted coach columns have truth 0. With unequal strengths the omitted
    strength gap makes the intercept and team-level columns non-comparable.
    When coach effects are scoped to "same" fixtures, pass the stratum: the
    truth is the effect in "Same", 0 in "Inferior"/"Superior" and undefined
    (nan) for the pooled set, where it is diluted by an unknown share.
    """
    truth = {
        "intercept": p.true_intercept,
        "fatigue": p.beta_fatigue,
        "density": p.beta_density,
        "own_fan_share": 0.0,
        "adv_fan_share": 0.0,
        "red_card_balance": 0.0,
        "fouls": 0.0,
        "adv_fouls": 0.0,
    }
    for name, eff in p.coach_effects.items():
        if p.coach_effect_scope == "same" and stratum is not None and stratum != "Same":
            eff = float("nan") if stratum == "All" else 0.0
        truth["coach:" + normalize_coach(name)] = eff
    return truth


__all__ = [
    "SimParams",
    "coach_name",
    "generate_season",
    "haversine_km",
    "replication_params",
    "round_robin",
    "team_id",
    "true_coefficients",
]
