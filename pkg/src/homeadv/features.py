"""Regression observations and design-matrix assembly."""

from __future__ import annotations

import csv
import io
import logging
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from homeadv.domain import Match, MatchOutcome, VenueClass, match_outcome
from homeadv.errors import DegenerateRestError, InvalidStadiumError, MissingGazetteerEntryError
from homeadv.geo import Gazetteer, travel_distance_km
from homeadv.metrics import RTQ_LOWER, RTQ_UPPER, QualityTable, RtqClass, classify_rtq

log = logging.getLogger(__name__)

COVARIATES = (
    "fatigue",
    "density",
    "own_fan_share",
    "adv_fan_share",
    "red_card_balance",
    "fouls",
    "adv_fouls",
)
INTERCEPT = "intercept"
COACH_PREFIX = "coach:"
DEFAULT_COACH_THRESHOLD = 10


class AttendanceOverflowWarning(UserWarning):
    pass


class Fatigue(NamedTuple):
    km_per_day: float
    no_prior_match: bool


def fatigue(
    prev_site: str | None, current_site: str, rest_days: int | None, gazetteer: Gazetteer
) -> Fatigue:
    """Distance from the previous match city to this one, per day of rest.

    ``prev_site=None`` marks a team's first match of the season: the value
    is 0 and flagged.
    """
    if prev_site is None:
        return Fatigue(0.0, True)
    if rest_days is None or rest_days < 1:
        raise DegenerateRestError(f"rest days must be >= 1, got {rest_days}")
    km = travel_distance_km(prev_site, current_site, gazetteer)
    return Fatigue(km / rest_days, False)


def _density(attendance: int, capacity: int) -> tuple[float, bool]:
    if capacity <= 0:
        raise InvalidStadiumError(f"stadium capacity must be positive, got {capacity}")
    if attendance > capacity:
        return 1.0, True
    return attendance / capacity, False


def density(attendance: int, capacity: int) -> float:
    """Attendance over capacity; overflow clamps to 1.0 and warns."""
    value, clamped = _density(attendance, capacity)
    if clamped:
        warnings.warn(
            f"attendance {attendance} exceeds capacity {capacity}; density clamped to 1.0",
            AttendanceOverflowWarning,
            stacklevel=2,
        )
    return value


def red_card_balance(red_focal: int, red_opponent: int) -> int:
    return red_focal - red_opponent


@dataclass(frozen=True)
class Observation:
    focal_team: str
    match: Match
    label: int
    fatigue: float
    density: float
    own_fan_share: float
    adv_fan_share: float
    red_card_balance: int
    fouls: int
    adv_fouls: int
    coach: str
    rtq: RtqClass
    no_prior_match: bool = False

    def covariate(self, name: str) -> float:
        return float(getattr(self, name))


@dataclass
class CoachEncoding:
    names: list[str]
    matrix: np.ndarray  # (n_obs, len(names)) of 0/1

    @property
    def columns(self) -> list[str]:
        return [COACH_PREFIX + n for n in self.names]


def encode_coaches(observations: Sequence[Observation], min_matches: int = DEFAULT_COACH_THRESHOLD) -> CoachEncoding:
    """One 0/1 column per coach with at least ``min_matches`` observations.

    Coaches under the threshold share the all-zero baseline. A coach present
    on every row is constant, hence collinear with the intercept, and gets
    no column either.
    """
    if min_matches < 1:
        raise ValueError("min_matches must be >= 1")
    n = len(observations)
    counts = Counter(o.coach for o in observations)
    names = sorted(c for c, k in counts.items() if k >= min_matches and k < n)
    index = {c: j for j, c in enumerate(names)}
    mat = np.zeros((n, len(names)))
    for i, o in enumerate(observations):
        j = index.get(o.coach)
        if j is not None:
            mat[i, j] = 1.0
    return CoachEncoding(names, mat)


def build_observations(
    dataset,
    quality: QualityTable,
    gazetteer: Gazetteer,
    include_away: bool = False,
    rtq_bounds: tuple[float, float] = (RTQ_LOWER, RTQ_UPPER),
) -> tuple[list[Observation], list[str]]:
    """One observation per (focal team, home match) with label 1 on a home win.

    Fatigue belongs to the focal team and is measured from the site of its
    previous match in the same season. With ``include_away`` every away
    appearance also yields a row, labelled 0. Rows that cannot be built
    (unknown city, missing quality) are dropped and explained in the
    returned warning list.
    """
    lower, upper = rtq_bounds
    notes: list[str] = []
    prev: dict[tuple[str, int], Match] = {}
    obs: list[Observation] = []
    for m in dataset.matches:
        site = dataset.stadiums[m.stadium].city
        for focal in (m.home_team, m.away_team):
            last = prev.get((focal, m.season))
            prev[(focal, m.season)] = m
            venue = dataset.venue(m, focal)
            if venue is VenueClass.NEUTRAL:
                continue
            if venue is VenueClass.AWAY and not include_away:
                continue
            where = f"{m.date} {m.home_team} v {m.away_team} ({focal})"
            opp = m.opponent_of(focal)
            if focal not in quality or opp not in quality:
                notes.append(f"{where}: missing quality; dropped")
                continue
            prev_site = dataset.stadiums[last.stadium].city if last is not None else None
            rest = (m.date - last.date).days if last is not None else None
            try:
                fat = fatigue(prev_site, site, rest, gazetteer)
            except (MissingGazetteerEntryError, DegenerateRestError) as exc:
                notes.append(f"{where}: {exc}; dropped")
                continue
            dens, clamped = _density(m.attendance, dataset.stadiums[m.stadium].capacity)
            if clamped:
                notes.append(f"{where}: attendance above capacity; density clamped to 1.0")
            home = focal == m.home_team
            outcome = match_outcome(m)
            label = int(home and outcome is MatchOutcome.HOME_WIN)
            obs.append(
                Observation(
                    focal_team=focal,
                    match=m,
                    label=label,
                    fatigue=fat.km_per_day,
                    density=dens,
                    own_fan_share=dataset.teams[focal].fan_share,
                    adv_fan_share=dataset.teams[opp].fan_share,
                    red_card_balance=red_card_balance(
                        m.red_home if home else m.red_away, m.red_away if home else m.red_home
                    ),
                    fouls=m.fouls_home if home else m.fouls_away,
                    adv_fouls=m.fouls_away if home else m.fouls_home,
                    coach=m.coach_home if home else m.coach_away,
                    rtq=classify_rtq(quality[focal], quality[opp], lower, upper),
                    no_prior_match=fat.no_prior_match,
                )
            )
    for n in notes:
        log.debug(n)
    return obs, notes


@dataclass
class DesignMatrix:
    columns: list[str]
    X: np.ndarray
    y: np.ndarray
    dropped: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def rank_deficient_columns(self) -> list[str]:
        """Columns that add nothing to the span of the columns before them."""
        return dependent_columns(self.X, self.columns)


def dependent_columns(X: np.ndarray, names: Sequence[str], tol: float = 1e-9) -> list[str]:
    bad = []
    kept: list[int] = []
    for j in range(X.shape[1]):
        trial = X[:, kept + [j]]
        s = np.linalg.svd(trial, compute_uv=False)
        if s.size == 0 or s[-1] <= tol * max(1.0, s[0]):
            bad.append(names[j])
        else:
            kept.append(j)
    return bad


def build_design_matrix(
    observations: Sequence[Observation],
    covariates: Sequence[str] = COVARIATES,
    coach_threshold: int = DEFAULT_COACH_THRESHOLD,
) -> DesignMatrix:
    """Intercept, the chosen covariates, then coach dummies, in that order.

    Constant covariate columns are dropped. If the retained coaches cover
    every row their dummies would sum to the intercept, so the coach with
    the fewest rows (last by name on ties) is pooled into the baseline.
    """
    unknown = [c for c in covariates if c not in COVARIATES]
    if unknown:
        raise ValueError(f"unknown covariate(s): {', '.join(unknown)}")
    n = len(observations)
    cols = [INTERCEPT]
    blocks = [np.ones((n, 1))]
    dropped: list[str] = []
    notes: list[str] = []
    for name in covariates:
        v = np.array([o.covariate(name) for o in observations], dtype=float)
        if n and np.all(v == v[0]):
            dropped.append(name)
            notes.append(f"{name}: constant over {n} rows; column dropped")
            continue
        cols.append(name)
        blocks.append(v[:, None])
    enc = encode_coaches(observations, coach_threshold) if n else CoachEncoding([], np.zeros((0, 0)))
    coach_names = list(enc.names)
    mat = enc.matrix
    if coach_names and np.all(mat.sum(axis=1) == 1):
        counts = mat.sum(axis=0)
        j = max(range(len(coach_names)), key=lambda k: (-counts[k], coach_names[k]))
        notes.append(f"coach {coach_names[j]!r} pooled into baseline (retained coaches covered every row)")
        dropped.append(COACH_PREFIX + coach_names[j])
        mat = np.delete(mat, j, axis=1)
        del coach_names[j]
    cols += [COACH_PREFIX + c for c in coach_names]
    blocks.append(mat.reshape(n, len(coach_names)))
    X = np.hstack(blocks) if n else np.zeros((0, len(cols)))
    y = np.array([o.label for o in observations], dtype=float)
    return DesignMatrix(cols, X, y, dropped, notes)


def observations_to_csv(observations: Sequence[Observation], design: DesignMatrix | None = None) -> str:
    """Flat export: identifiers, label, then the design-matrix columns in order."""
    if design is None:
        design = build_design_matrix(observations)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["season", "date", "focal_team", "opponent", "rtq", "rtq_ratio", "label"] + design.columns)
    for o, row in zip(observations, design.X):
        m = o.match
        w.writerow(
            [m.season, m.date.isoformat(), o.focal_team, m.opponent_of(o.focal_team),
             o.rtq.band.value, repr(o.rtq.ratio), o.label]
            + [repr(float(v)) for v in row]
        )  # fmt: skip
    return buf.getvalue()
