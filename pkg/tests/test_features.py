import datetime as dt
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from homeadv.errors import DegenerateRestError, InvalidStadiumError
from homeadv.features import (
    COVARIATES,
    AttendanceOverflowWarning,
    build_design_matrix,
    build_observations,
    density,
    encode_coaches,
    fatigue,
    observations_to_csv,
    red_card_balance,
)
from homeadv.metrics import QualityTable, RtqBand, classify_rtq

from conftest import make_dataset, make_match
from oracles import chord_distance_km


def test_fatigue_examples(gazetteer):
    assert fatigue("Sao Paulo", "Sao Paulo", 2, gazetteer).km_per_day == 0.0
    g = {"x": (0.0, 0.0), "y": (0.0, 840.0 / 6371.0 * 180 / np.pi)}
    assert chord_distance_km(*g["x"], *g["y"]) == pytest.approx(840.0, rel=1e-12)
    assert fatigue("x", "y", 3, g).km_per_day == pytest.approx(280.0, rel=1e-12)
    opener = fatigue(None, "Sao Paulo", None, gazetteer)
    assert opener.km_per_day == 0.0 and opener.no_prior_match


def test_fatigue_same_day_is_error(gazetteer):
    with pytest.raises(DegenerateRestError):
        fatigue("Sao Paulo", "Rio de Janeiro", 0, gazetteer)


@given(st.floats(0, 5000), st.integers(1, 30))
def test_fatigue_homogeneous(km, rest):
    deg = km / 6371.0 * 180 / np.pi
    g1 = {"a": (0.0, 0.0), "b": (0.0, deg)}
    g2 = {"a": (0.0, 0.0), "b": (0.0, 2 * deg)}
    # doubling distance along the equator and rest days leaves km/day unchanged
    assert fatigue("a", "b", 2 * rest, g2).km_per_day == pytest.approx(
        fatigue("a", "b", rest, g1).km_per_day, rel=1e-9, abs=1e-9
    )


def test_density_examples():
    assert density(0, 60_000) == 0.0
    assert density(30_000, 60_000) == 0.5
    with pytest.warns(AttendanceOverflowWarning):
        assert density(61_000, 60_000) == 1.0
    with pytest.raises(InvalidStadiumError):
        density(10, 0)


def test_density_no_warning_within_capacity():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        density(60_000, 60_000)


def test_red_card_balance_examples():
    assert red_card_balance(1, 1) == 0
    assert red_card_balance(0, 2) == -2
    assert red_card_balance(2, 0) == 2


@given(st.integers(0, 5), st.integers(0, 5))
def test_red_card_balance_antisymmetric(a, b):
    assert red_card_balance(a, b) == -red_card_balance(b, a)


def _obs_with_coaches(counts):
    ds = make_dataset([])
    rows = []
    i = 0
    for coach, k in counts.items():
        for _ in range(k):
            rows.append(make_match(round=i + 1, coach_home=coach))
            i += 1
    q = QualityTable({"A": 50.0, "B": 50.0}, (2003, 2012))
    ds = make_dataset(rows)
    # spread rounds over distinct dates so rest days are positive
    ds = ds.with_matches(
        [m.__class__(**{**m.__dict__, "date": dt.date(2010, 1, 1) + dt.timedelta(days=3 * j)})
         for j, m in enumerate(ds.matches)]
    )  # fmt: skip
    obs, _ = build_observations(ds, q, {"Sao Paulo": (-23.55, -46.63), "Rio de Janeiro": (-22.91, -43.17)})
    return obs


def test_encode_coaches_examples():
    one = encode_coaches(_obs_with_coaches({"only": 15}), 10)
    assert one.names == [] and one.matrix.shape == (15, 0)
    enc = encode_coaches(_obs_with_coaches({"a": 12, "b": 3}), 10)
    assert enc.names == ["a"]
    assert enc.matrix.sum() == 12
    two = encode_coaches(_obs_with_coaches({"a": 6, "b": 6}), 5)
    assert two.names == ["a", "b"]
    assert np.all(two.matrix.sum(axis=1) == 1)


def test_design_pools_a_coach_when_dummies_cover_every_row():
    design = build_design_matrix(_obs_with_coaches({"a": 6, "b": 6}), coach_threshold=5)
    coach_cols = [c for c in design.columns if c.startswith("coach:")]
    assert coach_cols == ["coach:a"]
    assert "coach:b" in design.dropped
    assert design.rank_deficient_columns() == []


def test_dropping_small_coach_leaves_other_columns():
    obs = _obs_with_coaches({"a": 12, "b": 9, "c": 11, "d": 3})
    wide = build_design_matrix(obs, coach_threshold=9)
    narrow = build_design_matrix(obs, coach_threshold=10)
    assert "coach:b" in wide.columns and "coach:b" not in narrow.columns
    for c in narrow.columns:
        assert np.array_equal(wide.X[:, wide.columns.index(c)], narrow.X[:, narrow.columns.index(c)])


def test_design_rows_at_most_one_coach():
    design = build_design_matrix(_obs_with_coaches({"a": 12, "b": 14, "c": 4}), coach_threshold=10)
    idx = [j for j, c in enumerate(design.columns) if c.startswith("coach:")]
    assert np.all(design.X[:, idx].sum(axis=1) <= 1)


def _home_and_away_pair():
    return make_dataset([
        make_match(round=1, date=dt.date(2010, 5, 1), home_team="A", away_team="B", stadium="SA",
                   goals_home=2, goals_away=1, red_home=0, red_away=2, fouls_home=11, fouls_away=17,
                   attendance=30_000),
        make_match(round=2, date=dt.date(2010, 5, 5), home_team="B", away_team="A", stadium="SB",
                   goals_home=1, goals_away=1, red_home=1, red_away=0, fouls_home=9, fouls_away=13,
                   attendance=80_000),
    ])  # fmt: skip


def test_build_observations_pair(gazetteer):
    ds = _home_and_away_pair()
    q = QualityTable({"A": 45.0, "B": 57.75}, (2003, 2012))
    obs, notes = build_observations(ds, q, gazetteer)
    assert [(o.focal_team, o.label) for o in obs] == [("A", 1), ("B", 0)]
    a, b = obs
    assert a.red_card_balance == -2 and a.fouls == 11 and a.adv_fouls == 17
    assert a.density == 0.5
    assert a.own_fan_share == 0.10 and a.adv_fan_share == 0.08
    assert a.rtq == classify_rtq(45.0, 57.75) and a.rtq.band is RtqBand.INFERIOR
    assert a.fatigue == 0.0 and a.no_prior_match
    # B played in Sao Paulo four days before hosting in Rio
    assert b.fatigue == pytest.approx(chord_distance_km(-23.55, -46.63, -22.91, -43.17) / 4, rel=1e-6)
    assert b.red_card_balance == 1 and b.density == 1.0
    assert any("clamped" in n for n in notes)


def test_include_away_mode(gazetteer):
    ds = _home_and_away_pair()
    q = QualityTable({"A": 50.0, "B": 50.0}, (2003, 2012))
    obs, _ = build_observations(ds, q, gazetteer, include_away=True)
    assert len(obs) == 4
    assert [o.label for o in obs if o.focal_team != o.match.home_team] == [0, 0]


def test_missing_city_and_quality_drop_with_warning(gazetteer):
    ds = _home_and_away_pair()
    q = QualityTable({"A": 50.0}, (2003, 2012))
    obs, notes = build_observations(ds, q, gazetteer)
    assert obs == [] and len(notes) == 2
    q = QualityTable({"A": 50.0, "B": 50.0}, (2003, 2012))
    obs, notes = build_observations(ds, q, {"Sao Paulo": gazetteer["Sao Paulo"]})
    assert [o.focal_team for o in obs] == ["A"]
    assert any("gazetteer" in n for n in notes)


def test_observation_count_matches_recount(gazetteer):
    from homeadv.synth import SimParams, generate_season

    ds, gaz = generate_season(SimParams(n_teams=5, seasons=1, neutral_share=0.3, seed=4))
    assert len(ds.matches) == 20
    q = QualityTable({t: 50.0 for t in ds.teams}, (2003, 2012))
    obs, _ = build_observations(ds, q, gaz)
    expected = sum(1 for m in ds.matches if m.stadium == ds.teams[m.home_team].home_stadium)
    assert len(obs) == expected


def test_design_matrix_layout_and_csv(gazetteer):
    obs = _obs_with_coaches({"a": 12, "b": 3})
    d = build_design_matrix(obs, coach_threshold=10)
    assert d.columns[0] == "intercept"
    kept = [c for c in COVARIATES if c not in d.dropped]
    assert d.columns[1 : 1 + len(kept)] == kept
    assert d.columns[-1] == "coach:a"
    assert d.X.shape == (15, len(d.columns))
    assert not any(np.all(d.X[:, j] == 0) for j in range(d.X.shape[1]))
    text = observations_to_csv(obs, d)
    header = text.splitlines()[0].split(",")
    assert header[-len(d.columns):] == d.columns
    assert len(text.splitlines()) == 16


def test_removing_covariate_removes_one_column():
    obs = _obs_with_coaches({"a": 12, "b": 11})
    full = build_design_matrix(obs, ("fatigue", "density"), coach_threshold=10)
    less = build_design_matrix(obs, ("fatigue",), coach_threshold=10)
    assert len(full.columns) - len(less.columns) == (0 if "density" in full.dropped else 1)
