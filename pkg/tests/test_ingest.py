import csv
import datetime as dt
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homeadv.errors import DataError, MissingGazetteerEntryError
from homeadv.ingest import (
    MATCH_COLUMNS,
    exclude_neutral,
    load_dataset,
    load_dataset_dir,
    load_gazetteer,
    travel_distance_km,
    write_dataset,
)
from homeadv.synth import round_robin

from conftest import make_dataset, make_match, make_teams
from oracles import chord_distance_km


def _row(**kw):
    m = make_match(**kw)
    return {c: (m.date.isoformat() if c == "date" else getattr(m, c)) for c in MATCH_COLUMNS}


def _write_matches(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=MATCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)


@pytest.fixture
def data_dir(tmp_path, gazetteer):
    write_dataset(make_dataset([]), tmp_path, gazetteer)
    return tmp_path


def test_clean_rows_all_accepted(data_dir):
    rows = [
        _row(round=1, home_team="A", away_team="B", stadium="SA"),
        _row(round=2, date=dt.date(2010, 5, 8), home_team="B", away_team="A", stadium="SB"),
        _row(round=3, date=dt.date(2010, 5, 15), home_team="C", away_team="A", stadium="SC"),
    ]
    _write_matches(data_dir / "matches.csv", rows)
    ds, rep = load_dataset_dir(data_dir)
    assert (rep.rows_read, rep.rows_accepted, rep.rows_rejected) == (3, 3, 0)
    assert len(ds.matches) == 3


def test_negative_goals_rejected_with_reason(data_dir):
    bad = _row(round=2)
    bad["goals_home"] = -1
    _write_matches(data_dir / "matches.csv", [_row(), bad])
    ds, rep = load_dataset_dir(data_dir)
    assert rep.rows_rejected == 1
    assert rep.warnings == [(3, "negative goals")]
    assert rep.rows_read == rep.rows_accepted + rep.rows_rejected


@pytest.mark.parametrize(
    "field, value, reason",
    [
        ("home_team", "Z", "unknown team 'Z'"),
        ("stadium", "SX", "unknown stadium 'SX'"),
        ("date", "01/05/2010", "date not ISO-8601 (YYYY-MM-DD)"),
        ("date", "2014-05-01", "date outside season year +/- 1"),
        ("away_team", "A", "home_team equals away_team"),
        ("fouls_away", "x", "non-integer fouls_away"),
        ("round", "0", "round must be positive"),
        ("red_home", "-2", "negative red cards"),
    ],
)
def test_row_rejections(data_dir, field, value, reason):
    bad = _row(round=2)
    bad[field] = value
    _write_matches(data_dir / "matches.csv", [_row(), bad])
    _, rep = load_dataset_dir(data_dir)
    assert rep.warnings == [(3, reason)]


def test_duplicate_fixture_rejected(data_dir):
    _write_matches(data_dir / "matches.csv", [_row(), _row()])
    ds, rep = load_dataset_dir(data_dir)
    assert rep.rows_accepted == 1 and rep.rows_rejected == 1
    assert "duplicate" in rep.warnings[0][1]


def test_missing_file_is_data_error(tmp_path):
    with pytest.raises(DataError):
        load_dataset(tmp_path / "m.csv", tmp_path / "t.csv", tmp_path / "s.csv")


def test_missing_column_is_data_error(data_dir):
    (data_dir / "matches.csv").write_text("season,round\n2010,1\n")
    with pytest.raises(DataError, match="missing column"):
        load_dataset_dir(data_dir)


def test_matches_sorted_chronologically(data_dir):
    rows = [
        _row(round=2, date=dt.date(2010, 5, 8), home_team="B", away_team="A", stadium="SB"),
        _row(season=2009, round=5, date=dt.date(2009, 6, 1)),
        _row(round=1),
    ]
    _write_matches(data_dir / "matches.csv", rows)
    ds, _ = load_dataset_dir(data_dir)
    keys = [(m.season, m.date, m.round) for m in ds.matches]
    assert keys == sorted(keys)


def test_report_json_stable(data_dir):
    bad = _row(round=2)
    bad["goals_away"] = -3
    _write_matches(data_dir / "matches.csv", [_row(), bad])
    _, rep = load_dataset_dir(data_dir)
    text = rep.to_json()
    assert list(json.loads(text)) == [
        "rows_read", "rows_accepted", "rows_rejected", "neutral_excluded", "warnings",
    ]  # fmt: skip
    assert text == rep.to_json()


def test_round_trip(tmp_path, gazetteer):
    rng = np.random.default_rng(3)
    matches = []
    for i, (h, a) in enumerate([("A", "B"), ("B", "C"), ("C", "A"), ("D", "B"), ("A", "D")]):
        matches.append(
            make_match(
                round=i + 1, date=dt.date(2010, 5, 1) + dt.timedelta(days=7 * i),
                home_team=h, away_team=a, stadium="S" + h,
                goals_home=int(rng.integers(0, 4)), goals_away=int(rng.integers(0, 4)),
                attendance=int(rng.integers(0, 40_000)),
            )
        )  # fmt: skip
    ds = make_dataset(matches)
    write_dataset(ds, tmp_path / "a", gazetteer)
    ds1, _ = load_dataset_dir(tmp_path / "a")
    assert ds1 == ds
    write_dataset(ds1, tmp_path / "b", gazetteer)
    ds2, _ = load_dataset_dir(tmp_path / "b")
    assert ds2 == ds1
    for name in ("matches.csv", "teams.csv", "stadiums.csv", "gazetteer.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert load_gazetteer(tmp_path / "a" / "gazetteer.csv") == gazetteer


def test_exclude_neutral_examples():
    clean = make_dataset([make_match(round=r, home_team="A", away_team="B", stadium="SA") for r in (1, 2)])
    assert exclude_neutral(clean) == clean
    only_neutral = make_dataset([make_match(round=r, stadium="SC") for r in (1, 2, 3)])
    assert exclude_neutral(only_neutral).matches == ()


def test_exclude_neutral_mixed_ten():
    pairs = [("A", "B"), ("B", "A"), ("C", "D"), ("D", "C"), ("A", "C"),
             ("C", "A"), ("B", "D"), ("D", "B"), ("A", "D"), ("B", "C")]  # fmt: skip
    neutral_at = {3, 7}  # hand-picked: these two are played at a third club's ground
    matches = []
    for i, (h, a) in enumerate(pairs):
        third = next(t for t in "ABCD" if t not in (h, a))
        matches.append(make_match(round=i + 1, home_team=h, away_team=a,
                                  stadium="S" + (third if i in neutral_at else h)))  # fmt: skip
    out = exclude_neutral(make_dataset(matches))
    assert len(out.matches) == 8
    assert exclude_neutral(out) == out


def test_1368_rows_with_260_neutral(tmp_path, gazetteer):
    teams, _ = make_teams()
    rng = np.random.default_rng(1368)
    rows = []
    season = 2003
    while len(rows) < 1368:
        for r, rnd in enumerate(round_robin(4)):
            for h, a in rnd:
                h, a = "ABCD"[h], "ABCD"[a]
                rows.append(_row(season=season, round=r + 1, date=dt.date(season, 5, 1) + dt.timedelta(7 * r),
                                 home_team=h, away_team=a, stadium="S" + h))  # fmt: skip
        season += 1
    rows = rows[:1368]
    for i in rng.choice(len(rows), size=260, replace=False):
        h, a = rows[i]["home_team"], rows[i]["away_team"]
        rows[i]["stadium"] = "S" + next(t for t in "ABCD" if t not in (h, a))
    write_dataset(make_dataset([]), tmp_path, gazetteer)
    _write_matches(tmp_path / "matches.csv", rows)

    # independent count straight from the file
    home_ground = {t.id: t.home_stadium for t in teams.values()}
    with open(tmp_path / "matches.csv", newline="") as fh:
        usable = sum(
            1 for r in csv.DictReader(fh)
            if r["stadium"] in (home_ground[r["home_team"]], home_ground[r["away_team"]])
        )  # fmt: skip
    assert usable == 1108

    ds, rep = load_dataset_dir(tmp_path)
    assert rep.rows_accepted == 1368
    assert rep.neutral_excluded == 260
    assert len(exclude_neutral(ds).matches) == 1108


def test_travel_distance_examples(gazetteer):
    assert travel_distance_km("Sao Paulo", "Sao Paulo", gazetteer) == 0.0
    sp_rio = travel_distance_km("Sao Paulo", "Rio de Janeiro", gazetteer)
    assert sp_rio == pytest.approx(360.6238809880907, rel=1e-9)  # chord oracle
    assert round(sp_rio) == 361
    antipodes = {"x": (0.0, 0.0), "y": (0.0, 180.0)}
    assert travel_distance_km("x", "y", antipodes) == pytest.approx(math.pi * 6371.0, rel=1e-12)
    assert travel_distance_km("x", "y", antipodes) == pytest.approx(20015, abs=1)


def test_travel_distance_unknown_city(gazetteer):
    with pytest.raises(MissingGazetteerEntryError):
        travel_distance_km("Sao Paulo", "Atlantis", gazetteer)


coords = st.tuples(st.floats(-89.9, 89.9), st.floats(-180, 180))


@settings(max_examples=200)
@given(coords, coords, coords)
def test_distance_symmetric_triangle_and_matches_oracle(a, b, c):
    g = {"a": a, "b": b, "c": c}
    ab = travel_distance_km("a", "b", g)
    assert ab == pytest.approx(travel_distance_km("b", "a", g), rel=1e-12, abs=1e-9)
    assert ab == pytest.approx(chord_distance_km(*a, *b), rel=1e-6, abs=1e-6)
    ac, cb = travel_distance_km("a", "c", g), travel_distance_km("c", "b", g)
    assert ab <= (ac + cb) * (1 + 1e-6) + 1e-9


def test_gazetteer_rejects_duplicates(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("city,latitude,longitude\nX,1,2\nX,3,4\n")
    with pytest.raises(DataError):
        load_gazetteer(p)
