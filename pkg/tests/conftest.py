import datetime as dt

import pytest

from homeadv.domain import Match, Stadium, TeamRef
from homeadv.ingest import Dataset

CITIES = {
    "Sao Paulo": (-23.55, -46.63),
    "Rio de Janeiro": (-22.91, -43.17),
    "Porto Alegre": (-30.03, -51.23),
    "Belo Horizonte": (-19.92, -43.94),
}


def make_match(**kw) -> Match:
    base = dict(
        season=2010, round=1, date=dt.date(2010, 5, 1), home_team="A", away_team="B",
        stadium="SA", goals_home=1, goals_away=0, attendance=10_000,
        yellow_home=1, yellow_away=2, red_home=0, red_away=0, fouls_home=12, fouls_away=14,
        coach_home="coach a", coach_away="coach b",
    )  # fmt: skip
    base.update(kw)
    return Match(**base)


def make_teams():
    teams = {
        "A": TeamRef("A", "Alpha", "Sao Paulo", "SA", 0.10),
        "B": TeamRef("B", "Bravo", "Rio de Janeiro", "SB", 0.08),
        "C": TeamRef("C", "Charlie", "Porto Alegre", "SC", 0.05),
        "D": TeamRef("D", "Delta", "Belo Horizonte", "SD", 0.03),
    }
    stadiums = {
        "SA": Stadium("SA", "Arena A", "Sao Paulo", 60_000, *CITIES["Sao Paulo"]),
        "SB": Stadium("SB", "Arena B", "Rio de Janeiro", 70_000, *CITIES["Rio de Janeiro"]),
        "SC": Stadium("SC", "Arena C", "Porto Alegre", 45_000, *CITIES["Porto Alegre"]),
        "SD": Stadium("SD", "Arena D", "Belo Horizonte", 50_000, *CITIES["Belo Horizonte"]),
    }
    return teams, stadiums


def make_dataset(matches) -> Dataset:
    teams, stadiums = make_teams()
    return Dataset(teams=teams, stadiums=stadiums, matches=tuple(sorted(matches, key=lambda m: m.sort_key)))


@pytest.fixture
def gazetteer():
    return dict(CITIES)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
