"""Great-circle distances between gazetteer cities."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Mapping

from homeadv.errors import DataError, MissingGazetteerEntryError

EARTH_RADIUS_KM = 6371.0

Gazetteer = Mapping[str, tuple[float, float]]


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    # clamp guards against a > 1 from rounding at antipodes
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(min(1.0, a)))


def travel_distance_km(from_city: str, to_city: str, gazetteer: Gazetteer) -> float:
    for city in (from_city, to_city):
        if city not in gazetteer:
            raise MissingGazetteerEntryError(f"city {city!r} not in gazetteer")
    if from_city == to_city:
        return 0.0
    lat1, lon1 = gazetteer[from_city]
    lat2, lon2 = gazetteer[to_city]
    return haversine_km(lat1, lon1, lat2, lon2)


def load_gazetteer(path) -> dict[str, tuple[float, float]]:
    """Read ``city,latitude,longitude`` rows. Duplicate or out-of-range rows are errors."""
    out: dict[str, tuple[float, float]] = {}
    with open(Path(path), newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) != {"city", "latitude", "longitude"}:
            raise DataError(f"{path}: gazetteer header must be city,latitude,longitude")
        for lineno, row in enumerate(reader, start=2):
            city = row["city"].strip()
            try:
                lat, lon = float(row["latitude"]), float(row["longitude"])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad coordinate ({exc})") from None
            if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                raise DataError(f"{path}:{lineno}: coordinate out of range")
            if city in out:
                raise DataError(f"{path}:{lineno}: duplicate city {city!r}")
            out[city] = (lat, lon)
    return out


def write_gazetteer(gazetteer: Gazetteer, path) -> None:
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["city", "latitude", "longitude"])
        for city in sorted(gazetteer):
            lat, lon = gazetteer[city]
            w.writerow([city, repr(float(lat)), repr(float(lon))])
