"""Home-advantage measurement and stratified logistic analysis for league football."""

from homeadv.domain import (
    Match,
    MatchOutcome,
    Side,
    Stadium,
    TeamRef,
    VenueClass,
    match_outcome,
    points_for,
    venue_class,
)
from homeadv.errors import (
    DataError,
    DegenerateLabelsError,
    HomeAdvError,
    NumericalError,
    SingularSystemError,
    UndefinedRatioError,
)

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "DegenerateLabelsError",
    "HomeAdvError",
    "Match",
    "MatchOutcome",
    "NumericalError",
    "Side",
    "SingularSystemError",
    "Stadium",
    "TeamRef",
    "UndefinedRatioError",
    "VenueClass",
    "match_outcome",
    "points_for",
    "venue_class",
]
