import logging
from fractions import Fraction
from typing import Annotated, Any, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, PlainSerializer, PlainValidator

from diffeo_certifier.settings import Settings

logger = logging.getLogger("diffeo_certifier")
logger.addHandler(logging.NullHandler())

settings = Settings()

Exponent = Tuple[int, ...]


def parse_rational(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational literal: {value!r}") from e
    raise TypeError(f"cannot read {type(value).__name__} as an exact rational")


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


Rational = Annotated[
    Fraction,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
]


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def grlex_key(alpha: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Graded lexicographic sort key: total degree first, then lexicographic."""
    return sum(alpha), tuple(alpha)


def sort_grlex(exponents) -> Tuple[Exponent, ...]:
    return tuple(sorted((tuple(a) for a in exponents), key=grlex_key))


def is_even(alpha: Sequence[int]) -> bool:
    return all(a % 2 == 0 for a in alpha)
