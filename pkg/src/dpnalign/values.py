"""Sorts of process variables and exact value handling."""

from __future__ import annotations

import enum
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Union

Value = Union[bool, int, Fraction, str]


class SortError(TypeError):
    pass


class Sort(enum.Enum):
    BOOL = "bool"
    INT = "int"
    RAT = "rat"
    STRING = "string"

    @property
    def default(self) -> Value:
        return {
            Sort.BOOL: False,
            Sort.INT: 0,
            Sort.RAT: Fraction(0),
            Sort.STRING: "",
        }[self]

    @property
    def numeric(self) -> bool:
        return self in (Sort.INT, Sort.RAT)

    def accepts(self, value: object) -> bool:
        if self is Sort.BOOL:
            return isinstance(value, bool)
        if isinstance(value, bool):
            return False
        if self is Sort.INT:
            return isinstance(value, int) or (
                isinstance(value, Fraction) and value.denominator == 1
            )
        if self is Sort.RAT:
            return isinstance(value, (int, Fraction))
        return isinstance(value, str)

    def coerce(self, value: object) -> Value:
        """Return `value` in the canonical Python type of this sort.

        Raises SortError when the value does not belong to the sort's domain.
        Floats are rejected: every rational must be exact.
        """
        if not self.accepts(value):
            raise SortError(f"value {value!r} is not of sort {self.value}")
        if self is Sort.INT:
            return int(value)
        if self is Sort.RAT:
            return Fraction(value)
        return value  # type: ignore[return-value]


_SORT_ALIASES = {
    "bool": Sort.BOOL,
    "boolean": Sort.BOOL,
    "java.lang.boolean": Sort.BOOL,
    "int": Sort.INT,
    "integer": Sort.INT,
    "long": Sort.INT,
    "java.lang.integer": Sort.INT,
    "java.lang.long": Sort.INT,
    "rat": Sort.RAT,
    "rational": Sort.RAT,
    "real": Sort.RAT,
    "float": Sort.RAT,
    "double": Sort.RAT,
    "java.lang.double": Sort.RAT,
    "java.lang.float": Sort.RAT,
    "string": Sort.STRING,
    "java.lang.string": Sort.STRING,
}


def sort_from_name(name: str) -> Sort:
    try:
        return _SORT_ALIASES[name.strip().lower()]
    except KeyError:
        raise SortError(f"unknown sort {name!r}") from None


def parse_decimal(text: str) -> Fraction:
    """Exact rational from a decimal or `p/q` literal ("0.1" -> 1/10)."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    try:
        return Fraction(Decimal(text))
    except (InvalidOperation, ValueError):
        raise ValueError(f"not a decimal literal: {text!r}") from None


def canonical(value: Value) -> tuple:
    """Hashable, sort-tagged form of a value; numerically equal numbers agree."""
    if isinstance(value, bool):
        return ("b", value)
    if isinstance(value, (int, Fraction)):
        return ("n", Fraction(value))
    return ("s", value)


def format_value(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return str(value)
