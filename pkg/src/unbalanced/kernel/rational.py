"""Exact rational helpers.

Rationals are `fractions.Fraction` values. On the wire they are written as
``"p/q"`` strings in lowest terms, or ``"p"`` when the denominator is 1.
"""

from collections.abc import Iterable, Sequence
from fractions import Fraction
from math import lcm

from unbalanced.domain.values import BigRational


def format_rational(value: BigRational | int) -> str:
  """Serialize an exact rational as ``"p/q"`` (or ``"p"`` for integers)."""
  return str(Fraction(value))


def parse_rational(text: str) -> BigRational:
  """Parse a ``"p/q"`` or ``"p"`` string.

  Raises:
      ValueError: If the text is not an exact rational literal. Decimal points and
          exponents are rejected so no floating-point value can sneak in.
  """
  stripped = text.strip()
  if not stripped or any(ch in stripped for ch in ".eE"):
    raise ValueError(f"not an exact rational literal: {text!r}")
  try:
    return Fraction(stripped)
  except ZeroDivisionError:
    raise ValueError(f"zero denominator in {text!r}") from None


def common_denominator(values: Iterable[BigRational | int]) -> int:
  """Least common multiple of the denominators of `values` (1 when empty)."""
  result = 1
  for value in values:
    result = lcm(result, Fraction(value).denominator)
  return result


def scale_to_integers(values: Sequence[BigRational | int]) -> tuple[int, ...]:
  """Scale a rational vector by the lcm of its denominators, keeping its direction."""
  factor = common_denominator(values)
  return tuple(int(Fraction(value) * factor) for value in values)


def dot(left: Sequence[BigRational | int], right: Sequence[BigRational | int]) -> BigRational:
  """Exact inner product."""
  return sum((Fraction(a) * b for a, b in zip(left, right, strict=True)), Fraction(0))
