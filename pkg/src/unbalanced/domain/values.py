"""Scalar aliases, verified-value helpers and closed vocabularies.

The public aliases in this module describe what user code may pass into the
library. The private `_Verified*` subclasses are a static-typing tool used
internally to mark values that have already crossed a validation boundary.
"""

from enum import StrEnum
from fractions import Fraction
from typing import cast

from unbalanced.errors import GroundSizeError

# Exact rationals are always stored in lowest terms with a positive denominator,
# which is exactly what `Fraction` guarantees.
type BigRational = Fraction

# Integer vectors are plain tuples so they hash, compare and pickle cheaply.
type IntVector = tuple[int, ...]

# Bit i-1 of a mask is set iff element i belongs to the subset.
type Mask = int

# Same trick as the rest of the library: a wide public alias and a narrow internal
# subclass. `_VerifiedGroundSize` is never constructed; `cast` only re-labels an
# int once `_verify_ground_size` has checked it.
type GroundSize = int

MAX_GROUND_SIZE = 16


class _VerifiedGroundSize(int):
  """An int that has been checked to lie in 1..MAX_GROUND_SIZE."""

  pass


def _verify_ground_size(
  n: GroundSize, low: int = 1, high: int = MAX_GROUND_SIZE
) -> _VerifiedGroundSize:
  """Check a ground-set size against an operation's range and narrow its type."""
  if isinstance(n, bool) or not isinstance(n, int):
    raise TypeError(f"ground-set size must be an int, got {type(n)}")
  if not low <= n <= min(high, MAX_GROUND_SIZE):
    raise GroundSizeError(n, low, min(high, MAX_GROUND_SIZE))
  return cast(_VerifiedGroundSize, n)


def full_mask(n: int) -> Mask:
  """Mask of the whole ground set [n]."""
  return (1 << n) - 1


def representative_count(n: int) -> int:
  """Number of representatives 2^(n-1) - 1, one per complementary pair."""
  return (1 << (n - 1)) - 1


class Field(StrEnum):
  """Coefficient field for spans and ranks."""

  Q = "Q"
  """The rationals."""

  F2 = "F2"
  """The two-element field; integer coefficients are reduced mod 2."""


class Verdict(StrEnum):
  """Outcome of a balance certification."""

  BALANCED = "balanced"
  """Some convex combination of the members' characteristic vectors is constant."""

  UNBALANCED = "unbalanced"
  """A zero-sum vector has strictly positive sum on every member."""


class Sense(StrEnum):
  """Row sense in a margin linear program."""

  MARGIN = "margin"
  """The row value must be at least the margin variable t."""

  ZERO = "zero"
  """The row value must be exactly zero."""
