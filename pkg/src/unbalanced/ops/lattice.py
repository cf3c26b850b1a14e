"""Lattices of flats of the chamber arrangement and their polynomials.

The ground list is the 2^(n-1) - 1 nonzero 0-1 vectors of dimension n - 1, in
representative-mask order. A flat is the set of ground vectors inside a
subspace spanned by some of them, over Q or over F2. Flats are generated rank
by rank: the covers of a flat X are the closures of X plus one outside point,
and they partition the points outside X, so each cover is found once per
lower flat without trying every point.

Flats are stored as bitsets over the ground list. The Möbius recursion
``mu(X) = -sum(mu(Y) for Y < X)`` is evaluated rank by rank with vectorized
subset tests on ``uint64`` masks.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from logging import Logger, getLogger

import numpy as np

from unbalanced.domain.values import (
  BigRational,
  Field,
  GroundSize,
  IntVector,
  _verify_ground_size,
)
from unbalanced.errors import AuditError, WhitneyInequalityError, ZaslavskyMismatchError
from unbalanced.kernel.linalg import SpanOracle
from unbalanced.ops.bounds import bounds_for
from unbalanced.ops.families import representative_vectors

MAX_RATIONAL_LATTICE_SIZE = 7
MAX_BINARY_LATTICE_SIZE = 6
MAX_WHITNEY_SIZE = 6

# Row block for the vectorized subset test; bounds the temporary boolean matrix.
_MOEBIUS_BLOCK = 256


@dataclass(frozen=True, slots=True, kw_only=True)
class Flat:
  """A closed set of ground vectors with its rank and Möbius value from the bottom."""

  bits: int
  rank: int
  moebius: int
  basis: tuple[int, ...]

  @property
  def points(self) -> frozenset[int]:
    """Indices of the ground vectors in this flat."""
    return frozenset(i for i in range(self.bits.bit_length()) if self.bits >> i & 1)

  def __contains__(self, index: object) -> bool:
    return isinstance(index, int) and index >= 0 and bool(self.bits >> index & 1)


@dataclass(frozen=True, slots=True, kw_only=True)
class FlatLattice:
  """All flats of the arrangement for one n and field, grouped by rank."""

  n: int
  field: Field
  ground: tuple[IntVector, ...]
  ranks: tuple[tuple[Flat, ...], ...]

  @property
  def rank(self) -> int:
    return len(self.ranks) - 1

  @property
  def bottom(self) -> Flat:
    return self.ranks[0][0]

  @property
  def top(self) -> Flat:
    return self.ranks[-1][0]

  def flats(self) -> Iterator[Flat]:
    """Every flat, by increasing rank and then by bitset."""
    for level in self.ranks:
      yield from level

  def __len__(self) -> int:
    return sum(len(level) for level in self.ranks)


def _moebius_values(ranks: list[list[tuple[int, tuple[int, ...]]]]) -> list[list[int]]:
  values: list[list[int]] = [[1]]
  lower_masks = np.array([ranks[0][0][0]], dtype=np.uint64)
  lower_values = np.array([1], dtype=np.int64)
  for level in ranks[1:]:
    masks = np.array([bits for bits, _ in level], dtype=np.uint64)
    level_values: list[int] = []
    for start in range(0, len(masks), _MOEBIUS_BLOCK):
      block = masks[start : start + _MOEBIUS_BLOCK]
      below = (lower_masks[np.newaxis, :] & ~block[:, np.newaxis]) == 0
      level_values.extend(int(-v) for v in below.astype(np.int64) @ lower_values)
    values.append(level_values)
    lower_masks = np.concatenate([lower_masks, masks])
    lower_values = np.concatenate([lower_values, np.array(level_values, dtype=np.int64)])
  return values


def build_flat_lattice(n: GroundSize, field: Field = Field.Q, logger: Logger | None = None) -> FlatLattice:
  """Enumerate every flat of the arrangement for ground size n.

  Over Q, n may range over 2..7; over F2, over 2..6.

  Raises:
      GroundSizeError: If n is outside the field's range.
  """
  logger = logger or getLogger(__name__)
  field = Field(field)
  high = MAX_RATIONAL_LATTICE_SIZE if field is Field.Q else MAX_BINARY_LATTICE_SIZE
  n = _verify_ground_size(n, low=2, high=high)
  ground = representative_vectors(n)
  oracle = SpanOracle(ground, field)
  everything = (1 << len(ground)) - 1

  levels: list[list[tuple[int, tuple[int, ...]]]] = [[(0, ())]]
  for rank in range(1, n):
    found: dict[int, tuple[int, ...]] = {}
    for bits, basis in levels[-1]:
      outside = everything & ~bits
      while outside:
        point = (outside & -outside).bit_length() - 1
        cover_basis = (*basis, point)
        cover = oracle.closure_bits(cover_basis)
        found.setdefault(cover, cover_basis)
        outside &= ~cover
    levels.append([(bits, found[bits]) for bits in sorted(found)])
    logger.debug("n=%d %s: %d flats of rank %d", n, field, len(found), rank)

  moebius = _moebius_values(levels)
  ranks = tuple(
    tuple(
      Flat(bits=bits, rank=rank, moebius=mu, basis=basis)
      for (bits, basis), mu in zip(level, moebius[rank])
    )
    for rank, level in enumerate(levels)
  )
  return FlatLattice(n=n, field=field, ground=ground, ranks=ranks)


@dataclass(frozen=True, slots=True, kw_only=True)
class CharPoly:
  """A characteristic polynomial, stored by increasing degree.

  ``coefficients[j]`` is the coefficient of ``t^j``; the degree is n - 1.
  """

  n: int
  field: Field
  coefficients: tuple[int, ...]

  @classmethod
  def create(cls, coefficients: Sequence[int], n: GroundSize, field: Field = Field.Q) -> CharPoly:
    """Build a polynomial of degree n - 1 from its coefficients, lowest degree first."""
    n = _verify_ground_size(n, low=2)
    owned = tuple(int(c) for c in coefficients)
    if len(owned) != n:
      raise ValueError(f"a degree-{n - 1} polynomial has {n} coefficients, got {len(owned)}")
    return CharPoly(n=n, field=Field(field), coefficients=owned)

  @property
  def whitney(self) -> tuple[int, ...]:
    """Whitney numbers of the first kind: ``w_k`` is the coefficient of ``t^(n-1-k)``."""
    return tuple(reversed(self.coefficients))

  @property
  def descending(self) -> tuple[int, ...]:
    """Coefficients from the leading term down."""
    return self.whitney


def evaluate(polynomial: CharPoly, t: BigRational | int) -> BigRational:
  """Exact value of `polynomial` at t."""
  value = Fraction(0)
  for coefficient in polynomial.descending:
    value = value * t + coefficient
  return value


def characteristic_polynomial(lattice: FlatLattice) -> CharPoly:
  """Sum of ``mu(X) t^(rank - rank(X))`` over the flats."""
  whitney = [sum(flat.moebius for flat in level) for level in lattice.ranks]
  return CharPoly.create(list(reversed(whitney)), lattice.n, lattice.field)


def zaslavsky_count(polynomial: CharPoly) -> int:
  """Number of chambers, ``(-1)^(n-1) p(-1)``, checked against the sum of ``|w_k|``.

  Raises:
      ZaslavskyMismatchError: If the two routes disagree.
  """
  by_value = (-1) ** (polynomial.n - 1) * evaluate(polynomial, -1)
  by_whitney = sum(abs(w) for w in polynomial.whitney)
  if by_value != by_whitney:
    raise ZaslavskyMismatchError(f"zaslavsky({polynomial.n})", int(by_value), by_whitney)
  return by_whitney


def projective_charpoly(n: GroundSize) -> CharPoly:
  """Expand ``(t - 1)(t - 2)(t - 4) ... (t - 2^(n-2))``."""
  n = _verify_ground_size(n, low=2)
  coefficients = [1]
  for i in range(n - 1):
    root = 1 << i
    shifted = [0, *coefficients]
    scaled = [-root * c for c in coefficients] + [0]
    coefficients = [a + b for a, b in zip(shifted, scaled)]
  return CharPoly.create(coefficients, n, Field.F2)


def gaussian_binomial(m: int, k: int, q: int = 2) -> int:
  """Number of k-dimensional subspaces of an m-dimensional space over GF(q)."""
  if k < 0 or k > m:
    return 0
  numerator = 1
  denominator = 1
  for i in range(k):
    numerator *= q ** (m - i) - 1
    denominator *= q ** (i + 1) - 1
  return numerator // denominator


def subspace_count(m: int, q: int = 2) -> int:
  """Number of subspaces of every dimension of GF(q)^m."""
  return sum(gaussian_binomial(m, k, q) for k in range(m + 1))


@dataclass(frozen=True, slots=True, kw_only=True)
class WhitneyReport:
  n: int
  rational: tuple[int, ...]
  binary: tuple[int, ...]
  rational_total: int
  binary_total: int
  lower_product: int

  @property
  def dominated(self) -> tuple[bool, ...]:
    """Per k, whether ``|w_k|`` over Q is at least ``|w_k|`` over F2."""
    return tuple(a >= b for a, b in zip(self.rational, self.binary))


def whitney_compare(
  n: GroundSize, rational: CharPoly | None = None, binary: CharPoly | None = None
) -> WhitneyReport:
  """Compare Whitney magnitudes of the Q and F2 arrangements.

  Missing polynomials are computed from their lattices. The F2 polynomial is
  also checked against the closed form, and its chamber count against the
  lower-bound product.

  Raises:
      WhitneyInequalityError: If some ``|w_k|`` over Q is smaller than over F2.
      ZaslavskyMismatchError: If the F2 lattice disagrees with the closed form or
          with the lower-bound product.
      AuditError: If the aggregate chamber counts are out of order.
  """
  n = _verify_ground_size(n, low=2, high=MAX_WHITNEY_SIZE)
  if rational is None:
    rational = characteristic_polynomial(build_flat_lattice(n, Field.Q))
  if binary is None:
    binary = characteristic_polynomial(build_flat_lattice(n, Field.F2))
  closed = projective_charpoly(n)
  if binary.coefficients != closed.coefficients:
    for left, right in zip(binary.whitney, closed.whitney):
      if left != right:
        raise ZaslavskyMismatchError(f"projective({n})", left, right)

  magnitudes_q = tuple(abs(w) for w in rational.whitney)
  magnitudes_f2 = tuple(abs(w) for w in binary.whitney)
  for k, (a, b) in enumerate(zip(magnitudes_q, magnitudes_f2)):
    if a < b:
      raise WhitneyInequalityError(n, k, a, b)

  total_q = zaslavsky_count(rational)
  total_f2 = zaslavsky_count(binary)
  if total_q < total_f2:
    raise AuditError(f"n={n}: {total_q} chambers over Q, fewer than {total_f2} over F2")
  lower_product = bounds_for(n).lower_product
  if total_f2 != lower_product:
    raise ZaslavskyMismatchError(f"lower product({n})", total_f2, lower_product)
  return WhitneyReport(
    n=n,
    rational=magnitudes_q,
    binary=magnitudes_f2,
    rational_total=total_q,
    binary_total=total_f2,
    lower_product=lower_product,
  )


def moebius_signs_alternate(lattice: FlatLattice) -> bool:
  """Whether ``(-1)^rank(X) mu(X) > 0`` for every flat X."""
  return all((-1) ** flat.rank * flat.moebius > 0 for flat in lattice.flats())
