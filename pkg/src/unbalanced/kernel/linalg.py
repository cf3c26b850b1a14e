"""Exact linear algebra over Q and F2.

Rational elimination works on `Fraction` rows. Binary elimination works on
numpy ``uint8`` arrays with XOR row operations. Both produce reduced row
echelon forms, from which ranks, integer nullspace bases, span-membership tests
and unique solutions are read off.
"""

from collections.abc import Iterable, Sequence
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from unbalanced.domain.values import BigRational, Field, IntVector
from unbalanced.errors import DimensionMismatchError, GeneratorNotInGroundError, InputError
from unbalanced.kernel.rational import scale_to_integers


def _common_dimension(vectors: Sequence[Sequence[int]], dimension: int | None = None) -> int:
  for vector in vectors:
    if dimension is None:
      dimension = len(vector)
    elif len(vector) != dimension:
      raise DimensionMismatchError(dimension, len(vector))
  if dimension is None:
    return 0
  if dimension < 1:
    raise InputError("vectors must have dimension at least 1")
  return dimension


def _rref_rational(
  rows: Sequence[Sequence[BigRational | int]], width: int
) -> tuple[list[list[Fraction]], list[int]]:
  matrix = [[Fraction(x) for x in row] for row in rows]
  pivots: list[int] = []
  top = 0
  for col in range(width):
    if top == len(matrix):
      break
    found = next((r for r in range(top, len(matrix)) if matrix[r][col]), None)
    if found is None:
      continue
    matrix[top], matrix[found] = matrix[found], matrix[top]
    lead = matrix[top][col]
    if lead != 1:
      matrix[top] = [x / lead for x in matrix[top]]
    pivot_row = matrix[top]
    for r, row in enumerate(matrix):
      factor = row[col]
      if r != top and factor:
        matrix[r] = [a - factor * b for a, b in zip(row, pivot_row)]
    pivots.append(col)
    top += 1
  return matrix[:top], pivots


def _rref_binary(rows: Sequence[Sequence[int]], width: int) -> tuple[npt.NDArray[np.uint8], list[int]]:
  matrix = (np.asarray(rows, dtype=np.int64).reshape(len(rows), width) % 2).astype(np.uint8)
  pivots: list[int] = []
  top = 0
  height = matrix.shape[0]
  for col in range(width):
    if top == height:
      break
    nonzero = np.flatnonzero(matrix[top:, col])
    if nonzero.size == 0:
      continue
    found = top + int(nonzero[0])
    if found != top:
      matrix[[top, found]] = matrix[[found, top]]
    # Eliminate above and below so the result is fully reduced.
    hits = np.flatnonzero(matrix[:, col])
    for r in hits:
      if r != top:
        matrix[r] ^= matrix[top]
    pivots.append(col)
    top += 1
  return matrix[:top], pivots


def rank(vectors: Sequence[Sequence[int]], field: Field = Field.Q) -> int:
  """Rank of the span of integer vectors over Q or F2.

  Over F2 the coefficients are reduced mod 2 first.

  Raises:
      DimensionMismatchError: If the vectors do not share one dimension.
  """
  if not vectors:
    return 0
  width = _common_dimension(vectors)
  match Field(field):
    case Field.Q:
      return len(_rref_rational(vectors, width)[1])
    case Field.F2:
      return len(_rref_binary(vectors, width)[1])


def nullspace(vectors: Sequence[Sequence[int]], dimension: int, field: Field = Field.Q) -> list[IntVector]:
  """Integer basis of the vectors orthogonal to every input vector.

  Over F2 the basis entries are 0 or 1 and orthogonality is taken mod 2.
  """
  width = _common_dimension(vectors, dimension)
  if not vectors:
    return [tuple(int(i == j) for j in range(width)) for i in range(width)]
  basis: list[IntVector] = []
  match Field(field):
    case Field.Q:
      reduced, pivots = _rref_rational(vectors, width)
      free = [col for col in range(width) if col not in pivots]
      for f in free:
        solution = [Fraction(0)] * width
        solution[f] = Fraction(1)
        for row, pivot in zip(reduced, pivots):
          solution[pivot] = -row[f]
        basis.append(scale_to_integers(solution))
    case Field.F2:
      reduced_bits, pivots = _rref_binary(vectors, width)
      free = [col for col in range(width) if col not in pivots]
      for f in free:
        bits = [0] * width
        bits[f] = 1
        for row_bits, pivot in zip(reduced_bits, pivots):
          bits[pivot] = int(row_bits[f])
        basis.append(tuple(bits))
  return basis


def solve_unique(
  rows: Sequence[Sequence[BigRational | int]], rhs: Sequence[BigRational | int]
) -> tuple[Fraction, ...] | None:
  """Exact unique solution of ``rows · x = rhs`` over Q.

  Returns `None` when the system is inconsistent or has more than one solution.
  """
  if len(rows) != len(rhs):
    raise DimensionMismatchError(len(rows), len(rhs))
  if not rows:
    return None
  width = _common_dimension(rows)
  augmented = [[*row, value] for row, value in zip(rows, rhs)]
  reduced, pivots = _rref_rational(augmented, width + 1)
  if width in pivots or len(pivots) != width:
    return None
  return tuple(row[width] for row in reduced)


class SpanOracle:
  """Span-membership tests against a fixed ground list of integer vectors.

  The ground list is stored once as an ``int64`` matrix; each closure computes
  an integer nullspace for the generators and keeps the ground vectors that are
  orthogonal to all of it, mod 2 over F2.
  """

  ground: tuple[IntVector, ...]
  field: Field
  dimension: int
  _matrix: npt.NDArray[np.int64]
  _index: dict[IntVector, int]

  __slots__ = ("ground", "field", "dimension", "_matrix", "_index")

  def __init__(self, ground: Iterable[Sequence[int]], field: Field = Field.Q) -> None:
    self.ground = tuple(tuple(int(x) for x in vector) for vector in ground)
    self.field = Field(field)
    self.dimension = _common_dimension(self.ground)
    self._matrix = np.array(self.ground, dtype=np.int64).reshape(len(self.ground), self.dimension)
    self._index = {}
    for i, vector in enumerate(self.ground):
      self._index.setdefault(vector, i)

  def index_of(self, vector: Sequence[int]) -> int:
    """Position of `vector` in the ground list."""
    try:
      return self._index[tuple(vector)]
    except KeyError:
      raise GeneratorNotInGroundError(vector) from None

  def members(self, generator_indices: Iterable[int]) -> npt.NDArray[np.bool_]:
    """Boolean mask over the ground list of the vectors in the span of the generators."""
    generators = [self.ground[i] for i in generator_indices]
    normals = nullspace(generators, self.dimension, self.field)
    if not normals:
      return np.ones(len(self.ground), dtype=np.bool_)
    products = self._matrix @ np.array(normals, dtype=np.int64).T
    if self.field is Field.F2:
      products %= 2
    return np.all(products == 0, axis=1)

  def closure(self, generator_indices: Iterable[int]) -> frozenset[int]:
    """Indices of the ground vectors in the span of the generators."""
    return frozenset(int(i) for i in np.flatnonzero(self.members(generator_indices)))

  def closure_bits(self, generator_indices: Iterable[int]) -> int:
    """Same as `closure`, packed as a Python int with bit i for ground vector i."""
    bits = 0
    for i in np.flatnonzero(self.members(generator_indices)):
      bits |= 1 << int(i)
    return bits


def span_closure(
  generators: Sequence[Sequence[int]], ground: Sequence[Sequence[int]], field: Field = Field.Q
) -> frozenset[int]:
  """Indices of all ground vectors in the span of `generators` over `field`.

  The result is a flat of the vector configuration `ground`.

  Raises:
      GeneratorNotInGroundError: If a generator is not one of the ground vectors.
      DimensionMismatchError: If the vectors do not share one dimension.
  """
  if not ground:
    if generators:
      raise GeneratorNotInGroundError(generators[0])
    return frozenset()
  oracle = SpanOracle(ground, field)
  for generator in generators:
    if len(generator) != oracle.dimension:
      raise DimensionMismatchError(oracle.dimension, len(generator))
  return oracle.closure(oracle.index_of(g) for g in generators)
