from random import Random

import pytest

from unbalanced.domain.values import Field
from unbalanced.errors import DimensionMismatchError, GeneratorNotInGroundError
from unbalanced.kernel.linalg import SpanOracle, nullspace, rank, solve_unique, span_closure
from unbalanced.ops.families import representative_vectors

E1 = (1, 0, 0)
E2 = (0, 1, 0)
E2_E3 = (0, 1, 1)


def test_rank_of_nothing_is_zero(field: Field) -> None:
  assert rank([], field) == 0


def test_rank_of_dependent_triple_in_the_plane(field: Field) -> None:
  assert rank([(1, 0), (0, 1), (1, 1)], field) == 2


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_rank_of_all_zero_one_vectors_is_full(n: int, field: Field) -> None:
  assert rank(list(representative_vectors(n)), field) == n - 1


def test_rank_reduces_mod_two_over_f2() -> None:
  vectors = [(1, 1, 0), (0, 1, 1), (1, 0, 1)]

  assert rank(vectors, Field.Q) == 3
  assert rank(vectors, Field.F2) == 2


def test_rank_rejects_mixed_dimensions() -> None:
  with pytest.raises(DimensionMismatchError, match="expected 2"):
    rank([(1, 0), (1, 0, 0)])


def test_rank_over_f2_never_exceeds_rank_over_q() -> None:
  rng = Random(20240611)
  ground = list(representative_vectors(6))
  for _ in range(200):
    sample = rng.sample(ground, rng.randint(1, 8))
    assert rank(sample, Field.F2) <= rank(sample, Field.Q)


def test_nullspace_vectors_are_orthogonal(field: Field) -> None:
  vectors = [(1, 1, 0, 0), (0, 1, 1, 1)]
  basis = nullspace(vectors, 4, field)

  assert len(basis) == 4 - rank(vectors, field)
  for normal in basis:
    for vector in vectors:
      product = sum(a * b for a, b in zip(normal, vector))
      assert (product % 2 if field is Field.F2 else product) == 0


def test_nullspace_of_nothing_is_the_standard_basis() -> None:
  assert nullspace([], 2) == [(1, 0), (0, 1)]


def test_solve_unique_finds_the_solution() -> None:
  assert solve_unique([(1, 1), (1, -1)], [3, 1]) == (2, 1)


def test_solve_unique_returns_none_when_underdetermined() -> None:
  assert solve_unique([(1, 1)], [1]) is None


def test_solve_unique_returns_none_when_inconsistent() -> None:
  assert solve_unique([(1, 1), (1, 1)], [1, 2]) is None


def test_span_closure_of_nothing_is_the_bottom_flat(field: Field) -> None:
  assert span_closure([], list(representative_vectors(4)), field) == frozenset()


def test_span_closure_of_two_axes_adds_their_sum(field: Field) -> None:
  ground = list(representative_vectors(4))

  closure = span_closure([E1, E2], ground, field)

  assert {ground[i] for i in closure} == {E1, E2, (1, 1, 0)}


def test_span_closure_of_axis_and_diagonal_pair_picks_up_all_ones(field: Field) -> None:
  ground = list(representative_vectors(4))

  closure = span_closure([E1, E2_E3], ground, field)

  assert {ground[i] for i in closure} == {E1, E2_E3, (1, 1, 1)}


def test_span_closure_rejects_generator_outside_ground() -> None:
  with pytest.raises(GeneratorNotInGroundError, match="not an element"):
    span_closure([(2, 0, 0)], list(representative_vectors(4)))


def test_span_closure_rejects_generator_of_wrong_dimension() -> None:
  with pytest.raises(DimensionMismatchError):
    span_closure([(1, 0)], list(representative_vectors(4)))


def test_span_closure_is_a_closure_operator(field: Field) -> None:
  rng = Random(7)
  ground = list(representative_vectors(5))
  oracle = SpanOracle(ground, field)
  for _ in range(100):
    small = rng.sample(range(len(ground)), rng.randint(0, 3))
    large = small + rng.sample(range(len(ground)), rng.randint(0, 2))
    closure = oracle.closure(small)

    assert set(small) <= closure
    assert closure <= oracle.closure(large)
    assert oracle.closure(closure) == closure


def test_span_oracle_bits_agree_with_closure(field: Field) -> None:
  oracle = SpanOracle(representative_vectors(4), field)

  bits = oracle.closure_bits([0, 5])

  assert {i for i in range(7) if bits >> i & 1} == oracle.closure([0, 5])
