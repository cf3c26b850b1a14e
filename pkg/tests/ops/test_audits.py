import pytest

from unbalanced.domain.chambers import ChamberSet
from unbalanced.errors import GroundSizeError, SignatureCollisionError
from unbalanced.ops.audits import (
  bipartite_audit,
  chamber_adjacency_audit,
  is_facet_adjacent,
  one_swap_edges,
  parity_audit,
  selection_space_audit,
  signature_matrix,
  signature_step_audit,
  signature_uniqueness_audit,
)
from unbalanced.ops.enumerate import enumerate_chambers
from unbalanced.ops.families import signature_of_key


@pytest.fixture(scope="module")
def chambers_by_n() -> dict[int, ChamberSet]:
  return {n: enumerate_chambers(n) for n in (2, 3, 4, 5)}


@pytest.fixture(scope="module")
def chambers_at_six() -> ChamberSet:
  return enumerate_chambers(6, workers=4)


def test_signature_matrix_matches_per_key_signatures() -> None:
  keys = list(range(1 << 7))

  rows = signature_matrix(4, keys).tolist()

  assert rows == [list(signature_of_key(4, key)) for key in keys]


def test_one_swap_edges_at_three_form_a_hexagon(chambers_by_n: dict[int, ChamberSet]) -> None:
  edges = list(one_swap_edges(chambers_by_n[3]))

  assert len(edges) == 6
  assert all(low < high and low ^ high == 1 << (m - 1) for low, m, high in edges)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_parity_holds_from_three_on(n: int, chambers_by_n: dict[int, ChamberSet]) -> None:
  report = parity_audit(chambers_by_n[n])

  assert report.passed
  assert report.even + report.odd == chambers_by_n[n].count


def test_parity_at_two_is_recorded_not_raised(chambers_by_n: dict[int, ChamberSet]) -> None:
  report = parity_audit(chambers_by_n[2])

  assert not report.passed
  assert len(report.mixed) == 2


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_one_swap_graph_is_bipartite(n: int, chambers_by_n: dict[int, ChamberSet]) -> None:
  report = bipartite_audit(chambers_by_n[n])

  assert report.bipartite
  assert sum(report.color_sizes) == chambers_by_n[n].count


@pytest.mark.parametrize("n", [3, 4, 5])
def test_colors_are_parity_classes(n: int, chambers_by_n: dict[int, ChamberSet]) -> None:
  assert bipartite_audit(chambers_by_n[n]).matches_parity


def test_single_hyperplane_pair_is_facet_adjacent() -> None:
  assert is_facet_adjacent(2, 0, 1)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_every_one_swap_pair_is_facet_adjacent(n: int, chambers_by_n: dict[int, ChamberSet]) -> None:
  report = chamber_adjacency_audit(chambers_by_n[n])

  assert report.discrepancies == ()
  assert report.facet_adjacent == report.edges


def test_adjacency_audit_is_limited_to_five() -> None:
  with pytest.raises(GroundSizeError):
    chamber_adjacency_audit(ChamberSet.create([], 6))


@pytest.mark.parametrize(("n", "distinct"), [(3, 6), (4, 32), (5, 370)])
def test_signatures_are_unique(n: int, distinct: int, chambers_by_n: dict[int, ChamberSet]) -> None:
  assert signature_uniqueness_audit(chambers_by_n[n]).distinct == distinct


@pytest.mark.slow
def test_signatures_are_unique_at_six(chambers_at_six: ChamberSet) -> None:
  assert signature_uniqueness_audit(chambers_at_six).distinct == 11292


@pytest.mark.slow
def test_parity_holds_at_six(chambers_at_six: ChamberSet) -> None:
  report = parity_audit(chambers_at_six)

  assert report.passed
  assert report.even + report.odd == 11292


def test_signature_collision_names_both_chambers() -> None:
  # balanced selections may share a signature; the audit only sees keys
  by_signature: dict[tuple[int, ...], list[int]] = {}
  for key in range(1 << 7):
    by_signature.setdefault(signature_of_key(4, key), []).append(key)
  pair = next(keys[:2] for keys in by_signature.values() if len(keys) > 1)

  with pytest.raises(SignatureCollisionError, match="share the signature"):
    signature_uniqueness_audit(ChamberSet.create(pair, 4))


def test_selection_space_at_two_is_all_unbalanced() -> None:
  report = selection_space_audit(2)

  assert (report.selections, report.unbalanced, report.balanced) == (2, 2, 0)
  assert not report.strict


def test_selection_space_at_three() -> None:
  report = selection_space_audit(3)

  assert (report.selections, report.unbalanced, report.balanced) == (8, 6, 2)
  assert report.disjoint
  assert report.strict


def test_selection_space_at_four() -> None:
  report = selection_space_audit(4)

  assert (report.selections, report.unbalanced, report.balanced) == (128, 32, 96)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_adjacent_signatures_differ_by_the_gained_swap_vector(
  n: int, chambers_by_n: dict[int, ChamberSet]
) -> None:
  report = signature_step_audit(chambers_by_n[n])

  assert report.passed
  assert report.edges == len(list(one_swap_edges(chambers_by_n[n])))
