"""Audits of the chamber collection.

Each audit returns a frozen report. Audits whose property is a theorem raise
an `AuditError` subclass on violation; audits whose outcome is only recorded
(the two-element parity case, facet adjacency of one-swap pairs) report the
exceptions instead of raising.
"""

from collections import deque
from collections.abc import Iterator
from dataclasses import dataclass
from logging import getLogger

import numpy as np
import numpy.typing as npt

from unbalanced.domain.chambers import ChamberSet
from unbalanced.domain.values import Sense, _verify_ground_size, full_mask, representative_count
from unbalanced.errors import (
  AuditError,
  ParityViolationError,
  SelectionSignatureOverlapError,
  SignatureCollisionError,
)
from unbalanced.kernel.lp import LpProblem, lp_optimal_margin
from unbalanced.ops.certify import chamber_rows, key_is_unbalanced
from unbalanced.ops.enumerate import MAX_BRUTE_FORCE_SIZE, all_selection_keys

logger = getLogger(__name__)

MAX_ADJACENCY_SIZE = 5

# (smaller key, flipped representative, larger key)
type Edge = tuple[int, int, int]


def one_swap_edges(chambers: ChamberSet) -> Iterator[Edge]:
  """Pairs of chambers whose keys differ in exactly one representative."""
  present = set(chambers.keys)
  for key in chambers.keys:
    for m in range(1, representative_count(chambers.n) + 1):
      other = key ^ 1 << (m - 1)
      if other > key and other in present:
        yield key, m, other


def _key_bits(n: int, keys: list[int] | tuple[int, ...]) -> npt.NDArray[np.int64]:
  count = representative_count(n)
  if count <= 62:
    packed = np.array(keys, dtype=np.int64).reshape(-1, 1)
    return (packed >> np.arange(count, dtype=np.int64)) & 1
  return np.array([[key >> i & 1 for i in range(count)] for key in keys], dtype=np.int64).reshape(
    -1, count
  )


def signature_matrix(n: int, keys: list[int] | tuple[int, ...]) -> npt.NDArray[np.int64]:
  """Signatures of many selections at once, one row per key.

  Row k is ``b @ R + (1 - b) @ C`` where b holds the key's bits, R the
  representatives' characteristic vectors and C their complements'.
  """
  representatives = np.array(
    [[m >> i & 1 for i in range(n)] for m in range(1, representative_count(n) + 1)], dtype=np.int64
  ).reshape(-1, n)
  bits = _key_bits(n, keys)
  return bits @ representatives + (1 - bits) @ (1 - representatives)


@dataclass(frozen=True, slots=True, kw_only=True)
class ParityReport:
  n: int
  even: int
  odd: int
  mixed: tuple[int, ...]

  @property
  def passed(self) -> bool:
    return not self.mixed


def parity_audit(chambers: ChamberSet) -> ParityReport:
  """Check that every chamber signature is all even or all odd.

  For n = 2 the outcome is only recorded: both chambers there have a signature
  mixing 0 and 1.

  Raises:
      ParityViolationError: For n >= 3, naming the first offending chamber.
  """
  n = chambers.n
  if not chambers.keys:
    return ParityReport(n=n, even=0, odd=0, mixed=())
  parities = signature_matrix(n, chambers.keys) % 2
  all_even = ~parities.any(axis=1)
  all_odd = parities.all(axis=1)
  mixed = tuple(key for key, bad in zip(chambers.keys, ~(all_even | all_odd)) if bad)
  if mixed and n >= 3:
    raise ParityViolationError(mixed[0], signature_matrix(n, [mixed[0]])[0].tolist())
  if mixed:
    logger.info("n=%d: %d chambers have mixed-parity signatures", n, len(mixed))
  return ParityReport(n=n, even=int(all_even.sum()), odd=int(all_odd.sum()), mixed=mixed)


@dataclass(frozen=True, slots=True, kw_only=True)
class BipartiteReport:
  n: int
  bipartite: bool
  edges: int
  color_sizes: tuple[int, int]
  matches_parity: bool


def bipartite_audit(chambers: ChamberSet) -> BipartiteReport:
  """Two-color the one-swap graph and compare the colors with signature parity.

  The graph is colored by breadth-first search from each uncolored chamber.
  `matches_parity` holds when every chamber's color agrees with whether its
  signature is all even (up to swapping the two colors).
  """
  n = chambers.n
  neighbors: dict[int, list[int]] = {key: [] for key in chambers.keys}
  edges = 0
  for low, _, high in one_swap_edges(chambers):
    neighbors[low].append(high)
    neighbors[high].append(low)
    edges += 1

  color: dict[int, int] = {}
  bipartite = True
  for start in chambers.keys:
    if start in color:
      continue
    color[start] = 0
    queue = deque([start])
    while queue:
      key = queue.popleft()
      for other in neighbors[key]:
        if other not in color:
          color[other] = 1 - color[key]
          queue.append(other)
        elif color[other] == color[key]:
          bipartite = False

  sizes = (sum(1 for c in color.values() if c == 0), sum(1 for c in color.values() if c == 1))
  matches_parity = True
  if chambers.keys:
    even = ~(signature_matrix(n, chambers.keys) % 2).any(axis=1)
    agreement = {(color[key], bool(flag)) for key, flag in zip(chambers.keys, even)}
    matches_parity = agreement <= {(0, True), (1, False)} or agreement <= {(0, False), (1, True)}
  return BipartiteReport(
    n=n, bipartite=bipartite, edges=edges, color_sizes=sizes, matches_parity=matches_parity
  )


@dataclass(frozen=True, slots=True, kw_only=True)
class AdjacencyReport:
  n: int
  edges: int
  facet_adjacent: int
  discrepancies: tuple[Edge, ...]


def is_facet_adjacent(n: int, key: int, m: int) -> bool:
  """Whether the chamber `key` has a facet on the hyperplane of representative m.

  The hyperplane row becomes an equality, every other row keeps its sign in
  the chamber, and the facet exists exactly when the remaining margin is
  positive.
  """
  rows = chamber_rows(n, key)
  senses = [Sense.ZERO if i == m - 1 else Sense.MARGIN for i in range(len(rows))]
  if len(rows) == 1:
    return True
  return lp_optimal_margin(LpProblem.create(rows, senses)) > 0


def chamber_adjacency_audit(chambers: ChamberSet) -> AdjacencyReport:
  """Check that every one-swap pair of chambers shares a facet.

  Pairs that do not are recorded in `discrepancies`, never raised.

  Raises:
      GroundSizeError: For n > 5.
  """
  n = _verify_ground_size(chambers.n, high=MAX_ADJACENCY_SIZE)
  edges = 0
  discrepancies: list[Edge] = []
  for edge in one_swap_edges(chambers):
    edges += 1
    if not is_facet_adjacent(n, edge[0], edge[1]):
      discrepancies.append(edge)
  if discrepancies:
    logger.warning("n=%d: %d one-swap pairs are not facet-adjacent", n, len(discrepancies))
  return AdjacencyReport(
    n=n, edges=edges, facet_adjacent=edges - len(discrepancies), discrepancies=tuple(discrepancies)
  )


@dataclass(frozen=True, slots=True, kw_only=True)
class UniquenessReport:
  n: int
  chambers: int
  distinct: int


def _first_collision(
  keys: tuple[int, ...] | list[int], matrix: npt.NDArray[np.int64]
) -> tuple[int, int, list[int]] | None:
  _, first_index, inverse = np.unique(matrix, axis=0, return_index=True, return_inverse=True)
  inverse = inverse.reshape(-1)
  for row, group in enumerate(inverse):
    owner = int(first_index[group])
    if owner != row:
      return keys[owner], keys[row], matrix[row].tolist()
  return None


def signature_uniqueness_audit(chambers: ChamberSet) -> UniquenessReport:
  """Check that no two chambers share a signature.

  Raises:
      SignatureCollisionError: Naming both chambers of the first collision.
  """
  n = chambers.n
  if not chambers.keys:
    return UniquenessReport(n=n, chambers=0, distinct=0)
  matrix = signature_matrix(n, chambers.keys)
  collision = _first_collision(chambers.keys, matrix)
  if collision is not None:
    raise SignatureCollisionError(*collision)
  return UniquenessReport(n=n, chambers=chambers.count, distinct=chambers.count)


@dataclass(frozen=True, slots=True, kw_only=True)
class SelectionSpaceReport:
  n: int
  selections: int
  unbalanced: int
  balanced: int
  disjoint: bool
  strict: bool


def selection_space_audit(n: int) -> SelectionSpaceReport:
  """Certify every selection and compare the signatures of the two verdicts.

  Raises:
      SelectionSignatureOverlapError: If a balanced selection has the
          signature of an unbalanced one.
      AuditError: If, for n >= 3, every selection is unbalanced.
  """
  n = _verify_ground_size(n, low=2, high=MAX_BRUTE_FORCE_SIZE)
  keys = list(all_selection_keys(n))
  verdicts = [key_is_unbalanced(n, key) for key in keys]
  unbalanced = [key for key, ok in zip(keys, verdicts) if ok]
  balanced = [key for key, ok in zip(keys, verdicts) if not ok]
  lookup: dict[tuple[int, ...], int] = {}
  if unbalanced:
    for key, row in zip(unbalanced, signature_matrix(n, unbalanced).tolist()):
      lookup[tuple(row)] = key
  if balanced:
    for key, row in zip(balanced, signature_matrix(n, balanced).tolist()):
      twin = lookup.get(tuple(row))
      if twin is not None:
        raise SelectionSignatureOverlapError(key, twin, row)
  strict = bool(balanced)
  if n >= 3 and not strict:
    raise AuditError(f"n={n}: every selection is unbalanced")
  return SelectionSpaceReport(
    n=n,
    selections=len(keys),
    unbalanced=len(unbalanced),
    balanced=len(balanced),
    disjoint=True,
    strict=strict,
  )


@dataclass(frozen=True, slots=True, kw_only=True)
class StepReport:
  n: int
  edges: int
  mismatches: tuple[Edge, ...]

  @property
  def passed(self) -> bool:
    return not self.mismatches


def signature_step_audit(chambers: ChamberSet) -> StepReport:
  """Check ``sig(G) - sig(F) = swap(new member)`` across every one-swap edge.

  For the edge (F, m, G) with F the smaller key, the member that G gains is
  representative m when G selects it and its complement otherwise.
  """
  n = chambers.n
  full = full_mask(n)
  if not chambers.keys:
    return StepReport(n=n, edges=0, mismatches=())
  index = {key: i for i, key in enumerate(chambers.keys)}
  matrix = signature_matrix(n, chambers.keys)
  edges = 0
  mismatches: list[Edge] = []
  for edge in one_swap_edges(chambers):
    low, m, high = edge
    edges += 1
    gained = m if high >> (m - 1) & 1 else full ^ m
    swap = np.array([1 if gained >> i & 1 else -1 for i in range(n)], dtype=np.int64)
    if not np.array_equal(matrix[index[high]] - matrix[index[low]], swap):
      mismatches.append(edge)
  return StepReport(n=n, edges=edges, mismatches=tuple(mismatches))
