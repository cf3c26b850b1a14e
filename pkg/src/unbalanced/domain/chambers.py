"""Chamber collections and enumeration checkpoints.

Chambers are stored by packed sign key (see `SignVector.key`). Keys are kept
sorted so that two collections with the same members compare equal and
serialize to the same bytes.
"""

from __future__ import annotations

from bisect import bisect_left
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from unbalanced.domain.families import SignVector
from unbalanced.domain.values import GroundSize, _verify_ground_size, representative_count


def key_width(n: int) -> int:
  """Number of hex digits used to write a chamber key for ground size n."""
  return max(1, (representative_count(n) + 3) // 4)


def format_key(n: int, key: int) -> str:
  """Lowercase, zero-padded hex, most significant digit first."""
  return f"{key:0{key_width(n)}x}"


@dataclass(frozen=True, slots=True, kw_only=True)
class ChamberSet:
  """A deduplicated, sorted collection of chambers for one ground size."""

  n: int
  keys: tuple[int, ...]
  complete: bool = True
  lp_calls: int = 0
  generations: int = 0

  @classmethod
  def create(
    cls,
    keys: Iterable[int],
    n: GroundSize,
    complete: bool = True,
    lp_calls: int = 0,
    generations: int = 0,
  ) -> ChamberSet:
    """Build a chamber set; duplicate keys are dropped and the rest sorted."""
    n = _verify_ground_size(n)
    return ChamberSet(
      n=n,
      keys=tuple(sorted(set(keys))),
      complete=complete,
      lp_calls=lp_calls,
      generations=generations,
    )

  @property
  def count(self) -> int:
    return len(self.keys)

  def sign_vectors(self) -> Iterator[SignVector]:
    """The chambers as sign vectors, in key order."""
    for key in self.keys:
      yield SignVector.from_key(key, self.n)

  def __contains__(self, key: object) -> bool:
    if not isinstance(key, int):
      return False
    index = bisect_left(self.keys, key)
    return index < len(self.keys) and self.keys[index] == key

  def __len__(self) -> int:
    return len(self.keys)


@dataclass(frozen=True, slots=True, kw_only=True)
class EnumerationCheckpoint:
  """Restartable state of a breadth-first chamber enumeration.

  The frontier is the set of chambers discovered in the last completed
  generation and not yet expanded; it is always a subset of `visited`.
  """

  n: int
  generation: int
  visited: tuple[int, ...]
  frontier: tuple[int, ...]
  lp_calls: int = 0
  elapsed_ms: int = 0

  @classmethod
  def create(
    cls,
    n: GroundSize,
    generation: int,
    visited: Iterable[int],
    frontier: Iterable[int],
    lp_calls: int = 0,
    elapsed_ms: int = 0,
  ) -> EnumerationCheckpoint:
    n = _verify_ground_size(n, low=2)
    owned_visited = tuple(sorted(set(visited)))
    owned_frontier = tuple(sorted(set(frontier)))
    if not set(owned_frontier) <= set(owned_visited):
      raise ValueError("checkpoint frontier must be a subset of the visited set")
    return EnumerationCheckpoint(
      n=n,
      generation=generation,
      visited=owned_visited,
      frontier=owned_frontier,
      lp_calls=lp_calls,
      elapsed_ms=elapsed_ms,
    )


@dataclass(frozen=True, slots=True, kw_only=True)
class ChamberCount:
  """Summary of an enumeration run, as reported by the `count` command."""

  n: int
  count: int
  complete: bool
  lp_calls: int
  generations: int

  @classmethod
  def from_chambers(cls, chambers: ChamberSet) -> ChamberCount:
    return ChamberCount(
      n=chambers.n,
      count=chambers.count,
      complete=chambers.complete,
      lp_calls=chambers.lp_calls,
      generations=chambers.generations,
    )
