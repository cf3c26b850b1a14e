"""Chamber enumeration over the one-swap graph.

Chambers are maximal unbalanced families, encoded by packed sign keys. Two
chambers are adjacent when their keys differ in one bit. The search is a
level-synchronous breadth-first search from `seed_chamber`:

1. every key one flip away from the frontier and not yet visited becomes a
   candidate (each candidate is tested once per generation, whichever frontier
   chamber reached it);
2. candidates are classified by the disjoint-union prefilter and then by the
   margin program, in parallel when more than one worker is requested;
3. the unbalanced candidates form the next frontier.

Candidates are processed in sorted order and merged in that order, so the
visited set after each generation does not depend on the worker count. A
checkpoint can be written at every generation boundary and resumed from.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from logging import Logger, getLogger
from os import PathLike
from pathlib import Path
from time import monotonic

from unbalanced.domain.chambers import ChamberSet, EnumerationCheckpoint
from unbalanced.domain.families import SignVector, Signature
from unbalanced.domain.values import (
  GroundSize,
  Mask,
  _verify_ground_size,
  full_mask,
  representative_count,
)
from unbalanced.dumpers.chambers import CheckpointDumper
from unbalanced.errors import CheckpointMismatchError, GroundSizeError, InputError
from unbalanced.kernel.lp import LpProblem, lp_optimal_margin
from unbalanced.loaders.chambers import CheckpointLoader
from unbalanced.ops.certify import chamber_rows, find_flip_conflict, key_is_unbalanced
from unbalanced.ops.families import selection_masks, signature_of_key

MAX_ENUMERATION_SIZE = 8
MAX_BRUTE_FORCE_SIZE = 5

# (candidate key, parent key, flipped representative)
type Candidate = tuple[int, int, Mask]


def seed_chamber(n: GroundSize) -> SignVector:
  """The chamber of all nonempty subsets of [n] that avoid element 1.

  Representative m is kept exactly when it avoids element 1; otherwise its
  complement, which avoids 1, is taken instead.

  Raises:
      GroundSizeError: If n < 2; there are no chambers for n = 1.
  """
  n = _verify_ground_size(n, low=2)
  key = 0
  for m in range(1, representative_count(n) + 1):
    if not m & 1:
      key |= 1 << (m - 1)
  return SignVector.from_key(key, n)


def _flip_is_unbalanced(n: int, parent: int, m: Mask) -> tuple[bool, bool]:
  """Classify the chamber candidate ``parent ^ bit(m)``.

  `parent` must encode an unbalanced selection. Returns the verdict and
  whether a linear program was needed to reach it.
  """
  candidate = parent ^ 1 << (m - 1)
  full = full_mask(n)
  if candidate >> (m - 1) & 1:
    added, removed = m, full ^ m
  else:
    added, removed = full ^ m, m
  present = set(selection_masks(n, candidate))
  if find_flip_conflict(n, present, added, removed):
    return False, False
  return lp_optimal_margin(LpProblem.create(chamber_rows(n, candidate))) > 0, True


def _classify_batch(n: int, batch: Sequence[Candidate]) -> list[tuple[bool, bool]]:
  return [_flip_is_unbalanced(n, parent, m) for _, parent, m in batch]


def feasible_neighbors(sign_vector: SignVector) -> list[tuple[Mask, SignVector]]:
  """All chambers one flip away from an unbalanced `sign_vector`.

  Returns ``(m, neighbor)`` pairs in increasing order of the flipped
  representative m.
  """
  n = sign_vector.n
  key = sign_vector.key
  found: list[tuple[Mask, SignVector]] = []
  for m in range(1, representative_count(n) + 1):
    feasible, _ = _flip_is_unbalanced(n, key, m)
    if feasible:
      found.append((m, sign_vector.flip(m)))
  return found


def neighbor_keys(n: int, key: int) -> list[int]:
  """Keys of the chambers one flip away from chamber `key`, ascending."""
  found = []
  for m in range(1, representative_count(n) + 1):
    if _flip_is_unbalanced(n, key, m)[0]:
      found.append(key ^ 1 << (m - 1))
  return sorted(found)


@dataclass(frozen=True, slots=True, kw_only=True)
class EnumerationOptions:
  """How an enumeration runs: parallelism, checkpointing and stopping limits.

  A run that hits `max_chambers` or `time_budget` stops at the next generation
  boundary and returns an incomplete `ChamberSet`. If a checkpoint path is set,
  the state at that boundary is written there and can be resumed. The time
  budget is measured from the start of each run, resumed or not.
  """

  workers: int = 1
  checkpoint: Path | None = None
  resume: bool = False
  max_chambers: int | None = None
  time_budget: float | None = None

  @classmethod
  def create(
    cls,
    workers: int = 1,
    checkpoint: str | PathLike[str] | None = None,
    resume: bool = False,
    max_chambers: int | None = None,
    time_budget: float | None = None,
  ) -> EnumerationOptions:
    """Validate user-facing values.

    Raises:
        InputError: On a non-positive worker count or limit, or `resume`
            without a checkpoint path.
    """
    if workers < 1:
      raise InputError(f"worker count must be positive, got {workers}")
    if resume and checkpoint is None:
      raise InputError("resuming requires a checkpoint path")
    if max_chambers is not None and max_chambers < 1:
      raise InputError(f"chamber limit must be positive, got {max_chambers}")
    if time_budget is not None and time_budget <= 0:
      raise InputError(f"time budget must be positive, got {time_budget}")
    return EnumerationOptions(
      workers=workers,
      checkpoint=None if checkpoint is None else Path(checkpoint),
      resume=resume,
      max_chambers=max_chambers,
      time_budget=time_budget,
    )


class ChamberEnumerator:
  """Breadth-first enumeration of all chambers for one ground size."""

  logger: Logger
  n: int
  options: EnumerationOptions

  __slots__ = ("logger", "n", "options")

  def __init__(
    self, n: GroundSize, options: EnumerationOptions | None = None, logger: Logger | None = None
  ) -> None:
    self.logger = logger or getLogger(__name__)
    self.n = _verify_ground_size(n, high=MAX_ENUMERATION_SIZE)
    self.options = options or EnumerationOptions()

  def _initial_state(self) -> EnumerationCheckpoint:
    if self.options.resume and self.options.checkpoint is not None:
      state = CheckpointLoader(logger=self.logger).load(self.options.checkpoint)
      if state.n != self.n:
        raise CheckpointMismatchError(str(self.options.checkpoint), self.n, state.n)
      self.logger.info(
        "resuming n=%d at generation %d with %d visited", self.n, state.generation, len(state.visited)
      )
      return state
    seed = seed_chamber(self.n).key
    return EnumerationCheckpoint.create(self.n, 0, [seed], [seed])

  def _save(self, state: EnumerationCheckpoint) -> None:
    if self.options.checkpoint is None:
      return
    CheckpointDumper(logger=self.logger).dump(state, self.options.checkpoint)

  def _candidates(self, frontier: Iterable[int], visited: set[int], rejected: set[int]) -> list[Candidate]:
    best: dict[int, Candidate] = {}
    count = representative_count(self.n)
    for parent in frontier:
      for m in range(1, count + 1):
        candidate = parent ^ 1 << (m - 1)
        if candidate in visited or candidate in rejected or candidate in best:
          continue
        best[candidate] = (candidate, parent, m)
    return [best[key] for key in sorted(best)]

  def _classify(self, executor: Executor | None, candidates: list[Candidate]) -> Iterator[tuple[bool, bool]]:
    if executor is None or len(candidates) < 2:
      yield from _classify_batch(self.n, candidates)
      return
    size = max(1, len(candidates) // (self.options.workers * 4))
    batches = [candidates[i : i + size] for i in range(0, len(candidates), size)]
    for results in executor.map(_classify_batch, [self.n] * len(batches), batches):
      yield from results

  def run(self) -> ChamberSet:
    """Enumerate the chambers, honoring the configured limits.

    Raises:
        CheckpointIntegrityError: If a resumed checkpoint fails its digest check.
        MalformedCheckpointError: If a resumed checkpoint is truncated or malformed.
        CheckpointMismatchError: If a resumed checkpoint was written for another n.
    """
    if self.n == 1:
      return ChamberSet.create([], 1)
    state = self._initial_state()
    visited = set(state.visited)
    frontier = list(state.frontier)
    generation = state.generation
    lp_calls = state.lp_calls
    rejected: set[int] = set()
    # the time budget covers this run only; elapsed_ms accumulates across resumes
    run_started = monotonic()
    expanded = 0

    def elapsed_ms() -> int:
      return state.elapsed_ms + int((monotonic() - run_started) * 1000)

    executor = ProcessPoolExecutor(self.options.workers) if self.options.workers > 1 else None
    try:
      while frontier:
        if self._limit_reached(len(visited), run_started, expanded):
          checkpoint = EnumerationCheckpoint.create(
            self.n, generation, visited, frontier, lp_calls, elapsed_ms()
          )
          self._save(checkpoint)
          self.logger.warning(
            "stopped n=%d at generation %d with %d chambers", self.n, generation, len(visited)
          )
          return ChamberSet.create(visited, self.n, False, lp_calls, generation)

        candidates = self._candidates(frontier, visited, rejected)
        next_frontier: list[int] = []
        for (candidate, _, _), (feasible, used_lp) in zip(
          candidates, self._classify(executor, candidates), strict=True
        ):
          lp_calls += used_lp
          if feasible:
            next_frontier.append(candidate)
          else:
            rejected.add(candidate)
        visited.update(next_frontier)
        frontier = next_frontier
        generation += 1
        expanded += 1
        self.logger.info(
          "n=%d generation %d: frontier %d, visited %d, lp calls %d",
          self.n,
          generation,
          len(frontier),
          len(visited),
          lp_calls,
        )
        self._save(
          EnumerationCheckpoint.create(
            self.n, generation, visited, frontier, lp_calls, elapsed_ms()
          )
        )
    finally:
      if executor is not None:
        executor.shutdown()
    return ChamberSet.create(visited, self.n, True, lp_calls, generation)

  def _limit_reached(self, visited: int, run_started: float, expanded: int) -> bool:
    """Whether to stop before the next generation.

    The time budget is only consulted once this run has expanded a generation,
    so every resumed run makes progress.
    """
    limit = self.options.max_chambers
    if limit is not None and visited >= limit:
      return True
    budget = self.options.time_budget
    return budget is not None and expanded > 0 and monotonic() - run_started >= budget


def enumerate_chambers(
  n: GroundSize,
  workers: int = 1,
  options: EnumerationOptions | None = None,
  logger: Logger | None = None,
) -> ChamberSet:
  """All chambers for ground size n, as a sorted `ChamberSet`.

  n = 1 gives the empty set. `workers` is ignored when `options` is given.

  Raises:
      GroundSizeError: If n is outside 1..8.
  """
  if options is None:
    options = EnumerationOptions.create(workers=workers)
  return ChamberEnumerator(n, options, logger).run()


def brute_force_chambers(n: GroundSize) -> ChamberSet:
  """Certify every selection for n <= 5 and keep the unbalanced ones."""
  n = _verify_ground_size(n, high=MAX_BRUTE_FORCE_SIZE)
  if n == 1:
    return ChamberSet.create([], 1)
  count = representative_count(n)
  keys = [key for key in range(1 << count) if key_is_unbalanced(n, key)]
  return ChamberSet.create(keys, n, True)


def all_selection_keys(n: int) -> range:
  """Keys of every selection for ground size n, unbalanced or not."""
  if n < 2:
    raise GroundSizeError(n, 2, MAX_BRUTE_FORCE_SIZE)
  return range(1 << representative_count(n))


def signature_index(chambers: ChamberSet) -> dict[Signature, SignVector]:
  """Map each chamber's signature back to the chamber.

  Signatures are one-to-one on chambers, so no entry is overwritten; a
  collision is reported by `signature_uniqueness_audit`.
  """
  return {
    Signature.create(signature_of_key(chambers.n, key), chambers.n): SignVector.from_key(key, chambers.n)
    for key in chambers.keys
  }


def chamber_from_signature(chambers: ChamberSet, signature: Signature | Sequence[int]) -> SignVector | None:
  """The chamber with the given signature, or `None` if no chamber has it.

  Raises:
      InvalidSignatureError: If a plain sequence has the wrong length or an entry out of range.
  """
  if not isinstance(signature, Signature):
    signature = Signature.create(signature, chambers.n)
  return signature_index(chambers).get(signature)

