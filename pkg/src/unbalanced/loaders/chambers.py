"""Readers for chamber files and enumeration checkpoints.

Both readers are strict: any line that does not match the documented layout
is rejected with an error naming the source and the offending line. Chamber
files raise `MalformedInputError`; checkpoints raise `MalformedCheckpointError`
and are verified against their embedded digest before anything in them is
trusted.
"""

from logging import Logger, getLogger
from os import PathLike
from pathlib import Path

from unbalanced.domain.chambers import ChamberSet, EnumerationCheckpoint
from unbalanced.domain.values import MAX_GROUND_SIZE, representative_count
from unbalanced.dumpers.chambers import checkpoint_digest
from unbalanced.errors import (
  CheckpointIntegrityError,
  InputError,
  MalformedCheckpointError,
  MalformedInputError,
)


def _parse_fields(source: str, line: str, prefix: str) -> dict[str, int]:
  words = line.split()
  if not words or words[0] != prefix:
    raise MalformedInputError(source, f"expected a {prefix!r} header, got {line!r}")
  fields: dict[str, int] = {}
  for word in words[1:]:
    name, sep, value = word.partition("=")
    if not sep or not value.isdigit():
      raise MalformedInputError(source, f"bad header field {word!r}")
    fields[name] = int(value)
  return fields


def _check_size(source: str, n: int) -> int:
  if not 1 <= n <= MAX_GROUND_SIZE:
    raise MalformedInputError(source, f"ground-set size n={n} is out of range")
  return n


def _parse_key(source: str, n: int, line: str) -> int:
  if not line.isalnum():
    raise MalformedInputError(source, f"{line!r} is not a hex chamber key")
  try:
    key = int(line, 16)
  except ValueError:
    raise MalformedInputError(source, f"{line!r} is not a hex chamber key") from None
  if line != line.lower() or key >> representative_count(n):
    raise MalformedInputError(source, f"{line!r} is not a chamber key for n={n}")
  return key


class ChamberFileLoader:
  """Parse the chamber file format back into a `ChamberSet`."""

  logger: Logger

  def __init__(self, logger: Logger | None = None) -> None:
    self.logger = logger or getLogger(__name__)

  def loads(self, text: str, source: str = "<string>") -> ChamberSet:
    lines = text.splitlines()
    if not lines:
      raise MalformedInputError(source, "empty chamber file")
    header, _, value = lines[0].partition("=")
    if header != "n" or not value.isdigit():
      raise MalformedInputError(source, f"expected an 'n=<n>' header, got {lines[0]!r}")
    n = _check_size(source, int(value))
    keys = [_parse_key(source, n, line) for line in lines[1:]]
    if keys != sorted(set(keys)):
      raise MalformedInputError(source, "keys are not strictly ascending")
    try:
      return ChamberSet.create(keys, n)
    except InputError as e:
      raise MalformedInputError(source, str(e)) from e

  def load(self, path: str | PathLike[str]) -> ChamberSet:
    final_path = Path(path)
    chambers = self.loads(final_path.read_text(encoding="ascii"), str(final_path))
    self.logger.debug("read %d chambers from %s", chambers.count, final_path)
    return chambers


class CheckpointLoader:
  """Verify and parse an enumeration checkpoint."""

  logger: Logger

  def __init__(self, logger: Logger | None = None) -> None:
    self.logger = logger or getLogger(__name__)

  def loads(self, data: bytes, source: str = "<bytes>") -> EnumerationCheckpoint:
    """Parse checkpoint bytes.

    Raises:
        CheckpointIntegrityError: If the digest line does not match the body.
        MalformedCheckpointError: If the digest line is missing or the body does not
            follow the checkpoint layout.
    """
    marker = data.rfind(b"digest=")
    if marker < 0 or not data.endswith(b"\n"):
      raise MalformedCheckpointError(source, "missing digest line")
    body = data[:marker]
    stored = data[marker + len(b"digest=") : -1].decode("ascii", errors="replace")
    actual = checkpoint_digest(body)
    if stored != actual:
      raise CheckpointIntegrityError(source, stored, actual)
    try:
      return self._parse(body, source)
    except MalformedInputError as e:
      raise MalformedCheckpointError(source, e.reason) from e
    except UnicodeDecodeError as e:
      raise MalformedCheckpointError(source, "body is not ASCII") from e

  def _parse(self, body: bytes, source: str) -> EnumerationCheckpoint:
    lines = body.decode("ascii").splitlines()
    if len(lines) < 3:
      raise MalformedInputError(source, "truncated checkpoint")
    fields = _parse_fields(source, lines[0], "checkpoint")
    for name in ("n", "generation", "visited", "frontier", "lp_calls", "elapsed_ms"):
      if name not in fields:
        raise MalformedInputError(source, f"header is missing {name!r}")
    n = _check_size(source, fields["n"])
    visited_count = fields["visited"]
    frontier_count = fields["frontier"]
    if len(lines) != 3 + visited_count + frontier_count:
      raise MalformedInputError(source, "key counts do not match the header")
    if lines[1] != "visited" or lines[2 + visited_count] != "frontier":
      raise MalformedInputError(source, "missing 'visited' or 'frontier' section marker")
    visited = [_parse_key(source, n, line) for line in lines[2 : 2 + visited_count]]
    frontier = [_parse_key(source, n, line) for line in lines[3 + visited_count :]]
    try:
      state = EnumerationCheckpoint.create(
        n, fields["generation"], visited, frontier, fields["lp_calls"], fields["elapsed_ms"]
      )
    except ValueError as e:
      raise MalformedInputError(source, str(e)) from e
    if len(state.visited) != visited_count or len(state.frontier) != frontier_count:
      raise MalformedInputError(source, "duplicate keys")
    return state

  def load(self, path: str | PathLike[str]) -> EnumerationCheckpoint:
    final_path = Path(path)
    state = self.loads(final_path.read_bytes(), str(final_path))
    self.logger.debug("checkpoint %s verified at generation %d", final_path, state.generation)
    return state
