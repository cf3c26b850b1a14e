"""Writers for chamber files, signature tables and enumeration checkpoints.

All three formats are line-oriented ASCII with ``\\n`` line endings and sorted
contents, so equal inputs always produce byte-identical files.

Chamber file::

    n=<n>
    <key>            one lowercase hex key per line, zero-padded, ascending

Checkpoint file::

    checkpoint n=<n> generation=<g> visited=<v> frontier=<f> lp_calls=<c> elapsed_ms=<t>
    visited
    <key>...
    frontier
    <key>...
    digest=<16 hex digits>

The digest is the 64-bit BLAKE2b digest of every byte before the digest line.
"""

from hashlib import blake2b
from logging import Logger, getLogger
from os import PathLike
from pathlib import Path

from unbalanced.domain.chambers import ChamberSet, EnumerationCheckpoint, format_key
from unbalanced.utils import make_usable_path, write_atomically

CHECKPOINT_DIGEST_SIZE = 8


def checkpoint_digest(data: bytes) -> str:
  """Hex digest embedded at the end of a checkpoint."""
  return blake2b(data, digest_size=CHECKPOINT_DIGEST_SIZE).hexdigest()


class ChamberFileDumper:
  """Serialize a `ChamberSet` to the chamber file format."""

  logger: Logger

  def __init__(self, logger: Logger | None = None) -> None:
    self.logger = logger or getLogger(__name__)

  def dumps(self, chambers: ChamberSet) -> str:
    lines = [f"n={chambers.n}"]
    lines.extend(format_key(chambers.n, key) for key in chambers.keys)
    return "\n".join(lines) + "\n"

  def dump(self, chambers: ChamberSet, path: str | PathLike[str]) -> Path:
    final_path = make_usable_path(path)
    final_path.write_text(self.dumps(chambers), encoding="ascii", newline="\n")
    self.logger.debug("wrote %d chambers to %s", chambers.count, final_path)
    return final_path


class SignatureCsvDumper:
  """Write one signature per line, comma-separated, in lexicographic order."""

  logger: Logger

  def __init__(self, logger: Logger | None = None) -> None:
    self.logger = logger or getLogger(__name__)

  def dumps(self, signatures: list[tuple[int, ...]]) -> str:
    return "".join(",".join(str(x) for x in row) + "\n" for row in sorted(signatures))

  def dump(self, signatures: list[tuple[int, ...]], path: str | PathLike[str]) -> Path:
    final_path = make_usable_path(path)
    final_path.write_text(self.dumps(signatures), encoding="ascii", newline="\n")
    return final_path


class CheckpointDumper:
  """Write an `EnumerationCheckpoint` with its trailing integrity digest."""

  logger: Logger

  def __init__(self, logger: Logger | None = None) -> None:
    self.logger = logger or getLogger(__name__)

  def dumps(self, state: EnumerationCheckpoint) -> bytes:
    n = state.n
    lines = [
      f"checkpoint n={n} generation={state.generation} visited={len(state.visited)}"
      f" frontier={len(state.frontier)} lp_calls={state.lp_calls} elapsed_ms={state.elapsed_ms}",
      "visited",
      *(format_key(n, key) for key in state.visited),
      "frontier",
      *(format_key(n, key) for key in state.frontier),
    ]
    body = ("\n".join(lines) + "\n").encode("ascii")
    return body + f"digest={checkpoint_digest(body)}\n".encode("ascii")

  def dump(self, state: EnumerationCheckpoint, path: str | PathLike[str]) -> Path:
    final_path = write_atomically(path, self.dumps(state))
    self.logger.debug(
      "checkpoint n=%d generation %d written to %s", state.n, state.generation, final_path
    )
    return final_path
