"""Filesystem helpers shared by the loaders, dumpers and the enumerator."""

from os import PathLike, replace
from pathlib import Path


def make_usable_path(path: str | PathLike[str], *, mkdir: bool = True) -> Path:
  """Convert path string to resolved Path object.

  Expands user directories (~), resolves to absolute path,
  and optionally creates parent directories.

  Args:
      path: Path to process.
      mkdir: Whether to create parent directories (default: True).

  Returns:
      Resolved absolute Path object.
  """
  final_path = Path(path).expanduser().resolve()
  if mkdir:
    final_path.parent.mkdir(parents=True, exist_ok=True)
  return final_path


def write_atomically(path: str | PathLike[str], data: bytes) -> Path:
  """Write `data` next to `path` and rename it into place.

  A reader never observes a half-written file: either the previous contents or
  the new ones.
  """
  final_path = make_usable_path(path)
  staging = final_path.with_name(final_path.name + ".partial")
  staging.write_bytes(data)
  replace(staging, final_path)
  return final_path
