from pathlib import Path

import pytest

from unbalanced.utils import make_usable_path, write_atomically


def test_make_usable_path_creates_parents(tmp_path: Path) -> None:
  path = make_usable_path(tmp_path / "a" / "b" / "file.txt")

  assert path.parent.is_dir()
  assert not path.exists()
  assert path.is_absolute()


def test_make_usable_path_without_mkdir(tmp_path: Path) -> None:
  path = make_usable_path(tmp_path / "missing" / "file.txt", mkdir=False)

  assert not path.parent.exists()


def test_make_usable_path_expands_the_home_directory(
  tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
  monkeypatch.setenv("HOME", str(tmp_path))

  assert make_usable_path("~/file.txt") == (tmp_path / "file.txt").resolve()


def test_write_atomically_replaces_existing_contents(tmp_path: Path) -> None:
  target = tmp_path / "state.bin"
  target.write_bytes(b"old")

  path = write_atomically(target, b"new")

  assert path.read_bytes() == b"new"
  assert sorted(p.name for p in tmp_path.iterdir()) == ["state.bin"]
