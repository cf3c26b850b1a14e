from pathlib import Path

import pytest

from unbalanced.domain.chambers import ChamberSet, EnumerationCheckpoint
from unbalanced.dumpers.chambers import CheckpointDumper, checkpoint_digest
from unbalanced.errors import (
  CheckpointIntegrityError,
  InputError,
  MalformedCheckpointError,
  MalformedInputError,
)
from unbalanced.loaders.chambers import ChamberFileLoader, CheckpointLoader


def test_chamber_file_loader_reads_keys() -> None:
  chambers = ChamberFileLoader().loads("n=3\n1\n2\n5\n")

  assert chambers == ChamberSet.create([1, 2, 5], 3)


def test_chamber_file_loader_reads_padded_keys() -> None:
  chambers = ChamberFileLoader().loads("n=5\n00ab\n0100\n")

  assert chambers.keys == (0xAB, 0x100)


def test_chamber_file_loader_reads_an_empty_set() -> None:
  chambers = ChamberFileLoader().loads("n=1\n")

  assert chambers.count == 0
  assert chambers.n == 1


def test_chamber_file_loader_reads_from_disk(tmp_path: Path) -> None:
  path = tmp_path / "chambers.txt"
  path.write_text("n=2\n0\n1\n", encoding="ascii")

  assert ChamberFileLoader().load(path).keys == (0, 1)


@pytest.mark.parametrize(
  ("text", "match"),
  [
    ("", "empty chamber file"),
    ("3\n1\n", "'n=<n>' header"),
    ("n=x\n", "'n=<n>' header"),
    ("n=17\n", "out of range"),
    ("n=0\n", "out of range"),
    ("n=3\nzz\n", "not a hex chamber key"),
    ("n=3\n-1\n", "not a hex chamber key"),
    ("n=3\n8\n", "not a chamber key for n=3"),
    ("n=5\n00AB\n", "not a chamber key for n=5"),
    ("n=3\n2\n1\n", "strictly ascending"),
    ("n=3\n1\n1\n", "strictly ascending"),
  ],
)
def test_chamber_file_loader_rejects_malformed_text(text: str, match: str) -> None:
  with pytest.raises(MalformedInputError, match=match):
    ChamberFileLoader().loads(text, "chambers.txt")


def test_chamber_file_loader_names_the_source() -> None:
  with pytest.raises(MalformedInputError) as excinfo:
    ChamberFileLoader().loads("", "somewhere.txt")

  assert excinfo.value.source == "somewhere.txt"


def make_checkpoint() -> EnumerationCheckpoint:
  return EnumerationCheckpoint.create(4, 2, [0x24, 0x25, 0x2C, 0x0C], [0x25, 0x2C], 9, 15)


def test_checkpoint_loader_reads_what_the_dumper_writes() -> None:
  state = make_checkpoint()

  assert CheckpointLoader().loads(CheckpointDumper().dumps(state)) == state


def test_checkpoint_loader_reads_from_disk(tmp_path: Path) -> None:
  state = make_checkpoint()
  path = CheckpointDumper().dump(state, tmp_path / "run.ckpt")

  assert CheckpointLoader().load(path) == state


def test_checkpoint_loader_detects_a_changed_byte() -> None:
  data = bytearray(CheckpointDumper().dumps(make_checkpoint()))
  data[data.index(b"visited\n") + len(b"visited\n")] ^= 0x01

  with pytest.raises(CheckpointIntegrityError, match="is corrupt"):
    CheckpointLoader().loads(bytes(data), "run.ckpt")


def test_checkpoint_loader_detects_a_truncated_file() -> None:
  data = CheckpointDumper().dumps(make_checkpoint())

  with pytest.raises(MalformedCheckpointError, match="missing digest line"):
    CheckpointLoader().loads(data[: data.rfind(b"digest=")])


def test_checkpoint_loader_checks_the_header_counts() -> None:
  body = b"checkpoint n=4 generation=1 visited=2 frontier=1 lp_calls=0 elapsed_ms=0\nvisited\n24\nfrontier\n24\n"
  data = body + f"digest={checkpoint_digest(body)}\n".encode("ascii")

  with pytest.raises(MalformedCheckpointError, match="do not match the header"):
    CheckpointLoader().loads(data)


def test_checkpoint_loader_rejects_a_frontier_outside_visited() -> None:
  body = b"checkpoint n=4 generation=1 visited=1 frontier=1 lp_calls=0 elapsed_ms=0\nvisited\n24\nfrontier\n25\n"
  data = body + f"digest={checkpoint_digest(body)}\n".encode("ascii")

  with pytest.raises(MalformedCheckpointError, match="subset of the visited set"):
    CheckpointLoader().loads(data)


def test_checkpoint_loader_requires_every_header_field() -> None:
  body = b"checkpoint n=4 generation=1 visited=1 frontier=1\nvisited\n24\nfrontier\n24\n"
  data = body + f"digest={checkpoint_digest(body)}\n".encode("ascii")

  with pytest.raises(MalformedCheckpointError, match="missing 'lp_calls'"):
    CheckpointLoader().loads(data)


def test_checkpoint_loader_rejects_a_file_cut_short() -> None:
  data = CheckpointDumper().dumps(make_checkpoint())

  with pytest.raises(MalformedCheckpointError, match="run.ckpt is corrupt: missing digest line"):
    CheckpointLoader().loads(data[:20], "run.ckpt")


def test_checkpoint_errors_are_not_input_errors() -> None:
  body = b"checkpoint n=4 generation=1\nvisited\nfrontier\n"
  data = body + f"digest={checkpoint_digest(body)}\n".encode("ascii")

  with pytest.raises(MalformedCheckpointError) as excinfo:
    CheckpointLoader().loads(data)

  assert not isinstance(excinfo.value, InputError)
