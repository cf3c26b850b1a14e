import io
import json
from pathlib import Path

import pytest

from unbalanced.cli import (
  EXIT_AUDIT,
  EXIT_BALANCED,
  EXIT_OK,
  EXIT_USAGE,
  Command,
  OutputFormat,
  RunConfig,
  format_polynomial,
  main,
  parse_n_range,
)
from unbalanced.domain.values import Field
from unbalanced.errors import GroundSizeError, InputError
from unbalanced.ops.lattice import CharPoly, projective_charpoly


def run_cli(capsys: pytest.CaptureFixture[str], *argv: str) -> tuple[int, str, str]:
  status = main(list(argv))
  captured = capsys.readouterr()
  return status, captured.out, captured.err


@pytest.mark.parametrize(("text", "expected"), [("5", (5,)), ("2..4", (2, 3, 4)), (" 3..3 ", (3,))])
def test_parse_n_range(text: str, expected: tuple[int, ...]) -> None:
  assert parse_n_range(text) == expected


@pytest.mark.parametrize("text", ["abc", "2..", "..4", "1.5"])
def test_parse_n_range_rejects_garbage(text: str) -> None:
  with pytest.raises(InputError, match="integer or a range"):
    parse_n_range(text)


def test_parse_n_range_rejects_empty_ranges() -> None:
  with pytest.raises(InputError, match="empty range"):
    parse_n_range("5..3")


def test_run_config_reads_threads_from_the_environment() -> None:
  config = RunConfig.create("count", n="3", environment={"UNBALANCED_THREADS": "4"})

  assert config.threads == 4
  assert config.format is OutputFormat.RAW


def test_run_config_prefers_explicit_threads() -> None:
  config = RunConfig.create("count", n="3", threads=2, environment={"UNBALANCED_THREADS": "4"})

  assert config.threads == 2


@pytest.mark.parametrize(
  ("kwargs", "match"),
  [
    ({"command": "count"}, "requires --n"),
    ({"command": "enumerate", "n": "2..3"}, "single n"),
    ({"command": "count", "n": "3", "threads": 0}, "thread count must be positive"),
    ({"command": "enumerate", "n": "3", "format": "json"}, "does not support --format json"),
    ({"command": "count", "n": "3", "resume": True}, "requires --checkpoint"),
    ({"command": "count", "n": "3", "max_chambers": 0}, "limit-chambers must be positive"),
    ({"command": "count", "n": "3", "time_budget": 0.0}, "time-budget must be positive"),
  ],
)
def test_run_config_rejects_bad_options(kwargs: dict[str, object], match: str) -> None:
  with pytest.raises(InputError, match=match):
    RunConfig.create(**kwargs, environment={})  # type: ignore[arg-type]


@pytest.mark.parametrize(
  ("command", "n", "field", "selection_space"),
  [
    (Command.COUNT, "9", Field.Q, False),
    (Command.SIGNATURES, "1", Field.Q, False),
    (Command.CHARPOLY, "8", Field.Q, False),
    (Command.CHARPOLY, "7", Field.F2, False),
    (Command.BOUNDS, "1025", Field.Q, False),
    (Command.VERIFY, "7", Field.Q, False),
    (Command.VERIFY, "6", Field.Q, True),
  ],
)
def test_run_config_enforces_size_limits(
  command: Command, n: str, field: Field, selection_space: bool
) -> None:
  with pytest.raises(GroundSizeError):
    RunConfig.create(command, n=n, field=field, selection_space=selection_space, environment={})


def test_certify_needs_no_n() -> None:
  assert RunConfig.create("certify", environment={}).n_values == ()


@pytest.mark.parametrize(
  ("coefficients", "expected"),
  [
    ((-9, 15, -7, 1), "t^3 - 7t^2 + 15t - 9"),
    ((-1, 1), "t - 1"),
    ((0, 0, -1), "-t^2"),
    ((0, 0), "0"),
  ],
)
def test_format_polynomial(coefficients: tuple[int, ...], expected: str) -> None:
  assert format_polynomial(CharPoly.create(coefficients, len(coefficients))) == expected


def test_count_prints_e_n(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "count", "--n", "2")

  assert status == EXIT_OK
  assert out == "E_2 = 2\n"


def test_count_handles_the_empty_case(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "count", "--n", "1")

  assert status == EXIT_OK
  assert out == "E_1 = 0\n"


def test_count_over_a_range(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "count", "--n", "2..4")

  assert status == EXIT_OK
  assert out.splitlines() == ["E_2 = 2", "E_3 = 6", "E_4 = 32"]


def test_count_as_json(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "count", "--n", "3", "--format", "json")

  payload = json.loads(out)
  assert status == EXIT_OK
  assert payload["schema"] == "1"
  assert payload["count"] == "6"
  assert payload["complete"] is True


@pytest.mark.parametrize("n", ["9", "0", "abc"])
def test_count_rejects_bad_n(capsys: pytest.CaptureFixture[str], n: str) -> None:
  status, out, err = run_cli(capsys, "count", "--n", n)

  assert status == EXIT_USAGE
  assert out == ""
  assert "ERROR" in err


def test_count_with_a_chamber_limit_is_incomplete(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "count", "--n", "4", "--limit-chambers", "2")

  assert status == EXIT_AUDIT
  assert out.startswith("E_4 >= ")


def test_bad_thread_variable_is_a_usage_error(
  capsys: pytest.CaptureFixture[str], monkeypatch: pytest.MonkeyPatch
) -> None:
  monkeypatch.setenv("UNBALANCED_THREADS", "many")

  status, _, err = run_cli(capsys, "count", "--n", "2")

  assert status == EXIT_USAGE
  assert "UNBALANCED_THREADS must be an integer" in err


def test_resume_without_checkpoint_is_a_usage_error(capsys: pytest.CaptureFixture[str]) -> None:
  status, _, _ = run_cli(capsys, "count", "--n", "3", "--resume")

  assert status == EXIT_USAGE


def test_unknown_command_exits_through_argparse(capsys: pytest.CaptureFixture[str]) -> None:
  with pytest.raises(SystemExit) as excinfo:
    main(["tally", "--n", "3"])

  assert excinfo.value.code == 2
  capsys.readouterr()


def test_certify_unbalanced_family(
  capsys: pytest.CaptureFixture[str], monkeypatch: pytest.MonkeyPatch
) -> None:
  monkeypatch.setattr("sys.stdin", io.StringIO('{"n": 2, "members": [[1]]}'))

  status, out, _ = run_cli(capsys, "certify")

  assert status == EXIT_OK
  assert json.loads(out) == {"schema": "1", "verdict": "unbalanced", "witness": ["1", "-1"]}


def test_certify_balanced_family(
  capsys: pytest.CaptureFixture[str], monkeypatch: pytest.MonkeyPatch
) -> None:
  monkeypatch.setattr("sys.stdin", io.StringIO('{"n": 3, "members": [[1, 2], [1, 3], [2, 3]]}'))

  status, out, _ = run_cli(capsys, "certify")

  payload = json.loads(out)
  assert status == EXIT_BALANCED
  assert payload["verdict"] == "balanced"
  assert payload["weights"] == ["1/3", "1/3", "1/3"]
  assert payload["constant"] == "2/3"


def test_certify_malformed_input(
  capsys: pytest.CaptureFixture[str], monkeypatch: pytest.MonkeyPatch
) -> None:
  monkeypatch.setattr("sys.stdin", io.StringIO('{"n": 3, "members": [[1], [1]]}'))

  status, out, err = run_cli(capsys, "certify")

  assert status == EXIT_USAGE
  assert out == ""
  assert "appears twice" in err


def test_enumerate_writes_a_chamber_file(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
  target = tmp_path / "out" / "n3.txt"

  status, out, _ = run_cli(capsys, "enumerate", "--n", "3", "--out", str(target))

  assert status == EXIT_OK
  assert out == ""
  lines = target.read_text(encoding="ascii").splitlines()
  assert lines[0] == "n=3"
  assert len(lines) == 7


def test_enumerate_resume_reproduces_a_full_run(
  capsys: pytest.CaptureFixture[str], tmp_path: Path
) -> None:
  checkpoint = tmp_path / "n4.ckpt"
  full = tmp_path / "full.txt"
  resumed = tmp_path / "resumed.txt"

  assert run_cli(capsys, "enumerate", "--n", "4", "--out", str(full))[0] == EXIT_OK
  first = run_cli(
    capsys, "enumerate", "--n", "4", "--checkpoint", str(checkpoint), "--limit-chambers", "2"
  )
  second = run_cli(
    capsys, "enumerate", "--n", "4", "--checkpoint", str(checkpoint), "--resume", "--out", str(resumed)
  )

  assert first[0] == EXIT_AUDIT
  assert second[0] == EXIT_OK
  assert resumed.read_bytes() == full.read_bytes()


def test_signatures_csv(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "signatures", "--n", "3")

  assert status == EXIT_OK
  assert out.splitlines() == ["0,2,2", "1,1,3", "1,3,1", "2,0,2", "2,2,0", "3,1,1"]


def test_charpoly_json(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "charpoly", "--n", "4")

  payload = json.loads(out)
  assert status == EXIT_OK
  assert payload["coeffs"] == ["1", "-7", "15", "-9"]
  assert payload["field"] == "Q"


def test_charpoly_raw_over_f2(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "charpoly", "--n", "2..4", "--field", "F2", "--format", "raw")

  assert status == EXIT_OK
  assert out.splitlines()[-1] == f"chi_4(t) over F2 = {format_polynomial(projective_charpoly(4))}"
  assert out.splitlines()[0] == "chi_2(t) over F2 = t - 1"


def test_bounds_json(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "bounds", "--n", "4")

  assert status == EXIT_OK
  assert json.loads(out) == {
    "schema": "1",
    "n": 4,
    "lower_power": "8",
    "lower_product": "30",
    "upper": "512",
    "E": "32",
    "sandwich": True,
  }


def test_bounds_raw_at_the_largest_n(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "bounds", "--n", "1024", "--format", "raw")

  assert status == EXIT_OK
  assert out.startswith("n=1024: ")
  assert out.rstrip().endswith("no count")


def test_bounds_raw_reports_the_sandwich(capsys: pytest.CaptureFixture[str]) -> None:
  _, out, _ = run_cli(capsys, "bounds", "--n", "5", "--format", "raw")

  assert out == "n=5: 64 < 370 < 65536, 270 <= 370: ok\n"


def test_out_writes_a_file_instead_of_stdout(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
  target = tmp_path / "count.txt"

  status, out, _ = run_cli(capsys, "count", "--n", "3", "--out", str(target))

  assert status == EXIT_OK
  assert out == ""
  assert target.read_text(encoding="utf-8") == "E_3 = 6\n"


def test_verify_small_range(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "verify", "--n", "2..4")

  lines = out.splitlines()
  assert status == EXIT_OK
  assert "zaslavsky(4) = 32 = enumerated(4)" in lines
  assert "uniqueness: 32 distinct signatures" in lines
  assert lines[-1] == "all checks passed"
  assert not any("FAIL" in line for line in lines)


def test_verify_selection_space(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "verify", "--n", "3", "--selection-space")

  assert status == EXIT_OK
  assert "8 selections: 6 unbalanced, 2 balanced, signature sets disjoint" in out.splitlines()


@pytest.mark.slow
def test_verify_five(capsys: pytest.CaptureFixture[str]) -> None:
  status, out, _ = run_cli(capsys, "verify", "--n", "5")

  lines = out.splitlines()
  assert status == EXIT_OK
  assert "uniqueness: 370 distinct signatures" in lines
  assert "zaslavsky(5) = 370 = enumerated(5)" in lines


def test_verify_reports_a_count_mismatch(
  capsys: pytest.CaptureFixture[str], monkeypatch: pytest.MonkeyPatch
) -> None:
  monkeypatch.setattr("unbalanced.cli.known_count", lambda n: 7)

  status, out, _ = run_cli(capsys, "verify", "--n", "3")

  lines = out.splitlines()
  assert status == EXIT_AUDIT
  assert any(line.startswith("n=3 enumeration: FAIL") for line in lines)
  assert lines[-1] == "failed: n=3 enumeration"


def test_truncated_checkpoint_is_a_checkpoint_failure(
  capsys: pytest.CaptureFixture[str], tmp_path: Path
) -> None:
  checkpoint = tmp_path / "n3.ckpt"
  assert run_cli(capsys, "enumerate", "--n", "3", "--checkpoint", str(checkpoint))[0] == EXIT_OK
  checkpoint.write_bytes(checkpoint.read_bytes()[:20])

  status, out, err = run_cli(
    capsys, "enumerate", "--n", "3", "--checkpoint", str(checkpoint), "--resume"
  )

  assert status == EXIT_AUDIT
  assert out == ""
  assert "is corrupt: missing digest line" in err


def test_corrupted_checkpoint_is_a_checkpoint_failure(
  capsys: pytest.CaptureFixture[str], tmp_path: Path
) -> None:
  checkpoint = tmp_path / "n3.ckpt"
  run_cli(capsys, "enumerate", "--n", "3", "--checkpoint", str(checkpoint))
  data = bytearray(checkpoint.read_bytes())
  data[len("checkpoint n=3 generation=")] ^= 0x01
  checkpoint.write_bytes(bytes(data))

  status, _, err = run_cli(
    capsys, "enumerate", "--n", "3", "--checkpoint", str(checkpoint), "--resume"
  )

  assert status == EXIT_AUDIT
  assert "is corrupt" in err
