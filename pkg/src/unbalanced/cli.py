"""Command-line interface.

Standard output carries only the command's payload (counts, JSON, chamber
files, audit matrices); progress and diagnostics go to standard error through
the ``unbalanced`` logger.

Exit codes:
    0  success (for ``certify``: the family is unbalanced)
    1  an audit or verification failed, or a limited enumeration stopped early
    2  usage or input error
    3  ``certify`` found the family balanced
"""

from __future__ import annotations

import sys
from argparse import ArgumentParser, Namespace
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from logging import DEBUG, INFO, Formatter, Handler, Logger, StreamHandler, getLogger
from os import environ
from pathlib import Path
from time import perf_counter
from typing import TextIO

from unbalanced.domain.chambers import ChamberCount, ChamberSet
from unbalanced.domain.values import Field
from unbalanced.dumpers.chambers import ChamberFileDumper, SignatureCsvDumper
from unbalanced.dumpers.json import (
  BoundsJsonDumper,
  CertificateJsonDumper,
  CharPolyJsonDumper,
  CountJsonDumper,
)
from unbalanced.errors import (
  AuditError,
  CheckpointError,
  CountMismatchError,
  GroundSizeError,
  InputError,
  LpError,
  ZaslavskyMismatchError,
)
from unbalanced.loaders.json import FamilyJsonLoader
from unbalanced.ops.audits import (
  MAX_ADJACENCY_SIZE,
  bipartite_audit,
  chamber_adjacency_audit,
  parity_audit,
  selection_space_audit,
  signature_matrix,
  signature_step_audit,
  signature_uniqueness_audit,
)
from unbalanced.ops.bounds import (
  KNOWN_COUNTS,
  bounds_report,
  factorial_ratio_check,
  known_count,
  sandwich_check,
  signature_space_report,
)
from unbalanced.ops.certify import balance_certify, verify_certificate
from unbalanced.ops.enumerate import (
  MAX_BRUTE_FORCE_SIZE,
  MAX_ENUMERATION_SIZE,
  EnumerationOptions,
  brute_force_chambers,
  enumerate_chambers,
)
from unbalanced.ops.lattice import (
  MAX_BINARY_LATTICE_SIZE,
  MAX_RATIONAL_LATTICE_SIZE,
  MAX_WHITNEY_SIZE,
  CharPoly,
  build_flat_lattice,
  characteristic_polynomial,
  moebius_signs_alternate,
  whitney_compare,
  zaslavsky_count,
)
from unbalanced.utils import make_usable_path

THREADS_VARIABLE = "UNBALANCED_THREADS"
MAX_BOUNDS_SIZE = 1024
MAX_VERIFY_SIZE = 6

EXIT_OK = 0
EXIT_AUDIT = 1
EXIT_USAGE = 2
EXIT_BALANCED = 3

logger = getLogger("unbalanced")
_cli_handler: Handler | None = None


class Command(StrEnum):
  """Subcommands of the ``unbalanced`` program."""

  COUNT = "count"
  """Enumerate chambers and print E_n."""

  ENUMERATE = "enumerate"
  """Enumerate chambers and write the chamber file."""

  CERTIFY = "certify"
  """Certify a family read from standard input."""

  SIGNATURES = "signatures"
  """Enumerate chambers and write their signatures."""

  CHARPOLY = "charpoly"
  """Build the lattice of flats and print its characteristic polynomial."""

  BOUNDS = "bounds"
  """Evaluate the chamber-count bounds against the known counts."""

  VERIFY = "verify"
  """Run every audit and cross-check."""


class OutputFormat(StrEnum):
  JSON = "json"
  CSV = "csv"
  RAW = "raw"


_DEFAULT_FORMATS = {
  Command.COUNT: OutputFormat.RAW,
  Command.ENUMERATE: OutputFormat.RAW,
  Command.CERTIFY: OutputFormat.JSON,
  Command.SIGNATURES: OutputFormat.CSV,
  Command.CHARPOLY: OutputFormat.JSON,
  Command.BOUNDS: OutputFormat.JSON,
  Command.VERIFY: OutputFormat.RAW,
}

_ALLOWED_FORMATS = {
  Command.COUNT: {OutputFormat.RAW, OutputFormat.JSON},
  Command.ENUMERATE: {OutputFormat.RAW},
  Command.CERTIFY: {OutputFormat.JSON},
  Command.SIGNATURES: {OutputFormat.CSV},
  Command.CHARPOLY: {OutputFormat.JSON, OutputFormat.RAW},
  Command.BOUNDS: {OutputFormat.JSON, OutputFormat.RAW},
  Command.VERIFY: {OutputFormat.RAW},
}


def parse_n_range(text: str) -> tuple[int, ...]:
  """Parse ``"5"`` or ``"2..4"`` into the ground sizes it names.

  Raises:
      InputError: If the text is not an integer or an increasing range.
  """
  low_text, sep, high_text = text.partition("..")
  try:
    low = int(low_text)
    high = int(high_text) if sep else low
  except ValueError:
    raise InputError(f"--n expects an integer or a range like 2..5, got {text!r}") from None
  if high < low:
    raise InputError(f"empty range {text!r}")
  return tuple(range(low, high + 1))


def _n_limits(command: Command, field_: Field, selection_space: bool) -> tuple[int, int]:
  match command:
    case Command.COUNT | Command.ENUMERATE:
      return 1, MAX_ENUMERATION_SIZE
    case Command.SIGNATURES:
      return 2, MAX_ENUMERATION_SIZE
    case Command.CHARPOLY:
      return 2, MAX_RATIONAL_LATTICE_SIZE if field_ is Field.Q else MAX_BINARY_LATTICE_SIZE
    case Command.BOUNDS:
      return 1, MAX_BOUNDS_SIZE
    case Command.VERIFY:
      return 2, MAX_BRUTE_FORCE_SIZE if selection_space else MAX_VERIFY_SIZE
    case _:
      raise TypeError(f"Unknown command {command!r}")


@dataclass(frozen=True, slots=True, kw_only=True)
class RunConfig:
  """Validated settings for one invocation."""

  command: Command
  n_values: tuple[int, ...] = ()
  threads: int = 1
  out: Path | None = None
  format: OutputFormat = OutputFormat.RAW
  checkpoint: Path | None = None
  resume: bool = False
  max_chambers: int | None = None
  time_budget: float | None = None
  selection_space: bool = False
  field: Field = Field.Q
  verbose: bool = False

  @classmethod
  def create(
    cls,
    command: Command | str,
    n: str | None = None,
    threads: int | None = None,
    out: str | None = None,
    format: OutputFormat | str | None = None,
    checkpoint: str | None = None,
    resume: bool = False,
    max_chambers: int | None = None,
    time_budget: float | None = None,
    selection_space: bool = False,
    field: Field | str = Field.Q,
    verbose: bool = False,
    environment: dict[str, str] | None = None,
  ) -> RunConfig:
    """Validate raw option values.

    Raises:
        InputError: If a value is out of range or options contradict each other.
    """
    command = Command(command)
    field_ = Field(field)
    environment = environ if environment is None else environment

    n_values: tuple[int, ...] = ()
    if command is not Command.CERTIFY:
      if n is None:
        raise InputError(f"{command} requires --n")
      n_values = parse_n_range(n)
      low, high = _n_limits(command, field_, selection_space)
      for value in n_values:
        if not low <= value <= high:
          raise GroundSizeError(value, low, high)
      if command in (Command.ENUMERATE, Command.SIGNATURES) and len(n_values) != 1:
        raise InputError(f"{command} takes a single n, not a range")

    if threads is None:
      raw = environment.get(THREADS_VARIABLE)
      try:
        threads = int(raw) if raw else 1
      except ValueError:
        raise InputError(f"{THREADS_VARIABLE} must be an integer, got {raw!r}") from None
    if threads < 1:
      raise InputError(f"thread count must be positive, got {threads}")

    output_format = OutputFormat(format) if format is not None else _DEFAULT_FORMATS[command]
    if output_format not in _ALLOWED_FORMATS[command]:
      raise InputError(f"{command} does not support --format {output_format}")
    if resume and checkpoint is None:
      raise InputError("--resume requires --checkpoint")
    if max_chambers is not None and max_chambers < 1:
      raise InputError("--limit-chambers must be positive")
    if time_budget is not None and time_budget <= 0:
      raise InputError("--time-budget must be positive")

    return RunConfig(
      command=command,
      n_values=n_values,
      threads=threads,
      out=None if out is None else Path(out),
      format=output_format,
      checkpoint=None if checkpoint is None else Path(checkpoint),
      resume=resume,
      max_chambers=max_chambers,
      time_budget=time_budget,
      selection_space=selection_space,
      field=field_,
      verbose=verbose,
    )

  def enumeration_options(self) -> EnumerationOptions:
    return EnumerationOptions.create(
      workers=self.threads,
      checkpoint=self.checkpoint,
      resume=self.resume,
      max_chambers=self.max_chambers,
      time_budget=self.time_budget,
    )


def build_parser() -> ArgumentParser:
  common = ArgumentParser(add_help=False)
  common.add_argument("--n", help="ground-set size, or an inclusive range such as 2..5")
  common.add_argument("--threads", type=int, help=f"worker processes (default: ${THREADS_VARIABLE} or 1)")
  common.add_argument("--out", help="write the payload to this file instead of standard output")
  common.add_argument("--format", choices=[f.value for f in OutputFormat])
  common.add_argument("--checkpoint", help="checkpoint file written at every BFS generation")
  common.add_argument("--resume", action="store_true", help="resume from --checkpoint")
  common.add_argument("--limit-chambers", type=int, dest="max_chambers")
  common.add_argument("--time-budget", type=float, help="seconds")
  common.add_argument("--selection-space", action="store_true", help="verify: also certify every selection")
  common.add_argument("--field", choices=[f.value for f in Field], default=Field.Q.value)
  common.add_argument("--verbose", action="store_true", help="debug logging on standard error")

  parser = ArgumentParser(
    prog="unbalanced",
    description="Enumerate and certify maximal unbalanced families of subsets of [n].",
  )
  commands = parser.add_subparsers(dest="command", required=True)
  for command in Command:
    commands.add_parser(command.value, parents=[common], help=command.__doc__)
  return parser


def _configure_logging(verbose: bool) -> None:
  global _cli_handler
  if _cli_handler is not None:
    logger.removeHandler(_cli_handler)
  _cli_handler = StreamHandler(sys.stderr)
  _cli_handler.setFormatter(Formatter("%(levelname)s %(name)s: %(message)s"))
  logger.addHandler(_cli_handler)
  logger.setLevel(DEBUG if verbose else INFO)


def _emit(config: RunConfig, text: str, stdout: TextIO) -> None:
  if config.out is None:
    stdout.write(text)
  else:
    make_usable_path(config.out).write_text(text, encoding="utf-8", newline="\n")


def format_polynomial(polynomial: CharPoly) -> str:
  """Render ``t^3 - 7t^2 + 15t - 9`` style text."""
  terms: list[str] = []
  for power, coefficient in reversed(list(enumerate(polynomial.coefficients))):
    if coefficient == 0:
      continue
    magnitude = abs(coefficient)
    body = "" if magnitude == 1 and power > 0 else str(magnitude)
    if power >= 1:
      body += "t" if power == 1 else f"t^{power}"
    sign = "-" if coefficient < 0 else "+"
    terms.append(f"{sign} {body}" if terms else (f"-{body}" if sign == "-" else body))
  return " ".join(terms) if terms else "0"


def cmd_count(config: RunConfig, stdout: TextIO) -> int:
  lines: list[str] = []
  status = EXIT_OK
  for n in config.n_values:
    started = perf_counter()
    chambers = enumerate_chambers(n, options=config.enumeration_options())
    logger.info("n=%d enumerated in %.2f s", n, perf_counter() - started)
    if not chambers.complete:
      status = EXIT_AUDIT
    match config.format:
      case OutputFormat.JSON:
        lines.append(CountJsonDumper().dumps(ChamberCount.from_chambers(chambers)))
      case _:
        relation = "=" if chambers.complete else ">="
        lines.append(f"E_{n} {relation} {chambers.count}")
  _emit(config, "\n".join(lines) + "\n", stdout)
  return status


def cmd_enumerate(config: RunConfig, stdout: TextIO) -> int:
  n = config.n_values[0]
  chambers = enumerate_chambers(n, options=config.enumeration_options())
  _emit(config, ChamberFileDumper().dumps(chambers), stdout)
  return EXIT_OK if chambers.complete else EXIT_AUDIT


def cmd_certify(config: RunConfig, stdin: TextIO, stdout: TextIO) -> int:
  family = FamilyJsonLoader(source="<stdin>").loads(stdin.read())
  certificate = balance_certify(family)
  verify_certificate(family, certificate)
  _emit(config, CertificateJsonDumper().dumps(certificate) + "\n", stdout)
  return EXIT_OK if certificate.is_unbalanced else EXIT_BALANCED


def cmd_signatures(config: RunConfig, stdout: TextIO) -> int:
  n = config.n_values[0]
  chambers = enumerate_chambers(n, options=config.enumeration_options())
  rows = [tuple(row) for row in signature_matrix(n, chambers.keys).tolist()] if chambers.keys else []
  _emit(config, SignatureCsvDumper().dumps(rows), stdout)
  return EXIT_OK if chambers.complete else EXIT_AUDIT


def cmd_charpoly(config: RunConfig, stdout: TextIO) -> int:
  lines: list[str] = []
  for n in config.n_values:
    polynomial = characteristic_polynomial(build_flat_lattice(n, config.field))
    match config.format:
      case OutputFormat.RAW:
        lines.append(f"chi_{n}(t) over {config.field} = {format_polynomial(polynomial)}")
      case _:
        lines.append(CharPolyJsonDumper().dumps(polynomial))
  _emit(config, "\n".join(lines) + "\n", stdout)
  return EXIT_OK


def cmd_bounds(config: RunConfig, stdout: TextIO) -> int:
  lines: list[str] = []
  for n in config.n_values:
    report = bounds_report(n)
    match config.format:
      case OutputFormat.RAW:
        e = "?" if report.e is None else str(report.e)
        verdict = {True: "ok", False: "fails", None: "no count"}[report.sandwich]
        lines.append(
          f"n={n}: {report.lower_power} < {e} < {report.upper}, {report.lower_product} <= {e}: {verdict}"
        )
      case _:
        lines.append(BoundsJsonDumper().dumps(report))
  _emit(config, "\n".join(lines) + "\n", stdout)
  return EXIT_OK


class VerifyReport:
  """Rows of the verification matrix, in the order the checks ran."""

  logger: Logger
  rows: list[str]
  failures: list[str]

  def __init__(self, logger: Logger | None = None) -> None:
    self.logger = logger or getLogger(__name__)
    self.rows = []
    self.failures = []

  def check(self, scope: str, name: str, run: Callable[[], str]) -> bool:
    """Run one check and record its outcome; a raised audit error is a failure."""
    try:
      detail = run()
    except (AuditError, LpError) as e:
      self.failures.append(f"{scope} {name}")
      self.rows.append(f"{scope} {name}: FAIL ({e})")
      self.logger.error("%s %s failed: %s", scope, name, e)
      return False
    self.rows.append(f"{scope} {name}: {detail}")
    return True

  def note(self, line: str) -> None:
    self.rows.append(line)


def _check_enumeration(n: int, chambers: ChamberSet) -> str:
  expected = known_count(n)
  if expected is not None and chambers.count != expected:
    raise CountMismatchError(n, chambers.count, expected)
  return f"pass (E_{n} = {chambers.count})"


def _check_brute_force(n: int, chambers: ChamberSet) -> str:
  oracle = brute_force_chambers(n)
  if oracle.keys != chambers.keys:
    raise CountMismatchError(n, chambers.count, oracle.count)
  return f"pass ({oracle.count} of {1 << ((1 << (n - 1)) - 1)} selections unbalanced)"


def _check_parity(chambers: ChamberSet) -> str:
  result = parity_audit(chambers)
  if result.mixed:
    return f"recorded ({len(result.mixed)} mixed-parity signatures)"
  return f"pass ({result.even} even, {result.odd} odd)"


def _check_bipartite(n: int, chambers: ChamberSet) -> str:
  result = bipartite_audit(chambers)
  if not result.bipartite:
    raise AuditError(f"n={n}: the one-swap graph has an odd cycle")
  if n >= 3 and not result.matches_parity:
    raise AuditError(f"n={n}: color classes differ from parity classes")
  low, high = result.color_sizes
  return f"pass ({result.edges} edges, classes {low}/{high})"


def _check_adjacency(chambers: ChamberSet) -> str:
  result = chamber_adjacency_audit(chambers)
  if result.discrepancies:
    return f"recorded ({len(result.discrepancies)} of {result.edges} pairs not facet-adjacent)"
  return f"pass ({result.edges} facet-adjacent pairs)"


def _check_uniqueness(chambers: ChamberSet) -> str:
  result = signature_uniqueness_audit(chambers)
  return f"pass ({result.distinct} of {result.chambers})"


def _check_selection_space(n: int, report: VerifyReport) -> str:
  result = selection_space_audit(n)
  report.note(
    f"{result.selections} selections: {result.unbalanced} unbalanced,"
    f" {result.balanced} balanced, signature sets disjoint"
  )
  return "pass"


def _check_steps(n: int, chambers: ChamberSet) -> str:
  result = signature_step_audit(chambers)
  if not result.passed:
    raise AuditError(f"n={n}: {len(result.mismatches)} edges break the signature step rule")
  return f"pass ({result.edges} edges)"


def _check_sandwich(n: int, count: int) -> str:
  if sandwich_check(n, count):
    return "pass"
  if n < 3:
    return "recorded (the upper bound is not strict here)"
  raise AuditError(f"n={n}: E_{n} = {count} is outside the bounds")


def _verify_one(n: int, config: RunConfig, report: VerifyReport) -> None:
  scope = f"n={n}"
  chambers = enumerate_chambers(n, options=EnumerationOptions.create(workers=config.threads))
  if not report.check(scope, "enumeration", lambda: _check_enumeration(n, chambers)):
    return
  if n <= 4:
    report.check(scope, "brute force", lambda: _check_brute_force(n, chambers))
  report.check(scope, "parity", lambda: _check_parity(chambers))
  if n <= MAX_ADJACENCY_SIZE:
    report.check(scope, "bipartite", lambda: _check_bipartite(n, chambers))
    report.check(scope, "adjacency", lambda: _check_adjacency(chambers))

  unique = report.check(scope, "uniqueness", lambda: _check_uniqueness(chambers))
  if unique:
    report.note(f"uniqueness: {chambers.count} distinct signatures")
  report.check(scope, "signature steps", lambda: _check_steps(n, chambers))
  if n <= MAX_BRUTE_FORCE_SIZE:
    report.check(
      scope,
      "signature space",
      lambda: "pass ({0.achieved} <= {0.bound})".format(signature_space_report(chambers)),
    )

  if config.selection_space:
    report.check(scope, "selection space", lambda: _check_selection_space(n, report))

  lattice = build_flat_lattice(n, Field.Q)
  rational = characteristic_polynomial(lattice)

  def zaslavsky() -> str:
    if not moebius_signs_alternate(lattice):
      raise AuditError(f"n={n}: Möbius values do not alternate in sign")
    predicted = zaslavsky_count(rational)
    if predicted != chambers.count:
      raise ZaslavskyMismatchError(f"zaslavsky({n}) vs enumerated({n})", predicted, chambers.count)
    report.note(f"zaslavsky({n}) = {predicted} = enumerated({n})")
    return "pass"

  report.check(scope, "zaslavsky", zaslavsky)
  if n <= MAX_WHITNEY_SIZE:
    report.check(
      scope,
      "whitney",
      lambda: "pass ({0.rational_total} >= {0.binary_total} = lower product)".format(
        whitney_compare(n, rational=rational)
      ),
    )
  report.check(scope, "sandwich", lambda: _check_sandwich(n, chambers.count))


def _check_table_sandwich() -> str:
  for n in range(3, max(KNOWN_COUNTS.table) + 1):
    if not sandwich_check(n, KNOWN_COUNTS.table[n]):
      raise AuditError(f"n={n}: the tabulated count is outside the bounds")
  return f"pass (n = 3..{max(KNOWN_COUNTS.table)})"


def cmd_verify(config: RunConfig, stdout: TextIO) -> int:
  report = VerifyReport(logger=logger)
  for n in config.n_values:
    _verify_one(n, config, report)
  report.check("table", "sandwich", _check_table_sandwich)
  report.check(
    "table",
    "factorial ratio",
    lambda: "pass (E_n/n! grows from n = {0.increasing_from})".format(factorial_ratio_check()),
  )
  if report.failures:
    report.note("failed: " + ", ".join(report.failures))
  else:
    report.note("all checks passed")
  _emit(config, "\n".join(report.rows) + "\n", stdout)
  return EXIT_AUDIT if report.failures else EXIT_OK


def run(config: RunConfig, stdin: TextIO, stdout: TextIO) -> int:
  """Dispatch one validated invocation and return its exit code."""
  match config.command:
    case Command.COUNT:
      return cmd_count(config, stdout)
    case Command.ENUMERATE:
      return cmd_enumerate(config, stdout)
    case Command.CERTIFY:
      return cmd_certify(config, stdin, stdout)
    case Command.SIGNATURES:
      return cmd_signatures(config, stdout)
    case Command.CHARPOLY:
      return cmd_charpoly(config, stdout)
    case Command.BOUNDS:
      return cmd_bounds(config, stdout)
    case Command.VERIFY:
      return cmd_verify(config, stdout)
    case _:
      raise TypeError(f"Unknown command {config.command!r}")


def _config_from_args(args: Namespace) -> RunConfig:
  return RunConfig.create(
    command=args.command,
    n=args.n,
    threads=args.threads,
    out=args.out,
    format=args.format,
    checkpoint=args.checkpoint,
    resume=args.resume,
    max_chambers=args.max_chambers,
    time_budget=args.time_budget,
    selection_space=args.selection_space,
    field=args.field,
    verbose=args.verbose,
  )


def main(argv: Sequence[str] | None = None) -> int:
  # bounds reach 2^(1023^2); their decimal strings exceed the default conversion limit
  sys.set_int_max_str_digits(0)
  args = build_parser().parse_args(argv)
  _configure_logging(args.verbose)
  try:
    config = _config_from_args(args)
    return run(config, sys.stdin, sys.stdout)
  except InputError as e:
    logger.error("%s", e)
    return EXIT_USAGE
  except (AuditError, CheckpointError, LpError) as e:
    logger.error("%s", e)
    return EXIT_AUDIT


if __name__ == "__main__":
  raise SystemExit(main())
