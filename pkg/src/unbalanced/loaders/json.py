"""JSON readers for families and for every command's JSON output.

Loaders accept either text (`loads`) or an already decoded object (`load`).
Structural problems raise `MalformedInputError` naming the source; semantic
problems with a well-formed family (a repeated member, an element outside
[n]) surface as the domain's own `InputError` subclasses.
"""

from abc import ABC, abstractmethod
from json import JSONDecodeError, loads
from logging import Logger, getLogger
from typing import Any

from unbalanced.domain.chambers import ChamberCount
from unbalanced.domain.families import BalanceCertificate, Family
from unbalanced.domain.values import Field, Verdict
from unbalanced.errors import MalformedInputError
from unbalanced.kernel.rational import parse_rational
from unbalanced.ops.bounds import BoundsReport
from unbalanced.ops.lattice import CharPoly

SCHEMA_VERSION = "1"


class JsonLoader[T](ABC):
  """Base class for JSON-to-value readers."""

  logger: Logger
  source: str

  def __init__(self, logger: Logger | None = None, source: str = "<json>") -> None:
    self.logger = logger or getLogger(__name__)
    self.source = source

  def _fail(self, reason: str) -> MalformedInputError:
    return MalformedInputError(self.source, reason)

  def _object(self, payload: object) -> dict[str, Any]:
    if not isinstance(payload, dict):
      raise self._fail(f"expected a JSON object, got {type(payload).__name__}")
    schema = payload.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
      raise self._fail(f"unsupported schema {schema!r}")
    return payload

  def _field(self, payload: dict[str, Any], name: str) -> Any:
    try:
      return payload[name]
    except KeyError:
      raise self._fail(f"missing field {name!r}") from None

  def _int(self, value: object, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
      raise self._fail(f"{name} must be an integer, got {value!r}")
    return value

  def _big_int(self, value: object, name: str) -> int:
    """Arbitrary-precision integers travel as decimal strings."""
    if not isinstance(value, str) or not value.lstrip("-").isdigit():
      raise self._fail(f"{name} must be a decimal integer string, got {value!r}")
    return int(value)

  def _rationals(self, value: object, name: str) -> list[Any]:
    if not isinstance(value, list):
      raise self._fail(f"{name} must be an array")
    parsed = []
    for item in value:
      if not isinstance(item, str):
        raise self._fail(f"{name} entries must be rational strings, got {item!r}")
      try:
        parsed.append(parse_rational(item))
      except ValueError as e:
        raise self._fail(str(e)) from e
    return parsed

  @abstractmethod
  def load(self, payload: object) -> T: ...

  def loads(self, text: str) -> T:
    try:
      payload = loads(text)
    except JSONDecodeError as e:
      raise self._fail(f"invalid JSON: {e.msg} at line {e.lineno}") from e
    return self.load(payload)


class FamilyJsonLoader(JsonLoader[Family]):
  """``{"n": 3, "members": [[1], [1, 2], [1, 3]]}``; subsets are 1-based element arrays."""

  def load(self, payload: object) -> Family:
    data = self._object(payload)
    n = self._int(self._field(data, "n"), "n")
    members = self._field(data, "members")
    if not isinstance(members, list):
      raise self._fail("members must be an array of element arrays")
    owned: list[list[int]] = []
    for member in members:
      if not isinstance(member, list):
        raise self._fail(f"member {member!r} is not an array")
      owned.append([self._int(element, "element") for element in member])
    family = Family.create(owned, n)
    self.logger.debug("loaded a family of %d members over n=%d", len(family), n)
    return family


class CertificateJsonLoader(JsonLoader[BalanceCertificate]):
  def load(self, payload: object) -> BalanceCertificate:
    data = self._object(payload)
    verdict = self._field(data, "verdict")
    match verdict:
      case Verdict.UNBALANCED:
        return BalanceCertificate.unbalanced(self._rationals(self._field(data, "witness"), "witness"))
      case Verdict.BALANCED:
        weights = self._rationals(self._field(data, "weights"), "weights")
        constant = self._rationals([self._field(data, "constant")], "constant")[0]
        return BalanceCertificate.balanced(weights, constant)
      case _:
        raise self._fail(f"unknown verdict {verdict!r}")


class CharPolyJsonLoader(JsonLoader[CharPoly]):
  def load(self, payload: object) -> CharPoly:
    data = self._object(payload)
    n = self._int(self._field(data, "n"), "n")
    field = self._field(data, "field")
    if field not in (Field.Q, Field.F2):
      raise self._fail(f"unknown field {field!r}")
    coefficients = self._field(data, "coeffs")
    if not isinstance(coefficients, list):
      raise self._fail("coeffs must be an array")
    descending = [self._big_int(c, "coefficient") for c in coefficients]
    try:
      return CharPoly.create(list(reversed(descending)), n, Field(field))
    except ValueError as e:
      raise self._fail(str(e)) from e


class BoundsJsonLoader(JsonLoader[BoundsReport]):
  def load(self, payload: object) -> BoundsReport:
    data = self._object(payload)
    e = self._field(data, "E")
    sandwich = self._field(data, "sandwich")
    if sandwich is not None and not isinstance(sandwich, bool):
      raise self._fail(f"sandwich must be a boolean or null, got {sandwich!r}")
    return BoundsReport(
      n=self._int(self._field(data, "n"), "n"),
      lower_power=self._big_int(self._field(data, "lower_power"), "lower_power"),
      lower_product=self._big_int(self._field(data, "lower_product"), "lower_product"),
      upper=self._big_int(self._field(data, "upper"), "upper"),
      e=None if e is None else self._big_int(e, "E"),
      sandwich=sandwich,
    )


class CountJsonLoader(JsonLoader[ChamberCount]):
  def load(self, payload: object) -> ChamberCount:
    data = self._object(payload)
    complete = self._field(data, "complete")
    if not isinstance(complete, bool):
      raise self._fail(f"complete must be a boolean, got {complete!r}")
    return ChamberCount(
      n=self._int(self._field(data, "n"), "n"),
      count=self._big_int(self._field(data, "count"), "count"),
      complete=complete,
      lp_calls=self._int(self._field(data, "lp_calls"), "lp_calls"),
      generations=self._int(self._field(data, "generations"), "generations"),
    )
