"""JSON writers for the machine-readable command outputs.

Every payload carries ``"schema": "1"``. Exact rationals are written as
``"p/q"`` strings and arbitrary-precision integers as decimal strings, so no
value ever passes through a JSON number that a consumer might read as a float.
"""

from abc import ABC, abstractmethod
from json import dumps
from logging import Logger, getLogger
from typing import Any

from unbalanced.domain.chambers import ChamberCount
from unbalanced.domain.families import BalanceCertificate, Family
from unbalanced.domain.values import Verdict
from unbalanced.kernel.rational import format_rational
from unbalanced.ops.bounds import BoundsReport
from unbalanced.ops.lattice import CharPoly

SCHEMA_VERSION = "1"

type JsonObject = dict[str, Any]


class JsonDumper[T](ABC):
  """Base class for value-to-JSON writers."""

  logger: Logger

  def __init__(self, logger: Logger | None = None) -> None:
    self.logger = logger or getLogger(__name__)

  @abstractmethod
  def _payload(self, value: T) -> JsonObject: ...

  def dump(self, value: T) -> JsonObject:
    """The JSON object for `value`, schema field first."""
    return {"schema": SCHEMA_VERSION, **self._payload(value)}

  def dumps(self, value: T) -> str:
    return dumps(self.dump(value), ensure_ascii=True)


class FamilyJsonDumper(JsonDumper[Family]):
  def _payload(self, value: Family) -> JsonObject:
    return {"n": value.n, "members": [list(member.elements) for member in value.members]}


class CertificateJsonDumper(JsonDumper[BalanceCertificate]):
  def _payload(self, value: BalanceCertificate) -> JsonObject:
    match value.verdict:
      case Verdict.UNBALANCED if value.witness is not None:
        return {"verdict": str(value.verdict), "witness": [format_rational(x) for x in value.witness]}
      case Verdict.BALANCED if value.weights is not None and value.constant is not None:
        return {
          "verdict": str(value.verdict),
          "weights": [format_rational(x) for x in value.weights],
          "constant": format_rational(value.constant),
        }
      case _:
        raise TypeError(f"Incomplete certificate for verdict {value.verdict!r}")


class CharPolyJsonDumper(JsonDumper[CharPoly]):
  """Coefficients are listed from the leading term down."""

  def _payload(self, value: CharPoly) -> JsonObject:
    return {
      "n": value.n,
      "field": str(value.field),
      "coeffs": [str(c) for c in value.descending],
    }


class BoundsJsonDumper(JsonDumper[BoundsReport]):
  def _payload(self, value: BoundsReport) -> JsonObject:
    return {
      "n": value.n,
      "lower_power": str(value.lower_power),
      "lower_product": str(value.lower_product),
      "upper": str(value.upper),
      "E": None if value.e is None else str(value.e),
      "sandwich": value.sandwich,
    }


class CountJsonDumper(JsonDumper[ChamberCount]):
  def _payload(self, value: ChamberCount) -> JsonObject:
    return {
      "n": value.n,
      "count": str(value.count),
      "complete": value.complete,
      "lp_calls": value.lp_calls,
      "generations": value.generations,
    }
