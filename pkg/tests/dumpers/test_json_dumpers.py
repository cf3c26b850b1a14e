import json
from fractions import Fraction

import pytest

from unbalanced.domain.chambers import ChamberCount
from unbalanced.domain.families import BalanceCertificate, Family
from unbalanced.domain.values import Field, Verdict
from unbalanced.dumpers.json import (
  BoundsJsonDumper,
  CertificateJsonDumper,
  CharPolyJsonDumper,
  CountJsonDumper,
  FamilyJsonDumper,
)
from unbalanced.ops.bounds import bounds_report
from unbalanced.ops.lattice import CharPoly, projective_charpoly


def test_schema_comes_first() -> None:
  payload = FamilyJsonDumper().dump(Family.create([[1], [2, 3]], 3))

  assert next(iter(payload)) == "schema"
  assert payload == {"schema": "1", "n": 3, "members": [[1], [2, 3]]}


def test_family_dumper_writes_ascii_json() -> None:
  text = FamilyJsonDumper().dumps(Family.create([[1, 2]], 2))

  assert json.loads(text) == {"schema": "1", "n": 2, "members": [[1, 2]]}
  assert text.isascii()


def test_certificate_dumper_writes_a_witness_as_strings() -> None:
  certificate = BalanceCertificate.unbalanced([Fraction(3, 2), -1, Fraction(-1, 2)])

  assert json.loads(CertificateJsonDumper().dumps(certificate)) == {
    "schema": "1",
    "verdict": "unbalanced",
    "witness": ["3/2", "-1", "-1/2"],
  }


def test_certificate_dumper_writes_weights_and_constant() -> None:
  certificate = BalanceCertificate.balanced([Fraction(1, 2), Fraction(1, 2)], Fraction(1, 2))

  assert CertificateJsonDumper().dump(certificate) == {
    "schema": "1",
    "verdict": "balanced",
    "weights": ["1/2", "1/2"],
    "constant": "1/2",
  }


def test_certificate_dumper_rejects_an_incomplete_certificate() -> None:
  with pytest.raises(TypeError, match="Incomplete certificate"):
    CertificateJsonDumper().dump(BalanceCertificate(verdict=Verdict.BALANCED, weights=(Fraction(1),)))


def test_charpoly_dumper_lists_coefficients_from_the_leading_term() -> None:
  payload = CharPolyJsonDumper().dump(CharPoly.create([-9, 15, -7, 1], 4))

  assert payload == {"schema": "1", "n": 4, "field": "Q", "coeffs": ["1", "-7", "15", "-9"]}


def test_charpoly_dumper_names_the_field() -> None:
  assert CharPolyJsonDumper().dump(projective_charpoly(3))["field"] == str(Field.F2)


def test_bounds_dumper_writes_integers_as_strings() -> None:
  payload = BoundsJsonDumper().dump(bounds_report(4))

  assert payload == {
    "schema": "1",
    "n": 4,
    "lower_power": "8",
    "lower_product": "30",
    "upper": "512",
    "E": "32",
    "sandwich": True,
  }


def test_bounds_dumper_writes_null_without_a_count() -> None:
  payload = json.loads(BoundsJsonDumper().dumps(bounds_report(20)))

  assert payload["E"] is None
  assert payload["sandwich"] is None
  assert int(payload["upper"]) == 1 << 361


def test_count_dumper() -> None:
  count = ChamberCount(n=3, count=6, complete=True, lp_calls=4, generations=3)

  assert CountJsonDumper().dump(count) == {
    "schema": "1",
    "n": 3,
    "count": "6",
    "complete": True,
    "lp_calls": 4,
    "generations": 3,
  }
