"""Chamber-count bounds and the table of known counts.

Every quantity here is an exact Python integer or `Fraction`; nothing is
rounded, at any n.
"""

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from types import MappingProxyType

from unbalanced.domain.chambers import ChamberSet
from unbalanced.domain.families import Signature
from unbalanced.errors import AuditError, GroundSizeError, InputError
from unbalanced.ops.families import signature_of_key


@dataclass(frozen=True, slots=True)
class KnownCounts:
  """Published chamber counts E_n, keyed by n."""

  table: Mapping[int, int]
  source: str


KNOWN_COUNTS = KnownCounts(
  table=MappingProxyType(
    {
      1: 0,
      2: 2,
      3: 6,
      4: 32,
      5: 370,
      6: 11292,
      7: 1066044,
      8: 347326352,
      9: 419172756930,
    }
  ),
  source="published counts of maximal unbalanced families of subsets of [n], n = 1..9",
)


def known_count(n: int) -> int | None:
  """The tabulated E_n, or `None` outside the table."""
  return KNOWN_COUNTS.table.get(n)


def _check_positive(n: int) -> int:
  if isinstance(n, bool) or not isinstance(n, int):
    raise TypeError(f"n must be an int, got {type(n)}")
  if n < 1:
    raise InputError(f"n must be at least 1, got {n}")
  return n


@dataclass(frozen=True, slots=True, kw_only=True)
class BoundsTriple:
  n: int
  lower_power: int
  lower_product: int
  upper: int


def bounds_for(n: int) -> BoundsTriple:
  """``2^((n-1)(n-2)/2)``, ``prod(2^i + 1 for i < n-1)`` and ``2^((n-1)^2)``."""
  n = _check_positive(n)
  return BoundsTriple(
    n=n,
    lower_power=1 << ((n - 1) * (n - 2) // 2),
    lower_product=prod((1 << i) + 1 for i in range(n - 1)),
    upper=1 << ((n - 1) ** 2),
  )


def sandwich_check(n: int, e: int) -> bool:
  """Whether e lies strictly between the power bounds and above the product bound."""
  bounds = bounds_for(n)
  return bounds.lower_power < e < bounds.upper and bounds.lower_product <= e


@dataclass(frozen=True, slots=True, kw_only=True)
class BoundsReport:
  n: int
  lower_power: int
  lower_product: int
  upper: int
  e: int | None
  sandwich: bool | None


def bounds_report(n: int, e: int | None = None) -> BoundsReport:
  """Bounds for n, with the sandwich verdict when a count is given or tabulated."""
  bounds = bounds_for(n)
  if e is None:
    e = known_count(n)
  return BoundsReport(
    n=n,
    lower_power=bounds.lower_power,
    lower_product=bounds.lower_product,
    upper=bounds.upper,
    e=e,
    sandwich=None if e is None else sandwich_check(n, e),
  )


def signature_space_bound(n: int) -> int:
  """``2^((n-1)^2)``: the parity-consistent vectors in ``[0, 2^(n-1))^n`` up to the shared parity."""
  if _check_positive(n) < 2:
    raise InputError("signatures are bounded for n >= 2 only")
  return 1 << ((n - 1) ** 2)


@dataclass(frozen=True, slots=True, kw_only=True)
class SignatureSpaceReport:
  n: int
  bound: int
  achieved: int
  parity_consistent: int


def signature_space_report(chambers: ChamberSet) -> SignatureSpaceReport:
  """Count the distinct signatures of the chambers and how many are parity-consistent.

  Raises:
      AuditError: If the count exceeds `signature_space_bound`.
  """
  n = chambers.n
  bound = signature_space_bound(n)
  signatures = {Signature.create(signature_of_key(n, key), n) for key in chambers.keys}
  achieved = len(signatures)
  consistent = sum(1 for signature in signatures if signature.parity_consistent)
  if achieved > bound:
    raise AuditError(f"n={n}: {achieved} distinct signatures exceed the bound {bound}")
  return SignatureSpaceReport(n=n, bound=bound, achieved=achieved, parity_consistent=consistent)


@dataclass(frozen=True, slots=True, kw_only=True)
class FactorialRatioReport:
  ratios: tuple[tuple[int, Fraction], ...]
  increasing_from: int

  @property
  def increasing(self) -> bool:
    """Whether ``E_n / n!`` grows at every step from `increasing_from` on."""
    values = dict(self.ratios)
    return all(
      values[n] > values[n - 1] for n in values if n >= self.increasing_from and n - 1 in values
    )


def factorial_ratio_check(limit: int = 9, increasing_from: int = 6) -> FactorialRatioReport:
  """Exact ``E_n / n!`` over the table up to `limit`.

  Raises:
      GroundSizeError: If `limit` is outside the table.
      AuditError: If the ratio fails to grow from `increasing_from` on.
  """
  top = max(KNOWN_COUNTS.table)
  if not 1 <= limit <= top:
    raise GroundSizeError(limit, 1, top)
  ratios = tuple(
    (n, Fraction(KNOWN_COUNTS.table[n], factorial(n))) for n in range(1, limit + 1)
  )
  report = FactorialRatioReport(ratios=ratios, increasing_from=increasing_from)
  if not report.increasing:
    raise AuditError(f"E_n/n! does not grow from n={increasing_from} to n={limit}")
  return report
