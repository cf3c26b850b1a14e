"""Typed values for set families over [n].

Public code is expected to build values with the `create()` constructors,
which validate the ground-set size and copy caller-owned iterables into owned
tuples. All values are frozen, so they can be shared freely between workers.

Subsets are bit masks: bit ``i - 1`` is set iff element ``i`` is a member.
Representatives of complementary pairs are the nonempty subsets of [n-1],
indexed by their mask value ``1 .. 2^(n-1) - 1``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from unbalanced.domain.values import (
  BigRational,
  GroundSize,
  Mask,
  Verdict,
  _verify_ground_size,
  full_mask,
  representative_count,
)
from unbalanced.errors import InvalidFamilyError, InvalidSignatureError, InvalidSignVectorError

type SubsetLike = Subset | Iterable[int]


@dataclass(frozen=True, slots=True, kw_only=True, order=True)
class Subset:
  """A subset of [n] stored as a bit mask."""

  n: int
  mask: Mask

  @classmethod
  def create(cls, elements: Iterable[int], n: GroundSize) -> Subset:
    """Build a subset from 1-based element labels."""
    n = _verify_ground_size(n)
    mask = 0
    for element in elements:
      if isinstance(element, bool) or not isinstance(element, int) or not 1 <= element <= n:
        raise InvalidFamilyError(f"element {element!r} is not in [{n}]")
      mask |= 1 << (element - 1)
    return Subset(n=n, mask=mask)

  @classmethod
  def from_mask(cls, mask: Mask, n: GroundSize) -> Subset:
    """Build a subset from its bit mask."""
    n = _verify_ground_size(n)
    if not 0 <= mask <= full_mask(n):
      raise InvalidFamilyError(f"mask {mask:#x} does not fit in {n} bits")
    return Subset(n=n, mask=mask)

  @property
  def elements(self) -> tuple[int, ...]:
    """The members as sorted 1-based labels."""
    return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

  @property
  def is_trivial(self) -> bool:
    """Whether this is the empty set or the full set."""
    return self.mask == 0 or self.mask == full_mask(self.n)

  def complement(self) -> Subset:
    """The complement in [n]."""
    return Subset(n=self.n, mask=full_mask(self.n) ^ self.mask)

  def characteristic(self) -> tuple[int, ...]:
    """The 0-1 characteristic vector of length n."""
    return tuple(self.mask >> i & 1 for i in range(self.n))

  def __contains__(self, element: object) -> bool:
    return isinstance(element, int) and 1 <= element <= self.n and bool(self.mask >> (element - 1) & 1)


@dataclass(frozen=True, slots=True, kw_only=True)
class Family:
  """A duplicate-free family of subsets of [n], sorted ascending by mask."""

  n: int
  members: tuple[Subset, ...]

  @classmethod
  def create(cls, members: Iterable[SubsetLike], n: GroundSize) -> Family:
    """Build a family from subsets or element-label iterables.

    Raises:
        InvalidFamilyError: If a member repeats or lives in another ground set.
    """
    n = _verify_ground_size(n)
    owned: list[Subset] = []
    for member in members:
      if isinstance(member, Subset):
        if member.n != n:
          raise InvalidFamilyError(f"member {member.elements!r} belongs to n={member.n}, not n={n}")
        owned.append(member)
      else:
        owned.append(Subset.create(member, n))
    return cls.from_masks((member.mask for member in owned), n)

  @classmethod
  def from_masks(cls, masks: Iterable[Mask], n: GroundSize) -> Family:
    """Build a family from bit masks."""
    n = _verify_ground_size(n)
    ordered = sorted(masks)
    for previous, current in zip(ordered, ordered[1:]):
      if previous == current:
        raise InvalidFamilyError(f"member {Subset(n=n, mask=current).elements!r} appears twice")
    return Family(n=n, members=tuple(Subset.from_mask(mask, n) for mask in ordered))

  @property
  def masks(self) -> tuple[Mask, ...]:
    """Member masks in ascending order."""
    return tuple(member.mask for member in self.members)

  @property
  def has_trivial_member(self) -> bool:
    """Whether the empty set or [n] is a member."""
    return any(member.is_trivial for member in self.members)

  def __len__(self) -> int:
    return len(self.members)

  def __contains__(self, subset: object) -> bool:
    return isinstance(subset, Subset) and subset.n == self.n and subset in self.members


@dataclass(frozen=True, slots=True, kw_only=True)
class SignVector:
  """A chamber candidate: one sign per representative mask ``1 .. 2^(n-1) - 1``.

  ``signs[m - 1]`` is +1 when the representative m itself is selected and -1
  when its complement is.
  """

  n: int
  signs: tuple[int, ...]

  @classmethod
  def create(cls, signs: Iterable[int], n: GroundSize) -> SignVector:
    """Build a sign vector and check its length and entries."""
    n = _verify_ground_size(n, low=2)
    owned = tuple(signs)
    if len(owned) != representative_count(n):
      raise InvalidSignVectorError(n, f"expected {representative_count(n)} signs, got {len(owned)}")
    if any(sign not in (1, -1) for sign in owned):
      raise InvalidSignVectorError(n, "entries must be +1 or -1")
    return SignVector(n=n, signs=owned)

  @classmethod
  def from_key(cls, key: int, n: GroundSize) -> SignVector:
    """Unpack a chamber key: bit ``m - 1`` set means ``signs[m - 1] == +1``."""
    n = _verify_ground_size(n, low=2)
    count = representative_count(n)
    if not 0 <= key < 1 << count:
      raise InvalidSignVectorError(n, f"key {key:#x} does not fit in {count} bits")
    return SignVector(n=n, signs=tuple(1 if key >> i & 1 else -1 for i in range(count)))

  @property
  def key(self) -> int:
    """Signs packed little-endian by representative mask, +1 as a set bit."""
    key = 0
    for i, sign in enumerate(self.signs):
      if sign > 0:
        key |= 1 << i
    return key

  def sign(self, representative: Mask) -> int:
    """Sign of one representative mask."""
    return self.signs[representative - 1]

  def flip(self, representative: Mask) -> SignVector:
    """The sign vector with one representative's sign reversed."""
    signs = list(self.signs)
    signs[representative - 1] = -signs[representative - 1]
    return SignVector(n=self.n, signs=tuple(signs))


@dataclass(frozen=True, slots=True)
class Signature:
  """Per-element membership counts of a family.

  A family without [n] as a member counts each element at most
  ``2^(n-1) - 1`` times; `create` enforces that bound.
  """

  entries: tuple[int, ...]

  @classmethod
  def create(cls, entries: Iterable[int], n: GroundSize) -> Signature:
    """Build a signature of length n with entries in ``0 .. 2^(n-1) - 1``."""
    n = _verify_ground_size(n)
    owned = tuple(entries)
    if len(owned) != n:
      raise InvalidSignatureError(n, f"expected {n} entries, got {len(owned)}")
    high = (1 << (n - 1)) - 1
    for i, entry in enumerate(owned, start=1):
      if isinstance(entry, bool) or not isinstance(entry, int) or not 0 <= entry <= high:
        raise InvalidSignatureError(n, f"entry {i} is {entry!r}, outside 0..{high}")
    return Signature(owned)

  @property
  def all_even(self) -> bool:
    return all(entry % 2 == 0 for entry in self.entries)

  @property
  def all_odd(self) -> bool:
    return all(entry % 2 == 1 for entry in self.entries)

  @property
  def parity_consistent(self) -> bool:
    """Whether all entries share one parity."""
    return self.all_even or self.all_odd


@dataclass(frozen=True, slots=True)
class SwapVector:
  """A ±1 membership vector, or a sum of them over a family."""

  entries: tuple[int, ...]

  @property
  def is_constant(self) -> bool:
    return len(set(self.entries)) <= 1

  def __add__(self, other: SwapVector) -> SwapVector:
    return SwapVector(tuple(a + b for a, b in zip(self.entries, other.entries, strict=True)))


@dataclass(frozen=True, slots=True, kw_only=True)
class BalanceCertificate:
  """Exact evidence for a balance verdict.

  An unbalanced certificate carries a zero-sum `witness` whose sum over every
  member is strictly positive. A balanced certificate carries convex `weights`
  aligned with the family's members and the `constant` value of the weighted
  characteristic sum.
  """

  verdict: Verdict
  witness: tuple[BigRational, ...] | None = None
  weights: tuple[BigRational, ...] | None = None
  constant: BigRational | None = None

  @classmethod
  def unbalanced(cls, witness: Sequence[BigRational | int]) -> BalanceCertificate:
    return BalanceCertificate(
      verdict=Verdict.UNBALANCED, witness=tuple(Fraction(x) for x in witness)
    )

  @classmethod
  def balanced(
    cls, weights: Sequence[BigRational | int], constant: BigRational | int
  ) -> BalanceCertificate:
    return BalanceCertificate(
      verdict=Verdict.BALANCED,
      weights=tuple(Fraction(x) for x in weights),
      constant=Fraction(constant),
    )

  @property
  def is_unbalanced(self) -> bool:
    return self.verdict is Verdict.UNBALANCED
