"""Selections, signatures and swap vectors.

These helpers do not mutate their inputs. The key-based variants
(`selection_masks`, `signature_of_key`) work on packed chamber keys directly
and are what the enumeration hot path uses.
"""

from functools import cache

from unbalanced.domain.families import Family, SignVector, Signature, Subset, SwapVector
from unbalanced.domain.values import IntVector, Mask, _verify_ground_size, full_mask, representative_count
from unbalanced.errors import TrivialSubsetError


@cache
def representative_vectors(n: int) -> tuple[IntVector, ...]:
  """0-1 normals in R^(n-1) of the representatives ``1 .. 2^(n-1) - 1``, in mask order."""
  d = n - 1
  return tuple(tuple(m >> i & 1 for i in range(d)) for m in range(1, representative_count(n) + 1))


def selection_masks(n: int, key: int) -> tuple[Mask, ...]:
  """Member masks selected by a packed chamber key, in representative order."""
  full = full_mask(n)
  return tuple(
    m if key >> (m - 1) & 1 else full ^ m for m in range(1, representative_count(n) + 1)
  )


def selection_to_family(sign_vector: SignVector) -> Family:
  """The family choosing the representative (+1) or its complement (-1) for every pair."""
  return Family.from_masks(selection_masks(sign_vector.n, sign_vector.key), sign_vector.n)


def selection_key(family: Family) -> int | None:
  """Packed chamber key of a selection family, or `None` if it is not a selection."""
  n = family.n
  if n < 2 or len(family) != representative_count(n):
    return None
  full = full_mask(n)
  top = 1 << (n - 1)
  key = 0
  seen = 0
  for mask in family.masks:
    if mask == 0 or mask == full:
      return None
    representative = mask if not mask & top else full ^ mask
    if seen >> representative & 1:
      return None
    seen |= 1 << representative
    if representative == mask:
      key |= 1 << (representative - 1)
  return key


def is_selection(family: Family) -> bool:
  """Whether `family` avoids the empty and full sets and holds exactly one of each complementary pair."""
  return selection_key(family) is not None


def signature_of_masks(n: int, masks: tuple[Mask, ...] | list[Mask]) -> tuple[int, ...]:
  return tuple(sum(mask >> i & 1 for mask in masks) for i in range(n))


def signature(family: Family) -> Signature:
  """Number of members containing each element.

  Families holding [n] itself may reach ``2^(n-1)`` and are not range-checked.
  """
  entries = signature_of_masks(family.n, family.masks)
  if full_mask(family.n) in family.masks:
    return Signature(entries)
  return Signature.create(entries, family.n)


def signature_of_key(n: int, key: int) -> tuple[int, ...]:
  """Signature of the selection encoded by a packed chamber key."""
  return signature_of_masks(n, selection_masks(n, key))


def swap_vector(subset: Subset) -> SwapVector:
  """+1 on the members of `subset`, -1 elsewhere.

  Raises:
      TrivialSubsetError: For the empty set and the full set.
  """
  if subset.is_trivial:
    raise TrivialSubsetError(subset.mask, subset.n)
  return SwapVector(tuple(1 if subset.mask >> i & 1 else -1 for i in range(subset.n)))


def family_swap_sum(family: Family) -> SwapVector:
  """Componentwise sum of the members' swap vectors.

  Equals ``2 * signature - len(family)`` in every coordinate.

  Raises:
      TrivialSubsetError: If a member is the empty set or the full set.
  """
  n = _verify_ground_size(family.n)
  total = SwapVector((0,) * n)
  for member in family.members:
    total = total + swap_vector(member)
  return total
