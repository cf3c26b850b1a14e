"""Balance certification.

A family is certified through the chamber coordinates in R^(n-1): a member F
that avoids element n contributes the row ``+a_F`` and a member that contains
n contributes ``-a_([n] minus F)``, where ``a_X`` is the 0-1 vector of X
restricted to the first n-1 elements. The family is unbalanced exactly when
the margin program over these rows has a positive optimum. The optimal
primal point, extended by ``v_n = -sum(v)``, is the separating witness, and
the optimal dual weights are the balancing weights.

Before any linear program is solved, `disjoint_union_certificate` looks for
two disjoint members whose union is [n] or whose union's complement is also a
member. Such a family is balanced, and the offending members are the
certificate.
"""

from collections.abc import Iterable, Sequence
from fractions import Fraction
from itertools import combinations
from logging import getLogger

from unbalanced.domain.families import BalanceCertificate, Family
from unbalanced.domain.values import BigRational, IntVector, Mask, Verdict, full_mask
from unbalanced.errors import CertificateError
from unbalanced.kernel.linalg import solve_unique
from unbalanced.kernel.lp import LpProblem, lp_max_margin, lp_optimal_margin
from unbalanced.ops.families import representative_vectors, selection_masks

logger = getLogger(__name__)


def _signed_row(n: int, mask: Mask) -> IntVector:
  top = 1 << (n - 1)
  if mask & top:
    row = representative_vectors(n)[(full_mask(n) ^ mask) - 1]
    return tuple(-x for x in row)
  return representative_vectors(n)[mask - 1]


def chamber_rows(n: int, key: int) -> tuple[IntVector, ...]:
  """Margin rows in R^(n-1) of the selection encoded by `key`."""
  reps = representative_vectors(n)
  return tuple(
    row if key >> i & 1 else tuple(-x for x in row) for i, row in enumerate(reps)
  )


def _lift(witness: Sequence[BigRational]) -> tuple[BigRational, ...]:
  return (*witness, -sum(witness, Fraction(0)))


def _conflict_certificate(family: Family, conflict: Sequence[Mask]) -> BalanceCertificate:
  weight = Fraction(1, len(conflict))
  chosen = set(conflict)
  weights = [weight if mask in chosen else Fraction(0) for mask in family.masks]
  return BalanceCertificate.balanced(weights, weight)


def find_disjoint_union_conflict(n: int, masks: Iterable[Mask]) -> tuple[Mask, ...] | None:
  """Two disjoint members covering [n], or three members partitioning [n].

  Either configuration balances the family with equal weights.
  """
  full = full_mask(n)
  present = set(masks)
  ordered = sorted(present)
  for i, a in enumerate(ordered):
    for b in ordered[i + 1 :]:
      if a & b:
        continue
      union = a | b
      if union == full:
        return (a, b)
      rest = full ^ union
      if rest in present:
        return (a, b, rest)
  return None


def find_flip_conflict(n: int, present: set[Mask], added: Mask, removed: Mask) -> bool:
  """Disjoint-union test restricted to the configurations a single swap can create.

  `present` is the family after replacing `removed` by `added`. The family
  before the swap is assumed to pass the full test, so only configurations
  that involve `added`, or whose third part was `removed`, need checking.
  """
  full = full_mask(n)
  for a in present:
    if a & added or a == added:
      continue
    union = a | added
    if union == full or full ^ union in present:
      return True
  for a in present:
    if a != removed and not a & ~removed and (removed ^ a) in present:
      return True
  return False


def disjoint_union_certificate(family: Family) -> BalanceCertificate | None:
  """Balanced certificate from a disjoint-union configuration, or `None` if there is none."""
  conflict = find_disjoint_union_conflict(family.n, family.masks)
  if conflict is None:
    return None
  return _conflict_certificate(family, conflict)


def balance_certify(family: Family) -> BalanceCertificate:
  """Certify `family` as balanced or unbalanced with exact evidence.

  The empty family is unbalanced with the zero witness. A family containing the
  empty set or [n] is balanced by weight 1 on that member.
  """
  n = family.n
  if not family.members:
    return BalanceCertificate.unbalanced((0,) * n)
  for index, member in enumerate(family.members):
    if member.is_trivial:
      weights = [Fraction(int(i == index)) for i in range(len(family))]
      return BalanceCertificate.balanced(weights, 1 if member.mask else 0)
  quick = disjoint_union_certificate(family)
  if quick is not None:
    return quick

  problem = LpProblem.create([_signed_row(n, mask) for mask in family.masks])
  solution = lp_max_margin(problem)
  logger.debug("certified %d members of n=%d in %d pivots", len(family), n, solution.pivots)
  if solution.margin > 0:
    return BalanceCertificate.unbalanced(_lift(solution.witness))
  top = 1 << (n - 1)
  constant = sum(
    (w for w, mask in zip(solution.multipliers, family.masks) if mask & top), Fraction(0)
  )
  return BalanceCertificate.balanced(solution.multipliers, constant)


def key_is_unbalanced(n: int, key: int) -> bool:
  """Verdict-only certification of the selection encoded by `key`."""
  if find_disjoint_union_conflict(n, selection_masks(n, key)) is not None:
    return False
  return lp_optimal_margin(LpProblem.create(chamber_rows(n, key))) > 0


def verify_certificate(family: Family, certificate: BalanceCertificate) -> None:
  """Re-check `certificate` against `family` in exact rationals.

  Raises:
      CertificateError: Naming the first check that fails.
  """
  n = family.n
  match certificate.verdict:
    case Verdict.UNBALANCED:
      witness = certificate.witness
      if witness is None or certificate.weights is not None:
        raise CertificateError("an unbalanced certificate carries exactly a witness")
      if len(witness) != n:
        raise CertificateError(f"witness has {len(witness)} entries, expected {n}")
      if sum(witness, Fraction(0)) != 0:
        raise CertificateError("witness does not sum to zero")
      for member in family.members:
        total = sum((witness[i - 1] for i in member.elements), Fraction(0))
        if total <= 0:
          raise CertificateError(f"member {member.elements!r} has non-positive sum {total}")
    case Verdict.BALANCED:
      weights = certificate.weights
      if weights is None or certificate.constant is None or certificate.witness is not None:
        raise CertificateError("a balanced certificate carries exactly weights and a constant")
      if len(weights) != len(family):
        raise CertificateError(f"{len(weights)} weights for {len(family)} members")
      if any(w < 0 for w in weights):
        raise CertificateError("a weight is negative")
      if sum(weights, Fraction(0)) != 1:
        raise CertificateError("weights do not sum to 1")
      for i in range(n):
        value = sum(
          (w for w, mask in zip(weights, family.masks) if mask >> i & 1), Fraction(0)
        )
        if value != certificate.constant:
          raise CertificateError(
            f"coordinate {i + 1} has value {value}, expected {certificate.constant}"
          )


def balanced_by_elimination(family: Family) -> BalanceCertificate | None:
  """Search minimal balanced subfamilies by exact elimination.

  Every balanced family contains a minimal balanced subfamily of at most n
  members, whose convex-combination system has a unique, strictly positive
  solution. Returns a balanced certificate for the first one found, or `None`
  when there is none, meaning the family is unbalanced.
  """
  n = family.n
  masks = family.masks
  for size in range(1, min(n, len(masks)) + 1):
    for chosen in combinations(range(len(masks)), size):
      rows: list[list[int]] = []
      for i in range(n):
        rows.append([masks[j] >> i & 1 for j in chosen] + [-1])
      rows.append([1] * size + [0])
      solution = solve_unique(rows, [0] * n + [1])
      if solution is None or any(x <= 0 for x in solution[:size]):
        continue
      weights = [Fraction(0)] * len(masks)
      for j, x in zip(chosen, solution[:size]):
        weights[j] = x
      return BalanceCertificate.balanced(weights, solution[size])
  return None
