"""Exact margin linear programs.

`lp_max_margin` maximizes a margin variable ``t`` subject to

    a_k · v >= t    for margin rows,
    a_k · v  = 0    for zero rows,
    lower_i <= v_i <= upper_i,

over exact rationals. The solver runs the simplex method on the dual problem

    minimize    sum_i upper_i * alpha_i - lower_i * beta_i
    subject to  sum_k lambda_k (-a_k) + sum_k (mu+_k - mu-_k) a_k + alpha - beta = 0
                sum_k lambda_k = 1
                lambda, mu+, mu-, alpha, beta >= 0

which has one row per variable plus one, whatever the number of constraints.
A feasible starting basis always exists (one lambda plus one bound multiplier
per coordinate), so there is no phase one. Pivoting follows Bland's rule, which
guarantees termination on degenerate problems.

The tableau is kept fraction-free: every entry is an integer and the true
tableau is the integer tableau divided by a shared positive determinant. Each
pivot is the exact-division update used by integer-pivoting codes, so no gcd is
ever taken inside the loop. The optimal primal point is read off the final basis
by solving ``B^T w = c_B`` exactly. The optimal lambdas are the balancing
weights used by the families layer.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Self

from unbalanced.domain.values import BigRational, IntVector, Sense
from unbalanced.errors import (
  DimensionMismatchError,
  InputError,
  LpInfeasibleError,
  LpUnboundedError,
)
from unbalanced.kernel.linalg import solve_unique
from unbalanced.kernel.rational import common_denominator, dot


@dataclass(frozen=True, slots=True, kw_only=True)
class LpProblem:
  """A margin-maximization problem with integer rows and rational box bounds."""

  dimension: int
  rows: tuple[IntVector, ...]
  senses: tuple[Sense, ...]
  lower: tuple[BigRational, ...]
  upper: tuple[BigRational, ...]

  @classmethod
  def create(
    cls,
    rows: Sequence[Sequence[int]],
    senses: Sequence[Sense | str] | None = None,
    lower: BigRational | int | Sequence[BigRational | int] = -1,
    upper: BigRational | int | Sequence[BigRational | int] = 1,
  ) -> Self:
    """Build a problem from user-facing values.

    `senses` defaults to all margin rows. Scalar bounds apply to every variable.

    Raises:
        InputError: If there are no rows, a row is not integral, or a bound
            interval is empty.
        DimensionMismatchError: If rows, senses or bounds disagree in length.
    """
    if not rows:
      raise InputError("a margin problem needs at least one row")
    dimension = len(rows[0])
    if dimension < 1:
      raise InputError("a margin problem needs at least one variable")
    owned_rows: list[IntVector] = []
    for row in rows:
      if len(row) != dimension:
        raise DimensionMismatchError(dimension, len(row))
      if any(isinstance(x, bool) or int(x) != x for x in row):
        raise InputError(f"row {tuple(row)!r} is not integral")
      owned_rows.append(tuple(int(x) for x in row))
    if senses is None:
      owned_senses = (Sense.MARGIN,) * len(owned_rows)
    else:
      if len(senses) != len(owned_rows):
        raise DimensionMismatchError(len(owned_rows), len(senses))
      owned_senses = tuple(Sense(sense) for sense in senses)
    low = _expand_bound(lower, dimension)
    high = _expand_bound(upper, dimension)
    for lo, hi in zip(low, high):
      if lo > hi:
        raise InputError(f"empty bound interval [{lo}, {hi}]")
    return cls(dimension=dimension, rows=tuple(owned_rows), senses=owned_senses, lower=low, upper=high)


def _expand_bound(
  bound: BigRational | int | Sequence[BigRational | int], dimension: int
) -> tuple[BigRational, ...]:
  if isinstance(bound, (int, Fraction)):
    return (Fraction(bound),) * dimension
  if len(bound) != dimension:
    raise DimensionMismatchError(dimension, len(bound))
  return tuple(Fraction(b) for b in bound)


@dataclass(frozen=True, slots=True, kw_only=True)
class LpSolution:
  """Optimal margin, a witness attaining it, and the optimal row multipliers.

  `multipliers[k]` is the dual value of row k: a nonnegative weight for a
  margin row and a free multiplier for a zero row. The margin-row weights sum
  to 1, and when `margin` is 0 they satisfy ``sum_k w_k a_k = sum_k m_k a_k``
  over the zero rows, which is the balancing identity.
  """

  margin: BigRational
  witness: tuple[BigRational, ...]
  multipliers: tuple[BigRational, ...]
  pivots: int

  def residuals(self, problem: LpProblem) -> tuple[BigRational, ...]:
    """Row values ``a_k · v`` of the witness, in exact rationals."""
    return tuple(dot(row, self.witness) for row in problem.rows)

  def is_valid_for(self, problem: LpProblem) -> bool:
    """Whether the witness satisfies every constraint of `problem` with margin `margin`."""
    if any(not lo <= x <= hi for x, lo, hi in zip(self.witness, problem.lower, problem.upper)):
      return False
    for value, sense in zip(self.residuals(problem), problem.senses):
      if sense is Sense.MARGIN and value < self.margin:
        return False
      if sense is Sense.ZERO and value != 0:
        return False
    return True


class _DualTableau:
  """Fraction-free simplex tableau for the dual of a margin problem."""

  __slots__ = ("problem", "columns", "costs", "rows", "objective", "basis", "det", "pivots")

  problem: LpProblem
  columns: list[list[int]]
  costs: list[BigRational]
  rows: list[list[int]]
  objective: list[int]
  basis: list[int]
  det: int
  pivots: int

  def __init__(self, problem: LpProblem) -> None:
    self.problem = problem
    d = problem.dimension
    margin_rows = [row for row, sense in zip(problem.rows, problem.senses) if sense is Sense.MARGIN]
    zero_rows = [row for row, sense in zip(problem.rows, problem.senses) if sense is Sense.ZERO]
    if not margin_rows:
      raise LpUnboundedError()

    # Column order fixes Bland's index order: lambdas, mu pairs, alphas, betas.
    columns: list[list[int]] = []
    costs: list[BigRational] = []
    for row in margin_rows:
      columns.append([-x for x in row] + [1])
      costs.append(Fraction(0))
    for row in zero_rows:
      columns.append([*row, 0])
      columns.append([-x for x in row] + [0])
      costs.extend((Fraction(0), Fraction(0)))
    for i in range(d):
      columns.append([int(i == j) for j in range(d)] + [0])
      costs.append(problem.upper[i])
    for i in range(d):
      columns.append([-int(i == j) for j in range(d)] + [0])
      costs.append(-problem.lower[i])
    self.columns = columns
    self.costs = costs

    scale = common_denominator(costs)
    width = len(columns)
    self.rows = [[columns[j][r] for j in range(width)] + [int(r == d)] for r in range(d + 1)]
    self.objective = [int(c * scale) for c in costs] + [0]
    self.basis = [-1] * (d + 1)
    self.det = 1
    self.pivots = 0

    # Starting basis: the first lambda, plus alpha_i or beta_i by the sign of its row entry.
    alpha_start = len(margin_rows) + 2 * len(zero_rows)
    first = margin_rows[0]
    for i in range(d):
      col = alpha_start + i if first[i] >= 0 else alpha_start + d + i
      self._pivot(i, col)
    self._pivot(d, 0)
    self.pivots = 0

  def _pivot(self, p: int, q: int) -> None:
    prow = self.rows[p]
    pq = prow[q]
    det = self.det
    for r, row in enumerate(self.rows):
      if r == p:
        continue
      rq = row[q]
      if rq:
        self.rows[r] = [(x * pq - rq * y) // det for x, y in zip(row, prow)]
      elif pq != det:
        self.rows[r] = [x * pq // det for x in row]
    zq = self.objective[q]
    if zq:
      self.objective = [(x * pq - zq * y) // det for x, y in zip(self.objective, prow)]
    elif pq != det:
      self.objective = [x * pq // det for x in self.objective]
    if pq < 0:
      self.rows = [[-x for x in row] for row in self.rows]
      self.objective = [-x for x in self.objective]
      pq = -pq
    self.det = pq
    self.basis[p] = q
    self.pivots += 1

  def run(self) -> None:
    """Pivot with Bland's rule until every reduced cost is nonnegative."""
    width = len(self.columns)
    rhs = width
    while True:
      entering = next((j for j in range(width) if self.objective[j] < 0), None)
      if entering is None:
        return
      leaving = -1
      best_num = best_den = 0
      for r, row in enumerate(self.rows):
        coef = row[entering]
        if coef <= 0:
          continue
        num = row[rhs]
        if leaving < 0:
          leaving, best_num, best_den = r, num, coef
          continue
        # Compare num/coef with best_num/best_den; both denominators are positive.
        lhs = num * best_den
        rhs_value = best_num * coef
        if lhs < rhs_value or (lhs == rhs_value and self.basis[r] < self.basis[leaving]):
          leaving, best_num, best_den = r, num, coef
      if leaving < 0:
        # The dual is unbounded below, so the primal has no feasible point.
        raise LpInfeasibleError("the bounds and zero rows admit no common point")
      self._pivot(leaving, entering)

  def optimal_value(self) -> BigRational:
    scale = common_denominator(self.costs)
    return Fraction(-self.objective[-1], self.det * scale)

  def basic_values(self) -> dict[int, BigRational]:
    return {col: Fraction(row[-1], self.det) for col, row in zip(self.basis, self.rows)}

  def primal_point(self) -> tuple[BigRational, ...]:
    """Solve ``B^T w = c_B``; `w` is ``(v_1, ..., v_d, t)``."""
    system = [self.columns[col] for col in self.basis]
    values = [self.costs[col] for col in self.basis]
    solution = solve_unique(system, values)
    if solution is None:
      raise LpInfeasibleError("the optimal basis is singular")
    return solution


def lp_optimal_margin(problem: LpProblem) -> BigRational:
  """Exact optimal margin of `problem`, without extracting a witness.

  Raises:
      LpUnboundedError: If the problem has no margin rows.
      LpInfeasibleError: If the bounds and zero rows have no common point.
  """
  tableau = _DualTableau(problem)
  tableau.run()
  return tableau.optimal_value()


def lp_max_margin(problem: LpProblem) -> LpSolution:
  """Solve `problem` exactly and return its optimal margin, witness and multipliers.

  Raises:
      LpUnboundedError: If the problem has no margin rows.
      LpInfeasibleError: If the bounds and zero rows have no common point.
  """
  tableau = _DualTableau(problem)
  tableau.run()
  point = tableau.primal_point()
  margin = point[-1]
  if margin != tableau.optimal_value():
    raise LpInfeasibleError("primal and dual optimal values disagree")

  values = tableau.basic_values()
  margin_count = sum(1 for sense in problem.senses if sense is Sense.MARGIN)
  multipliers: list[BigRational] = []
  next_margin = 0
  next_pair = margin_count
  for sense in problem.senses:
    if sense is Sense.MARGIN:
      multipliers.append(values.get(next_margin, Fraction(0)))
      next_margin += 1
    else:
      plus = values.get(next_pair, Fraction(0))
      minus = values.get(next_pair + 1, Fraction(0))
      multipliers.append(plus - minus)
      next_pair += 2
  return LpSolution(
    margin=margin, witness=point[:-1], multipliers=tuple(multipliers), pivots=tableau.pivots
  )