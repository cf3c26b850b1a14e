"""Exception hierarchy for unbalanced.

This module defines all custom exceptions used throughout the library.
Exceptions are organized hierarchically to allow fine-grained error handling.

Exception Hierarchy:
    Exception
    ├── InputError (also ValueError)
    │   ├── GroundSizeError
    │   ├── DimensionMismatchError
    │   ├── TrivialSubsetError
    │   ├── GeneratorNotInGroundError
    │   ├── InvalidFamilyError
    │   ├── InvalidSignVectorError
    │   ├── InvalidSignatureError
    │   └── MalformedInputError
    ├── LpError
    │   ├── LpUnboundedError
    │   └── LpInfeasibleError
    ├── AuditError
    │   ├── ParityViolationError
    │   ├── SignatureCollisionError
    │   ├── SelectionSignatureOverlapError
    │   ├── WhitneyInequalityError
    │   ├── ZaslavskyMismatchError
    │   ├── CountMismatchError
    │   └── CertificateError
    └── CheckpointError
        ├── CheckpointIntegrityError
        ├── MalformedCheckpointError
        └── CheckpointMismatchError

Note:
    `InputError` derives from `ValueError` so callers that only care about bad
    arguments can keep catching the builtin. A damaged checkpoint is
    never an `InputError`: truncation, a missing digest and a bad layout all
    surface as a `CheckpointError`.
"""

from collections.abc import Sequence


class InputError(ValueError):
  """Base class for invalid arguments and malformed user input."""

  pass


class LpError(Exception):
  """Base class for linear-programming failures."""

  pass


class AuditError(Exception):
  """Base class for a failed verification of a claimed mathematical property."""

  pass


class CheckpointError(Exception):
  """Base class for checkpoint file errors."""

  pass


class GroundSizeError(InputError):
  """Raised when a ground-set size falls outside the range an operation supports.

  Args:
      n: The rejected ground-set size.
      low: Smallest accepted value.
      high: Largest accepted value.

  Attributes:
      n: Rejected size.
      low: Lower limit.
      high: Upper limit.
      message: Human-readable error message.
  """

  def __init__(self, n: int, low: int, high: int) -> None:
    self.n = n
    self.low = low
    self.high = high
    self.message = f"ground-set size n={n} is outside the supported range {low}..{high}"
    super().__init__(self.message)


class DimensionMismatchError(InputError):
  """Raised when vectors that must share one ambient dimension do not.

  Args:
      expected: The dimension every vector should have.
      received: The offending vector's dimension.
  """

  def __init__(self, expected: int, received: int) -> None:
    self.expected = expected
    self.received = received
    self.message = f"vector has dimension {received}, expected {expected}"
    super().__init__(self.message)


class TrivialSubsetError(InputError):
  """Raised when the empty set or the full ground set is used where a proper subset is required.

  Args:
      mask: The bit mask of the offending subset.
      n: The ground-set size.
  """

  def __init__(self, mask: int, n: int) -> None:
    self.mask = mask
    self.n = n
    kind = "empty set" if mask == 0 else f"full set [{n}]"
    self.message = f"the {kind} has no swap vector; a nonempty proper subset is required"
    super().__init__(self.message)


class GeneratorNotInGroundError(InputError):
  """Raised when a closure generator is not one of the ground vectors.

  Args:
      generator: The generator that was not found.
  """

  def __init__(self, generator: Sequence[int]) -> None:
    self.generator = tuple(generator)
    self.message = f"generator {self.generator!r} is not an element of the ground set"
    super().__init__(self.message)


class InvalidFamilyError(InputError):
  """Raised when a family of subsets violates its construction invariants.

  Args:
      reason: What is wrong with the family.
  """

  def __init__(self, reason: str) -> None:
    self.reason = reason
    self.message = f"invalid family: {reason}"
    super().__init__(self.message)


class InvalidSignVectorError(InputError):
  """Raised when a sign vector has the wrong length or a non-sign entry.

  Args:
      n: The ground-set size.
      reason: What is wrong with the vector.
  """

  def __init__(self, n: int, reason: str) -> None:
    self.n = n
    self.reason = reason
    self.message = f"invalid sign vector for n={n}: {reason}"
    super().__init__(self.message)


class InvalidSignatureError(InputError):
  """Raised when a signature has the wrong length or an entry out of range.

  Args:
      n: The ground-set size.
      reason: What is wrong with the signature.
  """

  def __init__(self, n: int, reason: str) -> None:
    self.n = n
    self.reason = reason
    self.message = f"invalid signature for n={n}: {reason}"
    super().__init__(self.message)


class MalformedInputError(InputError):
  """Raised when serialized input (JSON or chamber files) cannot be parsed.

  Args:
      source: Where the input came from (a path or ``"<stdin>"``).
      reason: What could not be parsed.
  """

  def __init__(self, source: str, reason: str) -> None:
    self.source = source
    self.reason = reason
    self.message = f"malformed input from {source}: {reason}"
    super().__init__(self.message)


class LpUnboundedError(LpError):
  """Raised when the margin of a linear program has no finite maximum.

  This only happens when the problem has no margin rows at all.
  """

  def __init__(self) -> None:
    self.message = "the margin is unbounded: the problem has no margin rows"
    super().__init__(self.message)


class LpInfeasibleError(LpError):
  """Raised when the constraints of a linear program admit no solution.

  Args:
      reason: Which part of the system is inconsistent.
  """

  def __init__(self, reason: str) -> None:
    self.reason = reason
    self.message = f"the linear program is infeasible: {reason}"
    super().__init__(self.message)


class ParityViolationError(AuditError):
  """Raised when a chamber signature mixes even and odd entries.

  Args:
      key: The packed sign key of the offending chamber.
      signature: Its signature.
  """

  def __init__(self, key: int, signature: Sequence[int]) -> None:
    self.key = key
    self.signature = tuple(signature)
    self.message = f"chamber {key:#x} has mixed-parity signature {self.signature!r}"
    super().__init__(self.message)


class SignatureCollisionError(AuditError):
  """Raised when two distinct chambers share one signature.

  Args:
      first: Packed key of the first chamber.
      second: Packed key of the second chamber.
      signature: The shared signature.
  """

  def __init__(self, first: int, second: int, signature: Sequence[int]) -> None:
    self.first = first
    self.second = second
    self.signature = tuple(signature)
    self.message = (
      f"chambers {first:#x} and {second:#x} share the signature {self.signature!r}"
    )
    super().__init__(self.message)


class SelectionSignatureOverlapError(AuditError):
  """Raised when a balanced selection has the signature of an unbalanced one.

  Args:
      balanced_key: Packed key of the balanced selection.
      unbalanced_key: Packed key of the unbalanced selection.
      signature: The shared signature.
  """

  def __init__(self, balanced_key: int, unbalanced_key: int, signature: Sequence[int]) -> None:
    self.balanced_key = balanced_key
    self.unbalanced_key = unbalanced_key
    self.signature = tuple(signature)
    self.message = (
      f"balanced selection {balanced_key:#x} and unbalanced selection {unbalanced_key:#x}"
      f" share the signature {self.signature!r}"
    )
    super().__init__(self.message)


class WhitneyInequalityError(AuditError):
  """Raised when a rational Whitney number is smaller in magnitude than its F2 counterpart.

  Args:
      n: The ground-set size.
      k: The Whitney index.
      rational: |w_k| over Q.
      binary: |w_k| over F2.
  """

  def __init__(self, n: int, k: int, rational: int, binary: int) -> None:
    self.n = n
    self.k = k
    self.rational = rational
    self.binary = binary
    self.message = f"n={n}: |w_{k}| over Q is {rational}, smaller than {binary} over F2"
    super().__init__(self.message)


class ZaslavskyMismatchError(AuditError):
  """Raised when two routes to a chamber count disagree.

  Args:
      label: Which comparison failed.
      left: The first count.
      right: The second count.
  """

  def __init__(self, label: str, left: int, right: int) -> None:
    self.label = label
    self.left = left
    self.right = right
    self.message = f"{label}: {left} != {right}"
    super().__init__(self.message)


class CountMismatchError(AuditError):
  """Raised when an enumerated count disagrees with a reference count.

  Args:
      n: The ground-set size.
      computed: The enumerated count.
      expected: The reference count.
  """

  def __init__(self, n: int, computed: int, expected: int) -> None:
    self.n = n
    self.computed = computed
    self.expected = expected
    self.message = f"n={n}: enumerated {computed} chambers, expected {expected}"
    super().__init__(self.message)


class CertificateError(AuditError):
  """Raised when a balance certificate fails exact re-verification.

  Args:
      reason: Which check failed.
  """

  def __init__(self, reason: str) -> None:
    self.reason = reason
    self.message = f"certificate does not verify: {reason}"
    super().__init__(self.message)


class CheckpointIntegrityError(CheckpointError):
  """Raised when a checkpoint's embedded digest does not match its contents.

  Args:
      path: The checkpoint path.
      expected: The digest stored in the file.
      received: The digest recomputed from the file contents.
  """

  def __init__(self, path: str, expected: str, received: str) -> None:
    self.path = path
    self.expected = expected
    self.received = received
    self.message = f"checkpoint {path} is corrupt: digest {received} does not match {expected}"
    super().__init__(self.message)


class MalformedCheckpointError(CheckpointError):
  """Raised when a checkpoint is truncated or does not follow the checkpoint layout.

  Args:
      path: The checkpoint path.
      reason: What could not be parsed.
  """

  def __init__(self, path: str, reason: str) -> None:
    self.path = path
    self.reason = reason
    self.message = f"checkpoint {path} is corrupt: {reason}"
    super().__init__(self.message)


class CheckpointMismatchError(CheckpointError):
  """Raised when a checkpoint belongs to a different ground-set size.

  Args:
      path: The checkpoint path.
      expected: The requested n.
      received: The n stored in the checkpoint.
  """

  def __init__(self, path: str, expected: int, received: int) -> None:
    self.path = path
    self.expected = expected
    self.received = received
    self.message = f"checkpoint {path} was written for n={received}, not n={expected}"
    super().__init__(self.message)
