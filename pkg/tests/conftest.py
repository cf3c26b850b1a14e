import pytest

from unbalanced.domain.values import Field


@pytest.fixture(params=[Field.Q, Field.F2])
def field(request: pytest.FixtureRequest) -> Field:
  """Returns both coefficient fields for every test that asks for one.

  Rank, closure and lattice tests that hold over any field run once over Q
  and once over F2.
  """
  return request.param
