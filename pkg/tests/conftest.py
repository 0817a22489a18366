import pytest

from fermiforge.operators import QubitOperator


@pytest.fixture(scope="session")
def h2():
    from fermiforge.fixtures import h2_fixture

    return h2_fixture()


@pytest.fixture(scope="session")
def rdm_operator_9term():
    """The nine RDM measurement terms of the two-qubit fragment example."""
    op = QubitOperator.zero()
    for text, coeff in [
        ("X0 X1", 0.25), ("X0", 0.25), ("X0 Z1", 0.25), ("Z1", 0.25),
        ("Y0 Y1", -0.25), ("Z0", 0.25), ("Z0 X1", 0.25), ("X1", 0.25),
        ("Z0 Z1", 0.25),
    ]:
        op = op + QubitOperator(text, coeff)
    return op
