import pytest

from scottlab import tf


@pytest.fixture(scope="session")
def tf_solution():
    """One shared universal-profile solve for the whole suite."""
    return tf.solve_tf_atom()
