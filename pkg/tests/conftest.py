import pytest
from hypothesis import settings

from pkit import config

settings.register_profile("pkit", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("pkit")


@pytest.fixture(autouse=True, scope="session")
def cross_check_on():
    """Test builds always repeat window decisions at the larger level."""
    old = config.CROSS_CHECK
    config.CROSS_CHECK = True
    yield
    config.CROSS_CHECK = old
