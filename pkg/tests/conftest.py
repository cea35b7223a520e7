import warnings

import pytest
from hypothesis import HealthCheck, settings

from eitsim.analytic import ApproximationWarning

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def quiet():
    """Silence validity-margin warnings from approximate forms."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ApproximationWarning)
        yield
