import os

import pytest
from hypothesis import HealthCheck, settings

# Fixed seed for every property test so runs are reproducible.
settings.register_profile(
    "pgcm",
    derandomize=True,
    deadline=None,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("pgcm")

SLOW = os.environ.get("PGCM_SLOW") == "1"


def pytest_collection_modifyitems(config, items):
    if SLOW:
        return
    skip = pytest.mark.skip(reason="set PGCM_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
