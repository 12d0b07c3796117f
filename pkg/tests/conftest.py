from dataclasses import replace

import pytest

from crvanet.config import ScenarioConfig


@pytest.fixture
def default_config():
    return ScenarioConfig().validate()


@pytest.fixture
def short_config():
    """One-second default scenario, enough events for state-machine checks."""
    return replace(ScenarioConfig(), running_time=1.0, seed=42).validate()
