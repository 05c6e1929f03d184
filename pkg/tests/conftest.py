import dataclasses

import pytest

from dro_offload.config import default_config


@pytest.fixture
def cfg():
    return default_config()


@pytest.fixture
def small_cfg():
    """I=4, J=2 instance small enough for the exhaustive oracle."""
    base = default_config()
    return dataclasses.replace(
        base,
        scenario=dataclasses.replace(base.scenario, num_tds=4, num_uavs=2, quota_uav=2),
        experiment=dataclasses.replace(base.experiment, seeds=(1, 2, 3)),
    )
