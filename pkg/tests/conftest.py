import math
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from hypquilt import groups as G  # noqa: E402
from hypquilt import quilt as Q  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

LN2 = math.log(2.0)
EXAMPLES = Path(__file__).resolve().parents[1] / "src" / "hypquilt" / "examples"


@pytest.fixture(scope="session")
def shipped_spec():
    return Q.build_quilt_spec(Q.CompactSetSpec.parse([0, 1, 3]), LN2, 3, 10)


@pytest.fixture(scope="session")
def shipped_group(shipped_spec):
    return G.assemble_group(shipped_spec)


@pytest.fixture(scope="session")
def theoremc_spec():
    return Q.build_quilt_spec(Q.CompactSetSpec.parse([0, 1, 3]), 0.5, 3, 10, theoremC=True)


@pytest.fixture(scope="session")
def theoremc_group(theoremc_spec):
    return G.assemble_group(theoremc_spec)


@pytest.fixture(scope="session")
def annulus_group():
    return G.assemble_group(Q.annulus_spec(LN2, 4))
