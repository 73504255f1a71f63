import logging

import pytest

from sipot.config import get_settings
from sipot.families import FamilyId, direct

# Parameters inside every family's range whose states are regular at the
# singular endpoints, so quadrature and finite differences converge.
SAFE_PARAMS = {
    FamilyId.SCARF2: dict(eps=3.2, rho=0.4),
    FamilyId.POSCHL_TELLER: dict(eps=2.4, rho=2.6),
    FamilyId.MORSE: dict(eps=2.5, rho=1.0),
    FamilyId.MORSE_MIRROR: dict(eps=2.5, rho=-1.0),
    FamilyId.RADIAL_OSC: dict(eps=-1.0, rho=0.5),
    FamilyId.HARM_OSC: dict(beta=1.0, rho=0.3),
    FamilyId.SCARF1: dict(eps=-2.3, rho=0.6),
    FamilyId.SCARF1_COT: dict(eps=-2.3, rho=0.6),
    FamilyId.ROSEN_MORSE2: dict(eps=3.0, rho=1.0),
    FamilyId.ECKART: dict(eps=-3.0, rho=-30.0),
    FamilyId.COULOMB: dict(eps=-1.5, rho=-2.0),
    FamilyId.ROSEN_MORSE1: dict(eps=-2.5, rho=1.5),
    FamilyId.ROSEN_MORSE1_COT: dict(eps=-2.5, rho=1.5),
}


@pytest.fixture
def safe_family():
    def make(fid):
        fid = FamilyId(fid)
        return direct(fid, **SAFE_PARAMS[fid])

    return make


@pytest.fixture(autouse=True)
def _isolate_logging_and_settings():
    # the CLI callback installs its own handler and stops propagation
    logger = logging.getLogger("sipot")
    handlers, level, propagate = list(logger.handlers), logger.level, logger.propagate
    get_settings.cache_clear()
    yield
    logger.handlers[:] = handlers
    logger.setLevel(level)
    logger.propagate = propagate
    get_settings.cache_clear()
