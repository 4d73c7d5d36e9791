import numpy as np
import pytest

from fpfm.core import settings
from fpfm.core.params import BoundaryTag, BoundaryTagging, MaterialParams
from fpfm.core.rate_laws import LinearRateLaw
from fpfm.mesh import build_rect_mesh


@pytest.fixture
def material():
    return MaterialParams(
        lame_lambda=1.0,
        lame_mu=1.0,
        g_c=1.0,
        epsilon=0.1,
        rate_law=LinearRateLaw(alpha=0.1),
        residual_stiffness=0.0,
    )


@pytest.fixture
def clamped_square():
    """Unit square, every side Dirichlet"""
    return build_rect_mesh(1.0, 1.0, 0.125, BoundaryTagging.uniform(BoundaryTag.DIRICHLET))


@pytest.fixture
def stretched_square():
    """Unit square clamped on the bottom and top only"""
    tags = BoundaryTagging(bottom=BoundaryTag.DIRICHLET, top=BoundaryTag.DIRICHLET)
    return build_rect_mesh(1.0, 1.0, 0.125, tags)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def no_catalog(monkeypatch):
    """Runs started by tests never touch the run catalog"""
    monkeypatch.setattr(settings, "RECORD_RUNS", False)
