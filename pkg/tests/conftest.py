import numpy as np
import pytest

from panofuse.geometry import PanoGeometry
from panofuse.synth import SceneSpec, synth_scene


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_scene():
    """Low-res box-room scene shared by the pipeline tests."""
    spec = SceneSpec(image_width=320, image_height=240)
    bundles, truth = synth_scene(spec)
    return spec, bundles, truth


@pytest.fixture(scope="session")
def small_pano_geometry():
    return PanoGeometry(1024, 512)
