import numpy as np
import pytest

from reassembly.core import make_matrix


def random_matrix(rng, f, center=0, first_id=1):
    probs = rng.dirichlet(np.ones(9), size=f)
    return make_matrix(center, [(first_id + i, [float(p) for p in probs[i]]) for i in range(f)])


def structured_image(rng, height=480, width=480):
    """Test image with strong spatial structure (gradients plus blobs)."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    base = np.stack([
        255.0 * yy / height,
        255.0 * xx / width,
        255.0 * (1.0 - yy / height) * (xx / width),
    ], axis=-1)
    noise = rng.normal(0.0, 12.0, size=base.shape)
    return np.clip(base + noise, 0, 255).astype(np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
