import numpy as np
import pytest
from scipy.ndimage import gaussian_filter


def synthetic_scene(seed: int, shape=(512, 512)) -> np.ndarray:
    """Deterministic naturalistic test image on the 0..255 scale.

    1/f-spectrum noise modulated by a smooth contrast envelope plus a few
    hard-edged objects, so bandpass coefficients show the heavy-tailed,
    locally-varying statistics the scale-mixture model expects.
    """
    rng = np.random.default_rng(seed)
    h, w = shape
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None, :]
    radius = np.hypot(fy, fx)
    radius[0, 0] = 1.0
    spectrum = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / radius**1.1
    base = np.fft.ifft2(spectrum).real
    base = (base - base.mean()) / base.std()
    envelope = gaussian_filter(rng.standard_normal(shape), min(h, w) // 21)
    envelope = np.exp(1.2 * envelope / envelope.std())
    img = base * envelope
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(5):
        cy, cx = rng.uniform(0.1, 0.9) * h, rng.uniform(0.1, 0.9) * w
        ry, rx = rng.uniform(0.03, 0.15) * h, rng.uniform(0.03, 0.15) * w
        mask = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 < 1
        img[mask] = img[mask] * 0.3 + rng.uniform(-2.5, 2.5)
    img = (img - img.min()) / (img.max() - img.min())
    return 15.0 + 225.0 * img


@pytest.fixture(scope="session")
def scene() -> np.ndarray:
    return synthetic_scene(0, (256, 256))


@pytest.fixture(scope="session")
def scenes_512() -> list[np.ndarray]:
    return [synthetic_scene(s, (512, 512)) for s in range(10)]
