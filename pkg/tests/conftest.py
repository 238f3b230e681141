import math

import numpy as np
import pytest

from spherelab.sphere import QuadratureGrid

# filled by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def dumbbell_profile(n, m=2.0):
    """Closed planar curve with tangent angle t + (m/2) sin 2t.

    Curvature is proportional to 1 + m cos 2t, so for m > 1 the curve has
    two round lobes joined by a concave, gently curved waist.
    """
    t = 2 * np.pi * np.arange(n) / n
    z = np.exp(1j * (t + 0.5 * m * np.sin(2 * t)))
    Z = np.fft.fft(z)
    k = np.fft.fftfreq(n, 1 / n)
    Z[k != 0] /= 1j * k[k != 0]
    Z[0] = 0
    w = np.fft.ifft(Z)
    return w.real, w.imag


def dumbbell_torus_points(n_u, n_v, m=2.0, scale=0.5):
    """Rotation torus (c cos th, c sin th, w1, w2) whose profile (c, w1, w2) is a waisted curve.

    The profile sits in a gnomonic chart of S^2 centred a quarter turn
    from the rotation axis, so away from the waist it looks like the
    Clifford torus.
    """
    x, y = dumbbell_profile(n_v, m)
    a = math.pi / 4
    ctr = np.array([math.cos(a), math.sin(a), 0.0])
    e1 = np.array([-math.sin(a), math.cos(a), 0.0])
    e2 = np.array([0.0, 0.0, 1.0])
    prof = ctr + scale * x[:, None] * e1 + scale * y[:, None] * e2
    prof /= np.linalg.norm(prof, axis=-1, keepdims=True)
    c, w1, w2 = prof.T
    th = (2 * np.pi * np.arange(n_u) / n_u)[:, None]
    return np.stack([c * np.cos(th), c * np.sin(th),
                     np.broadcast_to(w1, (n_u, n_v)), np.broadcast_to(w2, (n_u, n_v))], axis=-1)


@pytest.fixture
def grid64():
    return QuadratureGrid(64, 64)


@pytest.fixture
def grid128():
    return QuadratureGrid(128, 128)
