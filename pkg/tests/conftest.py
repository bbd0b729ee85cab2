import numpy as np
import pytest

import latconv
from latconv import examples


def conv_oracle(fd, gd):
    """Independent brute-force double-sum convolution on plain dicts."""
    out = {}
    for x, a in fd.items():
        for y, b in gd.items():
            k = tuple(xi + yi for xi, yi in zip(x, y))
            out[k] = out.get(k, 0.0) + a * b
    return {k: v for k, v in out.items() if v != 0.0}


def power_oracle(fd, n):
    out = dict(fd)
    for _ in range(n - 1):
        out = conv_oracle(out, fd)
    return out


def random_function(rng, dim, max_points=12, radius=2, normalized=True):
    k = rng.integers(1, max_points + 1)
    pts = rng.integers(-radius, radius + 1, size=(k, dim))
    vals = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    f = latconv.LatticeFunction(dim, pts, vals)
    if normalized and len(f):
        f = f.scale(1.0 / latconv.norm_l1(f))
    return f


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240901)


@pytest.fixture(scope="session")
def intro_analysis():
    return latconv.analyze(examples.intro())


@pytest.fixture(scope="session")
def ex71_analysis():
    return latconv.analyze(examples.ex71())


@pytest.fixture(scope="session")
def ex72_analysis():
    return latconv.analyze(examples.ex72())


@pytest.fixture(scope="session")
def ex73_analysis():
    return latconv.analyze(examples.ex73())


@pytest.fixture(scope="session")
def ex74_analysis():
    return latconv.analyze(examples.ex74())


@pytest.fixture(scope="session")
def ex75_analysis():
    return latconv.analyze(examples.get("ex75:3,2"))


@pytest.fixture(scope="session")
def srw2_analysis():
    return latconv.analyze(examples.srw(2))
