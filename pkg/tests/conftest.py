"""Shared fixtures for the test suite.

Decomposition identity tests draw band-limited operands at band N/(5L).
Pointwise products of two such operands stay inside half the frequency box,
which is the regime where the product-then-multiplier reference routes are
exact; the default draw band N/(4L) sits exactly on the folding boundary and
is only suitable for inequality sampling, not for identity checks.
"""

import numpy as np
import pytest

from fracleib import grid

G1 = grid.GridSpec(1, 256, 32.0)
G1_FINE = grid.GridSpec(1, 1024, 32.0)
G2 = grid.GridSpec(2, 64, 16.0)


@pytest.fixture
def g1():
    return G1


@pytest.fixture
def g1_fine():
    return G1_FINE


@pytest.fixture
def g2():
    return G2


def identity_band(spec):
    return spec.N / (5.0 * spec.L)


def draw_identity_pair(spec, seed, real=True):
    """Two random draws whose pointwise product is alias-free."""
    band = identity_band(spec)
    f = grid.make_test_function(
        spec, "random_bandlimited", seed=seed, band=band, real=real
    )
    g = grid.make_test_function(
        spec, "random_bandlimited", seed=seed + 1000, band=band, real=real
    )
    return f, g


def rel_l2_error(got, want):
    num = grid.l2_norm(got - want)
    den = grid.l2_norm(want)
    return num / den if den > 0 else num


def rng_values(spec, seed, positive=False):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(spec.shape)
    if positive:
        vals = np.abs(vals) + 0.1
    return vals
