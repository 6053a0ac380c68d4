import math

import numpy as np
import pytest

from triangular_lsd.ensembles import (
    Ensemble,
    InputDistribution,
    build_asym_upper,
    build_full,
    build_lower_anti,
    build_triangular,
    derive_seed,
    draw,
    flip_conjugate,
    parse_ensemble,
    sample_inputs,
    split_anti_triangular,
)
from triangular_lsd.errors import ShapeError
from triangular_lsd.patterns import LinkPattern, triangle_mask


@pytest.mark.parametrize("pattern", list(LinkPattern))
def test_triangular_shape(pattern):
    n = 12
    m = build_triangular(pattern, n, seed=3)
    assert np.array_equal(m.entries, m.entries.T)
    assert np.all(m.entries[~triangle_mask(n)] == 0)
    assert np.all(m.entries[triangle_mask(n)] != 0)


def test_toeplitz_and_hankel_structure():
    n = 8
    t = build_triangular(LinkPattern.TOEPLITZ, n, seed=1).entries
    h = build_triangular(LinkPattern.HANKEL, n, seed=1).entries
    for i in range(n - 1):
        for j in range(n - 1):
            if (i + 2) + (j + 2) <= n + 1:
                assert t[i, j] == t[i + 1, j + 1]
            if (i + 1) + (j + 2) <= n + 1:
                assert h[i, j + 1] == h[i + 1, j]


def test_input_counts():
    assert build_triangular(LinkPattern.HANKEL, 6).n_inputs == 6
    assert build_triangular(LinkPattern.WIGNER, 4).n_inputs == 6
    assert build_full(LinkPattern.WIGNER, 4).n_inputs == 10


def test_seeding_is_reproducible():
    a = build_triangular(LinkPattern.WIGNER, 10, InputDistribution.RADEMACHER, seed=42)
    b = build_triangular(LinkPattern.WIGNER, 10, InputDistribution.RADEMACHER, seed=42)
    c = build_triangular(LinkPattern.WIGNER, 10, InputDistribution.RADEMACHER, seed=43)
    assert np.array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, c.entries)


def test_derive_seed():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert derive_seed(1, 2) != derive_seed(1, 3)
    assert derive_seed(1, 2, 1) != derive_seed(1, 2, 2)
    assert 0 <= derive_seed(2**64 + 5, 0) < 2**64


def test_sample_inputs_laws():
    rad = sample_inputs(InputDistribution.RADEMACHER, 1000, 5)
    assert set(np.unique(rad)) == {-1.0, 1.0}
    uni = sample_inputs(InputDistribution.UNIFORM_SCALED, 200_000, 5)
    assert np.all(np.abs(uni) <= math.sqrt(3))
    assert abs(uni.var() - 1.0) < 0.02
    gauss = sample_inputs(InputDistribution.STANDARD_GAUSSIAN, 200_000, 5)
    assert abs(gauss.mean()) < 0.02
    assert abs(gauss.var() - 1.0) < 0.02
    with pytest.raises(ValueError):
        sample_inputs(InputDistribution.STANDARD_GAUSSIAN, -1, 5)


def test_lower_anti_triangular():
    n = 9
    m = build_lower_anti(n, seed=2)
    idx = np.arange(1, n + 1)
    below = (idx[:, None] + idx[None, :]) < n + 1
    assert np.all(m.entries[below] == 0)
    assert np.all(m.entries[~below] != 0)
    assert np.array_equal(m.entries, m.entries.T)


def test_asym_upper():
    n = 20
    z = build_asym_upper(n, seed=4)
    assert z.entries.dtype == np.complex128
    assert np.all(np.tril(z.entries, -1) == 0)
    assert np.all(z.entries[np.triu_indices(n)] != 0)
    assert np.all(z.entries[np.tril_indices(n, -1)] == 0)
    real = build_asym_upper(n, seed=4, dist=InputDistribution.RADEMACHER)
    assert real.entries.dtype == np.float64
    assert np.allclose(np.abs(real.entries[np.triu_indices(n)]), 1 / math.sqrt(n))
    assert np.array_equal(real.scaled(), real.entries)


def test_link_value_input_is_shared_across_regions():
    n = 6
    mask = triangle_mask(n)
    for pattern in LinkPattern:
        tri = build_triangular(pattern, n, seed=123).entries
        full = build_full(pattern, n, seed=123).entries
        assert np.array_equal(tri[mask], full[mask])
    upper = build_triangular(LinkPattern.WIGNER, n, seed=123).entries
    lower = build_lower_anti(n, seed=123).entries
    anti = np.fliplr(np.eye(n, dtype=bool))
    assert np.array_equal(upper[anti], lower[anti])
    assert np.array_equal(lower[~mask], build_full(LinkPattern.WIGNER, n, seed=123).entries[~mask])


def test_flip_conjugate():
    a = np.arange(16.0).reshape(4, 4)
    assert flip_conjugate(a)[0, 0] == a[3, 3]
    assert np.array_equal(flip_conjugate(flip_conjugate(a)), a)
    with pytest.raises(ShapeError):
        flip_conjugate(np.zeros((2, 3)))


def test_flip_maps_upper_to_lower_shape():
    n = 7
    upper = build_triangular(LinkPattern.WIGNER, n, seed=9).entries
    lower_shape = build_lower_anti(n, seed=9).entries != 0
    assert np.array_equal(flip_conjugate(upper) != 0, lower_shape)


def test_split_anti_triangular():
    full = build_full(LinkPattern.WIGNER, 10, seed=8).entries
    upper, lower = split_anti_triangular(full)
    assert np.array_equal(upper + lower, full)
    assert np.all(lower[triangle_mask(10)] == 0)
    with pytest.raises(ShapeError):
        split_anti_triangular(np.zeros(3))


def test_draw_dispatch():
    assert draw("reverse-circulant", 5, seed=1).pattern == "hankel"
    assert draw(Ensemble.WIGNER_FULL, 5, seed=1).pattern == "wigner-full"
    assert draw("asym-gauss", 5, seed=1).distribution is None
    assert parse_ensemble(LinkPattern.TOEPLITZ) is Ensemble.TOEPLITZ
    assert Ensemble.ASYM_REAL.asymmetric and not Ensemble.WIGNER_LOWER.asymmetric
    assert Ensemble.SYMMETRIC_CIRCULANT.link_pattern is LinkPattern.SYMMETRIC_CIRCULANT


def test_scaled_divides_by_sqrt_n():
    m = build_triangular(LinkPattern.WIGNER, 16, seed=1)
    assert np.allclose(m.scaled() * 4.0, m.entries)
