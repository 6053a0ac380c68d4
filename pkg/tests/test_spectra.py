import math

import numpy as np
import pytest

from triangular_lsd.ensembles import Ensemble, InputDistribution, build_triangular
from triangular_lsd.errors import ContractViolationError
from triangular_lsd.patterns import LinkPattern
from triangular_lsd.spectra import (
    DEFAULT_BINS,
    eigenvalues,
    empirical_moments,
    histogram,
    monte_carlo_moments,
    monte_carlo_spectra,
    ordered_map,
    replicate_values,
    singular_moments,
    spectral_edge,
    spectrum,
    square_law_check,
)


def test_eigenvalues_sorted():
    assert np.allclose(eigenvalues(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])


def test_eigenvalues_reject_asymmetric():
    with pytest.raises(ContractViolationError):
        eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ContractViolationError):
        eigenvalues(np.zeros((2, 3)))


def test_empirical_moments():
    assert np.allclose(empirical_moments(np.array([1.0, -1.0, 2.0]), 2), [2.0 / 3.0, 2.0])
    with pytest.raises(ValueError):
        empirical_moments(np.array([1.0]), 0)


def test_spectrum_provenance():
    sample = spectrum(build_triangular(LinkPattern.TOEPLITZ, 30, InputDistribution.UNIFORM_SCALED, seed=11))
    assert sample.pattern == "toeplitz"
    assert sample.distribution == "uniform"
    assert sample.seed == 11
    assert np.all(np.diff(sample.eigenvalues) >= 0)


def test_triangular_wigner_moments():
    estimates = monte_carlo_moments(Ensemble.WIGNER, 300, k_max=4, reps=6, master_seed=1)
    means = {e.k: e.mean for e in estimates}
    assert abs(means[1]) < 0.02
    assert abs(means[2] - 0.5) < 0.02
    assert abs(means[3]) < 0.03
    assert abs(means[4] - 2.0 / 3.0) < 0.05
    assert all(e.stderr >= 0 and e.reps == 6 for e in estimates)


def test_reps_must_allow_stderr():
    with pytest.raises(ValueError):
        monte_carlo_moments(Ensemble.WIGNER, 10, reps=1)


def test_worker_count_does_not_change_results():
    serial = monte_carlo_moments(Ensemble.HANKEL, 60, k_max=4, reps=5, master_seed=99, workers=1)
    threaded = monte_carlo_moments(Ensemble.HANKEL, 60, k_max=4, reps=5, master_seed=99, workers=3)
    assert [e.mean for e in serial] == [e.mean for e in threaded]
    assert [e.stderr for e in serial] == [e.stderr for e in threaded]


def test_ordered_map_keeps_index_order():
    assert ordered_map(lambda i: i * i, 6, workers=3) == [0, 1, 4, 9, 16, 25]


def test_variance_of_second_moment_decays():
    small = monte_carlo_moments(Ensemble.WIGNER, 100, k_max=2, reps=12, master_seed=5)
    large = monte_carlo_moments(Ensemble.WIGNER, 400, k_max=2, reps=12, master_seed=5)
    assert large[1].stderr < small[1].stderr


def test_singular_moments():
    estimates = monte_carlo_moments(Ensemble.ASYM_GAUSS, 300, k_max=2, reps=4, master_seed=2)
    assert abs(estimates[0].mean - 0.5) < 0.03
    assert abs(estimates[1].mean - 2.0 / 3.0) < 0.06


def test_singular_moments_direct():
    from triangular_lsd.ensembles import build_asym_upper

    m = singular_moments(build_asym_upper(50, seed=3), 2)
    assert m.shape == (2,)
    assert m[0] > 0


def test_square_law_check():
    report = square_law_check(200, 4, InputDistribution.RADEMACHER, master_seed=3, k_max=2)
    assert report["distribution"] == "rademacher"
    assert abs(report["moments"][0]["gap"]) < 0.03
    assert abs(report["moments"][1]["gap"]) < 0.1


def test_histogram_normalization():
    edges, density = histogram(np.array([-1.0, 0.0, 0.5, 5.0]), bins=6, value_range=(-3.0, 3.0))
    assert len(edges) == 7
    assert np.sum(density * np.diff(edges)) == pytest.approx(0.75)
    with pytest.raises(ValueError):
        histogram(np.array([0.0]), bins=0)
    with pytest.raises(ValueError):
        histogram(np.array([0.0]), value_range=(1.0, 1.0))


def test_histogram_point_mass_fills_one_bin():
    edges, density = histogram(np.zeros(10), bins=3, value_range=(-1.5, 1.5))
    assert np.allclose(density, [0.0, 1.0, 0.0])
    assert density[1] * (edges[2] - edges[1]) == pytest.approx(1.0)


def test_histogram_defaults():
    edges, density = histogram(np.linspace(-1.0, 1.0, 50))
    assert DEFAULT_BINS == 101
    assert len(edges) == 102
    assert (edges[0], edges[-1]) == (-3.0, 3.0)
    assert np.sum(density * np.diff(edges)) == pytest.approx(1.0)


def test_moments_do_not_depend_on_input_law():
    gauss = monte_carlo_moments(Ensemble.WIGNER, 300, InputDistribution.STANDARD_GAUSSIAN, k_max=4, reps=10,
                                master_seed=21)
    signs = monte_carlo_moments(Ensemble.WIGNER, 300, InputDistribution.RADEMACHER, k_max=4, reps=10,
                                master_seed=21)
    for k in (2, 4):
        g, r = gauss[k - 1], signs[k - 1]
        combined = math.sqrt(g.stderr ** 2 + r.stderr ** 2)
        # the fourth moment of the input law moves m_4 by O(1/n)
        assert abs(g.mean - r.mean) <= 3 * combined + 0.01


def test_spectra_and_edge():
    samples = monte_carlo_spectra(Ensemble.WIGNER, 80, reps=3, master_seed=4)
    assert len(samples) == 3
    edges = spectral_edge(samples)
    assert edges.shape == (3,)
    assert np.all(edges > 0)
    with pytest.raises(ValueError):
        monte_carlo_spectra(Ensemble.ASYM_GAUSS, 10)


def test_replicate_values_match_spectra_and_singular_moments():
    spectra = monte_carlo_spectra(Ensemble.HANKEL, 40, reps=2, master_seed=6)
    values = replicate_values(Ensemble.HANKEL, 40, reps=2, master_seed=6, workers=2)
    assert all(np.array_equal(s.eigenvalues, v) for s, v in zip(spectra, values))

    squared = replicate_values(Ensemble.ASYM_GAUSS, 30, reps=3, master_seed=6)
    moments = monte_carlo_moments(Ensemble.ASYM_GAUSS, 30, k_max=2, reps=3, master_seed=6)
    assert all(np.all(v >= 0) for v in squared)
    assert np.mean([empirical_moments(v, 2)[1] for v in squared]) == pytest.approx(moments[1].mean)
