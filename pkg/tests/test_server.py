import json

import pytest
from unittest.mock import MagicMock, patch

from triangular_lsd.errors import DomainError
from triangular_lsd.server import (
    density_point,
    lambert_series,
    limit_moments,
    list_words,
    spectral_moments,
    verify_appendix,
    word_contribution,
)


@pytest.fixture
def mock_estimates():
    estimate = MagicMock()
    estimate.to_dict.return_value = {"k": 2, "mean": 0.5, "stderr": 0.001, "reps": 3}
    return [estimate]


@pytest.fixture
def patched_monte_carlo(mock_estimates, monkeypatch):
    monkeypatch.setenv("TRILSD_WORKERS", "2")
    with patch("triangular_lsd.server.monte_carlo_moments", return_value=mock_estimates) as mocked:
        yield mocked


@pytest.mark.asyncio
async def test_list_words():
    rows = json.loads(await list_words(2))
    assert sorted(r["word"] for r in rows) == ["aabb", "abba"]
    assert all(r["catalan"] for r in rows)

    rows = json.loads(await list_words(2, word_class="pair"))
    assert len(rows) == 3

    rows = json.loads(await list_words(2, word_class="all"))
    flags = {r["word"]: (r["pair_matched"], r["catalan"], r["symmetric"]) for r in rows}
    assert flags == {"aabb": (True, True, True), "abba": (True, True, True), "abab": (True, False, False)}


@pytest.mark.asyncio
async def test_list_words_unknown_class():
    with pytest.raises(ValueError):
        await list_words(2, word_class="crossing")


@pytest.mark.asyncio
async def test_word_contribution_exact():
    result = json.loads(await word_contribution("abba"))
    assert result == {"word": "abba", "pattern": "wigner", "mode": "exact", "value": "1/3"}


@pytest.mark.asyncio
async def test_word_contribution_grid():
    result = json.loads(await word_contribution("aa", pattern="hankel", method="grid", m=40))
    assert result["mode"] == "estimated"
    assert result["estimate"] == pytest.approx(0.5)


@pytest.mark.asyncio
async def test_word_contribution_count_for_toeplitz():
    result = json.loads(await word_contribution("aa", pattern="toeplitz", method="count", n_list="10,20,40"))
    assert result["pattern"] == "toeplitz"
    assert result["estimate"] == pytest.approx(0.5, abs=0.01)


@pytest.mark.asyncio
@pytest.mark.parametrize("word,pattern,method", [
    ("aabbcc", "hankel", "exact"),
    ("abab", "toeplitz", "grid"),
    ("aa", "symcirc", "grid"),
])
async def test_word_contribution_unsupported_method(word, pattern, method):
    with pytest.raises(DomainError, match="covers"):
        await word_contribution(word, pattern=pattern, method=method)


@pytest.mark.asyncio
async def test_limit_moments():
    result = json.loads(await limit_moments(k_max=3))
    assert [m["value"] for m in result["moments"]] == ["1/2", "2/3", "9/8"]
    assert result["closed_form"] == ["1/2", "2/3", "9/8"]


@pytest.mark.asyncio
async def test_density_point():
    midpoint = json.loads(await density_point(v=1.5707963267948966))
    assert midpoint["psi"] == pytest.approx(0.3183098861837907)
    at_x = json.loads(await density_point(x=0.6366197723675814))
    assert at_x["psi"] == pytest.approx(0.3183098861837907, rel=1e-9)
    lsd = json.loads(await density_point(x=2.0, lsd=True))
    assert lsd["density"] == 0.0


@pytest.mark.asyncio
async def test_lambert_series():
    result = json.loads(await lambert_series(10.0))
    assert result["gap"] < 1e-8
    assert result["printed_gap"] > 1.0


@pytest.mark.asyncio
async def test_spectral_moments(patched_monte_carlo):
    result = json.loads(await spectral_moments(pattern="hankel", n=100, reps=3, k_max=4, seed=11))
    assert result["seed"] == 11
    assert result["moments"][0]["mean"] == 0.5
    patched_monte_carlo.assert_called_once_with("hankel", 100, "gaussian", 4, 3, 11, 2)


@pytest.mark.asyncio
async def test_spectral_moments_default_seed(patched_monte_carlo, monkeypatch):
    monkeypatch.setenv("TRILSD_SEED", "42")
    result = json.loads(await spectral_moments(n=50, reps=2))
    assert result["seed"] == 42


@pytest.mark.asyncio
async def test_spectral_moments_size_limit(patched_monte_carlo):
    with pytest.raises(ValueError):
        await spectral_moments(n=10**6)
    patched_monte_carlo.assert_not_called()


@pytest.mark.asyncio
async def test_verify_appendix():
    result = json.loads(await verify_appendix(3))
    assert result["passed"] is True
    assert result["k_max"] == 3
