import asyncio
import json
import logging
import os

from mcp.server.fastmcp import FastMCP

from triangular_lsd.config import configure_logging, default_seed, default_workers
from triangular_lsd.lsd import (
    MomentMethod,
    closed_moment,
    evaluate_word,
    lambert_series_check,
    moment_table,
    psi_at,
    psi_parametric,
    wigner_lsd_density,
)
from triangular_lsd.patterns import parse_pattern
from triangular_lsd.spectra import monte_carlo_moments
from triangular_lsd.volume import verify_appendix as run_appendix
from triangular_lsd.words import Word, classify, enumerate_class

# Initialize FastMCP server
mcp = FastMCP("triangular-lsd")

logger = logging.getLogger(__name__)

# Largest matrix size the spectral_moments tool accepts.
MAX_TOOL_N = int(os.environ.get("TRILSD_MAX_TOOL_N", 2000))


@mcp.tool()
async def list_words(k: int, word_class: str = "catalan") -> str:
    """
    List the words of length 2k with their classification.

    Args:
        k: Half-length of the words (1..8, Catalan up to 10).
        word_class: One of "all", "pair", "catalan", "symmetric".
    """
    words = enumerate_class(word_class, k)
    return json.dumps([{"word": str(w), **classify(w).to_dict()} for w in words])


@mcp.tool()
async def word_contribution(word: str, pattern: str = "wigner", method: str = "exact", m: int = 80,
                            n_list: str = "20,40,80") -> str:
    """
    p_u(w) for one word.

    Args:
        word: The word, e.g. "abba" or "1,2,2,1".
        pattern: wigner, hankel, toeplitz or symcirc.
        method: "exact" (wigner only), "grid" (wigner, hankel) or "count".
        m: Grid resolution for the grid method (multiple of 4).
        n_list: Comma-separated matrix sizes for the count method.
    """
    w = Word.parse(word)
    link = parse_pattern(pattern)
    sizes = [int(tok) for tok in n_list.split(",") if tok.strip()]
    value = await asyncio.to_thread(evaluate_word, link, w, MomentMethod(method), sizes, m)
    return json.dumps({"word": str(w), "pattern": link.value, **value.to_dict()})


@mcp.tool()
async def limit_moments(k_max: int = 4, pattern: str = "wigner", method: str = "exact") -> str:
    """
    Limit moments beta_2k for k = 1..k_max, next to k^k/(k+1)! for reference.

    Args:
        k_max: Highest half-order.
        pattern: Link pattern.
        method: exact, grid or count.
    """
    table = await asyncio.to_thread(moment_table, pattern, k_max, method, (20, 40, 80), 80)
    result = table.to_dict()
    result["closed_form"] = [str(closed_moment(k)) for k in range(1, k_max + 1)]
    return json.dumps(result)


@mcp.tool()
async def density_point(x: float = 0.0, v: float = 0.0, lsd: bool = False) -> str:
    """
    Evaluate psi at x (or at the curve parameter v), or the triangular Wigner
    LSD density |x| psi(x^2) when lsd is true.

    Args:
        x: Abscissa; (0, e) for psi.
        v: Curve parameter in (0, pi); used when x is 0.
        lsd: Evaluate the LSD density instead of psi.
    """
    if lsd:
        return json.dumps({"x": x, "density": wigner_lsd_density(x)})
    if x:
        return json.dumps({"x": x, "psi": psi_at(x)})
    return json.dumps(psi_parametric(v).to_dict())


@mcp.tool()
async def lambert_series(x: float, terms: int = 40) -> str:
    """
    Compare the moment generating series with its Lambert W closed form.

    Args:
        x: Point with |x| > e.
        terms: Number of series terms.
    """
    return json.dumps(lambert_series_check(x, terms).to_dict())


@mcp.tool()
async def spectral_moments(pattern: str = "wigner", n: int = 500, reps: int = 10, k_max: int = 6,
                           dist: str = "gaussian", seed: int = -1) -> str:
    """
    Monte Carlo moments of a scaled triangular patterned matrix.

    Args:
        pattern: Ensemble name (wigner, hankel, toeplitz, symcirc, asym-gauss, ...).
        n: Matrix size (capped by TRILSD_MAX_TOOL_N).
        reps: Number of replicates (>= 2).
        k_max: Highest moment order.
        dist: gaussian, rademacher or uniform.
        seed: Master seed; negative means the TRILSD_SEED default.
    """
    if n > MAX_TOOL_N:
        raise ValueError(f"n={n} exceeds the tool limit {MAX_TOOL_N}")
    seed = default_seed() if seed < 0 else seed
    estimates = await asyncio.to_thread(monte_carlo_moments, pattern, n, dist, k_max, reps, seed,
                                        default_workers())
    return json.dumps({"pattern": pattern, "n": n, "seed": seed, "moments": [e.to_dict() for e in estimates]})


@mcp.tool()
async def verify_appendix(k_max: int = 4) -> str:
    """
    Exact checks of the word-contribution inequalities over all Catalan words
    up to length 2*k_max.

    Args:
        k_max: 1..6.
    """
    report = await asyncio.to_thread(run_appendix, k_max)
    return json.dumps(report.to_dict())


def main():
    configure_logging(fallback="DEBUG")
    logger.info("Starting triangular-lsd tool server")
    mcp.run()


if __name__ == "__main__":
    main()
