"""Soccer pitch line-mark segmentation and classification.

Pipeline: enhance the image so painted marks become thin bright ridges,
run a stochastic (seed-averaged) watershed to segment the ridge network,
then classify the segmented chains into straight lines and ellipses.
"""

__version__ = "0.1.0"

from .morphology import disk, enhance_lines, gray_open, top_hat
from .watershed import (
    SeedSet,
    StochasticConfig,
    binarize_lines,
    gen_uniform_seeds,
    gen_windowed_seeds,
    seeded_watershed,
    stochastic_watershed,
)

__all__ = [
    "__version__",
    "disk",
    "enhance_lines",
    "gray_open",
    "top_hat",
    "SeedSet",
    "StochasticConfig",
    "binarize_lines",
    "gen_uniform_seeds",
    "gen_windowed_seeds",
    "seeded_watershed",
    "stochastic_watershed",
]
