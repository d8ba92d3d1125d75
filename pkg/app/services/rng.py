"""Counter-based normal draws.

Draw i of stream s under master seed k comes from a Philox generator keyed by
k whose counter is positioned at block i // BLOCK_SIZE, so the value depends on
(k, s, i) only. Blocks are computed by a joblib thread pool and stitched in
block order; the worker count never changes the output.
"""

import logging
import math
from typing import Optional

import numpy as np
from joblib import Parallel, delayed
from scipy.special import ndtri

from app.core.config import settings

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1 << 14
_MANTISSA = 1 << 53


def _normal_block(seed: int, stream: int, block: int, count: int) -> np.ndarray:
    generator = np.random.Generator(np.random.Philox(counter=[0, block, stream, 0], key=seed))
    raw = generator.integers(0, _MANTISSA, size=count, dtype=np.uint64)
    # open interval (0, 1), so the quantile stays finite
    uniforms = (raw.astype(np.float64) + 0.5) / _MANTISSA
    return ndtri(uniforms)


def standard_normals(
    seed: int,
    count: int,
    *,
    stream: int = 0,
    antithetic: bool = False,
    workers: Optional[int] = None,
) -> np.ndarray:
    """`count` standard normal draws; with `antithetic` the draws come in
    pairs (z, -z) built from the first ceil(count / 2) base draws."""
    base = (count + 1) // 2 if antithetic else count
    n_blocks = math.ceil(base / BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, base - b * BLOCK_SIZE) for b in range(n_blocks)]
    n_jobs = settings.worker_count(workers)
    logger.debug("drawing %d normals in %d blocks on %d workers (stream %d)", count, n_blocks, n_jobs, stream)
    blocks = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_normal_block)(seed, stream, b, size) for b, size in enumerate(sizes)
    )
    draws = np.concatenate(blocks) if blocks else np.empty(0)
    if not antithetic:
        return draws
    paired = np.empty(count)
    paired[0::2] = draws[: (count + 1) // 2]
    paired[1::2] = -draws[: count // 2]
    return paired
