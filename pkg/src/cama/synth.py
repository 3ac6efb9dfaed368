"""Seeded synthetic cohorts.

Stands in for a trained classifier plus imputer: class-conditional Gaussian
logits before and after acquisition, and imputations scattered around a
point between the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cohort import Cohort
from .errors import PreconditionError


@dataclass(frozen=True)
class SynthConfig:
    """Generator parameters.

    ``imp_noise`` defaults to ``noise_scale``; set it to 0 to place every
    imputation exactly on its center.
    """

    n: int = 1000
    k: int = 100
    prevalence: float = 0.5
    signal_avail: float = 0.5
    signal_acquired: float = 1.5
    imp_fidelity: float = 0.8
    noise_scale: float = 1.0
    seed: int = 0
    imp_noise: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("n must be at least 1")
        if self.k < 0:
            raise PreconditionError("k must be non-negative")
        if not 0.0 < self.prevalence < 1.0:
            raise PreconditionError("prevalence must lie strictly between 0 and 1")
        if self.signal_avail < 0 or self.signal_acquired < 0:
            raise PreconditionError("signals must be non-negative")
        if not 0.0 <= self.imp_fidelity <= 1.0:
            raise PreconditionError("imp_fidelity must lie in [0, 1]")
        if not self.noise_scale > 0:
            raise PreconditionError("noise_scale must be positive")
        if self.imp_noise is not None and not self.imp_noise >= 0:
            raise PreconditionError("imp_noise must be non-negative")


def generate(config: SynthConfig) -> Cohort:
    """Draw a cohort; the result depends only on ``config``.

    Draw order from one PCG64 stream: labels, acquired noise, available
    noise, imputation noise.
    """
    rng = np.random.default_rng(config.seed)
    n, k = config.n, config.k
    labels = (rng.random(n) < config.prevalence).astype(np.int8)
    u = rng.standard_normal(n)
    v = rng.standard_normal(n)
    w = rng.standard_normal((n, k))
    sign = 2.0 * labels - 1.0
    s_acquired = config.signal_acquired * sign + config.noise_scale * u
    s_avail = config.signal_avail * sign + config.noise_scale * v
    center = config.imp_fidelity * s_acquired + (1.0 - config.imp_fidelity) * s_avail
    imp_noise = config.noise_scale if config.imp_noise is None else config.imp_noise
    s_imp = center[:, None] + imp_noise * w
    cohort = Cohort(labels, s_avail, s_acquired, s_imp)
    cohort.check_finite()
    return cohort
