from __future__ import annotations

import numpy as np
import pytest

from frisson.signal_core import EdaSeries, PipelineConfig


@pytest.fixture
def cfg() -> PipelineConfig:
    return PipelineConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


def make_series(values, start_wall_ms: int = 1_700_000_000_000, rate: float = 5.0) -> EdaSeries:
    return EdaSeries(start_wall_ms, rate, tuple(float(v) for v in values))
