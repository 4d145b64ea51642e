"""Collective frisson sensing and feedback for online video viewers.

Library layout:

- :mod:`frisson.signal_core` — per-viewer EDA pipeline and aggregation
- :mod:`frisson.session_align` — wall-clock ↔ video-time alignment
- :mod:`frisson.wire_protocol` — line-delimited pub/sub wire format
- :mod:`frisson.storage` — on-disk session/aggregate formats
- :mod:`frisson.feedback_map` — magnitude → ambient/icon/vibration maps
- :mod:`frisson.simulator` — synthetic EDA with ground truth
- :mod:`frisson.server` — FastAPI stream server (REST + WebSocket)
- :mod:`frisson.cli` — operator command line
"""

from .errors import (
    EncodeError,
    FormatError,
    FrissonError,
    InsufficientDataError,
    InvalidInputError,
    InvalidParameterError,
    NotFoundError,
    ParseError,
    ProtocolViolationError,
    ShapeMismatchError,
)
from .signal_core import (
    AggregateSeries,
    EdaSeries,
    FrissonSeries,
    PeakDescriptor,
    PipelineConfig,
    aggregate,
    detect_peaks,
    normalize,
    process_session,
    quantize,
    remove_baseline,
    smooth,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "FrissonError",
    "InvalidParameterError",
    "InvalidInputError",
    "ShapeMismatchError",
    "InsufficientDataError",
    "ProtocolViolationError",
    "ParseError",
    "EncodeError",
    "FormatError",
    "NotFoundError",
    "PipelineConfig",
    "EdaSeries",
    "PeakDescriptor",
    "FrissonSeries",
    "AggregateSeries",
    "smooth",
    "remove_baseline",
    "normalize",
    "detect_peaks",
    "quantize",
    "process_session",
    "aggregate",
]
