"""Sort exact rationals by converting them to order-preserving integer keys."""

from .converter import (
    CapacityError,
    Conversion,
    Converter,
    ConverterConfig,
    convert,
    preprocess,
    sort_permutation,
)
from .intsort import KeyRecord, radix_sort, rank_compress
from .metrics import MetricsRecord
from .numeric import ExactReal, ScaleFactor, parse_real

__all__ = [
    "CapacityError",
    "Conversion",
    "Converter",
    "ConverterConfig",
    "ExactReal",
    "KeyRecord",
    "MetricsRecord",
    "ScaleFactor",
    "convert",
    "parse_real",
    "preprocess",
    "radix_sort",
    "rank_compress",
    "sort_permutation",
]

__version__ = "0.1.0"
