"""Multimodal meme corpus pipeline: collection, OCR extraction, cleaning,
ensemble annotation, consensus arbitration, rationale explication,
validation voting, and benchmark evaluation."""

__version__ = "0.1.0"

from .records import (
    CATEGORY_UNIVERSE,
    Category,
    FinalAnnotation,
    HateLabel,
    MemeRecord,
    Platform,
    Stage,
)
from .store import RecordStore

__all__ = [
    "CATEGORY_UNIVERSE",
    "Category",
    "FinalAnnotation",
    "HateLabel",
    "MemeRecord",
    "Platform",
    "RecordStore",
    "Stage",
    "__version__",
]
