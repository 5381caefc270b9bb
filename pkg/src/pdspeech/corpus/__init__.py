"""Corpus ingestion: manifests, WAV audio, synthetic test data."""

from .manifest import (PIPELINE_RATE, load_manifest, load_segment,
                       load_segments, write_manifest)
from .resample import resample
from .synthetic import SAMPLE_RATE, class_params, generate_synthetic_corpus
from .types import (CorpusManifest, Group, ManifestEntry, SpeechSegment,
                    SyntheticConfig, Task)
from .wavio import decode_wav, encode_wav

__all__ = [
    "PIPELINE_RATE", "SAMPLE_RATE",
    "CorpusManifest", "Group", "ManifestEntry", "SpeechSegment",
    "SyntheticConfig", "Task",
    "class_params", "decode_wav", "encode_wav", "generate_synthetic_corpus",
    "load_manifest", "load_segment", "load_segments", "resample",
    "write_manifest",
]
