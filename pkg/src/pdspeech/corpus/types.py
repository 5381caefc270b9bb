"""Core data types shared across the corpus layer."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class Group(enum.Enum):
    """Diagnostic group of a subject."""

    PD = "PD"
    HC = "HC"


class Task(enum.Enum):
    """Speech task a segment was cut from (manifest codes 1..3)."""

    IMAGE_DESCRIPTION = 1
    DDK = 2
    TEXT_READING = 3


@dataclass(frozen=True)
class ManifestEntry:
    """One row of a corpus manifest."""

    path: str
    subject: str
    group: Group
    task: Task

    def __post_init__(self):
        if not self.subject:
            raise ValueError("subject id must be non-empty")
        if not self.path:
            raise ValueError("segment path must be non-empty")


@dataclass(frozen=True)
class CorpusManifest:
    """An ordered list of segment entries rooted at a base directory."""

    entries: tuple[ManifestEntry, ...]
    root: Path

    def subjects(self) -> list[str]:
        """Distinct subject ids in first-appearance order."""
        seen = dict.fromkeys(e.subject for e in self.entries)
        return list(seen)

    def subject_group(self) -> dict[str, Group]:
        out: dict[str, Group] = {}
        for e in self.entries:
            prev = out.setdefault(e.subject, e.group)
            if prev is not e.group:
                raise ValueError(f"subject {e.subject!r} listed under both groups")
        return out

    def require_both_groups(self):
        groups = {e.group for e in self.entries}
        if groups != {Group.PD, Group.HC}:
            raise ValueError("manifest must contain at least one PD and one HC subject")


@dataclass
class SpeechSegment:
    """A decoded mono speech segment."""

    subject: str
    group: Group
    task: Task
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("samples must be a non-empty 1-d sequence")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        peak = np.max(np.abs(self.samples)) if self.samples.size else 0.0
        if peak > 1.0 + 1e-9:
            raise ValueError("samples exceed [-1, 1]")


@dataclass(frozen=True)
class SyntheticConfig:
    """Parameters of the synthetic two-class test corpus.

    separation=0 makes the class-conditional generator parameters equal;
    separation=1 gives the widest contrast in noise, jitter and shimmer.
    """

    subjects_per_group: int
    segments_per_subject: int
    duration_sec: float = 1.0
    separation: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.subjects_per_group < 1 or self.segments_per_subject < 1:
            raise ValueError("subject and segment counts must be >= 1")
        if self.duration_sec < 1.0:
            raise ValueError("duration_sec must be >= 1.0")
        if not 0.0 <= self.separation <= 1.0:
            raise ValueError("separation must lie in [0, 1]")
