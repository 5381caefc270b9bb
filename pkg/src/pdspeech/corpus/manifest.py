"""Manifest CSV loading and writing.

Format: UTF-8 CSV, header ``path,subject,group,task``.  Paths are kept
as written and resolved against the manifest's directory.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .resample import resample
from .types import CorpusManifest, Group, ManifestEntry, SpeechSegment, Task
from .wavio import decode_wav

_HEADER = ["path", "subject", "group", "task"]

PIPELINE_RATE = 48000


def load_manifest(path) -> CorpusManifest:
    """Parse a manifest CSV, checking rows and audio paths."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    root = path.parent

    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != _HEADER:
        raise ValueError(f"{path}: expected header {','.join(_HEADER)}")
    if len(rows) == 1:
        raise ValueError(f"{path}: empty manifest")

    entries = []
    seen = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise ValueError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
        rel, subject, group_s, task_s = (c.strip() for c in row)
        try:
            group = Group(group_s)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: unknown group {group_s!r}") from None
        try:
            task = Task(int(task_s))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: unknown task {task_s!r}") from None
        key = (subject, rel)
        if key in seen:
            raise ValueError(f"{path}:{lineno}: duplicate entry {key}")
        seen.add(key)
        if not (root / rel).is_file():
            raise ValueError(f"{path}:{lineno}: audio file not found: {rel}")
        entries.append(ManifestEntry(path=rel, subject=subject, group=group, task=task))

    return CorpusManifest(entries=tuple(entries), root=root)


def write_manifest(manifest: CorpusManifest, path):
    """Write a manifest CSV with rows in entry order."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(_HEADER)
        for e in manifest.entries:
            w.writerow([e.path, e.subject, e.group.value, e.task.value])


def load_segment(manifest: CorpusManifest, entry: ManifestEntry,
                 target_rate: int = PIPELINE_RATE) -> SpeechSegment:
    """Decode one entry's audio, resampled to the pipeline rate."""
    samples, rate = decode_wav(manifest.root / entry.path)
    if rate != target_rate:
        samples = resample(samples, rate, target_rate)
        samples = samples.clip(-1.0, 1.0)
        rate = target_rate
    return SpeechSegment(subject=entry.subject, group=entry.group,
                         task=entry.task, samples=samples, sample_rate=rate)


def load_segments(manifest: CorpusManifest,
                  target_rate: int = PIPELINE_RATE) -> list[SpeechSegment]:
    return [load_segment(manifest, e, target_rate) for e in manifest.entries]
