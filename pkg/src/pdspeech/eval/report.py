"""Report serialization: JSON document plus optional CSV exports."""

import csv
import json
from datetime import datetime, timezone
from pathlib import Path


def write_report(report, path, timestamp=None):
    """Write the report as schema-versioned JSON.

    The timestamp lives in its own top-level field so two runs of the
    same config differ in nothing else.
    """
    doc = dict(report)
    doc["generated_at"] = timestamp or datetime.now(timezone.utc).isoformat()
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_report(path):
    return json.loads(Path(path).read_text())


def report_fingerprint(path):
    """Canonical bytes of a report with the timestamp removed."""
    doc = read_report(path)
    doc.pop("generated_at", None)
    return json.dumps(doc, indent=2, sort_keys=True).encode()


def write_segment_csv(per_segment, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["segment", "subject", "task", "label", "score"])
        for row in per_segment:
            writer.writerow([row["segment"], row["subject"], row["task"],
                             row["label"], repr(row["score"])])


def write_roc_csv(points, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fpr", "tpr"])
        for fpr, tpr in points:
            writer.writerow([repr(float(fpr)), repr(float(tpr))])
