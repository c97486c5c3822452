# data/libsvm.py
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from core.errors import DatasetFormatError
from data.dataset import Dataset

log = logging.getLogger(__name__)


def parse_libsvm(text: Union[bytes, str], n_features: Optional[int] = None) -> Dataset:
    """
    Parse `<label> <idx>:<val> ...` lines into a dense Dataset.

    Labels <= 0 map to -1, everything else to +1. The feature dimension is
    the largest index seen, or `n_features` when that is larger.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError:
            raise DatasetFormatError("file is not valid UTF-8")

    labels = []
    rows = []
    max_index = 0

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue

        parts = line.split()
        try:
            label = float(parts[0])
        except ValueError:
            raise DatasetFormatError(f"bad label {parts[0]!r}", line_number)

        entries = []
        previous = 0
        for token in parts[1:]:
            idx_text, sep, val_text = token.partition(":")
            if not sep:
                raise DatasetFormatError(f"expected idx:val, got {token!r}", line_number)
            try:
                idx = int(idx_text)
                val = float(val_text)
            except ValueError:
                raise DatasetFormatError(f"bad entry {token!r}", line_number)
            if idx < 1:
                raise DatasetFormatError(f"indices are 1-based, got {idx}", line_number)
            if idx <= previous:
                raise DatasetFormatError(
                    f"indices must be strictly increasing ({idx} after {previous})",
                    line_number,
                )
            previous = idx
            entries.append((idx, val))

        max_index = max(max_index, previous)
        labels.append(-1.0 if label <= 0 else 1.0)
        rows.append(entries)

    if not rows:
        raise DatasetFormatError("empty file")

    d = max(max_index, n_features or 0, 1)
    features = np.zeros((len(rows), d))
    for i, entries in enumerate(rows):
        for idx, val in entries:
            features[i, idx - 1] = val

    ds = Dataset(features, np.asarray(labels))
    pos, neg = ds.class_counts()
    log.info(f"Parsed {len(rows)} examples, {d} features ({pos}/{neg} +/-)")
    return ds


def read_libsvm(path: Union[str, Path], n_features: Optional[int] = None) -> Dataset:
    try:
        payload = Path(path).read_bytes()
    except OSError as e:
        raise DatasetFormatError(f"cannot read {path}: {e}")
    return parse_libsvm(payload, n_features=n_features)


def dump_libsvm(ds: Dataset) -> str:
    """Serialize with shortest round-trip float formatting; zeros are omitted."""
    lines = []
    for row, label in zip(ds.features, ds.labels):
        tokens = ["+1" if label > 0 else "-1"]
        for j in np.flatnonzero(row):
            tokens.append(f"{j + 1}:{float(row[j])!r}")
        lines.append(" ".join(tokens))
    return "\n".join(lines) + "\n"
