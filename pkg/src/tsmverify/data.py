"""Dataset ingestion: binary CSV, grayscale binarisation, PGM images, bags of words."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence

from .errors import DataFormatError, InputError
from .tm import BitInput


def parse_binary_csv(text: str, labelled: bool = True) -> list[BitInput]:
    """Rows of comma-separated 0/1 cells, label in the last column when ``labelled``."""
    out: list[BitInput] = []
    width = None
    for rowno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or all(not c.strip() for c in row):
            continue
        cells = [c.strip() for c in row]
        if any(c not in ("0", "1") for c in cells):
            bad = next(c for c in cells if c not in ("0", "1"))
            raise DataFormatError(f"non-binary cell {bad!r}", rowno)
        if width is None:
            width = len(cells)
            if labelled and width < 2:
                raise DataFormatError("need at least one feature and a label", rowno)
        elif len(cells) != width:
            raise DataFormatError(f"expected {width} cells, found {len(cells)}", rowno)
        vals = [int(c) for c in cells]
        out.append(BitInput(tuple(vals[:-1]), vals[-1]) if labelled else BitInput(tuple(vals)))
    if not out:
        raise DataFormatError("no rows")
    return out


def load_binary_csv(path, labelled: bool = True) -> list[BitInput]:
    with open(path, encoding="utf-8") as fh:
        return parse_binary_csv(fh.read(), labelled)


def dumps_binary_csv(rows: Iterable[BitInput]) -> str:
    lines = []
    for r in rows:
        cells = list(r.bits) + ([] if r.label is None else [r.label])
        lines.append(",".join(map(str, cells)))
    return "\n".join(lines) + "\n"


def save_binary_csv(rows: Iterable[BitInput], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_binary_csv(rows))


def binarize_grayscale(image: Sequence[Sequence[int]], threshold: int = 128, label: int | None = None) -> BitInput:
    """Row-major bits, 1 where the intensity is strictly above ``threshold``."""
    if not 0 <= threshold <= 255:
        raise InputError(f"threshold must lie in [0, 255], got {threshold}")
    bits = tuple(int(v > threshold) for row in image for v in row)
    return BitInput(bits, label)


def bag_of_words(tokens: Iterable[int], vocab_size: int, label: int | None = None) -> BitInput:
    """Presence vector over word ids ``0..vocab_size-1``."""
    bits = [0] * vocab_size
    for t in tokens:
        if not 0 <= t < vocab_size:
            raise InputError(f"word id {t} outside vocabulary of size {vocab_size}")
        bits[t] = 1
    return BitInput(tuple(bits), label)


def _pgm_tokens(data: bytes):
    """Header tokens of a PGM file with ``#`` comments removed, plus the byte offset after them."""
    tokens: list[bytes] = []
    i = 0
    while len(tokens) < 4:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if i >= len(data):
            raise DataFormatError("truncated PGM header")
        if data[i:i + 1] == b"#":
            while i < len(data) and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < len(data) and not data[j:j + 1].isspace():
            j += 1
        tokens.append(data[i:j])
        i = j
    return tokens, i + 1


def read_pgm(path) -> list[list[int]]:
    """Read a P2 (ASCII) or P5 (binary) graymap, scaled to 0..255."""
    with open(path, "rb") as fh:
        data = fh.read()
    (magic, w, h, maxval), offset = _pgm_tokens(data)
    try:
        width, height, maxv = int(w), int(h), int(maxval)
    except ValueError:
        raise DataFormatError("bad PGM header") from None
    if magic == b"P2":
        vals = [int(t) for t in data[offset:].split()]
    elif magic == b"P5":
        if maxv >= 256:
            raw = data[offset:offset + 2 * width * height]
            vals = [int.from_bytes(raw[k:k + 2], "big") for k in range(0, len(raw), 2)]
        else:
            vals = list(data[offset:offset + width * height])
    else:
        raise DataFormatError(f"unsupported PGM magic {magic!r}")
    if len(vals) < width * height:
        raise DataFormatError(f"expected {width * height} pixels, found {len(vals)}")
    scale = 255 / maxv if maxv != 255 else 1
    vals = [round(v * scale) for v in vals[: width * height]]
    return [vals[r * width:(r + 1) * width] for r in range(height)]
