from __future__ import annotations

from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import orjson

from ..errors import FormatError


def read_jsonl(path: Path) -> Iterator[Mapping[str, object]]:
    with path.open("rb") as fh:
        for line in fh:
            if line.strip():
                yield orjson.loads(line)


def write_jsonl(path: Path, rows: Iterable[Mapping[str, object]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        for row in rows:
            fh.write(orjson.dumps(row, option=orjson.OPT_SERIALIZE_NUMPY) + b"\n")


def read_label_file(path: Path) -> dict[str, tuple[int, ...]]:
    """Read ``utt_id l1 l2 ...`` lines; an id with no labels is an empty sequence."""
    labels: dict[str, tuple[int, ...]] = {}
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            fields = line.split()
            if not fields:
                continue
            try:
                labels[fields[0]] = tuple(int(x) for x in fields[1:])
            except ValueError as exc:
                raise FormatError(f"{path}:{line_no}: non-integer label") from exc
    return labels


def write_label_file(path: Path, labels: Mapping[str, Sequence[int]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for utt_id, seq in labels.items():
            fh.write(" ".join([utt_id, *(str(x) for x in seq)]) + "\n")


def parse_label_sequence(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split())
    except ValueError as exc:
        raise FormatError(f"invalid label sequence: {text!r}") from exc
