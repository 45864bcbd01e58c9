"""Weighted finite-state acceptors and transducers in the log semiring.

Arcs are stored column-wise in numpy arrays. In the frame-synchronous graphs
(topology, numerator, denominator) every arc consumes exactly one frame;
label-LM acceptors additionally carry epsilon backoff arcs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from ..errors import DegenerateGraphError, FormatError

EPSILON = -1
EPSILON_SYMBOL = "<eps>"


class FsaPath(NamedTuple):
    ilabels: tuple[int, ...]
    olabels: tuple[int, ...]
    weight: float


@dataclass(slots=True)
class WeightedFsa:
    num_states: int
    src: np.ndarray
    dst: np.ndarray
    labels: np.ndarray
    weights: np.ndarray
    finals: dict[int, float] = field(default_factory=dict)
    olabels: np.ndarray | None = None
    vocab_size: int | None = None
    start: int = 0

    def __post_init__(self) -> None:
        self.src = np.asarray(self.src, dtype=np.int64)
        self.dst = np.asarray(self.dst, dtype=np.int64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.olabels is not None:
            self.olabels = np.asarray(self.olabels, dtype=np.int64)
        n = len(self.src)
        columns = [self.dst, self.labels, self.weights]
        if self.olabels is not None:
            columns.append(self.olabels)
        if any(len(c) != n for c in columns):
            raise FormatError("arc columns have different lengths")
        if self.num_states < 1 or not 0 <= self.start < self.num_states:
            raise FormatError(f"invalid start state {self.start} for {self.num_states} states")
        if n and (self.src.min() < 0 or self.dst.min() < 0 or max(self.src.max(), self.dst.max()) >= self.num_states):
            raise FormatError("arc refers to a state outside the graph")
        if not np.all(np.isfinite(self.weights)):
            raise FormatError("arc weights must be finite")
        for state, weight in self.finals.items():
            if not 0 <= state < self.num_states or not math.isfinite(weight):
                raise FormatError(f"invalid final entry ({state}, {weight})")

    @classmethod
    def from_arcs(
        cls,
        num_states: int,
        arcs: Iterable[Sequence[float]],
        finals: dict[int, float],
        vocab_size: int | None = None,
        transducer: bool = False,
    ) -> WeightedFsa:
        """Build from ``(src, dst, label, weight)`` or ``(src, dst, ilabel, olabel, weight)`` tuples."""
        rows = list(arcs)
        width = 5 if transducer else 4
        if any(len(r) != width for r in rows):
            raise FormatError(f"expected {width}-field arcs")
        cols = list(zip(*rows)) if rows else [()] * width
        return cls(
            num_states=num_states,
            src=np.array(cols[0], dtype=np.int64),
            dst=np.array(cols[1], dtype=np.int64),
            labels=np.array(cols[2], dtype=np.int64),
            weights=np.array(cols[-1], dtype=np.float64),
            olabels=np.array(cols[3], dtype=np.int64) if transducer else None,
            finals=dict(finals),
            vocab_size=vocab_size,
        )

    @property
    def num_arcs(self) -> int:
        return len(self.src)

    @property
    def is_transducer(self) -> bool:
        return self.olabels is not None

    @property
    def output_labels(self) -> np.ndarray:
        return self.labels if self.olabels is None else self.olabels

    def is_epsilon_free(self) -> bool:
        return not bool(np.any(self.labels == EPSILON))

    def arcs(self) -> Iterator[tuple[int, int, int, int, float]]:
        out = self.output_labels
        for i in range(self.num_arcs):
            yield int(self.src[i]), int(self.dst[i]), int(self.labels[i]), int(out[i]), float(self.weights[i])

    def out_arcs(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_states)]
        for i, s in enumerate(self.src.tolist()):
            adj[s].append(i)
        return adj

    def summary(self) -> dict[str, object]:
        return {
            "states": self.num_states,
            "arcs": self.num_arcs,
            "finals": len(self.finals),
            "epsilon_arcs": int(np.sum(self.labels == EPSILON)),
            "transducer": self.is_transducer,
            "vocab_size": self.vocab_size,
        }

    def to_text(self) -> str:
        lines = []
        if self.vocab_size is not None:
            lines.append(f"# vocab_size {self.vocab_size}")
        for s, d, ilab, olab, w in self.arcs():
            fields = [str(s), str(d), _label_str(ilab)]
            if self.is_transducer:
                fields.append(_label_str(olab))
            fields.append(repr(w))
            lines.append(" ".join(fields))
        for state, weight in sorted(self.finals.items()):
            lines.append(f"{state} {weight!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> WeightedFsa:
        arcs: list[tuple[float, ...]] = []
        finals: dict[int, float] = {}
        vocab_size: int | None = None
        width: int | None = None
        max_state = 0
        for line_no, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "vocab_size":
                    vocab_size = int(parts[1])
                continue
            fields = line.split()
            try:
                if len(fields) in (1, 2):
                    state = int(fields[0])
                    finals[state] = float(fields[1]) if len(fields) == 2 else 0.0
                    max_state = max(max_state, state)
                elif len(fields) in (4, 5):
                    if width is not None and width != len(fields):
                        raise FormatError(f"line {line_no}: mixed acceptor and transducer arcs")
                    width = len(fields)
                    s, d = int(fields[0]), int(fields[1])
                    labels = [_parse_label(x) for x in fields[2:-1]]
                    arcs.append((s, d, *labels, float(fields[-1])))
                    max_state = max(max_state, s, d)
                else:
                    raise FormatError(f"line {line_no}: expected 1, 2, 4 or 5 fields, got {len(fields)}")
            except ValueError as exc:
                if isinstance(exc, FormatError):
                    raise
                raise FormatError(f"line {line_no}: {exc}") from exc
        return cls.from_arcs(max_state + 1, arcs, finals, vocab_size=vocab_size, transducer=width == 5)

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> WeightedFsa:
        return cls.from_text(path.read_text(encoding="utf-8"))


def _label_str(label: int) -> str:
    return EPSILON_SYMBOL if label == EPSILON else str(label)


def _parse_label(token: str) -> int:
    return EPSILON if token == EPSILON_SYMBOL else int(token)


def trim(fsa: WeightedFsa) -> WeightedFsa:
    """Keep states both reachable from the start and co-reachable to a final; renumber in BFS order."""
    forward = fsa.out_arcs()
    backward: list[list[int]] = [[] for _ in range(fsa.num_states)]
    for i, d in enumerate(fsa.dst.tolist()):
        backward[d].append(i)

    reach = {fsa.start}
    queue = deque([fsa.start])
    order = [fsa.start]
    while queue:
        s = queue.popleft()
        for i in forward[s]:
            d = int(fsa.dst[i])
            if d not in reach:
                reach.add(d)
                order.append(d)
                queue.append(d)

    coreach = set(fsa.finals)
    queue = deque(fsa.finals)
    while queue:
        d = queue.popleft()
        for i in backward[d]:
            s = int(fsa.src[i])
            if s not in coreach:
                coreach.add(s)
                queue.append(s)

    if fsa.start not in coreach:
        raise DegenerateGraphError("no final state is reachable from the start state")

    keep = [s for s in order if s in coreach]
    remap = {old: new for new, old in enumerate(keep)}
    mask = np.array(
        [s in remap and d in remap for s, d in zip(fsa.src.tolist(), fsa.dst.tolist())],
        dtype=bool,
    )
    mapper = np.vectorize(remap.__getitem__, otypes=[np.int64])
    src = fsa.src[mask]
    dst = fsa.dst[mask]
    return WeightedFsa(
        num_states=len(keep),
        src=mapper(src) if len(src) else src,
        dst=mapper(dst) if len(dst) else dst,
        labels=fsa.labels[mask],
        weights=fsa.weights[mask],
        olabels=None if fsa.olabels is None else fsa.olabels[mask],
        finals={remap[s]: w for s, w in fsa.finals.items() if s in remap},
        vocab_size=fsa.vocab_size,
        start=0,
    )


def iter_paths(fsa: WeightedFsa, length: int) -> Iterator[FsaPath]:
    """All accepting paths with exactly ``length`` arcs, final weight included."""
    adj = fsa.out_arcs()
    out = fsa.output_labels

    def walk(state: int, depth: int, ilabels: tuple[int, ...], olabels: tuple[int, ...], weight: float):
        if depth == length:
            if state in fsa.finals:
                yield FsaPath(ilabels, olabels, weight + fsa.finals[state])
            return
        for i in adj[state]:
            yield from walk(
                int(fsa.dst[i]),
                depth + 1,
                ilabels + (int(fsa.labels[i]),),
                olabels + (int(out[i]),),
                weight + float(fsa.weights[i]),
            )

    yield from walk(fsa.start, 0, (), (), 0.0)


def sequence_log_weight(fsa: WeightedFsa, symbols: Sequence[int]) -> float:
    """Log-sum of the weights of every path whose input labels are ``symbols`` (epsilon-free graphs)."""
    alpha = {fsa.start: 0.0}
    adj = fsa.out_arcs()
    for sym in symbols:
        nxt: dict[int, float] = {}
        for state, score in alpha.items():
            for i in adj[state]:
                if int(fsa.labels[i]) != sym:
                    continue
                d = int(fsa.dst[i])
                nxt[d] = float(np.logaddexp(nxt.get(d, -np.inf), score + fsa.weights[i]))
        alpha = nxt
    finals = [score + fsa.finals[s] for s, score in alpha.items() if s in fsa.finals]
    return float(np.logaddexp.reduce(finals)) if finals else -math.inf


def best_path_weight(fsa: WeightedFsa, labels: Sequence[int]) -> float:
    """Tropical (max) weight of the best accepting path reading ``labels``; epsilon arcs are free moves."""
    adj = fsa.out_arcs()

    def closure(dist: dict[int, float]) -> dict[int, float]:
        dist = dict(dist)
        queue = deque(dist)
        relaxations = 0
        while queue:
            s = queue.popleft()
            for i in adj[s]:
                if int(fsa.labels[i]) != EPSILON:
                    continue
                d = int(fsa.dst[i])
                cand = dist[s] + float(fsa.weights[i])
                if cand > dist.get(d, -math.inf):
                    dist[d] = cand
                    queue.append(d)
                    relaxations += 1
                    if relaxations > fsa.num_states * max(fsa.num_arcs, 1):
                        raise DegenerateGraphError("positive-weight epsilon cycle")
        return dist

    dist = closure({fsa.start: 0.0})
    for label in labels:
        nxt: dict[int, float] = {}
        for s, score in dist.items():
            for i in adj[s]:
                if int(fsa.labels[i]) == label:
                    d = int(fsa.dst[i])
                    nxt[d] = max(nxt.get(d, -math.inf), score + float(fsa.weights[i]))
        dist = closure(nxt)
    finals = [score + fsa.finals[s] for s, score in dist.items() if s in fsa.finals]
    return max(finals) if finals else -math.inf


class ArcIndex:
    """Deterministic lookup ``(state, label) -> (dst, weight)`` with epsilon arcs read as failure transitions."""

    def __init__(self, fsa: WeightedFsa):
        self.fsa = fsa
        self.explicit: dict[tuple[int, int], tuple[int, float]] = {}
        self.backoff: dict[int, tuple[int, float]] = {}
        for s, d, label, _, w in fsa.arcs():
            if label == EPSILON:
                if s in self.backoff:
                    raise FormatError(f"state {s} has more than one epsilon arc")
                self.backoff[s] = (d, w)
            else:
                if (s, label) in self.explicit:
                    raise FormatError(f"state {s} has more than one arc for label {label}")
                self.explicit[(s, label)] = (d, w)

    def step(self, state: int, label: int) -> tuple[int, float] | None:
        weight = 0.0
        while True:
            hit = self.explicit.get((state, label))
            if hit is not None:
                return hit[0], weight + hit[1]
            if state not in self.backoff:
                return None
            state, w = self.backoff[state]
            weight += w

    def final(self, state: int) -> float | None:
        weight = 0.0
        while True:
            if state in self.fsa.finals:
                return weight + self.fsa.finals[state]
            if state not in self.backoff:
                return None
            state, w = self.backoff[state]
            weight += w


def failure_path_weight(fsa: WeightedFsa, labels: Sequence[int]) -> float:
    """Weight of ``labels`` walking the acceptor with backoff only where no explicit arc exists."""
    index = ArcIndex(fsa)
    state, total = fsa.start, 0.0
    for label in labels:
        hit = index.step(state, label)
        if hit is None:
            return -math.inf
        state, w = hit
        total += w
    final = index.final(state)
    return -math.inf if final is None else total + final
