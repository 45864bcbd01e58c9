"""ARPA text import/export for label n-grams.

Labels are written as their decimal ids, sentence boundaries as ``<s>`` and
``</s>``. Probabilities and backoffs are log10; a context that leaves no
backoff mass is written with a backoff of ``-inf``.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict

from ..errors import ArpaParseError
from .ngram import ContextEntry, History, NGramLabelLm

BOS_TOKEN = "<s>"
EOS_TOKEN = "</s>"
BOS_LOG10 = -99.0
LN10 = math.log(10.0)

_COUNT_LINE = re.compile(r"^ngram\s+(\d+)\s*=\s*(\d+)$")
_SECTION = re.compile(r"^\\(\d+)-grams:$")


def _fmt(value: float) -> str:
    if value == -math.inf:
        return "-inf"
    return f"{value:.17g}"


def export_arpa(lm: NGramLabelLm) -> str:
    def token(sym: int) -> str:
        if sym == lm.eos:
            return EOS_TOKEN
        if sym == lm.bos:
            return BOS_TOKEN
        return str(sym)

    # every n-gram line, keyed by its full symbol tuple
    entries: dict[History, float] = {}
    for history, entry in lm.contexts.items():
        for label, logp in entry.probs.items():
            entries[history + (label,)] = logp
    for history in lm.contexts:
        if history and history not in entries:
            entries[history] = (
                BOS_LOG10 * LN10 if history == (lm.bos,) else lm.conditional_log_prob(history[:-1], history[-1])
            )

    by_order: dict[int, list[History]] = defaultdict(list)
    for gram in entries:
        by_order[len(gram)].append(gram)

    lines = ["", "\\data\\"]
    for n in range(1, lm.order + 1):
        lines.append(f"ngram {n}={len(by_order[n])}")
    for n in range(1, lm.order + 1):
        lines.append("")
        lines.append(f"\\{n}-grams:")
        for gram in sorted(by_order[n]):
            fields = [_fmt(entries[gram] / LN10), " ".join(token(s) for s in gram)]
            context = lm.contexts.get(gram)
            if context is not None and n < lm.order:
                fields.append(_fmt(context.backoff / LN10) if context.backoff is not None else "-inf")
            lines.append("\t".join(fields))
    lines.append("")
    lines.append("\\end\\")
    return "\n".join(lines) + "\n"


def import_arpa(text: str) -> NGramLabelLm:
    lines = text.splitlines()
    pos = 0

    def skip_blank() -> None:
        nonlocal pos
        while pos < len(lines) and not lines[pos].strip():
            pos += 1

    skip_blank()
    if pos >= len(lines) or lines[pos].strip() != "\\data\\":
        raise ArpaParseError("expected \\data\\ header", pos + 1)
    pos += 1

    declared: dict[int, int] = {}
    while pos < len(lines) and lines[pos].strip():
        match = _COUNT_LINE.match(lines[pos].strip())
        if not match:
            break
        declared[int(match.group(1))] = int(match.group(2))
        pos += 1
    if not declared:
        raise ArpaParseError("\\data\\ section declares no n-gram counts", pos + 1)
    order = max(declared)
    if sorted(declared) != list(range(1, order + 1)):
        raise ArpaParseError(f"n-gram counts must cover orders 1..{order}", pos)

    raw: dict[int, list[tuple[int, list[str], float, float | None]]] = {}
    for n in range(1, order + 1):
        skip_blank()
        if pos >= len(lines):
            raise ArpaParseError(f"missing \\{n}-grams: section", pos)
        match = _SECTION.match(lines[pos].strip())
        if not match or int(match.group(1)) != n:
            raise ArpaParseError(f"expected \\{n}-grams: header, got {lines[pos].strip()!r}", pos + 1)
        pos += 1
        rows = []
        while pos < len(lines) and lines[pos].strip() and not lines[pos].startswith("\\"):
            fields = lines[pos].split()
            if len(fields) not in (n + 1, n + 2):
                raise ArpaParseError(f"expected {n + 1} or {n + 2} fields, got {len(fields)}", pos + 1)
            try:
                logp = float(fields[0])
                backoff = float(fields[n + 1]) if len(fields) == n + 2 else None
            except ValueError as exc:
                raise ArpaParseError(f"invalid number: {exc}", pos + 1) from exc
            rows.append((pos + 1, fields[1 : n + 1], logp, backoff))
            pos += 1
        if len(rows) != declared[n]:
            raise ArpaParseError(f"\\data\\ declares {declared[n]} {n}-grams, found {len(rows)}", pos)
        raw[n] = rows

    skip_blank()
    if pos >= len(lines) or lines[pos].strip() != "\\end\\":
        raise ArpaParseError("expected \\end\\", pos + 1)

    max_label = -1
    for rows in raw.values():
        for line_no, words, _, _ in rows:
            for word in words:
                if word in (BOS_TOKEN, EOS_TOKEN):
                    continue
                if not word.isdigit():
                    raise ArpaParseError(f"label token {word!r} is not a non-negative integer", line_no)
                max_label = max(max_label, int(word))
    vocab_size = max_label + 1
    if vocab_size < 1:
        raise ArpaParseError("model contains no labels", 1)
    eos, bos = vocab_size, vocab_size + 1

    def symbol(word: str) -> int:
        return bos if word == BOS_TOKEN else eos if word == EOS_TOKEN else int(word)

    contexts: dict[History, ContextEntry] = {(): ContextEntry()}
    for n, rows in raw.items():
        for line_no, words, logp10, backoff10 in rows:
            gram = tuple(symbol(w) for w in words)
            if eos in gram[:-1] or bos in gram[1:]:
                raise ArpaParseError("sentence boundary in the middle of an n-gram", line_no)
            history, label = gram[:-1], gram[-1]
            if label != bos:
                entry = contexts.setdefault(history, ContextEntry())
                if label in entry.probs:
                    raise ArpaParseError(f"duplicate n-gram {' '.join(words)}", line_no)
                entry.probs[label] = logp10 * LN10
            if n < order and label != eos:
                entry = contexts.setdefault(gram, ContextEntry())
                if backoff10 is None:
                    entry.backoff = 0.0
                elif backoff10 == -math.inf:
                    entry.backoff = None
                else:
                    entry.backoff = backoff10 * LN10
    return NGramLabelLm(order=order, vocab_size=vocab_size, contexts=contexts)
