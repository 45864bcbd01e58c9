from __future__ import annotations

import logging

from ..graphs.fsa import EPSILON, WeightedFsa
from .ngram import History, NGramLabelLm

logger = logging.getLogger(__name__)


def lm_to_fsa(lm: NGramLabelLm) -> WeightedFsa:
    """Acceptor with one state per stored context.

    Explicit n-grams become label arcs to the longest stored suffix of the
    extended history, backoffs become epsilon arcs and sentence-end
    probabilities become final weights.
    """
    start = lm.resolve(lm.start_history)
    histories: list[History] = [start] + sorted(
        (h for h in lm.contexts if h != start), key=lambda h: (len(h), h)
    )
    if () not in lm.contexts:
        histories.append(())
    state_of = {h: i for i, h in enumerate(histories)}

    arcs = []
    finals: dict[int, float] = {}
    for h in histories:
        entry = lm.contexts.get(h)
        if entry is None:
            continue
        src = state_of[h]
        for label, logp in sorted(entry.probs.items()):
            if label == lm.eos:
                finals[src] = logp
                continue
            arcs.append((src, state_of[lm.resolve(h + (label,))], label, logp))
        if h and entry.backoff is not None:
            arcs.append((src, state_of[lm.resolve(h[1:])], EPSILON, entry.backoff))

    fsa = WeightedFsa.from_arcs(len(histories), arcs, finals, vocab_size=lm.vocab_size)
    logger.debug("Compiled label LM", extra=fsa.summary())
    return fsa
