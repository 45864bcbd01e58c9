from __future__ import annotations

import logging
from collections import deque

from ..errors import ConfigError, DegenerateGraphError
from .fsa import EPSILON, ArcIndex, WeightedFsa, trim

logger = logging.getLogger(__name__)


def compose_denominator(topology: WeightedFsa, lm_fsa: WeightedFsa) -> WeightedFsa:
    """Product of the CTC topology with a label-LM acceptor.

    Topology arcs with an epsilon output advance only the topology side;
    label outputs step the LM, taking backoff arcs only when the label has
    no explicit arc. The result is epsilon-free, deterministic and trimmed,
    and every length-T path carries log p of its collapsed label sequence.
    """
    if not topology.is_transducer:
        raise ConfigError("the topology must be a transducer")
    if topology.vocab_size is not None and lm_fsa.vocab_size is not None and topology.vocab_size != lm_fsa.vocab_size:
        raise ConfigError(
            f"topology vocabulary {topology.vocab_size} does not match LM vocabulary {lm_fsa.vocab_size}"
        )

    lm_index = ArcIndex(lm_fsa)
    topo_adj = topology.out_arcs()
    out = topology.output_labels

    start = (topology.start, lm_fsa.start)
    state_of = {start: 0}
    queue = deque([start])
    arcs = []
    finals: dict[int, float] = {}
    while queue:
        pair = queue.popleft()
        t_state, q_state = pair
        src = state_of[pair]
        if t_state in topology.finals:
            final = lm_index.final(q_state)
            if final is not None:
                finals[src] = topology.finals[t_state] + final
        for i in topo_adj[t_state]:
            weight = float(topology.weights[i])
            if int(out[i]) == EPSILON:
                nxt = (int(topology.dst[i]), q_state)
            else:
                hit = lm_index.step(q_state, int(out[i]))
                if hit is None:
                    continue
                nxt = (int(topology.dst[i]), hit[0])
                weight += hit[1]
            if nxt not in state_of:
                state_of[nxt] = len(state_of)
                queue.append(nxt)
            arcs.append((src, state_of[nxt], int(topology.labels[i]), weight))

    product = WeightedFsa.from_arcs(len(state_of), arcs, finals, vocab_size=topology.vocab_size)
    try:
        den = trim(product)
    except DegenerateGraphError as exc:
        raise DegenerateGraphError("denominator graph is empty after composition") from exc
    logger.info("Composed denominator graph", extra=den.summary())
    return den
