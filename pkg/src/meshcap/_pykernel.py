"""Pure-Python slot loop. Reference semantics for the compiled kernel in ``_kernel.pyx``.

Both kernels take the same flat arrays:

labels      label (1..frame_len) of every node
path_nodes  concatenated X-Y paths of all sessions
path_off    session ``s`` owns ``path_nodes[path_off[s]:path_off[s+1]]``
real        real packets per session (counted as delivered)
total       packets injected per session; ``total - real`` trailing dummies

and return ``(status, slots, delivered, completion, transmissions, retries)``;
``status`` is 0 on completion and 1 when ``max_slots`` ran out.
"""

from collections import deque

import numpy as np


def run_slots(labels, frame_len, path_nodes, path_off, real, total, max_slots,
              trace=None, verify=None):
    """Simulate until every real packet is delivered.

    trace   optional callable ``(slot, tx, rx, session, packet)`` per transmission
    verify  optional callable ``(txs, rxs) -> sequence of bool``; a False entry
            keeps that packet at the head of its queue for the node's next turn
    """
    n = len(labels)
    S = len(real)
    labels = [int(x) for x in labels]
    path_nodes = [int(x) for x in path_nodes]
    path_off = [int(x) for x in path_off]
    real = [int(x) for x in real]
    total = [int(x) for x in total]

    by_label = [[] for _ in range(frame_len)]
    for v in range(n):
        by_label[labels[v] - 1].append(v)

    queues = [deque() for _ in range(n)]
    # each entry is [session, packet index within session, hop position on the path]
    for s in range(S):
        q = queues[path_nodes[path_off[s]]]
        for j in range(total[s]):
            q.append([s, j, 0])

    delivered = [0] * S
    completion = [-1] * S
    remaining = sum(1 for s in range(S) if real[s] > 0)
    retries = 0
    transmissions = 0
    t = 0
    while remaining > 0:
        if t >= max_slots:
            return 1, t, np.array(delivered, dtype=np.int64), np.array(completion, dtype=np.int64), transmissions, retries
        active = [v for v in by_label[t % frame_len] if queues[v]]
        if active:
            heads = [queues[v][0] for v in active]
            rxs = [path_nodes[path_off[p[0]] + p[2] + 1] for p in heads]
            ok = verify(active, rxs) if verify is not None else None
            for i, v in enumerate(active):
                if ok is not None and not ok[i]:
                    retries += 1
                    continue
                pkt = queues[v].popleft()
                s = pkt[0]
                pkt[2] += 1
                u = rxs[i]
                transmissions += 1
                if trace is not None:
                    trace(t, v, u, s, pkt[1])
                if path_off[s] + pkt[2] == path_off[s + 1] - 1:
                    if pkt[1] < real[s]:
                        delivered[s] += 1
                        if delivered[s] == real[s]:
                            completion[s] = t
                            remaining -= 1
                else:
                    queues[u].append(pkt)
        t += 1
    return 0, t, np.array(delivered, dtype=np.int64), np.array(completion, dtype=np.int64), transmissions, retries
