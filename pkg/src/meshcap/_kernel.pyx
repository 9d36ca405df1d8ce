# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled slot loop; same contract as ``meshcap._pykernel.run_slots``.

Per-node FIFO queues are singly linked lists threaded through a flat
``next_pkt`` array. The loop holds no Python objects and runs without the GIL.
"""

import numpy as np


def run_slots(const int[::1] labels, int frame_len, const int[::1] path_nodes,
              const long long[::1] path_off, const long long[::1] real,
              const long long[::1] total, long long max_slots):
    cdef Py_ssize_t n = labels.shape[0]
    cdef Py_ssize_t S = real.shape[0]
    cdef Py_ssize_t s, v, k, j
    cdef long long P = 0
    for s in range(S):
        P += total[s]

    # nodes grouped by label
    order_np = np.argsort(np.asarray(labels), kind="stable").astype(np.int32)
    cdef int[::1] order = order_np
    label_off_np = np.zeros(frame_len + 1, dtype=np.int64)
    cdef long long[::1] label_off = label_off_np
    for v in range(n):
        label_off[labels[v]] += 1
    for k in range(frame_len):
        label_off[k + 1] += label_off[k]

    cdef long long[::1] next_pkt = np.full(P, -1, dtype=np.int64)
    cdef long long[::1] head = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] tail = np.full(n, -1, dtype=np.int64)
    cdef int[::1] pkt_sess = np.empty(P, dtype=np.int32)
    cdef int[::1] pkt_hop = np.zeros(P, dtype=np.int32)
    cdef long long[::1] pkt_first = np.empty(S + 1, dtype=np.int64)
    delivered_np = np.zeros(S, dtype=np.int64)
    completion_np = np.full(S, -1, dtype=np.int64)
    cdef long long[::1] delivered = delivered_np
    cdef long long[::1] completion = completion_np

    cdef long long p = 0, q, remaining = 0, t = 0, transmissions = 0
    cdef int status = 0, lab, h, src, u
    cdef long long last

    with nogil:
        for s in range(S):
            pkt_first[s] = p
            src = path_nodes[path_off[s]]
            for j in range(total[s]):
                pkt_sess[p] = <int>s
                if tail[src] < 0:
                    head[src] = p
                else:
                    next_pkt[tail[src]] = p
                tail[src] = p
                p += 1
            if real[s] > 0:
                remaining += 1
        pkt_first[S] = p

        while remaining > 0:
            if t >= max_slots:
                status = 1
                break
            lab = <int>(t % frame_len)
            for k in range(label_off[lab], label_off[lab + 1]):
                v = order[k]
                q = head[v]
                if q < 0:
                    continue
                head[v] = next_pkt[q]
                if head[v] < 0:
                    tail[v] = -1
                next_pkt[q] = -1
                s = pkt_sess[q]
                h = pkt_hop[q] + 1
                pkt_hop[q] = h
                u = path_nodes[path_off[s] + h]
                transmissions += 1
                last = path_off[s + 1] - 1
                if path_off[s] + h == last:
                    if q - pkt_first[s] < real[s]:
                        delivered[s] += 1
                        if delivered[s] == real[s]:
                            completion[s] = t
                            remaining -= 1
                else:
                    if tail[u] < 0:
                        head[u] = q
                    else:
                        next_pkt[tail[u]] = q
                    tail[u] = q
            t += 1

    return status, t, delivered_np, completion_np, transmissions, 0
