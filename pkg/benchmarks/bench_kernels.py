"""Time the pairwise Levenshtein kernel: numba vs pure numpy.

Usage: python3 benchmarks/bench_kernels.py [n_messages] [repeats]

Generates one random-language corpus, packs it, and times all-pairs edit
distance under both backends.  Results are verified identical before any
timing is reported.  ARTLANG_NUMBA=0 removes the numba backend entirely;
this script asks for each backend explicitly instead.
"""

import sys
import time

import numpy as np

from artlang.core import AttrValConfig, Corpus
from artlang.kernels import active_backend, pack_messages, pairwise_levenshtein

n_messages = int(sys.argv[1]) if len(sys.argv) > 1 else 2048
repeats = int(sys.argv[2]) if len(sys.argv) > 2 else 3

rng = np.random.default_rng(0)
cfg = AttrValConfig((n_messages,), vocab_size=8, max_len=9)
pairs = [((i,), tuple(int(x) for x in rng.integers(0, 8, size=9)))
         for i in range(n_messages)]
corpus = Corpus(cfg, pairs)

padded, lengths = pack_messages(corpus.messages)
idx_a, idx_b = np.triu_indices(n_messages, k=1)
idx_a = idx_a.astype(np.int64)
idx_b = idx_b.astype(np.int64)
print(f"{n_messages} messages -> {len(idx_a)} pairs, default backend: {active_backend()}")

backends = ["numpy"]
if active_backend() == "numba":
    backends.insert(0, "numba")
    # warm up the JIT so compile time stays out of the numbers
    pairwise_levenshtein(padded[:16], lengths[:16],
                         idx_a[:32] % 16, idx_b[:32] % 16, backend="numba")
else:
    print("numba unavailable; timing numpy only")

results = {}
for backend in backends:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        dist = pairwise_levenshtein(padded, lengths, idx_a, idx_b, backend=backend)
        best = min(best, time.perf_counter() - t0)
    results[backend] = (best, dist)
    rate = len(idx_a) / best / 1e6
    print(f"{backend:>6}: {best:.3f}s best of {repeats}  ({rate:.1f} M pairs/s)")

if len(results) == 2:
    assert np.array_equal(results["numba"][1], results["numpy"][1]), "backends disagree"
    print(f"speedup: {results['numpy'][0] / results['numba'][0]:.2f}x, outputs identical")
