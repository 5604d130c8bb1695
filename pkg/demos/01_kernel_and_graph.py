"""Kernel geometry and similarity-graph construction on a toy line of points.

Walks through the squared-exponential kernel, the constant feature norm, the
three graph constructions, and uniform edge sampling.
"""

import numpy as np

import gkm

spec = gkm.KernelSpec(sigma_f=1.0, sigma_l=1.0)
a = gkm.SparseVector.from_pairs([(1, 0.0)])
b = gkm.SparseVector.from_pairs([(1, 1.0)])
c = gkm.SparseVector.from_pairs([(1, 10.0)])

print("K(a, a) =", gkm.eval_kernel(spec, a, a), "(always sigma_f^2)")
print("K(a, b) =", gkm.eval_kernel(spec, a, b))
print("K(a, c) =", gkm.eval_kernel(spec, a, c), "(far apart, nearly zero)")
print("feature norm of any point:", gkm.feature_norm(spec, c))

# three unlabeled points on a line; the first two are close
points = (a, b, c)
dataset = gkm.Dataset(points, np.array([1, 0, 0], dtype=np.int8))

full = gkm.build_fully_connected(dataset, gkm.GraphSpec("full", sigma_s=1.0))
print("\nfully connected: |E| =", full.n_edges)

knn = gkm.build_knn(dataset, gkm.GraphSpec("knn", sigma_s=1.0, k=1))
print("1-NN union edges:", [(int(u), int(v)) for u, v in zip(knn.us, knn.vs)])

eps = gkm.build_eps(dataset, gkm.GraphSpec("eps", sigma_s=1.0, epsilon=1.5))
print("eps = 1.5 edges:", [(int(u), int(v)) for u, v in zip(eps.us, eps.vs)])

rng = np.random.default_rng(0)
draws = [gkm.sample_edge(full, rng)[:2] for _ in range(8)]
print("\nuniform draws from the implicit universe:", draws)

us, vs, _ = full.sample_batch(rng, 100_000)
freq = np.unique(us * dataset.n + vs, return_counts=True)[1] / 100_000
print("empirical edge frequencies (should be ~1/|E| each):", freq.round(4))
