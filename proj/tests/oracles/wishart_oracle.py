"""Monte Carlo oracle: normalized resolvent trace of W X X^T W^T / (m n0) for n0 = n1 = m = 2000."""
import numpy as np

n = 2000
z = 1 + 0.01j
rng = np.random.default_rng(20240101)
vals = []
for rep in range(10):
    W = rng.standard_normal((n, n))
    X = rng.standard_normal((n, n))
    Y = W @ X / np.sqrt(n)
    M = Y @ Y.T / n
    lam = np.linalg.eigvalsh(M)
    vals.append(np.mean(1.0 / (lam - z)))
vals = np.array(vals)
print("mean g =", repr(vals.mean()), "replica std =", vals.std(ddof=1))
