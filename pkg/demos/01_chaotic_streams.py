"""
Chaotic number streams
======================

The logistic map at lam = 4 is fully chaotic. Its iterates pile up near
0 and 1 instead of spreading evenly, and nearby orbits separate at a rate
of ln 2 per step.
"""

import numpy as np

from cqbde import UniformSource, estimate_lyapunov, histogram_counts, make_lyapunov_guided_stream

# a Lyapunov-guided stream throws away the first 5000 iterates
stream = make_lyapunov_guided_stream(0.3, lam=4.0, burn_in=5000)
chaotic = stream.take(100_000)
uniform = UniformSource(0).random(100_000)

# 10-bin histograms: the chaotic one is U-shaped
print("bin    chaotic  uniform")
for i, (c, u) in enumerate(zip(histogram_counts(chaotic, 10), histogram_counts(uniform, 10))):
    print(f"{i / 10:.1f}  {c:9d} {u:8d}")

# positive exponent in the chaotic regime, negative in the stable one
print("Lyapunov exponent at lam=4.0:", round(estimate_lyapunov(make_lyapunov_guided_stream(0.2, 4.0, 0)), 4))
print("Lyapunov exponent at lam=2.5:", round(estimate_lyapunov(make_lyapunov_guided_stream(0.2, 2.5, 0)), 4))
print("ln 2 =", round(np.log(2), 4))
