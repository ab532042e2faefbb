"""
Option prices and quantile plots
================================

Two of the workspace builtins on their own: closed-form European option
prices and paired sample quantiles.
"""

import numpy as np

from hybridlink.kernel import Workspace, blackscholes, eval_command, qqplot

call, put = blackscholes(100, 100, 0.05, 0.2, 1.0)
print(f"at the money: call {call:.6f}  put {put:.6f}")
print("parity gap:", call - put - (100 - 100 * np.exp(-0.05)))

# volatility sweep
for sigma in (0.0, 0.05, 0.1, 0.2, 0.4):
    c, p = blackscholes(100, 105, 0.03, sigma, 0.5)
    print(f"sigma={sigma:.2f}  call={c:8.4f}  put={p:8.4f}")

# the same prices from inside the command language
ws, _ = eval_command(Workspace(), "[c, p] = blackscholes(100, 100, 0.05, 0.2, 1)")
print(ws["c"], ws["p"])

# q-q plot of two samples; an affine relation shows up as a straight line
rng = np.random.default_rng(3)
x = rng.normal(size=500)
y = 2.0 * rng.normal(size=300) + 1.0
q = qqplot(x, y)
slope, intercept = np.polyfit(q[:, 0], q[:, 1], 1)
print(f"fitted line y = {slope:.2f} x + {intercept:.2f}")
