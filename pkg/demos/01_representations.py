"""Every supported observation kind lowers to one representation: a
piecewise-linear quantile function on [0, 1].

Run:  python3 demos/01_representations.py
"""

import numpy as np

from distrostats import Discrete, Histogram, Interval, Parametric, Point, lower

values = {
    "point 2.0": Point(2.0),
    "interval [2, 4]": Interval(2, 4),
    "histogram {[0,1): 0.5, [1,3): 0.5}": Histogram(bins=[(0, 1, 0.5), (1, 3, 0.5)]),
    "discrete {0: 0.5, 4: 0.5}": Discrete(atoms=[(0, 0.5), (4, 0.5)]),
    "normal(mu=1, sigma=0.5)": Parametric(family="normal", params={"mu": 1.0, "sigma": 0.5}),
}

for label, mv in values.items():
    qf = lower(mv, resolution=9)  # coarse knots so parametric segments stay readable
    print(f"\n{label}")
    print(f"  segments ({qf.n_segments}):")
    for seg in qf.segments[:6]:
        print(f"    t in [{seg[0]:.3f}, {seg[1]:.3f}]  ->  value {seg[2]:+.4f} .. {seg[3]:+.4f}")
    if qf.n_segments > 6:
        print(f"    ... {qf.n_segments - 6} more")
    print(f"  mean = {qf.mean():+.6f}   std = {qf.std():.6f}")

print("\nEvaluation is right-continuous at jumps:")
atoms = lower(Discrete(atoms=[(0, 0.5), (4, 0.5)]))
for t in (0.0, 0.25, 0.5, 0.75, 1.0):
    print(f"  Q({t:.2f}) = {atoms.evaluate(t):.1f}")

print("\nA quantile function is a plot-ready array:")
qf = lower(Histogram(bins=[(0, 1, 0.25), (1, 2, 0.5), (2, 5, 0.25)]))
ts = np.linspace(0, 1, 11)
print("  t:", np.array2string(ts, precision=2))
print("  Q:", np.array2string(qf.evaluate(ts), precision=2))
