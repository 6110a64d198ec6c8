"""Reference values for the C++ tests, from polygon buffering (shapely).

Run: python3 tests/oracles/derive_oracles.py
The printed numbers are pasted into the test sources.
"""
import numpy as np
from numpy.polynomial import legendre as L
from shapely.geometry import Point, box
from shapely.ops import unary_union

QS = 4096  # segments per quarter circle


def pacman():
    return Point(0, 0).buffer(1.0, quad_segs=QS).difference(box(0, 0, 2, 2))


def union(half_gap):
    c = 2 + 2 * half_gap
    return unary_union([box(-1, -1, 1, 1), box(c - 1, -1, c + 1, 1)])


def frame(side=1.0):
    h = side / 2
    return box(-1, -1, 1, 1).difference(box(-h, -h, h, h))


def volume(shape, t):
    return shape.area if t == 0 else shape.buffer(t, quad_segs=QS).area


def trapezoid(t):
    w = np.zeros_like(t)
    d = np.diff(t)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def l2_residual(t, v, degree):
    a, b = t[0], t[-1]
    x = (2 * t - a - b) / (b - a)
    w = np.sqrt(trapezoid(t))
    A = L.legvander(x, degree) * w[:, None]
    c, *_ = np.linalg.lstsq(A, v * w, rcond=None)
    return float(np.linalg.norm(A @ c - v * w))


def main():
    shapes = {"pacman": pacman(), "union0.5": union(0.5), "union1": union(1.0),
              "union0.05": union(0.05), "frame": frame()}
    radii = [0.0, 0.03, 0.25, 0.5, 0.75, 1.0, 1.2, 1.5, 1.98]
    print("# exact volumes")
    for name, s in shapes.items():
        print(name, " ".join(f"{volume(s, r):.10f}" for r in radii))

    print("# degree-2 least squares on {0.1, 0.11, ..., R}")
    for name, R in (("pacman", 1.0), ("union0.5", 0.5), ("union1", 1.0), ("frame", 0.5)):
        t = np.round(np.arange(10, int(round(R * 100)) + 1) * 0.01, 10)
        v = np.array([volume(shapes[name], x) for x in t])
        print(name, " ".join(f"{c:.8f}" for c in np.polyfit(t, v, 2)[::-1]))

    print("# pacman G(t) = ||V - P^t||_L2[0,t], first t on 0.10:0.01:1.98 with G > 1e-4")
    lattice = np.arange(0, 1400) * 0.001
    vol = np.array([volume(shapes["pacman"], x) for x in lattice])
    for k in range(10, 199):
        t = k / 100
        m = int(round(t / 0.001)) + 1
        g = l2_residual(lattice[:m], vol[:m], 2)
        if k in (100, 102, 105, 110, 120):
            print(f"G({t:.2f}) = {g:.4e}")
        if g > 1e-4:
            print(f"first crossing t = {t:.2f} (G = {g:.4e})")
            break


if __name__ == "__main__":
    main()
