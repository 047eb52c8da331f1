#!/usr/bin/env python3
"""Evaluate the library's norm families on a few illustrative vectors.

Shows the classic reductions (order-1 gauge = sup norm, order-d gauge =
Euclidean, k-support at k = 1 is l1) and a group-structured example with
its dual.
"""

import numpy as np

from sparselb import (
    GroupStructure,
    convolution_norm,
    dual_sup_norm,
    gauge_norm,
    ksupport_norm,
    l0,
)


def main() -> None:
    vectors = [
        np.array([3.0, -4.0, 0.0]),
        np.array([1.0, 2.0, 2.0, 4.0]),
        np.array([1.0, 1.0, 1.0, 1.0, 1.0]),
    ]
    for x in vectors:
        d = x.size
        print(f"x = {x}   (l0 = {l0(x)})")
        for k in range(1, d + 1):
            print(f"  k={k}:  gauge={gauge_norm(x, k):10.6f}"
                  f"  k-support={ksupport_norm(x, k):10.6f}")
        print(f"  sup={np.abs(x).max():.6f}  l2={np.linalg.norm(x):.6f}"
              f"  l1={np.abs(x).sum():.6f}")
        print()

    gs = GroupStructure(3, ((0, 1), (1, 2)), (1.0, 1.5))
    v = np.array([3.0, 4.0, 0.0])
    print(f"groups {gs.groups} weights {gs.weights}")
    print(f"  convolution norm of {v}: {convolution_norm(gs, v):.6f}")
    print(f"  dual sup norm of (1,2,2): {dual_sup_norm(gs, np.array([1.,2.,2.])):.6f}")


if __name__ == "__main__":
    main()
