"""Low-level space descriptors shared by both kernel backends.

A space is passed to the hot kernels as ``(code, params)`` where ``params``
is a flat float64 vector. Chart dimensions: EUCLIDEAN carries its own,
BERGER is 4 (ambient R^4 coordinates, points kept on the unit sphere),
everything else is as listed.
"""
from __future__ import annotations

import numpy as np

EUCLIDEAN = 0       # params: [dim]
BERGER = 1          # params: [kappa, tau]            dim 4
HEISENBERG = 2      # params: [tau]                   dim 3
PROD_SPHERE = 3     # params: [radius]                dim 3 (theta, phi, t)
PROD_CAPPED = 4     # params: [l, blend, taper]       dim 3 (s, phi, t)
SURF_SPHERE = 5     # params: [radius]                dim 2 (theta, phi)
SURF_CAPPED = 6     # params: [l, blend, taper]       dim 2 (s, phi)


def chart_dim(code: int, params: np.ndarray) -> int:
    if code == EUCLIDEAN:
        return int(params[0])
    if code == BERGER:
        return 4
    if code in (HEISENBERG, PROD_SPHERE, PROD_CAPPED):
        return 3
    if code in (SURF_SPHERE, SURF_CAPPED):
        return 2
    raise ValueError(f"unknown space code {code}")


def pack(code: int, *params: float) -> tuple[int, np.ndarray]:
    return code, np.asarray(params, dtype=np.float64)
