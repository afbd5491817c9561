"""Shared oracle computations for the unit and acceptance suites."""

from __future__ import annotations

import numpy as np

from relaxlab import particles as P

EQ_N, EQ_DENSITY, EQ_T, EQ_BATCHES, EQ_SEEDS = 64, 0.3, 1.0, 10, range(10)


def equilibrium_zscores(N=EQ_N, rho=EQ_DENSITY, T=EQ_T, batches=EQ_BATCHES, seeds=EQ_SEEDS) -> np.ndarray:
    """Site-wise (mean - rho)/SE with SE from the seed x batch means of time-averaged occupancy."""
    runs = P.run_ensemble(N, 2.0, rho, rho, rho, T, [T], seeds, batches=batches)
    occ = np.concatenate([r.occupation for r in runs])
    se = occ.std(axis=0, ddof=1) / np.sqrt(len(occ))
    return (occ.mean(axis=0) - rho) / se
