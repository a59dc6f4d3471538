"""Pure-Python reference kernel for the grid annealing sweeps.

Bit-for-bit identical to the compiled kernel in ``_gridcore``: both
consume the same precomputed per-sweep random arrays (visit order, move
type, neighbor choice, exchange partner, uniforms) and apply moves in
the same sequence.
"""

import math

import numpy as np

# neighbor offsets (di, dj) and the index of their direction weight
OFFSETS = ((0, 1), (0, -1), (1, 0), (-1, 0),
           (1, 1), (-1, -1), (1, -1), (-1, 1))
WEIGHT_OF = (0, 0, 1, 1, 2, 2, 3, 3)

BACKEND = "python"


def _delta_flip(labels, W, i, j, lo, ln, weights, skip_i, skip_j):
    """Energy change for relabeling cell (i, j) from lo to ln."""
    de = 0.0
    for k in range(8):
        di, dj = OFFSETS[k]
        ii, jj = i + di, j + dj
        if ii < 0 or ii >= W or jj < 0 or jj >= W:
            continue
        if ii == skip_i and jj == skip_j:
            continue
        lb = int(labels[ii, jj])
        de += weights[WEIGHT_OF[k]] * (int(ln != lb) - int(lo != lb))
    return de


def sweep(labels, frozen, act_i, act_j, weights, perm, mtype, nbr,
          partner, u, temp, mu):
    """One annealing sweep; mutates ``labels``.

    Returns (accepted count, net change of the label-1 cell count).

    Two move kinds, chosen by the precomputed ``mtype`` bit:

    * local (0): the visited cell is relabeled to its neighbor's label;
      the effective energy carries a chemical-potential term -mu per
      label-1 cell that steers the finite-chamber mass to its target;
    * exchange (1): the visited cell swaps labels with a random distant
      active cell when exactly one of the two has label 1 —
      mass-neutral evaporation/condensation transport.

    Metropolis acceptance at temperature ``temp``; zero temperature
    accepts only strict decreases.
    """
    W = labels.shape[0]
    n = len(act_i)
    accepted = 0
    dn1 = 0
    for t in range(n):
        c = perm[t]
        i, j = int(act_i[c]), int(act_j[c])
        li = int(labels[i, j])
        if mtype[t] == 1:
            d = partner[t]
            ii, jj = int(act_i[d]), int(act_j[d])
            lp = int(labels[ii, jj])
            if li == lp or (li != 1 and lp != 1):
                continue
            if abs(ii - i) <= 1 and abs(jj - j) <= 1:
                continue
            de = _delta_flip(labels, W, i, j, li, lp, weights, -1, -1) \
                + _delta_flip(labels, W, ii, jj, lp, li, weights, -1, -1)
            if de < 0.0 or (temp > 0.0 and u[t] < math.exp(-de / temp)):
                labels[i, j] = lp
                labels[ii, jj] = li
                accepted += 1
            continue
        di, dj = OFFSETS[nbr[t]]
        ii, jj = i + di, j + dj
        if ii < 0 or ii >= W or jj < 0 or jj >= W:
            continue
        lj = int(labels[ii, jj])
        if li == lj:
            continue
        de = _delta_flip(labels, W, i, j, li, lj, weights, -1, -1)
        d1 = int(lj == 1) - int(li == 1)
        de -= mu * d1
        if de < 0.0 or (temp > 0.0 and u[t] < math.exp(-de / temp)):
            labels[i, j] = lj
            dn1 += d1
            accepted += 1
    return accepted, dn1


def total_energy(labels, weights):
    """Total bond energy of a labeling (each bond counted once)."""
    e = 0.0
    l = labels
    e += weights[0] * np.count_nonzero(l[:, 1:] != l[:, :-1])
    e += weights[1] * np.count_nonzero(l[1:, :] != l[:-1, :])
    e += weights[2] * np.count_nonzero(l[1:, 1:] != l[:-1, :-1])
    e += weights[3] * np.count_nonzero(l[1:, :-1] != l[:-1, 1:])
    return float(e)
