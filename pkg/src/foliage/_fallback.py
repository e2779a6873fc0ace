"""Numpy implementations of the pointwise kernels (same contract)."""

import numpy as np


def matvec_accumulate(Ms, idx, us, out):
    """out[i] += sum_k Ms[k][idx[i]] @ us[k][i] for every grid point i."""
    if len(Ms) != len(us):
        raise ValueError("Ms and us must have the same length")
    if idx.shape[0] != out.shape[0]:
        raise ValueError("index map has the wrong length")
    for M, u in zip(Ms, us):
        if u.shape != out.shape or M.shape[1:] != (out.shape[1],) * 2:
            raise ValueError("shape mismatch in matvec_accumulate")
        out += np.einsum("nab,nb->na", M[idx], u)


def broadcast_accumulate(Ms, us, out):
    """Same contract on unflattened arrays, using numpy broadcasting instead
    of an index map."""
    for M, u in zip(Ms, us):
        out += np.matmul(M, u[..., None])[..., 0]
