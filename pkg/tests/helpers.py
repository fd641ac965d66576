"""Shared test utilities."""

import numpy as np

from qeckit import OperatorEnsemble, PureState


def random_superoperator(dim, num_ops, rng):
    """Random trace-preserving family from an isometry into dim x num_ops."""
    g = rng.normal(size=(dim * num_ops, dim)) + 1j * rng.normal(size=(dim * num_ops, dim))
    q, _ = np.linalg.qr(g)
    ops = tuple(q[a * dim:(a + 1) * dim, :] for a in range(num_ops))
    return OperatorEnsemble(ops, label=f"random({dim},{num_ops})")


def random_state(dim, rng, shape=None):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(v / np.linalg.norm(v), shape)
