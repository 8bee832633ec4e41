"""Numpy implementation of the propagator kernels (fallback backend)."""


def apply_branch(psi, blocks, g0_phase, edge_phase, spectator):
    """Apply one control branch of the closed-form propagator in place.

    ``psi`` has axes (atom, coupled field, spectator field, batch). Each
    excitation block ``(|e,n>, |g,n+1>)`` of the coupled field is rotated by
    ``blocks[n]``; ``|g,0>`` and the truncated ``|e,n_max>`` only pick up a
    phase. The spectator field gets ``spectator[m]`` on occupation ``m``.
    """
    e = psi[0, :-1].copy()
    g = psi[1, 1:].copy()
    b = blocks[:, :, :, None, None]
    psi[0, :-1] = b[:, 0, 0] * e + b[:, 0, 1] * g
    psi[1, 1:] = b[:, 1, 0] * e + b[:, 1, 1] * g
    psi[1, 0] *= g0_phase
    psi[0, -1] *= edge_phase
    psi *= spectator[None, None, :, None]


def apply_diagonal(psi, diag):
    """Multiply a (dim, batch) array by a diagonal operator in place."""
    psi *= diag[:, None]
