"""Built-in numeric fixtures used across modules, tests and the CLI.

Everything here is a plain array (or tuple of arrays) so the module stays
dependency-free within the package.
"""

from __future__ import annotations

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def bell_state() -> np.ndarray:
    """The maximally entangled two-qubit unit vector (|00> + |11>)/sqrt(2)."""
    return np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)


def bell_density_matrix() -> np.ndarray:
    """Rank-one projector onto :func:`bell_state`."""
    v = bell_state()
    return np.outer(v, v.conj())


def bell_witness_gamble() -> np.ndarray:
    """Indefinite 4x4 Hermitian matrix whose quadratic form is nonpositive on
    every product state (it expands to a negative real sum of squares) while
    its trace against the Bell density matrix equals 1.

    Eigenvalues: {-3, -1, -1, 1}.
    """
    return np.array(
        [
            [0.0, 0.0, 0.0, 1.0],
            [0.0, -2.0, 1.0, 0.0],
            [0.0, 1.0, -2.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ],
        dtype=complex,
    )


def bell_signed_charge_table():
    """Nine product-state atoms and signed weights whose second moments
    reproduce the Bell density matrix to about 1e-3.

    Values are four-decimal prints, so the atoms are not exactly unit norm
    and the weights sum to 0.9998 rather than 1; consumers normalise.
    Returns ``(atoms, weights)`` with each atom a ``(x, y)`` pair of
    two-component complex vectors.
    """
    xs = [
        (-0.0963 - 0.6352j, -0.0065 - 0.7663j),
        (0.251 - 0.9665j, 0.0387 + 0.0381j),
        (0.7884 + 0.2274j, -0.1263 + 0.5574j),
        (0.5702 - 0.4006j, 0.0027 + 0.7172j),
        (0.3452 - 0.4539j, 0.4872 + 0.6613j),
        (0.818 + 0.2654j, -0.486 + 0.1556j),
        (-0.0541 - 0.8574j, 0.4995 + 0.1112j),
        (-0.3179 - 0.1021j, 0.5198 + 0.7864j),
        (-0.1255 - 0.3078j, 0.2943 - 0.8961j),
    ]
    ys = [
        (-0.3727 - 0.3899j, -0.4385 - 0.7189j),
        (0.6359 - 0.5716j, 0.3725 + 0.3608j),
        (0.1553 - 0.4591j, 0.4039 + 0.7759j),
        (-0.3515 + 0.2848j, 0.5911 - 0.6678j),
        (0.2129 - 0.2004j, 0.2032 - 0.9345j),
        (0.446 + 0.6996j, -0.5474 - 0.1096j),
        (-0.1628 + 0.561j, -0.8105 + 0.0419j),
        (0.6285 - 0.4852j, -0.0035 - 0.6079j),
        (0.0933 - 0.4588j, 0.8455 + 0.2568j),
    ]
    weights = np.array(
        [0.4805, 0.7459, -0.892, 0.7421, 0.4724, 0.3297, -0.7999, -0.2544, 0.1755]
    )
    atoms = [
        (np.array(x, dtype=complex), np.array(y, dtype=complex)) for x, y in zip(xs, ys)
    ]
    return atoms, weights
