"""Gate kernels acting on batched state tensors.

A state tensor has shape ``(batch, 2, ..., 2)``; kernels receive tensor axes (never 0)
and return a new tensor.
"""
from typing import Final, Tuple

import numpy as np

SQRT1_2: Final[float] = 1.0 / np.sqrt(2.0)
HADAMARD: Final[np.ndarray] = np.array([[SQRT1_2, SQRT1_2], [SQRT1_2, -SQRT1_2]], dtype=complex)


def rz_phase(k: int) -> complex:
    """Phase of the |1> component of RZ(k*pi/4) = diag(1, e^{i k pi/4})."""
    return complex(np.exp(1j * np.pi * (k % 8) / 4))


def _index(ndim: int, fixed: Tuple[Tuple[int, int], ...]) -> tuple:
    index = [slice(None)] * ndim
    for axis, value in fixed:
        index[axis] = value
    return tuple(index)


def apply_matrix(psi: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    moved = np.tensordot(matrix, psi, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


def apply_h(psi: np.ndarray, axis: int) -> np.ndarray:
    return apply_matrix(psi, HADAMARD, axis)


def apply_x(psi: np.ndarray, axis: int) -> np.ndarray:
    return np.flip(psi, axis=axis).copy()


def apply_phase(psi: np.ndarray, axis: int, phase: complex) -> np.ndarray:
    out = psi.copy()
    out[_index(psi.ndim, ((axis, 1),))] *= phase
    return out


def apply_z(psi: np.ndarray, axis: int) -> np.ndarray:
    return apply_phase(psi, axis, -1.0)


def apply_rz(psi: np.ndarray, axis: int, k: int) -> np.ndarray:
    if k % 8 == 0:
        return psi
    return apply_phase(psi, axis, rz_phase(k))


def apply_cz(psi: np.ndarray, a: int, b: int) -> np.ndarray:
    out = psi.copy()
    out[_index(psi.ndim, ((a, 1), (b, 1)))] *= -1.0
    return out


def apply_controlled_x(psi: np.ndarray, controls: Tuple[int, ...], target: int) -> np.ndarray:
    """Flips `target` on the slice where every control axis is 1 (CX, CCX)."""
    out = psi.copy()
    index = _index(psi.ndim, tuple((c, 1) for c in controls))
    shifted_target = target - sum(1 for c in controls if c < target)
    out[index] = np.flip(psi[index], axis=shifted_target)
    return out


def apply_swap(psi: np.ndarray, a: int, b: int) -> np.ndarray:
    return np.swapaxes(psi, a, b)


def branch_slices(psi: np.ndarray, axis: int) -> Tuple[np.ndarray, np.ndarray]:
    """Sub-tensors with the measured axis removed, for outcomes 0 and 1."""
    return psi[_index(psi.ndim, ((axis, 0),))], psi[_index(psi.ndim, ((axis, 1),))]


def row_norms(psi: np.ndarray) -> np.ndarray:
    """Squared norm of every batch row."""
    return np.sum(np.abs(psi.reshape(psi.shape[0], -1)) ** 2, axis=1)


def apply_unitary(psi: np.ndarray, gate: str, axes: Tuple[int, ...], k: int = 0) -> np.ndarray:
    """Dispatches a non-measurement gate name to its kernel."""
    if gate == "h":
        return apply_h(psi, axes[0])
    if gate == "x":
        return apply_x(psi, axes[0])
    if gate == "z":
        return apply_z(psi, axes[0])
    if gate == "rz":
        return apply_rz(psi, axes[0], k)
    if gate == "cz":
        return apply_cz(psi, axes[0], axes[1])
    if gate == "cx":
        return apply_controlled_x(psi, (axes[0],), axes[1])
    if gate == "ccx":
        return apply_controlled_x(psi, (axes[0], axes[1]), axes[2])
    if gate == "swap":
        return apply_swap(psi, axes[0], axes[1])
    raise ValueError(f"No unitary kernel for {gate!r}")
