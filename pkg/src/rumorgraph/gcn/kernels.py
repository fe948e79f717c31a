"""Shape-checked dense kernels used by the GCN.

Products go through numpy/scipy; these wrappers pin the shape contract and
the error message so a misaligned operand fails loudly.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp


class ShapeError(ValueError):
    pass


def _shape(a) -> tuple[int, ...]:
    return tuple(a.shape)


def matmul(a, b) -> np.ndarray:
    """``a @ b`` for 2-D operands; ``a`` may be a scipy sparse matrix."""
    sa, sb = _shape(a), _shape(b)
    if len(sa) != 2 or len(sb) != 2 or sa[1] != sb[0]:
        raise ShapeError(f"matmul: cannot multiply {sa[0]}x{sa[1] if len(sa) > 1 else '?'} by "
                         f"{sb[0]}x{sb[1] if len(sb) > 1 else '?'}")
    out = a @ b
    if sp.issparse(out):
        out = out.toarray()
    return np.asarray(out)


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if _shape(a) != _shape(b):
        raise ShapeError(f"hadamard: shapes {_shape(a)} and {_shape(b)} differ")
    return a * b


def transpose(a: np.ndarray) -> np.ndarray:
    if a.ndim != 2:
        raise ShapeError(f"transpose: expected a 2-D array, got {a.ndim}-D")
    return np.ascontiguousarray(a.T)


def sigmoid(z: np.ndarray) -> np.ndarray:
    # Split by sign so exp never overflows.
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)
