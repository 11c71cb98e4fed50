"""Periodic action W_pq and its derivatives."""
import numpy as np

from .configspace import Configuration
from .model import GeneratingModel

DEGENERACY_TOL = 1e-9


def _neighbours(p, x):
    prev = np.roll(x, 1)
    prev[0] -= p
    nxt = np.roll(x, -1)
    nxt[-1] += p
    return prev, nxt


def action_eval(m: GeneratingModel, c: Configuration) -> float:
    """W = sum_{k<q} h(x_k, x_{k+1}) with x_q = x_0 + p."""
    x = c.coords
    _, nxt = _neighbours(c.p, x)
    return float(np.sum(0.5 * (x - nxt) ** 2) + np.sum(m.U(x)))


def grad_array(m: GeneratingModel, p: int, x: np.ndarray) -> np.ndarray:
    prev, nxt = _neighbours(p, x)
    return 2.0 * x - prev - nxt + m.U(x, 1)


def hess_array(m: GeneratingModel, x: np.ndarray) -> np.ndarray:
    q = x.size
    H = np.diag(2.0 + m.U(x, 2))
    # accumulate, so q=2 gets -2 off the diagonal and q=1 folds onto it
    for i in range(q):
        k = (i + 1) % q
        H[i, k] -= 1.0
        H[k, i] -= 1.0
    return H


def gradient(m: GeneratingModel, c: Configuration) -> np.ndarray:
    """Component i is h2(x_{i-1}, x_i) + h1(x_i, x_{i+1})."""
    return grad_array(m, c.p, np.array(c.coords))


def hessian(m: GeneratingModel, c: Configuration) -> np.ndarray:
    """Cyclic tridiagonal Hessian: diagonal 2 + U''(x_i), couplings -1."""
    return hess_array(m, np.array(c.coords))


def eigen_sym(M, sym_tol=1e-10):
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if np.max(np.abs(M - M.T), initial=0.0) > sym_tol:
        raise ValueError("matrix is not symmetric")
    return np.linalg.eigh(0.5 * (M + M.T))


def morse_index(m: GeneratingModel, c: Configuration, degeneracy_tol=DEGENERACY_TOL):
    """(number of negative Hessian eigenvalues, whether any is ~0)."""
    w, _ = eigen_sym(hessian(m, c))
    return int(np.sum(w < -degeneracy_tol)), bool(np.any(np.abs(w) <= degeneracy_tol))
