"""Slices at a group element and the slice r-matrix r(h)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qpl.errors import DomainError, SingularityError
from qpl.fields.space import DEFAULT_ENGINE
from qpl.lie import centralizer_split, restricted_cayley

# Ad_h - 1 on the complement must keep singular values above this margin.
SLICE_GAP = 1e-2


@dataclass(frozen=True, eq=False)
class Slice:
    """Neighbourhood U = g exp(B_radius) of g in its centralizer H.

    ``E`` and ``E_perp`` are orthonormal bases (columns) of the centralizer
    algebra and of its orthogonal complement.
    """

    model: object
    base: np.ndarray
    E: np.ndarray
    E_perp: np.ndarray
    radius: float

    @property
    def h(self):
        return self.E.shape[1]

    def point(self, eta):
        """g exp(eta) for eta given in the basis E."""
        return self.base @ self.model.exp(self.E @ np.asarray(eta, dtype=float))

    def coords(self, h):
        """Full coordinates of log(g^-1 h)."""
        return self.model.log(self.model.inverse(self.base) @ h)

    def contains(self, h, tol=1e-9):
        xi = self.coords(h)
        return (np.linalg.norm(self.E_perp.T @ xi) <= tol
                and np.linalg.norm(xi) <= self.radius + tol)

    def sample(self, rng, scale=1.0):
        eta = rng.standard_normal(self.h)
        if self.h:
            eta *= scale * self.radius * rng.uniform(0.0, 1.0) / max(np.linalg.norm(eta), 1e-300)
        return self.point(eta)

    def gap(self, h):
        """Smallest singular value of Ad_h - 1 on the complement."""
        if self.E_perp.shape[1] == 0:
            return np.inf
        A = self.E_perp.T @ (self.model.Ad(h) - np.eye(self.model.d)) @ self.E_perp
        return float(np.linalg.svd(A, compute_uv=False)[-1])


def _probe(model, base, E, rho, rng, n):
    """Minimum gap over points of the rho-ball (boundary and interior)."""
    Ep = centralizer_split(model, base)[2]
    U, s, _ = np.linalg.svd(Ep)
    Ep = U[:, : int(np.sum(s > 0.5))]
    if Ep.shape[1] == 0 or E.shape[1] == 0:
        return np.inf
    out = np.inf
    for k in range(n):
        eta = rng.standard_normal(E.shape[1])
        eta *= rho * (1.0 if k % 2 == 0 else rng.uniform()) / np.linalg.norm(eta)
        h = base @ model.exp(E @ eta)
        A = Ep.T @ (model.Ad(h) - np.eye(model.d)) @ Ep
        out = min(out, float(np.linalg.svd(A, compute_uv=False)[-1]))
    return out


def make_slice(model, g, radius=None, gap=SLICE_GAP, rho_max=1.0, samples=64, seed=0):
    """Slice at g. Without an explicit radius, bisect for the largest admissible one."""
    g = np.asarray(g)
    if not model.is_group_element(g):
        raise DomainError("slice base is not a group element")
    E, _, proj_perp = centralizer_split(model, g)
    U, s, _ = np.linalg.svd(proj_perp)
    E_perp = U[:, : int(np.sum(s > 0.5))]
    if E_perp.shape[1] and np.linalg.svd(
            E_perp.T @ (model.Ad(g) - np.eye(model.d)) @ E_perp, compute_uv=False)[-1] <= gap:
        raise SingularityError("Ad_g - 1 is nearly singular on the complement of the centralizer")
    if radius is None:
        lo, hi = 0.0, rho_max
        if _probe(model, g, E, hi, np.random.default_rng(seed), samples) > gap:
            lo = hi
        for _ in range(40):
            if hi - lo < 1e-3 * rho_max:
                break
            mid = 0.5 * (lo + hi)
            if _probe(model, g, E, mid, np.random.default_rng(seed), samples) > gap:
                lo = mid
            else:
                hi = mid
        radius = 0.9 * lo
    return Slice(model, g, E, E_perp, float(radius))


def slice_r(sl, h):
    """r(h) = -1/2 (Ad_h + 1)(Ad_h - 1)^-1 on the complement, as a d x d array."""
    d = sl.model.d
    Ep = sl.E_perp
    if Ep.shape[1] == 0:
        return np.zeros((d, d))
    A = Ep.T @ sl.model.Ad(h) @ Ep
    M = A - np.eye(len(A))
    smin = np.linalg.svd(M, compute_uv=False)[-1]
    if smin <= 1e-10:
        raise SingularityError("Ad_h - 1 degenerates on the complement of the centralizer",
                               eigenvalue=1.0)
    K = (A + np.eye(len(A))) @ np.linalg.inv(M)
    r = -0.5 * Ep @ K @ Ep.T
    return 0.5 * (r - r.T)


def structure_h(sl):
    """Structure constants of the centralizer, as a tensor of the full algebra."""
    P = sl.E @ sl.E.T
    return np.einsum("abc,ai,bj,ck->ijk", sl.model.f, P, P, P)


def dr_fd(sl, h, engine=DEFAULT_ENGINE):
    """Derivatives of r along the left-invariant fields h exp(t e), e over E; shape (h, d, d)."""
    model = sl.model
    return np.stack([
        engine.diff(lambda s, e=e: slice_r(sl, h @ model.exp(s * e))) for e in sl.E.T
    ])


def ev2_residual(sl, h, engine=DEFAULT_ENGINE):
    """Cycl_abc(1/2 (e_a^L + e_a^R)_h r_bc + r_ak f_kbl r_lc) - 1/4 (f_abc - f^h_abc)."""
    model = sl.model
    r = slice_r(sl, h)
    A = model.Ad(h)
    # left-frame components of e_a^L + e_a^R, projected to the centralizer: columns a
    V = sl.E.T @ (np.eye(model.d) + A.T)
    dr = dr_fd(sl, h, engine)
    deriv = 0.5 * np.einsum("ka,kbc->abc", V, dr)
    X = deriv + np.einsum("ak,kbl,lc->abc", r, model.f, r)
    cyc = X + np.transpose(X, (1, 2, 0)) + np.transpose(X, (2, 0, 1))
    return cyc - 0.25 * (model.f - structure_h(sl))


def class_consistency_residual(sl, h):
    """|-Phi^* r - class bivector| at h: r against the restricted Cayley transform."""
    Ep = sl.E_perp
    K = restricted_cayley(sl.model, h)
    proj = Ep @ Ep.T
    return float(np.max(np.abs(-slice_r(sl, h) - 0.5 * proj @ K @ proj)))


def base_from_angles(model, angles):
    """Group element from eigen-angles: diagonal for su(n) and tori, a z-rotation for so3."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    n = model.n
    if model.name == "so3":
        if len(angles) != 1:
            raise ValueError("so3 takes one rotation angle")
        c, s = np.cos(angles[0]), np.sin(angles[0])
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    if model.name.startswith("su"):
        if len(angles) == n - 1:
            angles = np.append(angles, -np.sum(angles))
        if len(angles) != n or abs(np.sum(angles)) > 1e-12:
            raise ValueError(f"su({n}) takes {n - 1} angles (or {n} summing to zero)")
    elif len(angles) != n:
        raise ValueError(f"{model.name} takes {n} angles")
    return np.diag(np.exp(1j * angles))
