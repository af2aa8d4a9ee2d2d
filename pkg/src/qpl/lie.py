"""Compact matrix Lie groups with orthonormal algebra bases.

Conventions
-----------
* The invariant inner product is ``<X, Y> = -s * Re tr(XY)`` with ``s = 1``
  for su(n) and the torus, ``s = 1/2`` for so(3).
* Components of a linear map ``A`` on the algebra follow ``A e_b = A_ab e_a``,
  so that ``(ad_xi)_ab = -f_abc xi_c``.
* Multivectors and forms are stored as totally antisymmetric arrays ``u`` with
  ``u = (1/k!) u_{a1..ak} e_a1 ^ ... ^ e_ak``; the Cartan 3-tensor
  ``(1/12) f_abc e_a ^ e_b ^ e_c`` is therefore stored as ``phi = f / 2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from qpl.errors import DomainError, SingularityError, UnsupportedModelError

RANK_RTOL = 1e-8
NATURAL_MARGIN = 1e-2
SERIES_RADIUS = 1e-3

TOL_BASIS = 1e-12
TOL_GROUP = 1e-10


# --------------------------------------------------------------------------
# scalar functions of ad


@dataclass(frozen=True)
class ScalarFunction:
    """An analytic function with an optional Taylor series near zero.

    ``series`` holds the coefficients c_0, c_1, ... used when ``|s| < SERIES_RADIUS``.
    ``is_pole`` flags points of the complex plane where the function blows up.
    """

    name: str
    closed: object
    series: tuple = ()
    is_pole: object = None

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.empty_like(s)
        small = np.abs(s) < SERIES_RADIUS
        if self.series and small.any():
            out[small] = np.polynomial.polynomial.polyval(s[small], self.series)
        big = ~small if self.series else np.ones_like(small)
        if big.any():
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                out[big] = self.closed(s[big])
        return out


def _near_nonzero_2pi_i(s, tol=1e-8):
    s = np.asarray(s, dtype=complex)
    k = np.round(s.imag / (2 * np.pi))
    return (k != 0) & (np.abs(s - 2j * np.pi * k) < tol)


NU = ScalarFunction(
    "nu",
    lambda s: s / (1.0 - np.exp(-s)),
    (1.0, 0.5, 1 / 12, 0.0, -1 / 720, 0.0, 1 / 30240, 0.0, -1 / 1209600),
    _near_nonzero_2pi_i,
)
NU_INV = ScalarFunction(
    "nu_inv",
    lambda s: (1.0 - np.exp(-s)) / s,
    (1.0, -1 / 2, 1 / 6, -1 / 24, 1 / 120, -1 / 720, 1 / 5040, -1 / 40320, 1 / 362880),
)
PHI = ScalarFunction(
    "phi",
    lambda s: 1.0 / s - 0.5 / np.tanh(s / 2.0),
    (0.0, -1 / 12, 0.0, 1 / 720, 0.0, -1 / 30240, 0.0, 1 / 1209600),
    _near_nonzero_2pi_i,
)
IDENTITY = ScalarFunction("identity", lambda s: s, (0.0, 1.0))
EXP = ScalarFunction("exp", np.exp)


# --------------------------------------------------------------------------
# group models


@dataclass(frozen=True, eq=False)
class GroupModel:
    """A compact matrix group with an orthonormal basis of its Lie algebra."""

    name: str
    n: int
    d: int
    basis: np.ndarray
    ip_scale: float
    f: np.ndarray
    phi: np.ndarray
    real: bool = False
    det_one: bool = True
    tolerances: dict = field(default_factory=lambda: {"basis": TOL_BASIS, "group": TOL_GROUP})

    # ---- algebra ----------------------------------------------------------

    def inner(self, X, Y):
        return -self.ip_scale * np.real(np.trace(X @ Y))

    def coords(self, X):
        """Coordinates xi_a = <e_a, X> of a matrix X in the algebra."""
        return -self.ip_scale * np.real(np.einsum("aij,ji->a", self.basis, X))

    def matrix(self, xi):
        return np.tensordot(np.asarray(xi, dtype=float), self.basis, axes=1)

    def ad(self, xi):
        return -np.einsum("abc,c->ab", self.f, np.asarray(xi, dtype=float))

    def Ad(self, g):
        gi = g.conj().T
        conj = np.einsum("ij,bjk,kl->bil", g, self.basis, gi)
        return -self.ip_scale * np.real(np.einsum("aij,bji->ab", self.basis, conj))

    def identity(self):
        return np.eye(self.n, dtype=float if self.real else complex)

    def inverse(self, g):
        return g.conj().T

    # ---- exp / log --------------------------------------------------------

    def exp(self, xi):
        """Group exponential via the eigendecomposition of the hermitian iX."""
        X = self.matrix(xi)
        w, V = np.linalg.eigh(1j * X)
        g = (V * np.exp(-1j * w)) @ V.conj().T
        g = self._project(g)
        return np.real(g) if self.real else g

    def log(self, g):
        """Principal logarithm; raises DomainError at eigenvalue -1 or off-algebra."""
        T, Z = scipy.linalg.schur(np.asarray(g, dtype=complex), output="complex")
        lam = np.diag(T)
        if np.any(np.abs(lam + 1.0) < 1e-9):
            raise DomainError("log: eigenvalue -1 is on the branch cut")
        X = (Z * (1j * np.angle(lam))) @ Z.conj().T
        xi = self.coords(X)
        if np.linalg.norm(self.matrix(xi) - X) > 1e-8 * max(1.0, np.linalg.norm(X)):
            raise DomainError("log: principal logarithm leaves the Lie algebra")
        return xi

    def _project(self, g):
        drift = np.linalg.norm(g.conj().T @ g - np.eye(self.n))
        if drift > 1e-13:
            W, _, Vh = np.linalg.svd(g)
            g = W @ Vh
        return g

    def in_natural_domain(self, xi, margin=NATURAL_MARGIN):
        """True when exp has maximal rank at xi (spectrum of ad_xi off 2*pi*i*Z\\{0})."""
        mu = np.linalg.eigvalsh(1j * self.ad(xi))
        return bool(np.all(np.abs(mu) < 2 * np.pi - margin))

    # ---- checks -----------------------------------------------------------

    def is_group_element(self, g, tol=TOL_GROUP):
        if np.linalg.norm(g.conj().T @ g - np.eye(self.n)) > tol:
            return False
        det = np.linalg.det(g)
        if self.det_one:
            return abs(det - 1.0) < tol
        return abs(abs(det) - 1.0) < tol

    def random_algebra(self, rng, scale=1.0):
        return scale * rng.standard_normal(self.d)

    def random_element(self, rng, scale=1.0, branch=0.9):
        """exp of a Gaussian algebra element, rescaled so log stays on its branch."""
        xi = self.random_algebra(rng, scale)
        top = np.max(np.abs(np.linalg.eigvalsh(1j * self.matrix(xi)))) if self.d else 0.0
        if top > branch * np.pi:
            xi = xi * (branch * np.pi / top)
        return self.exp(xi)

    # ---- serialization ----------------------------------------------------

    def to_json(self):
        doc = {
            "name": self.name,
            "n": self.n,
            "d": self.d,
            "ip_scale": self.ip_scale,
            "real": self.real,
            "det_one": self.det_one,
            "basis": [[[float(z.real), float(z.imag)] for z in e.ravel()] for e in self.basis],
            "f": self.f.ravel().tolist(),
            "tolerances": dict(self.tolerances),
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        n, d = doc["n"], doc["d"]
        basis = np.array(
            [[complex(re, im) for re, im in e] for e in doc["basis"]], dtype=complex
        ).reshape(d, n, n)
        if doc["real"]:
            basis = np.real(basis)
        f = np.array(doc["f"], dtype=float).reshape(d, d, d)
        return cls(
            name=doc["name"], n=n, d=d, basis=basis, ip_scale=doc["ip_scale"], f=f,
            phi=f / 2.0, real=doc["real"], det_one=doc["det_one"],
            tolerances=doc["tolerances"],
        )


def _structure_constants(basis, ip_scale):
    d = len(basis)
    f = np.zeros((d, d, d))
    for a in range(d):
        for b in range(d):
            comm = basis[a] @ basis[b] - basis[b] @ basis[a]
            f[a, b] = -ip_scale * np.real(np.einsum("cij,ji->c", basis, comm))
    return f


def _gell_mann():
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7] = np.diag([1, 1, -2]) / np.sqrt(3)
    return lam


def build_model(kind):
    """Build one of ``su2``, ``su3``, ``so3``, ``torus(k)`` / ``torusk``."""
    kind = str(kind).strip().lower()
    if kind == "su2":
        sigma = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)
        basis, scale, n, real, det_one = -1j * sigma / np.sqrt(2), 1.0, 2, False, True
    elif kind == "su3":
        basis, scale, n, real, det_one = -1j * _gell_mann() / np.sqrt(2), 1.0, 3, False, True
    elif kind == "so3":
        eps = np.zeros((3, 3, 3))
        for (i, j, k), s in {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
                             (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1}.items():
            eps[i, j, k] = s
        basis, scale, n, real, det_one = -eps, 0.5, 3, True, True
    elif kind.startswith("torus"):
        arg = kind[5:].strip("()") or "1"
        try:
            k = int(arg)
        except ValueError:
            raise UnsupportedModelError(f"unsupported group kind {kind!r}") from None
        if k < 1:
            raise UnsupportedModelError(f"torus rank must be positive, got {k}")
        basis = np.zeros((k, k, k), dtype=complex)
        for j in range(k):
            basis[j, j, j] = 1j
        scale, n, real, det_one = 1.0, k, False, False
        kind = f"torus({k})"
    else:
        raise UnsupportedModelError(f"unsupported group kind {kind!r}")
    f = _structure_constants(basis, scale)
    return GroupModel(
        name=kind, n=n, d=len(basis), basis=basis, ip_scale=scale, f=f, phi=f / 2.0,
        real=real, det_one=det_one,
    )


# --------------------------------------------------------------------------
# functional aliases


def adjoint_ad(model, xi):
    return model.ad(xi)


def adjoint_Ad(model, g):
    return model.Ad(g)


def exp_alg(model, xi):
    return model.exp(xi)


def log_group(model, g):
    return model.log(g)


def analytic_of_matrix(fn, A):
    """f(A) for a real antisymmetric matrix A via the spectrum of iA."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return np.zeros_like(A)
    w, V = np.linalg.eigh(1j * A)
    eigs = -1j * w
    if getattr(fn, "is_pole", None) is not None:
        bad = fn.is_pole(eigs)
        if np.any(bad):
            raise SingularityError(
                f"{getattr(fn, 'name', 'fn')} has a pole at eigenvalue {eigs[bad][0]:.6g}",
                eigenvalue=eigs[bad][0],
            )
    vals = np.asarray(fn(eigs), dtype=complex)
    if not np.all(np.isfinite(vals)):
        s = eigs[~np.isfinite(vals)][0]
        raise SingularityError(f"{getattr(fn, 'name', 'fn')} is singular at eigenvalue {s:.6g}",
                               eigenvalue=s)
    out = (V * vals) @ V.conj().T
    if np.max(np.abs(out.imag), initial=0.0) <= 1e-10 * max(1.0, np.max(np.abs(out))):
        return np.real(out)
    return out


def analytic_of_ad(model, fn, xi):
    return analytic_of_matrix(fn, model.ad(xi))


def frechet_of_matrix(fn, dfn, A, E):
    """Derivative of X -> f(X) at antisymmetric A in direction E (Daleckii-Krein)."""
    w, V = np.linalg.eigh(1j * np.asarray(A, dtype=float))
    lam = -1j * w
    fl = np.asarray(fn(lam), dtype=complex)
    dfl = np.asarray(dfn(lam), dtype=complex)
    diff = lam[:, None] - lam[None, :]
    close = np.abs(diff) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        mean = 0.5 * (dfl[:, None] + dfl[None, :])
        gamma = np.where(close, mean, (fl[:, None] - fl[None, :]) / diff)
    Et = V.conj().T @ E @ V
    out = V @ (Et * gamma) @ V.conj().T
    return np.real(out)


def centralizer_split(model, g, rtol=RANK_RTOL):
    """Basis of ker(Ad_g - I) and orthogonal projectors onto it and its complement."""
    M = model.Ad(g) - np.eye(model.d)
    _, s, Vh = np.linalg.svd(M)
    top = s[0] if s.size else 0.0
    if top == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > rtol * max(top, 1.0)))
    kernel = Vh[rank:].T.copy()
    proj_h = kernel @ kernel.T
    return kernel, proj_h, np.eye(model.d) - proj_h


def restricted_cayley(model, g, rtol=RANK_RTOL):
    """(Ad_g + 1)(Ad_g - 1)^{-1} on the complement of the centralizer, zero on it."""
    A = model.Ad(g)
    kernel, proj_h, proj_perp = centralizer_split(model, g, rtol)
    inv = np.linalg.pinv(proj_perp @ (A - np.eye(model.d)) @ proj_perp, rcond=1e-10)
    K = proj_perp @ (A + np.eye(model.d)) @ inv
    return 0.5 * (K - K.T)
