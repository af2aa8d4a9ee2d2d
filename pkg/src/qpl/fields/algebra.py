"""Array-level exterior algebra in the 1/k! convention.

A degree-k object is a totally antisymmetric array ``u`` of shape ``(D,)*k``
standing for ``(1/k!) u_{A1..Ak} X_A1 ^ ... ^ X_Ak``. In this convention the
array entries are the values of the object on basis (co)vectors, wedge
products pick up binomial factors, and contraction on one slot is a plain
tensordot.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb, factorial

import numpy as np
import scipy.sparse as sp


def _perm_sign(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _signed_perms(k):
    return tuple((p, _perm_sign(p)) for p in itertools.permutations(range(k)))


def alt(T, axes_offset=0):
    """Antisymmetrize over all axes after ``axes_offset`` (average with signs)."""
    T = np.asarray(T)
    k = T.ndim - axes_offset
    if k <= 1:
        return T
    lead = tuple(range(axes_offset))
    out = np.zeros_like(T)
    for p, s in _signed_perms(k):
        out = out + s * np.transpose(T, lead + tuple(axes_offset + i for i in p))
    return out / factorial(k)


def wedge(a, b):
    a, b = np.asarray(a), np.asarray(b)
    k, l = a.ndim, b.ndim
    if k == 0 or l == 0:
        return a * b
    return comb(k + l, k) * alt(np.multiply.outer(a, b))


def contract_last(a, v):
    """Insert the covector (or vector) ``v`` into the last slot of ``a``."""
    return np.tensordot(a, v, axes=([-1], [0]))


def push(a, J):
    """Apply the linear map ``J`` (shape (D', D)) to every index of ``a``."""
    out = np.asarray(a)
    for _ in range(out.ndim):
        out = np.tensordot(out, J, axes=([0], [1]))
    return out


def pair(u, covectors):
    """u(alpha_1, ..., alpha_k) for a degree-k array ``u``."""
    out = np.asarray(u)
    for alpha in covectors:
        out = np.tensordot(alpha, out, axes=([0], [0]))
    return float(out)


def antisymmetry_defect(a):
    a = np.asarray(a)
    if a.ndim < 2:
        return 0.0
    return float(np.max(np.abs(a - alt(a)), initial=0.0))


def norm(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a), initial=0.0))


# --------------------------------------------------------------------------
# compressed (increasing index set) representation


@lru_cache(maxsize=None)
def combos(D, k):
    return tuple(itertools.combinations(range(D), k))


@lru_cache(maxsize=None)
def combo_index(D, k):
    return {c: i for i, c in enumerate(combos(D, k))}


def compress(a):
    a = np.asarray(a)
    k = a.ndim
    if k == 0:
        return a.reshape(1)
    D = a.shape[0]
    idx = np.array(combos(D, k), dtype=int).T
    return a[tuple(idx)] if idx.size else np.zeros(0)


def expand(c, D, k):
    """Inverse of :func:`compress`."""
    c = np.asarray(c)
    if k == 0:
        return c.reshape(())
    out = np.zeros((D,) * k, dtype=c.dtype)
    cs = np.array(combos(D, k), dtype=int)
    if cs.size == 0:
        return out
    for p, s in _signed_perms(k):
        out[tuple(cs[:, p].T)] = s * c
    return out


def _sorted_sign(seq):
    """Sign that sorts ``seq`` and the sorted tuple, or (0, None) on repeats."""
    if len(set(seq)) < len(seq):
        return 0, None
    order = sorted(range(len(seq)), key=lambda i: seq[i])
    return _perm_sign(order), tuple(seq[i] for i in order)


@lru_cache(maxsize=None)
def d_tables(D, p, structure_key):
    """Sparse tables for the frame exterior derivative of compressed p-forms.

    Returns ``(Dtab, Ctab)`` so that for a p-form with compressed coefficients
    ``F`` and frame derivatives ``dF`` (shape (D, n_p))::

        (dF)_compressed = Dtab @ dF.ravel() + Ctab @ F
    """
    c = _STRUCTURES[structure_key]
    src = combo_index(D, p)
    tgt = combos(D, p + 1)
    n_src = len(src)
    rows, cols, vals = [], [], []
    crow, ccol, cval = [], [], []
    for J_i, J in enumerate(tgt):
        for i, ji in enumerate(J):
            rest = J[:i] + J[i + 1:]
            rows.append(J_i)
            cols.append(ji * n_src + src[rest])
            vals.append((-1) ** i)
        for i in range(len(J)):
            for l in range(i + 1, len(J)):
                rest = tuple(x for t, x in enumerate(J) if t not in (i, l))
                for C in np.nonzero(c[J[i], J[l]])[0]:
                    s, key = _sorted_sign((int(C),) + rest)
                    if s == 0:
                        continue
                    crow.append(J_i)
                    ccol.append(src[key])
                    cval.append(((-1) ** (i + l)) * s * c[J[i], J[l], C])
    Dtab = sp.csr_matrix((vals, (rows, cols)), shape=(len(tgt), D * n_src))
    Ctab = sp.csr_matrix((cval, (crow, ccol)), shape=(len(tgt), n_src))
    return Dtab, Ctab


_STRUCTURES = {}


def register_structure(c):
    """Register frame structure constants and return a hashable key for tables."""
    key = (c.shape[0], hash(np.round(c, 14).tobytes()))
    _STRUCTURES.setdefault(key, np.array(c))
    return key


@lru_cache(maxsize=None)
def star_signs(D, k):
    """Signs s_I with mu(X_I, .) = s_I theta^{I^c} for mu = theta^1 ^ ... ^ theta^D."""
    out = []
    for I in combos(D, k):
        rest = tuple(x for x in range(D) if x not in I)
        out.append(_perm_sign(list(I) + list(rest)))
    return np.array(out, dtype=float)


@lru_cache(maxsize=None)
def complement_order(D, k):
    """Position in combos(D, D-k) of the complement of each combo in combos(D, k)."""
    index = combo_index(D, D - k)
    return np.array(
        [index[tuple(x for x in range(D) if x not in I)] for I in combos(D, k)], dtype=int
    )
