"""Permutations, sign changes and the finite fiber of eigen-decompositions.

Permutations are 0-based tuples ``perm`` with ``perm[i]`` the image of ``i``.
"""

from __future__ import annotations

import itertools
from typing import List, Sequence, Tuple

import numpy as np

from .errors import InvalidInput, MultiplicityError
from .frames import Frame
from .matcore import as_spd, sym_eig

Perm = Tuple[int, ...]
Partition = Tuple[Tuple[int, ...], ...]

TOL_EQ = 1e-8


def _check_perm(perm: Sequence[int]) -> Perm:
    perm = tuple(int(i) for i in perm)
    if sorted(perm) != list(range(len(perm))):
        raise InvalidInput(f"{perm} is not a permutation")
    return perm


def perm_matrix(perm: Sequence[int]) -> np.ndarray:
    """Rotation ``P_pi``: column ``i`` holds the 1 in row ``perm[i]``.

    Odd permutations get their first row negated so the result is in SO(p).
    """
    perm = _check_perm(perm)
    p = len(perm)
    P = np.zeros((p, p))
    P[list(perm), list(range(p))] = 1.0
    if np.linalg.det(P) < 0:
        P[0, :] = -P[0, :]
    return P


def permute_diag(d, perm: Sequence[int]) -> np.ndarray:
    """Diagonal of ``P_pi diag(d) P_pi'``: entry ``d[i]`` moves to ``perm[i]``."""
    d = np.asarray(d, dtype=float)
    out = np.empty_like(d)
    out[list(perm)] = d
    return out


def sign_matrix(signs: Sequence[int]) -> np.ndarray:
    return np.diag(np.asarray(signs, dtype=float))


def even_signs(p: int) -> List[Tuple[int, ...]]:
    """All sign patterns with product +1, in a fixed order."""
    if p not in (2, 3):
        raise InvalidInput(f"p must be 2 or 3, got {p}")
    return [s for s in itertools.product((1, -1), repeat=p) if np.prod(s) == 1]


def permutations(p: int) -> List[Perm]:
    return list(itertools.permutations(range(p)))


def partition_of(d, tol_eq: float = TOL_EQ) -> Partition:
    """Blocks of indices whose values are equal within ``tol_eq`` (relative).

    ``i`` and ``j`` are linked when ``|d_i - d_j| <= tol_eq * max(1, max d)``;
    blocks are the transitive closure of that relation.
    """
    d = np.asarray(d, dtype=float).ravel()
    p = d.size
    thresh = tol_eq * max(1.0, float(np.max(np.abs(d))))
    parent = list(range(p))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(p):
        for j in range(i + 1, p):
            if abs(d[i] - d[j]) <= thresh:
                parent[find(j)] = find(i)
    blocks = {}
    for i in range(p):
        blocks.setdefault(find(i), []).append(i)
    return tuple(sorted(tuple(b) for b in blocks.values()))


def versions_of_frame(U, d) -> List[Frame]:
    """The ``p! 2^(p-1)`` frames ``(U I_s P_pi', D_pi)``; signs outer, perms inner."""
    p = len(d)
    out = []
    for s in even_signs(p):
        Us = U * np.asarray(s, dtype=float)
        for perm in permutations(p):
            out.append(Frame(Us @ perm_matrix(perm).T, permute_diag(d, perm)))
    return out


def enumerate_versions(X, tol_eq: float = TOL_EQ) -> List[Frame]:
    """All eigen-decompositions of an SPD matrix with distinct eigenvalues.

    Raises
    ------
    MultiplicityError
        If two eigenvalues coincide within ``tol_eq``; the fiber is then a
        continuum and cannot be listed.
    """
    X = as_spd(X, "X")
    U, d = sym_eig(X)
    part = partition_of(d, tol_eq)
    if len(part) != len(d):
        raise MultiplicityError(
            f"repeated eigenvalues {d}: infinitely many versions", partition=part
        )
    return versions_of_frame(U, d)
