"""Truncated deformed Fock spaces over one or two modes.

Basis vectors are words over the mode alphabet, enumerated level by level and
lexicographically within a level.  The deformed inner product is defined by
the weighted-deletion recursion

    <g1 (x) u, v> = sum_k q^{k-1} <g1, v_k> <u, v with position k removed>,

words of different lengths being orthogonal.  Creation prepends a letter
(words leaving the level cutoff map to zero); annihilation deletes matching
letters with weights q^{k-1}.  All operator identities hold exactly on the
sub-block of levels unaffected by the cutoff, and the checks here restrict to
that block.

Construction is single-threaded; every array is read-only afterwards.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FockWord",
    "FockSpace",
    "OperatorRep",
    "gram_matrix",
    "creation_op",
    "annihilation_op",
    "commutation_check",
    "pn_eval",
    "pn_operator_check",
    "kernel_basis",
    "v_isometry_check",
    "completeness_check",
    "dump_matrices_csv",
]

FockWord = tuple  # word over modes {0..d-1}; the empty word is the vacuum


def _q_bracket_any(n: int, q: float) -> float:
    # valid on 0 <= q < 1 (the recursion is polynomial in q; q = 0 is the
    # free case and is allowed here, unlike in the analytic machinery)
    return (1.0 - q ** n) / (1.0 - q)


def q_factorial_any(n: int, q: float) -> float:
    out = 1.0
    for j in range(1, n + 1):
        out *= (1.0 - q ** j) / (1.0 - q)
    return out


class FockSpace:
    """Word basis, per-level Gram matrices, and the block Gram form.

    Parameters
    ----------
    d : number of modes (1 or 2).
    N : level cutoff; dimension is sum_{n<=N} d^n.
    q : deformation parameter in [0, 1).  q = 0 gives the free case.
    """

    def __init__(self, d: int, N: int, q: float):
        if d not in (1, 2):
            raise ValueError("d must be 1 or 2")
        if N < 1:
            raise ValueError("N must be >= 1")
        if not (0.0 <= q < 1.0):
            raise ValueError("q must lie in [0, 1)")
        self.d, self.N, self.q = d, int(N), float(q)
        self.levels: list[list[tuple]] = [[()]]
        for n in range(1, N + 1):
            self.levels.append([(m,) + w for m in range(d) for w in self.levels[n - 1]])
        self.words = [w for lv in self.levels for w in lv]
        self.index = {w: i for i, w in enumerate(self.words)}
        sizes = [len(lv) for lv in self.levels]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.dim = int(self.offsets[-1])
        self.grams = self._build_grams()
        self.G = np.zeros((self.dim, self.dim))
        for n in range(N + 1):
            sl = self.level_slice(n)
            self.G[sl, sl] = self.grams[n]
        self._chol = [np.linalg.cholesky(self.grams[n]) for n in range(N + 1)]

    def _build_grams(self) -> list[np.ndarray]:
        d, N, q = self.d, self.N, self.q
        grams = [np.array([[1.0]])]
        for n in range(1, N + 1):
            prev = grams[-1]
            idx_prev = {w: i for i, w in enumerate(self.levels[n - 1])}
            cur = self.levels[n]
            nw = len(cur)
            first = np.array([b[0] for b in cur])
            rest = np.array([idx_prev[b[1:]] for b in cur])
            # deletion bookkeeping for tail positions m = 1..n-1 of each word
            POS = np.zeros((nw, n - 1), dtype=int)
            LET = np.zeros((nw, n - 1), dtype=int)
            for bi, b in enumerate(cur):
                j, v = b[0], b[1:]
                for mm in range(n - 1):
                    LET[bi, mm] = v[mm]
                    POS[bi, mm] = idx_prev[(j,) + v[:mm] + v[mm + 1:]]
            Gn = np.zeros((nw, nw))
            for letter in range(d):
                rows = np.where(first == letter)[0]
                cols_same = first == letter
                Gn[np.ix_(rows, np.where(cols_same)[0])] += prev[np.ix_(rest[rows], rest[cols_same])]
                for mm in range(n - 1):
                    mask = LET[:, mm] == letter
                    if mask.any():
                        Gn[np.ix_(rows, np.where(mask)[0])] += q ** (mm + 1) * prev[
                            np.ix_(rest[rows], POS[mask, mm])
                        ]
            grams.append(0.5 * (Gn + Gn.T))
        return grams

    def level_slice(self, n: int) -> slice:
        return slice(int(self.offsets[n]), int(self.offsets[n + 1]))

    def level_of(self, i: int) -> int:
        return int(np.searchsorted(self.offsets, i, side="right") - 1)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim)
        v[0] = 1.0
        return v

    def creation_matrix(self, mode: int) -> np.ndarray:
        A = np.zeros((self.dim, self.dim))
        for w, i in self.index.items():
            if len(w) < self.N:
                A[self.index[(mode,) + w], i] = 1.0
        return A

    def annihilation_matrix(self, mode: int) -> np.ndarray:
        A = np.zeros((self.dim, self.dim))
        for w, i in self.index.items():
            for k, letter in enumerate(w):
                if letter == mode:
                    A[self.index[w[:k] + w[k + 1:]], i] += self.q ** k
        return A

    def position_matrix(self, mode: int) -> np.ndarray:
        return self.creation_matrix(mode) + self.annihilation_matrix(mode)

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ self.G @ v)

    def norm(self, u: np.ndarray) -> float:
        return math.sqrt(max(self.inner(u, u), 0.0))

    def gram_adjoint(self, A: np.ndarray) -> np.ndarray:
        """Adjoint with respect to the Gram form, G^{-1} A^T G, solved per
        level block with the stored Cholesky factors."""
        M = A.T @ self.G
        out = np.empty_like(M)
        for n in range(self.N + 1):
            sl = self.level_slice(n)
            c = self._chol[n]
            out[sl, :] = np.linalg.solve(c.T, np.linalg.solve(c, M[sl, :]))
        return out

    def gram_opnorm(self, A: np.ndarray, max_level: int | None = None) -> float:
        """Operator norm of A in the Gram geometry, optionally restricted to
        vectors supported on levels <= max_level."""
        Lfull = np.zeros((self.dim, self.dim))
        for n in range(self.N + 1):
            sl = self.level_slice(n)
            Lfull[sl, sl] = self._chol[n]
        # orthonormal-coordinate representative: L^T A L^{-T}
        B = np.linalg.solve(Lfull, (Lfull.T @ A).T).T
        if max_level is not None:
            B = B[:, : int(self.offsets[max_level + 1])]
        return float(np.linalg.norm(B, 2))


@dataclass(frozen=True)
class OperatorRep:
    """Operator in the word basis, tagged by its level action."""

    matrix: np.ndarray
    kind: str  # "raising" | "lowering" | "mixed"
    space: FockSpace

    def adjoint(self) -> "OperatorRep":
        flip = {"raising": "lowering", "lowering": "raising"}.get(self.kind, "mixed")
        return OperatorRep(self.space.gram_adjoint(self.matrix), flip, self.space)


def gram_matrix(space: FockSpace, level: int) -> np.ndarray:
    """Gram matrix of the level's word basis under the deformed inner product."""
    if not (0 <= level <= space.N):
        raise ValueError("level outside [0, N]")
    return space.grams[level]


def creation_op(space: FockSpace, mode: int) -> OperatorRep:
    return OperatorRep(space.creation_matrix(mode), "raising", space)


def annihilation_op(space: FockSpace, mode: int) -> OperatorRep:
    return OperatorRep(space.annihilation_matrix(mode), "lowering", space)


def commutation_check(space: FockSpace, i: int, j: int) -> float:
    """Max-norm of a_i a_j* - q a_j* a_i - delta_ij Id on levels <= N-1.

    The relation cannot hold at the cutoff level (creation truncates there),
    so that level is excluded.
    """
    a = space.annihilation_matrix(i)
    c = space.creation_matrix(j)
    M = a @ c - space.q * c @ a - (1.0 if i == j else 0.0) * np.eye(space.dim)
    sl = slice(0, int(space.offsets[space.N]))
    return float(np.max(np.abs(M[sl, sl])))


def pn_eval(n: int, x, q: float):
    """P_n(x) = prod_{j=1..n} (q^j x + [j]_q); P_n(0) = [n]_q!."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    for j in range(1, n + 1):
        out = out * (q ** j * x + _q_bracket_any(j, q))
    return out


def pn_operator_check(space: FockSpace, n: int) -> float:
    """Max-norm of a_0^n (a_0*)^n - P_n(a_0* a_0) on levels <= N - n."""
    if n > space.N:
        raise ValueError("n exceeds the level cutoff")
    a = space.annihilation_matrix(0)
    c = space.creation_matrix(0)
    lhs = np.linalg.matrix_power(a, n) @ np.linalg.matrix_power(c, n)
    num = c @ a
    rhs = np.eye(space.dim)
    for j in range(1, n + 1):
        rhs = rhs @ (space.q ** j * num + _q_bracket_any(j, space.q) * np.eye(space.dim))
    sl = slice(0, int(space.offsets[space.N - n + 1]))
    return float(np.max(np.abs((lhs - rhs)[sl, sl])))


def kernel_basis(space: FockSpace, level: int, sv_tol: float = 1e-10) -> np.ndarray:
    """Gram-orthonormal basis of ker a_0 within one level, as full-space
    column vectors.

    The kernel is found from the singular value decomposition of the
    annihilation block (singular values below sv_tol treated as zero), then
    orthonormalized in the deformed inner product so that the powers of a_0*
    act on it as exact multiples of isometries.
    """
    if not (0 <= level <= space.N):
        raise ValueError("level outside [0, N]")
    if level == 0:
        out = np.zeros((space.dim, 1))
        out[0, 0] = 1.0
        return out
    A0 = space.annihilation_matrix(0)
    blk = A0[space.level_slice(level - 1), space.level_slice(level)]
    _, s, vt = np.linalg.svd(blk)
    null_rows = [vt[i] for i in range(vt.shape[0]) if i >= s.size or s[i] < sv_tol]
    K = np.array(null_rows).T
    if K.size == 0:
        return np.zeros((space.dim, 0))
    M = K.T @ space.grams[level] @ K
    c = np.linalg.cholesky(M)
    K = np.linalg.solve(c, K.T).T
    out = np.zeros((space.dim, K.shape[1]))
    out[space.level_slice(level), :] = K
    return out


def v_isometry_check(space: FockSpace, n: int, m: int, phi: np.ndarray, xi: np.ndarray) -> float:
    """<(a_0*)^n phi, (a_0*)^m xi> - delta_nm [n]_q! <phi, xi> for kernel
    vectors phi, xi; zero exactly below the cutoff."""
    c = space.creation_matrix(0)
    u = np.linalg.matrix_power(c, n) @ phi
    v = np.linalg.matrix_power(c, m) @ xi
    val = space.inner(u, v)
    if n == m:
        val -= q_factorial_any(n, space.q) * space.inner(phi, xi)
    return float(val)


def completeness_check(space: FockSpace, level: int, sv_tol: float = 1e-10) -> int:
    """Defect d^level - sum_n dim (a_0*)^n (kernel at level-n); zero when the
    shifted kernels span the level."""
    if space.d != 2:
        raise ValueError("defined for the two-mode space")
    if not (0 <= level <= space.N):
        raise ValueError("level outside [0, N]")
    c = space.creation_matrix(0)
    total = 0
    for n in range(level + 1):
        K = kernel_basis(space, level - n, sv_tol)
        if K.shape[1] == 0:
            continue
        img = np.linalg.matrix_power(c, n) @ K
        blk = img[space.level_slice(level), :]
        total += int(np.linalg.matrix_rank(blk, tol=sv_tol))
    return space.d ** level - total


def dump_matrices_csv(space: FockSpace, path: str) -> None:
    """Debug dump: per-level Gram matrices and the two position operators,
    row-major with word labels in the header."""
    labels = ["|" + "".join(map(str, w)) + ">" if w else "|vac>" for w in space.words]
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        for n in range(space.N + 1):
            lv = ["|" + "".join(map(str, w)) + ">" if w else "|vac>" for w in space.levels[n]]
            wr.writerow([f"gram_level_{n}"] + lv)
            for row_label, row in zip(lv, space.grams[n]):
                wr.writerow([row_label] + [repr(v) for v in row])
        for mode in range(space.d):
            wr.writerow([f"position_mode_{mode}"] + labels)
            for row_label, row in zip(labels, space.position_matrix(mode)):
                wr.writerow([row_label] + [repr(v) for v in row])
