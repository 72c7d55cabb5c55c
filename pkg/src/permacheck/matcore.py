"""Dense square-matrix primitives.

Kernel matrices, resolvent families, eigenvalue screens and M-matrix
predicates: the algebraic substrate for every verdict in the package.
All dimensions are desk scale (<= ~12), stored dense row-major.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults
from .errors import InputFormatError, SingularMatrixError
from .verdict import Verdict

__all__ = [
    "KernelMatrix",
    "Signature",
    "ResolventFamily",
    "MMatrixReport",
    "kernel",
    "identity",
    "invert",
    "resolvent",
    "resolvent_family",
    "real_eigen_nonneg",
    "is_m_matrix",
    "load_matrix",
    "loads_matrix",
    "save_matrix",
    "dumps_matrix",
]


def _as_square_array(entries) -> np.ndarray:
    a = np.array(entries, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InputFormatError(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputFormatError("matrix entries must be finite")
    return a


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Square real matrix with a declared symmetry flag.

    Plays the role of a covariance or permanental kernel.  Entries are
    immutable after construction.
    """

    entries: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        a = _as_square_array(self.entries)
        if self.symmetric:
            scale = max(1.0, float(np.max(np.abs(a))))
            skew = float(np.max(np.abs(a - a.T)))
            if skew > defaults.TOL_ALGEBRAIC * scale:
                raise InputFormatError(
                    f"symmetry flag set but max |G - G^T| = {skew:g}")
            a = 0.5 * (a + a.T)
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "symmetric": self.symmetric,
            "entries": [[float(v) for v in row] for row in self.entries],
        }


def kernel(entries, symmetric: bool | None = None) -> KernelMatrix:
    """Build a KernelMatrix, inferring the symmetry flag when not declared."""
    a = _as_square_array(entries)
    if symmetric is None:
        scale = max(1.0, float(np.max(np.abs(a))))
        symmetric = float(np.max(np.abs(a - a.T))) <= defaults.TOL_ALGEBRAIC * scale
    return KernelMatrix(a, symmetric)


def identity(n: int) -> KernelMatrix:
    return KernelMatrix(np.eye(n), symmetric=True)


@dataclass(frozen=True, eq=False)
class Signature:
    """Vector of +-1 signs; the sigma of sigma*G*sigma conjugations."""

    signs: np.ndarray

    def __post_init__(self):
        s = np.array(self.signs, dtype=float)
        if s.ndim != 1 or s.size == 0 or not np.all(np.abs(s) == 1.0):
            raise InputFormatError("signature entries must be exactly -1 or +1")
        s.flags.writeable = False
        object.__setattr__(self, "signs", s)

    @property
    def dim(self) -> int:
        return self.signs.size

    def conjugate(self, a: np.ndarray) -> np.ndarray:
        """sigma * A * sigma as an array."""
        return a * np.outer(self.signs, self.signs)

    def to_list(self) -> list:
        return [int(v) for v in self.signs]


def _cond_estimate(a: np.ndarray) -> float:
    try:
        return float(np.linalg.cond(a))
    except np.linalg.LinAlgError:
        return math.inf


def invert(G: KernelMatrix) -> KernelMatrix:
    """Inverse of G.

    Raises SingularMatrixError when the condition estimate exceeds the
    configured cap or the residual ||G H - I||_inf misses tolerance.
    """
    a = G.entries
    cond = _cond_estimate(a)
    if not math.isfinite(cond) or cond > defaults.COND_CAP:
        raise SingularMatrixError(
            f"matrix is singular or ill-conditioned (cond ~ {cond:.3e})", cond)
    h = np.linalg.inv(a)
    resid = float(np.max(np.abs(a @ h - np.eye(G.dim))))
    if resid > defaults.TOL_ROUNDTRIP:
        raise SingularMatrixError(
            f"inverse residual {resid:.3e} exceeds tolerance (cond ~ {cond:.3e})", cond)
    if G.symmetric:
        h = 0.5 * (h + h.T)
    return KernelMatrix(h, symmetric=G.symmetric)


def resolvent(G: KernelMatrix, alpha: float) -> KernelMatrix:
    """The alpha-resolvent (I + alpha*G)^(-1) G; equals G at alpha = 0."""
    if alpha < 0:
        raise InputFormatError("resolvent requires alpha >= 0")
    if alpha == 0:
        return KernelMatrix(G.entries.copy(), symmetric=G.symmetric)
    a = G.entries
    lhs = np.eye(G.dim) + alpha * a
    cond = _cond_estimate(lhs)
    if not math.isfinite(cond) or cond > defaults.COND_CAP:
        raise SingularMatrixError(
            f"I + {alpha}*G is singular or ill-conditioned (cond ~ {cond:.3e})", cond)
    r = np.linalg.solve(lhs, a)
    if G.symmetric:
        r = 0.5 * (r + r.T)
    return KernelMatrix(r, symmetric=G.symmetric)


@dataclass(frozen=True, eq=False)
class ResolventFamily:
    """Resolvents of one base kernel along an increasing alpha grid.

    Construction validates the shift identity
    member(alpha+eps) = (I + eps*member(alpha))^(-1) member(alpha)
    on consecutive grid points.
    """

    base: KernelMatrix
    alphas: tuple
    members: tuple

    def member(self, alpha: float) -> KernelMatrix:
        for a, m in zip(self.alphas, self.members):
            if a == alpha:
                return m
        raise KeyError(f"alpha {alpha} not on the family grid")


def resolvent_family(G: KernelMatrix, alphas) -> ResolventFamily:
    alphas = tuple(float(a) for a in alphas)
    if len(alphas) == 0 or any(a < 0 for a in alphas):
        raise InputFormatError("alpha grid must be nonempty and nonnegative")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise InputFormatError("alpha grid must be strictly increasing")
    members = [resolvent(G, a) for a in alphas]
    if alphas[0] == 0.0:
        # member at alpha = 0 is the base itself
        members[0] = KernelMatrix(G.entries.copy(), symmetric=G.symmetric)
    for (a0, m0), (a1, m1) in zip(zip(alphas, members), zip(alphas[1:], members[1:])):
        eps = a1 - a0
        shifted = resolvent(m0, eps)
        err = float(np.max(np.abs(shifted.entries - m1.entries)))
        scale = max(1.0, float(np.max(np.abs(m1.entries))))
        if err > 1e-9 * scale:
            raise SingularMatrixError(
                f"resolvent shift identity violated at alpha {a0}->{a1}: {err:.3e}")
    return ResolventFamily(G, alphas, tuple(members))


def real_eigen_nonneg(G: KernelMatrix) -> Verdict:
    """Checks that every (numerically) real eigenvalue of G is nonnegative."""
    a = G.entries
    try:
        eig = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        return Verdict.unknown(f"eigenvalue solver did not converge: {exc}")
    scale = max(1.0, float(np.linalg.norm(a, np.inf)))
    imag_cut = defaults.EIGEN_IMAG_REL * scale
    tol = defaults.TOL_ALGEBRAIC * scale
    for lam in eig:
        if abs(lam.imag) <= imag_cut and lam.real < -tol:
            return Verdict.fail(
                {"eigenvalue": {"re": float(lam.real), "im": float(lam.imag)}},
                "a real eigenvalue is negative")
    return Verdict.ok()


@dataclass(frozen=True)
class MMatrixReport:
    """Two sub-verdicts: (a) off-diagonals nonpositive; (b) additionally
    all row sums nonnegative (the diagonally dominant variant)."""

    off_diagonal: Verdict
    diagonally_dominant: Verdict

    def to_dict(self) -> dict:
        return {
            "off_diagonal": self.off_diagonal.to_dict(),
            "diagonally_dominant": self.diagonally_dominant.to_dict(),
        }


def is_m_matrix(M) -> MMatrixReport:
    """Sign tests behind the Bapat criterion and the Green recognizer."""
    a = _as_square_array(M.entries if isinstance(M, KernelMatrix) else M)
    n = a.shape[0]
    tol = defaults.TOL_ALGEBRAIC * max(1.0, float(np.max(np.abs(a))))
    off = Verdict.ok()
    for i in range(n):
        for j in range(n):
            if i != j and a[i, j] > tol:
                off = Verdict.fail(
                    {"entry": [i, j], "value": float(a[i, j])},
                    "positive off-diagonal entry")
                break
        if off.fails:
            break
    if off.fails:
        dom = Verdict.fail(off.witness, "off-diagonal sign test already fails")
    else:
        dom = Verdict.ok()
        sums = a.sum(axis=1)
        for i in range(n):
            if sums[i] < -tol:
                dom = Verdict.fail(
                    {"row": i, "row_sum": float(sums[i])}, "negative row sum")
                break
    return MMatrixReport(off, dom)


# ---------------------------------------------------------------------------
# matrix text format: CSV rows, or a JSON object
# {"dim": n, "symmetric": bool, "entries": [[...], ...]}

def loads_matrix(text: str) -> KernelMatrix:
    stripped = text.lstrip()
    if not stripped:
        raise InputFormatError("empty matrix input")
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"bad matrix JSON: {exc}") from exc
        if "entries" not in obj:
            raise InputFormatError('matrix JSON requires an "entries" field')
        rows = obj["entries"]
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise InputFormatError('"entries" must be a list of rows')
        lengths = {len(r) for r in rows}
        if len(lengths) != 1:
            raise InputFormatError("ragged rows in matrix JSON")
        a = _as_square_array(rows)
        if "dim" in obj and int(obj["dim"]) != a.shape[0]:
            raise InputFormatError('"dim" does not match the entries')
        declared = obj.get("symmetric")
        return kernel(a, symmetric=None if declared is None else bool(declared))
    rows = []
    for rec in csv.reader(io.StringIO(stripped)):
        if not rec or all(not cell.strip() for cell in rec):
            continue
        try:
            rows.append([float(cell) for cell in rec])
        except ValueError as exc:
            raise InputFormatError(f"bad CSV cell: {exc}") from exc
    if not rows:
        raise InputFormatError("no rows in matrix CSV")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise InputFormatError("ragged rows in matrix CSV")
    return kernel(rows)


def load_matrix(path) -> KernelMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_matrix(fh.read())


def dumps_matrix(G: KernelMatrix) -> str:
    lines = [",".join(format(v, ".17g") for v in row) for row in G.entries]
    return "\n".join(lines) + "\n"


def save_matrix(G: KernelMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_matrix(G))
