"""Gauge symmetry, invariant coordinates and finite-field enumeration of classical points.

Over ``GF(q)`` a classical point is built degree by degree. Given the data on
``[a, s-1]`` and a choice of ``psi_s``, the equations for the new components
``phi: A_p ⊗ S_{s-p} → S_s`` are linear:

* ``psi_s phi(u, x) = u · psi_{s-p}(x)``
* ``phi(u v, x) = phi(u, phi(v, x))``

Since ``u · psi(x)`` must lie in the image of ``psi_s``, that image contains
``G_s = Σ_p A_p · psi(S_{s-p})``. Up to the gauge group ``GL(h(s))`` every
``psi_s`` is a reduced column echelon basis of its image, padded with zero
columns, so enumerating the subspaces ``W ⊇ G_s`` of dimension ``<= h(s)``
covers every classical point.
"""

from __future__ import annotations

import math
import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .dgla import ClassicalPoint, StretchDgLie, rank_locus_predicates, strict_element
from .exact import QQ, ContractError, ExactMatrix, Field, PrimeField, inverse, rank_of
from .graded import generated_submodule
from .instance import Instance
from .kernels import eval_quadratic_mod_p, rref_mod_p

# ---------------------------------------------------------------- dense helpers


def _dot(x: np.ndarray, y: np.ndarray, axes, fld: Field) -> np.ndarray:
    out = np.tensordot(x, y, axes=axes)
    return fld.reduce(out)


def _as_field(arr, fld: Field) -> np.ndarray:
    arr = np.asarray(arr)
    if isinstance(fld, PrimeField) and arr.dtype != object:
        return np.mod(arr.astype(np.int64), fld.q)
    return fld.array(arr.tolist()) if arr.size else fld.zeros(arr.shape)


# ------------------------------------------------------------------ group action


@dataclass(frozen=True, eq=False)
class GroupElement:
    """One invertible ``h(s) × h(s)`` block per degree; missing degrees act trivially."""

    blocks: dict[int, ExactMatrix]
    field: Field = QQ

    def __post_init__(self):
        for s, g in self.blocks.items():
            if g.rows != g.cols:
                raise ContractError(f"block at degree {s} is not square")
            if rank_of(g) != g.rows:
                raise ContractError(f"block at degree {s} is not invertible")

    @property
    def support(self) -> list[int]:
        return sorted(self.blocks)

    def block(self, s: int, n: int) -> ExactMatrix:
        return self.blocks[s] if s in self.blocks else ExactMatrix.identity(n, self.field)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        degs = sorted(set(self.blocks) | set(other.blocks))
        out = {}
        for s in degs:
            n = (self.blocks.get(s) or other.blocks[s]).rows
            out[s] = self.block(s, n) @ other.block(s, n)
        return GroupElement(out, self.field)

    def inverse_block(self, s: int, n: int) -> ExactMatrix:
        return inverse(self.block(s, n)) if s in self.blocks else ExactMatrix.identity(n, self.field)

    def check_matches(self, alg: StretchDgLie) -> None:
        for s, g in self.blocks.items():
            if g.rows != alg.h(s):
                raise ContractError(f"block at degree {s} has size {g.rows}, h({s}) = {alg.h(s)}")


def random_invertible(n: int, fld: Field, rng: np.random.Generator) -> ExactMatrix:
    while True:
        if isinstance(fld, PrimeField):
            m = ExactMatrix.from_dense(rng.integers(0, fld.q, size=(n, n)).tolist(), fld)
        else:
            m = ExactMatrix.from_dense(rng.integers(-3, 4, size=(n, n)).tolist(), fld)
        if rank_of(m) == n:
            return m


def random_group_element(alg: StretchDgLie, degrees, rng: np.random.Generator) -> GroupElement:
    return GroupElement({s: random_invertible(alg.h(s), alg.field, rng) for s in degrees if alg.h(s) > 0}, alg.field)


def act(g: GroupElement, point: ClassicalPoint) -> ClassicalPoint:
    """Right action: ``psi_s ↦ psi_s g_s`` and ``phi(u, x) ↦ g_out^{-1} phi(u, g_in x)``."""
    alg = point.algebra
    fld = alg.field
    g.check_matches(alg)
    a, t = alg.window
    dense = {s: g.block(s, alg.h(s)).to_dense() for s in range(a, t + 1) if alg.h(s)}
    inv = {s: g.inverse_block(s, alg.h(s)).to_dense() for s in range(a, t + 1) if alg.h(s)}
    phi, psi = {}, {}
    for s in dense:
        psi[s] = _dot(point.psi(s), dense[s], (1, 0), fld)
        for p in range(1, t - s + 1):
            if alg.h(s + p) and alg.ring.dim(p):
                tmp = _dot(inv[s + p], point.phi(p, s), (1, 0), fld)
                phi[(p, s)] = _dot(tmp, dense[s], (2, 0), fld)
    return ClassicalPoint(strict_element(alg, phi, psi))


# -------------------------------------------------------------- invariant coordinates


def coordinate_keys(alg: StretchDgLie, b: int) -> list[tuple[int, ...]]:
    """Tuples ``(k, s_1, ..., s_k, s', s)`` with ``s' <= b < s <= t``."""
    a, t = alg.window
    from .dgla import _compositions

    keys = []
    for s in range(b + 1, t + 1):
        for s_in in range(a, b + 1):
            for k in range(1, s - s_in + 1):
                for parts in _compositions(s - s_in, k):
                    keys.append((k,) + parts + (s_in, s))
    return keys


def _nested(point: ClassicalPoint, parts: tuple[int, ...], s_in: int) -> np.ndarray:
    """Array ``(h(s), dA_{s_1}, ..., dA_{s_k}, h(s_in))`` of ``x ↦ φ(a_1, φ(a_2, ... φ(a_k, x)))``."""
    fld = point.algebra.field
    n = point.algebra.h(s_in)
    cur = fld.zeros((n, n))
    for i in range(n):
        cur[i, i] = fld.one
    deg = s_in
    for p in reversed(parts):
        cur = _dot(point.phi(p, deg), cur, (2, 0), fld)
        deg += p
    return cur


def _coordinate_array(point: ClassicalPoint, parts: tuple[int, ...], s_in: int, nesting: str) -> np.ndarray:
    alg, fld = point.algebra, point.algebra.field
    s = s_in + sum(parts)
    if nesting == "merged" and len(parts) >= 2:
        # φ(u_1, φ(u_2, y)) = φ(u_1 u_2, y): go through the product in the ring
        inner = _coordinate_array(point, (parts[0] + parts[1],) + parts[2:], s_in, "merged")
        mult = _as_field(alg.ring.tensor(parts[0], parts[1], QQ), fld)
        out = _dot(inner, mult, (1, 0), fld)  # (m, rest..., x, u_1, u_2)
        nd = out.ndim
        order = [0, nd - 2, nd - 1] + list(range(1, nd - 2))
        return np.transpose(out, order)
    if nesting not in ("right", "merged"):
        raise ValueError(f"unknown nesting {nesting!r}")
    return _dot(point.psi(s), _nested(point, parts, s_in), (1, 0), fld)


@dataclass(frozen=True)
class InvariantCoordinates:
    matrices: dict[tuple[int, ...], ExactMatrix]
    hilbert: dict[int, int]

    def ranks(self) -> dict[tuple[int, ...], int]:
        return {k: rank_of(m) for k, m in self.matrices.items()}

    def rank_bound_holds(self) -> bool:
        return all(r <= self.hilbert[k[-1]] for k, r in self.ranks().items())

    def __eq__(self, other) -> bool:
        return isinstance(other, InvariantCoordinates) and self.matrices.keys() == other.matrices.keys() and all(
            self.matrices[k] == other.matrices[k] for k in self.matrices
        )


def invariant_coordinates(point: ClassicalPoint, b: int, nesting: str = "right") -> InvariantCoordinates:
    """All composites ``A_{s_1} ⊗ ... ⊗ A_{s_k} ⊗ S_{s'} → M_s`` as matrices (columns in C order)."""
    alg = point.algebra
    a, t = alg.window
    if not a <= b <= t:
        raise ContractError(f"need {a} <= b <= {t}, got b = {b}")
    if not alg.mc_residual(point.element).is_zero():
        raise ContractError("invariant coordinates need a Maurer-Cartan point")
    mats = {}
    for key in coordinate_keys(alg, b):
        parts, s_in = key[1:-2], key[-2]
        arr = _coordinate_array(point, parts, s_in, nesting)
        mats[key] = ExactMatrix.from_dense(arr.reshape(arr.shape[0], math.prod(arr.shape[1:])), alg.field)
    return InvariantCoordinates(mats, {s: alg.h(s) for s in range(a, t + 1)})


def geometric_locus(coords: InvariantCoordinates, h=None) -> bool:
    hh = coords.hilbert if h is None else {s: h(s) for s in coords.hilbert}
    return all(r == hh[k[-1]] for k, r in coords.ranks().items())


# ----------------------------------------------------------- finite-field linear algebra


def _rank_mod(a: np.ndarray, q: int) -> int:
    if a.size == 0:
        return 0
    return int(rref_mod_p(np.mod(a, q), q)[1].size)


def _rcef_mod(a: np.ndarray, q: int) -> np.ndarray:
    """Reduced column echelon basis of the column space of ``a``."""
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    R, piv = rref_mod_p(np.mod(a.T, q), q)
    return np.ascontiguousarray(R[: piv.size].T)


def _solve_mod(A: np.ndarray, b: np.ndarray, q: int) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Particular solution and kernel basis (columns) of ``A x = b`` over GF(q), or ``None``."""
    m, n = A.shape
    if m == 0:
        return np.zeros(n, dtype=np.int64), np.eye(n, dtype=np.int64)
    R, piv = rref_mod_p(np.mod(np.hstack([A, b[:, None]]), q), q)
    if piv.size and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    x[piv] = R[: piv.size, n]
    free = np.setdiff1d(np.arange(n), piv)
    K = np.zeros((n, free.size), dtype=np.int64)
    K[free, np.arange(free.size)] = 1
    if piv.size and free.size:
        K[piv] = np.mod(-R[: piv.size][:, free], q)
    return x, K


def subspaces(n: int, d: int, q: int) -> Iterator[np.ndarray]:
    """All ``d``-dimensional subspaces of ``GF(q)^n`` as reduced row echelon ``d × n`` matrices."""
    if d == 0:
        yield np.zeros((0, n), dtype=np.int64)
        return
    for piv in itertools.combinations(range(n), d):
        free = [(i, j) for i in range(d) for j in range(piv[i] + 1, n) if j not in piv]
        for vals in itertools.product(range(q), repeat=len(free)):
            m = np.zeros((d, n), dtype=np.int64)
            m[np.arange(d), list(piv)] = 1
            for (i, j), v in zip(free, vals):
                m[i, j] = v
            yield m


def superspaces(G: np.ndarray, n: int, r: int, q: int) -> Iterator[np.ndarray]:
    """Subspaces ``W ⊇ col(G)`` of dimension ``r``, each as an RCEF ``n × r`` basis."""
    Gb = _rcef_mod(G, q) if G.size else np.zeros((n, 0), dtype=np.int64)
    g = Gb.shape[1]
    if r < g:
        return
    lead = [int(np.flatnonzero(Gb[:, j])[0]) for j in range(g)]
    comp = [i for i in range(n) if i not in lead]
    for U in subspaces(len(comp), r - g, q):
        ext = np.zeros((n, r - g), dtype=np.int64)
        ext[comp, :] = U.T
        yield _rcef_mod(np.hstack([Gb, ext]), q)


# --------------------------------------------------------------------- level solver


class _Context:
    """Structure constants of an instance over GF(q) on the window ``[a, t]``."""

    def __init__(self, inst: Instance, t: int, q: int):
        self.inst, self.t, self.q = inst, t, q
        self.a = inst.floor
        self.field = PrimeField(q)
        self.dA = {p: inst.ring.dim(p) for p in range(0, t + 1)}
        self.dM = {s: inst.module.dim(s) for s in range(self.a, t + 1)}
        self.h = {s: inst.h(s) for s in range(self.a, t + 1)}
        self._mod, self._ring = {}, {}

    def mod_tensor(self, p: int, s: int) -> np.ndarray:
        if (p, s) not in self._mod:
            self._mod[(p, s)] = _as_field(self.inst.module.tensor(p, s, QQ), self.field)
        return self._mod[(p, s)]

    def ring_tensor(self, p1: int, p2: int) -> np.ndarray:
        if (p1, p2) not in self._ring:
            self._ring[(p1, p2)] = _as_field(self.inst.ring.tensor(p1, p2, QQ), self.field)
        return self._ring[(p1, p2)]

    def generated(self, s: int, psi: dict[int, np.ndarray]) -> np.ndarray:
        """Columns spanning ``Σ_p A_p · psi(S_{s-p})``."""
        cols = []
        for p in range(1, s - self.a + 1):
            P = psi.get(s - p)
            if P is None or P.shape[1] == 0 or self.dA[p] == 0:
                continue
            arr = np.tensordot(self.mod_tensor(p, s - p), P, axes=(2, 0)) % self.q
            cols.append(arr.reshape(self.dM[s], arr.size // self.dM[s] if self.dM[s] else 0))
        return np.hstack(cols) if cols else np.zeros((self.dM[s], 0), dtype=np.int64)

    def unknowns(self, s: int) -> list[tuple[int, int]]:
        return [(p, s - p) for p in range(1, s - self.a + 1) if self.dA[p] and self.h[s - p] and self.h[s]]

    def system(self, s: int, psi_s: np.ndarray, psi: dict[int, np.ndarray], phi: dict[tuple[int, int], np.ndarray]):
        """Linear system ``A x = b`` in the components ``phi`` landing in ``S_s``."""
        q, hs = self.q, self.h[s]
        unk = self.unknowns(s)
        offs, n = {}, 0
        for p, si in unk:
            offs[p] = n
            n += hs * self.dA[p] * self.h[si]
        rows_A, rows_b = [], []
        for p, si in unk:
            blk = np.zeros((self.dM[s] * self.dA[p] * self.h[si], n), dtype=np.int64)
            size = hs * self.dA[p] * self.h[si]
            blk[:, offs[p] : offs[p] + size] = np.kron(psi_s, np.eye(self.dA[p] * self.h[si], dtype=np.int64))
            rhs = np.tensordot(self.mod_tensor(p, si), psi[si], axes=(2, 0)) % q
            rows_A.append(blk)
            rows_b.append(rhs.ravel())
        for p1 in range(1, s - self.a + 1):
            for p2 in range(1, s - self.a - p1 + 1):
                s0 = s - p1 - p2
                if not (self.h[s0] and self.dA[p1] and self.dA[p2] and hs):
                    continue
                nr = hs * self.dA[p1] * self.dA[p2] * self.h[s0]
                blk = np.zeros((nr, n), dtype=np.int64)
                Rt = self.ring_tensor(p1, p2).transpose(1, 2, 0).reshape(self.dA[p1] * self.dA[p2], self.dA[p1 + p2])
                if p1 + p2 in offs:
                    K = np.kron(np.eye(hs, dtype=np.int64), np.kron(Rt, np.eye(self.h[s0], dtype=np.int64)))
                    blk[:, offs[p1 + p2] : offs[p1 + p2] + K.shape[1]] += K
                low = phi.get((p2, s0))
                if p1 in offs and low is not None and self.h[s0 + p2]:
                    Phi = low.transpose(1, 2, 0).reshape(self.dA[p2] * self.h[s0], self.h[s0 + p2])
                    K = np.kron(np.eye(hs, dtype=np.int64), np.kron(np.eye(self.dA[p1], dtype=np.int64), Phi))
                    blk[:, offs[p1] : offs[p1] + K.shape[1]] -= K
                rows_A.append(blk % q)
                rows_b.append(np.zeros(nr, dtype=np.int64))
        if not rows_A:
            return np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64), unk, offs
        return np.vstack(rows_A) % q, np.concatenate(rows_b) % q, unk, offs

    def solve_level(self, s, psi_s, psi, phi, rng: Optional[np.random.Generator] = None):
        """New ``phi`` blocks landing in ``S_s`` (unique if ``rng`` is None and the kernel vanishes),
        ``None`` if no solution exists. Returns ``(blocks, kernel_dim)``."""
        A, b, unk, offs = self.system(s, psi_s, psi, phi)
        sol = _solve_mod(A, b, self.q)
        if sol is None:
            return None
        x, K = sol
        if rng is not None and K.shape[1]:
            x = (x + K @ rng.integers(0, self.q, size=K.shape[1])) % self.q
        blocks = {}
        for p, si in unk:
            size = self.h[s] * self.dA[p] * self.h[si]
            blocks[(p, si)] = x[offs[p] : offs[p] + size].reshape(self.h[s], self.dA[p], self.h[si])
        return blocks, int(K.shape[1])

    def point(self, psi, phi) -> ClassicalPoint:
        alg = self.inst.algebra(self.t, self.field)
        return ClassicalPoint(strict_element(alg, phi, psi))


# ---------------------------------------------------------------- enumeration


@dataclass
class EnumerationResult:
    points: list[tuple[dict, dict]]
    counterexamples: list[dict]
    nodes: int


def enumerate_points(inst: Instance, t: int, b: int, q: int, seeds: Optional[list[np.ndarray]] = None) -> EnumerationResult:
    """Every classical point on ``[a, t]`` with ``psi`` injective on ``[a, b]``, up to gauge.

    A branch whose ``psi_s`` (``s > b``) is not injective but still admits a
    solution is recorded as a counterexample and not extended.
    """
    ctx = _Context(inst, t, q)
    a = ctx.a
    points, bad = [], []
    nodes = 0

    def rec(s, psi, phi):
        nonlocal nodes
        if s > t:
            points.append(({k: v.copy() for k, v in psi.items()}, {k: v.copy() for k, v in phi.items()}))
            return
        G = ctx.generated(s, psi)
        hs = ctx.h[s]
        dims = [hs] if s <= b else range(hs, -1, -1)
        for r in dims:
            it = iter(seeds) if (s == a and seeds is not None) else superspaces(G, ctx.dM[s], r, q)
            for W in it:
                nodes += 1
                psi_s = np.hstack([W, np.zeros((ctx.dM[s], hs - W.shape[1]), dtype=np.int64)])
                res = ctx.solve_level(s, psi_s, psi, phi)
                if res is None:
                    continue
                blocks, kdim = res
                if r < hs:
                    bad.append({"degree": s, "rank": r, "psi": psi_s.tolist(), "kernel_dim": kdim})
                    continue
                psi[s] = psi_s
                phi.update(blocks)
                rec(s + 1, psi, phi)
                del psi[s]
                for key in blocks:
                    del phi[key]

    rec(a, {}, {})
    return EnumerationResult(points, bad, nodes)


def _matrix_json(m: np.ndarray) -> dict:
    m = np.asarray(m)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "entries": [[int(i), int(j), str(int(m[i, j]))] for i, j in zip(*np.nonzero(m))]}


def find_b(inst: Instance, q: int, ceiling: Optional[int] = None) -> dict:
    """Least ``b`` such that every seed extending to a classical point on ``[a, b]`` generates
    a submodule with dimensions ``h`` all the way up to the ceiling."""
    T = inst.ceiling if ceiling is None else ceiling
    a = inst.floor
    fld = PrimeField(q)
    seeds = list(superspaces(np.zeros((inst.module.dim(a), 0), dtype=np.int64), inst.module.dim(a), inst.h(a), q))
    target = {s: inst.h(s) for s in range(a, T + 1)}
    generated = []
    for W in seeds:
        sub = generated_submodule(ExactMatrix.from_dense(W.tolist(), fld), inst.module, (a, T))
        generated.append(sub.dims())
    rows = []
    for b in range(a, T + 1):
        arising = []
        for W, dims in zip(seeds, generated):
            res = enumerate_points(inst, b, b, q, seeds=[W])
            if res.points:
                arising.append((W, dims))
        ok = all(d == target for _, d in arising)
        rows.append({"b": b, "arising": len(arising), "all_generate": ok})
        if ok:
            return {
                "b": b,
                "ceiling": T,
                "field": fld.name,
                "seeds_total": len(seeds),
                "witnesses": [{"seed": _matrix_json(W), "dims": {str(k): v for k, v in sorted(d.items())}} for W, d in arising],
                "search": rows,
                "status": "stabilized",
            }
    return {"b": None, "ceiling": T, "field": fld.name, "seeds_total": len(seeds), "search": rows, "status": f"not stabilized by {T}"}


# ---------------------------------------------------------------- sampling


class _MCPolynomials:
    """The Koszul-dual polynomial system over GF(q) for batched Maurer-Cartan checks."""

    def __init__(self, alg: StretchDgLie):
        from .koszul import emit_cdga

        pres = emit_cdga(alg)
        n0 = alg.dim_L(1)
        outs = [g.id for g in pres.generators if g.degree == -1]
        self.n_vars, self.n_out = n0, len(outs)
        lo, lv, lc, qo, qi, qj, qc = [], [], [], [], [], [], []
        for o, gid in enumerate(outs):
            for mono, c in pres.d(gid).items():
                if len(mono) == 1:
                    lo.append(o); lv.append(mono[0]); lc.append(int(c))
                else:
                    qo.append(o); qi.append(mono[0]); qj.append(mono[1]); qc.append(int(c))
        self.lin = (np.array(lo, dtype=np.int64), np.array(lv, dtype=np.int64), np.array(lc, dtype=np.int64))
        self.quad = (np.array(qo, dtype=np.int64), np.array(qi, dtype=np.int64), np.array(qj, dtype=np.int64), np.array(qc, dtype=np.int64))
        self.q = alg.field.q

    def residuals(self, X: np.ndarray) -> np.ndarray:
        return eval_quadratic_mod_p(X, self.lin, self.quad, self.n_out, self.q)


def _draw_psi_targeted(ctx: _Context, s: int, psi: dict, rng: np.random.Generator) -> np.ndarray:
    """Random ``psi_s`` whose image contains ``G_s`` (a necessary condition), of random rank."""
    G = _rcef_mod(ctx.generated(s, psi), ctx.q)
    g, hs, n = G.shape[1], ctx.h[s], ctx.dM[s]
    if g > hs:  # nothing can work; the solver rejects this draw
        return rng.integers(0, ctx.q, size=(n, hs)).astype(np.int64)
    r = int(rng.integers(g, hs + 1))
    basis = G
    while basis.shape[1] < r:
        cand = np.hstack([basis, rng.integers(0, ctx.q, size=(n, 1))])
        if _rank_mod(cand, ctx.q) == cand.shape[1]:
            basis = cand
    while True:
        C = rng.integers(0, ctx.q, size=(r, hs)).astype(np.int64)
        if _rank_mod(C, ctx.q) == r:
            return (basis @ C) % ctx.q


def _draw_point(ctx: _Context, rng: np.random.Generator, stats: dict, targeted: bool = False):
    """Draw ``psi_s`` degree by degree, then ``phi`` from the solution space; ``None`` on rejection."""
    psi, phi = {}, {}
    for s in range(ctx.a, ctx.t + 1):
        if targeted:
            psi_s = _draw_psi_targeted(ctx, s, psi, rng)
        else:
            psi_s = rng.integers(0, ctx.q, size=(ctx.dM[s], ctx.h[s])).astype(np.int64)
        res = ctx.solve_level(s, psi_s, psi, phi, rng)
        if res is None:
            stats["rejected_at"][str(s)] = stats["rejected_at"].get(str(s), 0) + 1
            return None
        psi[s] = psi_s
        phi.update(res[0])
    return psi, phi


def _sample(ctx: _Context, mc: "_MCPolynomials", b: int, samples: int, rng: np.random.Generator, targeted: bool) -> dict:
    stats = {"rejected_at": {}}
    accepted = []
    for _ in range(samples):
        d = _draw_point(ctx, rng, stats, targeted)
        if d is not None:
            accepted.append(d)
    mismatch = 0
    pts = [ctx.point(psi, phi) for psi, phi in accepted]  # table route: raises off the MC locus
    if pts:
        X = np.stack([p.element.L_vector().astype(np.int64) for p in pts])
        mismatch = int(np.count_nonzero(np.any(mc.residuals(X) != 0, axis=1)))
    in_v, not_v, counter = 0, 0, []
    for (psi, _), p in zip(accepted, pts):
        pr = rank_locus_predicates(p, b)
        if pr["in_V"]:
            in_v += 1
            if not pr["in_M"]:
                counter.append({"psi": {str(s): _matrix_json(m) for s, m in sorted(psi.items())}})
        else:
            not_v += 1
    return {
        "draws": samples,
        "accepted": len(accepted),
        "accepted_in_V": in_v,
        "accepted_outside_V": not_v,
        "rejected_at_degree": dict(sorted(stats["rejected_at"].items())),
        "koszul_route_mismatches": mismatch,
        "counterexamples": counter,
    }


NOTE_CLEAN = "no counterexample found; absence of counterexamples is evidence, not proof"
NOTE_FOUND = "counterexamples found; see the dumps above"


def propagation_check(inst: Instance, b: int, q: int, samples: int = 10_000, twists: int = 500, t: Optional[int] = None, seed: Optional[int] = None) -> dict:
    """Look for classical points injective on ``[a, b]`` but not beyond.

    (i) exhaustive enumeration plus random gauge twists supported on ``[b+1, t]``;
    (ii) random draws of strict pairs. A clean report is evidence, not a proof.
    """
    t = inst.ceiling if t is None else t
    seed = inst.seed if seed is None else seed
    rng_twist, rng_uniform, rng_targeted = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))
    ctx = _Context(inst, t, q)
    alg = inst.algebra(t, ctx.field)
    enum = enumerate_points(inst, t, b, q)
    pts = [ctx.point(psi, phi) for psi, phi in enum.points]
    not_in_m = sum(1 for p in pts if not rank_locus_predicates(p, b)["in_M"])
    twist_fail = []
    done = 0
    if pts:
        for i in range(twists):
            p = pts[i % len(pts)]
            g = random_group_element(alg, range(b + 1, t + 1), rng_twist)
            img = act(g, p)  # raises if the Maurer-Cartan equation breaks
            pr = rank_locus_predicates(img, b)
            if not pr["in_M"]:
                twist_fail.append(i)
            done += 1
    # (ii) sampling
    mc = _MCPolynomials(alg)
    uniform = _sample(ctx, mc, b, samples, rng_uniform, targeted=False)
    targeted = _sample(ctx, mc, b, samples, rng_targeted, targeted=True)
    total = len(enum.counterexamples) + not_in_m + len(twist_fail) + len(uniform["counterexamples"]) + len(targeted["counterexamples"])
    return {
        "b": b,
        "window": [inst.floor, t],
        "field": ctx.field.name,
        "seed": seed,
        "enumeration": {
            "points": len(pts),
            "nodes": enum.nodes,
            "not_injective": not_in_m,
            "counterexamples": enum.counterexamples,
        },
        "twists": {"count": done, "failures": twist_fail},
        "sampling": {"uniform": uniform, "targeted": targeted},
        "counterexamples_total": total,
        "mismatches_total": uniform["koszul_route_mismatches"] + targeted["koszul_route_mismatches"],
        "note": NOTE_CLEAN if total == 0 else NOTE_FOUND,
    }


def quotient_comparison(inst: Instance, b: int, q: int, t: Optional[int] = None) -> dict:
    """Sizes of the rank loci among gauge classes of classical points over GF(q)."""
    t = inst.ceiling if t is None else t
    ctx = _Context(inst, t, q)
    enum = enumerate_points(inst, t, b, q)
    n_v = n_x = n_geo = 0
    checks = {"V_implies_X": True, "X_implies_geometric": True, "rank_bound": True, "geometric_iff_X": True}

    def record(p):
        pr = rank_locus_predicates(p, b)
        coords = invariant_coordinates(p, b)
        geo = geometric_locus(coords)
        if pr["in_V"] and not pr["in_X"]:
            checks["V_implies_X"] = False
        if pr["in_X"] and not geo:
            checks["X_implies_geometric"] = False
        if geo != pr["in_X"]:
            checks["geometric_iff_X"] = False
        if not coords.rank_bound_holds():
            checks["rank_bound"] = False
        return pr, geo

    for psi, phi in enum.points:
        pr, geo = record(ctx.point(psi, phi))
        n_v += pr["in_V"]
        n_x += pr["in_X"]
        n_geo += geo
    # off the loci: the same module structures with the zero map to M
    off = 0
    for psi, phi in enum.points:
        record(ctx.point({s: np.zeros_like(m) for s, m in psi.items()}, phi))
        off += 1
    return {
        "b": b,
        "window": [inst.floor, t],
        "field": ctx.field.name,
        "V": n_v,
        "X": n_x,
        "geometric": n_geo,
        "counterexamples": enum.counterexamples,
        "off_locus_points_checked": off,
        "checks": checks,
    }


def action_check(point: ClassicalPoint, b: int, rng: np.random.Generator, pairs: int = 20, invariance: int = 100) -> dict:
    """Right-action law, preservation of the loci, and invariance of the coordinates."""
    alg = point.algebra
    a, t = alg.window
    law = mc = loci = True
    base_pred = rank_locus_predicates(point, b)
    for _ in range(pairs):
        g1 = random_group_element(alg, range(a, t + 1), rng)
        g2 = random_group_element(alg, range(a, t + 1), rng)
        lhs = act(g2, act(g1, point))
        rhs = act(g1 * g2, point)
        law &= lhs.element == rhs.element
        mc &= alg.mc_residual(lhs.element).is_zero()
        loci &= rank_locus_predicates(lhs, b) == base_pred
    base = invariant_coordinates(point, b)
    inv_ok = True
    for _ in range(invariance):
        g = random_group_element(alg, range(b + 1, t + 1), rng)
        inv_ok &= invariant_coordinates(act(g, point), b) == base
    return {
        "window": [a, t],
        "b": b,
        "field": alg.field.name,
        "right_action_law": bool(law),
        "mc_preserved": bool(mc),
        "loci_preserved": bool(loci),
        "coordinates_invariant": bool(inv_ok),
        "pairs": pairs,
        "invariance_samples": invariance,
    }
