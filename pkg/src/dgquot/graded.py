"""Graded rings and modules truncated to a window, submodules and the Hom oracle."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb
from typing import Optional

import numpy as np

from .exact import QQ, ContractError, ExactMatrix, Field, column_space_basis, rank_kernel, rank_of, solve_many


def _tensor_from_matrix(m: ExactMatrix, shape: tuple[int, ...], field: Field) -> np.ndarray:
    out = field.zeros((m.rows, m.cols))
    for r, c, v in m.entries:
        out[r, c] = field.convert(v)
    return out.reshape(shape)


@dataclass(frozen=True, eq=False)
class GradedRing:
    """``A_0 ⊕ ... ⊕ A_tmax`` with multiplication tensors; ``mult[s1, s2]`` maps
    ``A_s1 ⊗ A_s2`` (row-major pair index) to ``A_{s1+s2}``."""

    dims: dict[int, int]
    mult: dict[tuple[int, int], ExactMatrix]
    t_max: int
    generated_in_degree_one: bool = True
    basis_names: Optional[dict[int, list[str]]] = None

    def dim(self, s: int) -> int:
        return self.dims.get(s, 0) if 0 <= s <= self.t_max else 0

    def tensor(self, s1: int, s2: int, field: Field = QQ) -> np.ndarray:
        """Structure tensor of shape ``(dim A_{s1+s2}, dim A_s1, dim A_s2)``."""
        shape = (self.dim(s1 + s2), self.dim(s1), self.dim(s2))
        m = self.mult.get((s1, s2))
        if m is None:
            return field.zeros(shape)
        return _tensor_from_matrix(m, shape, field)

    def check_associativity(self) -> bool:
        for s1 in range(self.t_max + 1):
            for s2 in range(self.t_max + 1 - s1):
                for s3 in range(self.t_max + 1 - s1 - s2):
                    ab = self.tensor(s1, s2)
                    left = np.tensordot(self.tensor(s1 + s2, s3), ab, axes=(1, 0))  # (o, c, a, b)
                    left = np.moveaxis(left, 1, 3)
                    bc = self.tensor(s2, s3)
                    right = np.tensordot(self.tensor(s1, s2 + s3), bc, axes=(2, 0))  # (o, a, b, c)
                    if np.any(left != right):
                        return False
        return True

    def check_generation(self) -> bool:
        for s in range(1, self.t_max):
            if self.dim(s + 1) and rank_of(self.mult.get((1, s), ExactMatrix.zeros(self.dim(s + 1), 1))) < self.dim(s + 1):
                return False
        return True


def _monomials(num_vars: int, s: int) -> list[tuple[int, ...]]:
    exps = []
    for combo in combinations_with_replacement(range(num_vars), s):
        e = [0] * num_vars
        for v in combo:
            e[v] += 1
        exps.append(tuple(e))
    return sorted(exps, reverse=True)


def _monomial_name(e: tuple[int, ...]) -> str:
    letters = "xyzwuvpqrst"
    parts = []
    for i, k in enumerate(e):
        var = letters[i] if i < len(letters) else f"x{i}"
        if k == 1:
            parts.append(var)
        elif k > 1:
            parts.append(f"{var}^{k}")
    return "*".join(parts) or "1"


def build_polynomial_ring(num_vars: int, t_max: int) -> GradedRing:
    """``QQ[x_1..x_n]`` truncated at degree ``t_max``, monomials in descending lex order."""
    if num_vars < 1:
        raise ContractError("a polynomial ring needs at least one variable")
    mons = {s: _monomials(num_vars, s) for s in range(t_max + 1)}
    pos = {s: {e: i for i, e in enumerate(ms)} for s, ms in mons.items()}
    dims = {s: len(ms) for s, ms in mons.items()}
    mult = {}
    for s1 in range(t_max + 1):
        for s2 in range(t_max + 1 - s1):
            trip = []
            d2 = dims[s2]
            for i, e1 in enumerate(mons[s1]):
                for j, e2 in enumerate(mons[s2]):
                    e = tuple(a + b for a, b in zip(e1, e2))
                    trip.append((pos[s1 + s2][e], i * d2 + j, 1))
            mult[(s1, s2)] = ExactMatrix.from_triplets(dims[s1 + s2], dims[s1] * d2, trip)
    names = {s: [_monomial_name(e) for e in ms] for s, ms in mons.items()}
    assert all(dims[s] == comb(s + num_vars - 1, num_vars - 1) for s in dims)
    return GradedRing(dims, mult, t_max, True, names)


@dataclass(frozen=True, eq=False)
class GradedModule:
    """``M_floor ⊕ ... ⊕ M_tmax``; ``action[s1, s2]`` maps ``A_s1 ⊗ M_s2`` to ``M_{s1+s2}``.

    Products landing above ``t_max`` are zero (the quotient ``M / M_{>t_max}``).
    """

    ring: GradedRing
    dims: dict[int, int]
    action: dict[tuple[int, int], ExactMatrix]
    floor: int
    t_max: int
    basis_names: Optional[dict[int, list[str]]] = None

    def dim(self, s: int) -> int:
        return self.dims.get(s, 0) if self.floor <= s <= self.t_max else 0

    def tensor(self, s1: int, s2: int, field: Field = QQ) -> np.ndarray:
        shape = (self.dim(s1 + s2), self.ring.dim(s1), self.dim(s2))
        m = self.action.get((s1, s2))
        if m is None or 0 in shape:
            return field.zeros(shape)
        return _tensor_from_matrix(m, shape, field)

    def act_matrix(self, s1: int, s2: int, field: Field = QQ) -> ExactMatrix:
        """``A_s1 ⊗ M_s2 → M_{s1+s2}`` as a matrix on row-major pair indices."""
        m = self.action.get((s1, s2))
        rows, cols = self.dim(s1 + s2), self.ring.dim(s1) * self.dim(s2)
        if m is None or rows == 0:
            return ExactMatrix.zeros(rows, cols, field)
        return m.with_field(field)

    def multiply_subspace(self, s1: int, basis: ExactMatrix, s2: int) -> ExactMatrix:
        """Columns ``a_i · v_j`` for every basis monomial ``a_i`` of ``A_s1`` and column ``v_j``."""
        field = basis.field
        t = self.tensor(s1, s2, field)  # (o, a, m)
        vec = basis.to_dense()  # (m, r)
        out = np.tensordot(t, vec, axes=(2, 0)) if t.size and vec.size else field.zeros((t.shape[0], t.shape[1], vec.shape[1]))
        return ExactMatrix.from_dense(field.reduce(out.reshape(t.shape[0], t.shape[1] * vec.shape[1])), field)

    def check_associativity(self) -> bool:
        ring = self.ring
        for m in range(self.floor, self.t_max + 1):
            for s1 in range(1, self.t_max + 1 - m):
                for s2 in range(1, self.t_max + 1 - m - s1):
                    left = np.tensordot(self.tensor(s1 + s2, m), ring.tensor(s1, s2), axes=(1, 0))
                    left = np.moveaxis(left, 1, 3)  # (o, a, b, m)
                    inner = self.tensor(s2, m)
                    right = np.tensordot(self.tensor(s1, s2 + m), inner, axes=(2, 0))  # (o, a, b, m)
                    if np.any(left != right):
                        return False
        return True


def free_module(ring: GradedRing, rank: int, floor: int, t_max: Optional[int] = None) -> GradedModule:
    """``(A^rank)_{>= floor}`` truncated at ``t_max``."""
    t_max = ring.t_max if t_max is None else t_max
    if t_max > ring.t_max:
        raise ContractError("module ceiling above ring ceiling")
    dims = {s: rank * ring.dim(s) for s in range(floor, t_max + 1)}
    action = {}
    for s2 in range(floor, t_max + 1):
        for s1 in range(0, t_max + 1 - s2):
            base = ring.mult[(s1, s2)]
            d1, d2, do = ring.dim(s1), ring.dim(s2), ring.dim(s1 + s2)
            trip = []
            for r, c, v in base.entries:
                i, j = divmod(c, d2)
                for copy in range(rank):
                    trip.append((copy * do + r, i * (rank * d2) + copy * d2 + j, v))
            action[(s1, s2)] = ExactMatrix.from_triplets(rank * do, d1 * rank * d2, trip)
    names = None
    if ring.basis_names:
        names = {
            s: [n if rank == 1 else f"{n}*e{c}" for c in range(rank) for n in ring.basis_names[s]]
            for s in dims
        }
    return GradedModule(ring, dims, action, floor, t_max, names)


@dataclass(frozen=True)
class HilbertData:
    """Target dimensions ``h(s)`` of the submodule on ``[a, t_max]``."""

    h: dict[int, int]
    a: int

    def __call__(self, s: int) -> int:
        return self.h.get(s, 0)

    @property
    def t_max(self) -> int:
        return max(self.h) if self.h else self.a

    def check_against(self, module: GradedModule, strict: bool = False) -> None:
        for s in sorted(self.h):
            v = self.h[s]
            if v < 0:
                raise ContractError(f"negative hilbert value at degree {s}")
            d = module.dim(s)
            if v > d:
                raise ContractError(f"hilbert exceeds module dimension at degree {s}")
            if strict and v == d:
                raise ContractError(f"hilbert equals module dimension at degree {s}")

    def restrict(self, t: int) -> "HilbertData":
        return HilbertData({s: v for s, v in self.h.items() if s <= t}, self.a)


@dataclass(frozen=True, eq=False)
class SubmodulePoint:
    """A graded subspace ``S ⊆ M`` given by a basis matrix ``dim M_s × dim S_s`` per degree."""

    basis: dict[int, ExactMatrix]
    field: Field = QQ

    @property
    def degrees(self) -> list[int]:
        return sorted(self.basis)

    @property
    def window(self) -> tuple[int, int]:
        d = self.degrees
        return (d[0], d[-1])

    def dims(self) -> dict[int, int]:
        return {s: self.basis[s].cols for s in self.degrees}

    def restrict(self, t: int) -> "SubmodulePoint":
        return SubmodulePoint({s: b for s, b in self.basis.items() if s <= t}, self.field)

    def hilbert(self) -> HilbertData:
        return HilbertData(self.dims(), self.window[0])

    def change_basis(self, g: dict[int, ExactMatrix]) -> "SubmodulePoint":
        return SubmodulePoint({s: (b @ g[s] if s in g else b) for s, b in self.basis.items()}, self.field)


def generated_submodule(seed: ExactMatrix, module: GradedModule, window: tuple[int, int]) -> SubmodulePoint:
    """The submodule generated by the columns of ``seed ⊆ M_a``, degree by degree up to ``t``."""
    a, t = window
    field = seed.field
    if seed.rows != module.dim(a):
        raise ContractError(f"seed has {seed.rows} rows, M_{a} has dimension {module.dim(a)}")
    basis = {a: column_space_basis(seed)}
    for s in range(a + 1, t + 1):
        if basis[a].cols == 0:
            basis[s] = ExactMatrix.zeros(module.dim(s), 0, field)
            continue
        basis[s] = column_space_basis(module.multiply_subspace(s - a, basis[a], a))
    return SubmodulePoint(basis, field)


def check_closed(sub: SubmodulePoint, module: GradedModule) -> Optional[tuple[int, int, int]]:
    """First ``(degree s, ring degree p, basis column j)`` with ``A_p · v_j ⊄ S_{s+p}``, else ``None``."""
    lo, hi = sub.window
    for s in sub.degrees:
        b = sub.basis[s]
        for p in range(1, hi - s + 1):
            target = sub.basis.get(s + p)
            if target is None:
                continue
            prods = module.multiply_subspace(p, b, s)
            da = module.ring.dim(p)
            for j in range(b.cols):
                cols = prods.columns([i * b.cols + j for i in range(da)])
                if rank_of(ExactMatrix.hstack([target, cols])) > rank_of(target):
                    return (s, p, j)
    return None


def check_a_regular_profile(sub: SubmodulePoint, module: GradedModule, h: HilbertData) -> bool:
    """Dimensions match ``h`` and ``A_1 · S_s → S_{s+1}`` is onto throughout the window."""
    degs = sub.degrees
    if any(sub.basis[s].cols != h(s) for s in degs):
        return False
    for s in degs:
        if s + 1 in sub.basis:
            image = module.multiply_subspace(1, sub.basis[s], s)
            if rank_of(image) != sub.basis[s + 1].cols:
                return False
    return True


def _left_null(b: ExactMatrix) -> ExactMatrix:
    """Rows spanning ``{y : y · b = 0}``; a surjection ``M_s → M_s / S_s``."""
    _, k = rank_kernel(b.T)
    return k.T


def hom_quotient_oracle(sub: SubmodulePoint, module: GradedModule) -> tuple[int, ExactMatrix]:
    """Degree-0 ``A``-linear maps ``S → M/S`` on the window of ``sub``.

    Unknowns are the matrices ``F_s : S_s → Q_s`` (``Q_s`` the quotient coordinates).
    Constraints ``F_{s+1}(x_i · v) = x_i · F_s(v)`` for the degree-one generators;
    this characterises ``A``-linearity when the ring is generated in degree one.
    Returns the kernel dimension and basis (unknowns in degree order, row-major).
    """
    if not module.ring.generated_in_degree_one:
        raise ContractError("the Hom oracle needs a ring generated in degree one")
    field = sub.field
    degs = sub.degrees
    proj = {s: _left_null(sub.basis[s]) for s in degs}
    lift = {}
    for s in degs:
        sol = solve_many(proj[s], ExactMatrix.identity(proj[s].rows, field)) if proj[s].rows else None
        lift[s] = sol if sol is not None else ExactMatrix.zeros(module.dim(s), 0, field)
    offsets, off = {}, 0
    for s in degs:
        offsets[s] = off
        off += proj[s].rows * sub.basis[s].cols
    n_unknowns = off
    eqs: list[tuple[int, int, object]] = []
    row = 0
    d1 = module.ring.dim(1)
    for s in degs:
        if s + 1 not in sub.basis:
            continue
        bs, bt = sub.basis[s], sub.basis[s + 1]
        qs, qt = proj[s].rows, proj[s + 1].rows
        hs, ht = bs.cols, bt.cols
        prods = module.multiply_subspace(1, bs, s)  # columns (i, j) -> x_i v_j
        coords = solve_many(bt, prods)
        if coords is None:
            raise ContractError(f"submodule not closed at degree {s}")
        cd = coords.to_dense()  # (ht, d1*hs)
        act = module.act_matrix(1, s, field)
        for i in range(d1):
            # x_i acting M_s -> M_{s+1}, then projected: P_{s+1} X_i L_s  (qt × qs)
            xi = act.columns([i * module.dim(s) + m for m in range(module.dim(s))])
            right = proj[s + 1] @ xi @ lift[s] if qs and qt else ExactMatrix.zeros(qt, qs, field)
            rd = right.to_dense()
            for j in range(hs):
                c = cd[:, i * hs + j]
                for r in range(qt):
                    # sum_k F_{s+1}[r, k] c_k  -  sum_l right[r, l] F_s[l, j] = 0
                    for k in range(ht):
                        if c[k] != 0:
                            eqs.append((row, offsets[s + 1] + r * ht + k, c[k]))
                    for l in range(qs):
                        if rd[r, l] != 0:
                            eqs.append((row, offsets[s] + l * hs + j, -rd[r, l]))
                    row += 1
    system = ExactMatrix.from_triplets(row, n_unknowns, eqs, field)
    rank, kernel = rank_kernel(system)
    return n_unknowns - rank, kernel
