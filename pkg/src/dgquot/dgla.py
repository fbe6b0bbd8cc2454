"""The finite-window dg Lie algebra of multilinear maps and its Maurer-Cartan theory.

Basis labels are ``(sort, k, s, ins, positions)``:

* ``rho``  ``Hom(A_{s1} ⊗ ... ⊗ A_{s_{k+1}}, A_s)``
* ``phi``  ``Hom(A_{s1} ⊗ ... ⊗ A_{s_k} ⊗ S_{s'}, S_s)``
* ``psi``  ``Hom(A_{s1} ⊗ ... ⊗ A_{s_{k-1}} ⊗ S_{s'}, M_s)``
* ``mu``   ``Hom(A_{s1} ⊗ ... ⊗ A_{s_k} ⊗ M_{m}, M_s)``

``ins`` lists the input homogeneity degrees (ring factors first) and
``positions`` indexes the array ``(out, in_1, ..., in_n)``. Maps have
homogeneity degree zero, so ``s = sum(ins)``. The bracket is the
antisymmetrised pre-Lie composition: inserting ``g`` into slot ``i`` of ``f``
carries the sign ``(-1)^(k_g * i)``.

All compositions are precomputed as index tables ``(e, f, r, sign)``: the
coefficient of basis vector ``r`` in ``x ∘ y`` is ``sum sign * x[e] * y[f]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Iterable, Iterator, Optional

import numpy as np

from .exact import QQ, ContractError, ExactMatrix, Field, IndexScheme, PrimeField, rank_of, solve_many
from .graded import GradedModule, GradedRing, HilbertData, SubmodulePoint, check_closed

SORTS = ("mu", "phi", "psi", "rho")
L_SORTS = ("phi", "psi")
DELTA_SORTS = ("mu", "rho")
OUT_SORT = {"rho": "A", "phi": "S", "psi": "M", "mu": "M"}
LAST_SLOT = {"rho": "A", "phi": "S", "psi": "S", "mu": "M"}


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class Component:
    sort: str
    k: int
    out: int
    ins: tuple[int, ...]
    shape: tuple[int, ...]

    @property
    def key(self) -> tuple:
        return (self.sort, self.k, self.out, self.ins)

    @property
    def size(self) -> int:
        return prod(self.shape)

    def slot_sort(self, i: int) -> str:
        if self.sort == "rho" or i < len(self.ins) - 1:
            return "A"
        return LAST_SLOT[self.sort]


def _result_sort(left: str, right: str) -> str:
    if left == "mu" and right == "psi":
        return "psi"
    return left


class StretchDgLie:
    """Ambient algebra on the window ``[a, t]`` together with its sub-algebra ``L``.

    Ring-valued (``rho``) components only carry output degrees ``1..t-a``: those
    are the only ring degrees that can enter an input slot of the other sorts,
    and keeping them is what makes the truncated bracket satisfy Jacobi.
    """

    def __init__(self, ring: GradedRing, module: GradedModule, hilbert: HilbertData, window: tuple[int, int], field: Field = QQ):
        a, t = window
        if a < module.floor:
            raise ContractError(f"window floor {a} below module floor {module.floor}")
        if a < 1 or t < a:
            raise ContractError(f"invalid window [{a}, {t}]")
        if t > module.t_max or t > ring.t_max:
            raise ContractError(f"window ceiling {t} above the truncation of the ring or module")
        hilbert.check_against(module)
        self.ring, self.module, self.field = ring, module, field
        self.window = (a, t)
        self.hilbert = HilbertData({s: hilbert(s) for s in range(a, t + 1)}, a)
        self.comps: dict[int, list[Component]] = {}
        self.schemes: dict[int, IndexScheme] = {}
        self._build_components()
        self._tables: dict[tuple, tuple[np.ndarray, ...]] = {}
        self._truncations: dict[int, "StretchDgLie"] = {}

    # ---------------------------------------------------------------- layout

    def h(self, s: int) -> int:
        return self.hilbert(s) if self.window[0] <= s <= self.window[1] else 0

    def _dim_of(self, kind: str, s: int) -> int:
        if kind == "A":
            return self.ring.dim(s) if s >= 1 else 0
        if kind == "S":
            return self.h(s)
        return self.module.dim(s) if self.window[0] <= s <= self.window[1] else 0

    def _build_components(self) -> None:
        a, t = self.window
        by_k: dict[int, list[Component]] = {}

        def add(sort, k, s, ins):
            kinds = [OUT_SORT[sort]] + ["A"] * (len(ins) - 1) + [LAST_SLOT[sort]]
            degs = (s,) + ins
            shape = tuple(self._dim_of(kd, d) for kd, d in zip(kinds, degs))
            if 0 not in shape:
                by_k.setdefault(k, []).append(Component(sort, k, s, ins, shape))

        for k in range(1, t + 1):
            for s in range(1, t - a + 1):
                for ins in _compositions(s, k + 1):
                    add("rho", k, s, ins)
            for s in range(a, t + 1):
                for last in range(a, s + 1):
                    for ring_part in _compositions(s - last, k):
                        add("phi", k, s, ring_part + (last,))
                        add("mu", k, s, ring_part + (last,))
                    for ring_part in _compositions(s - last, k - 1):
                        add("psi", k, s, ring_part + (last,))
        for k, comps in by_k.items():
            comps.sort(key=lambda c: c.key)
            self.comps[k] = comps
            self.schemes[k] = IndexScheme({c.key: c.shape for c in comps})
        self.max_degree = max(by_k) if by_k else 0

    def scheme(self, k: int) -> IndexScheme:
        return self.schemes.get(k) or IndexScheme({})

    def dim(self, k: int, sorts: Iterable[str] = SORTS) -> int:
        sorts = tuple(sorts)
        return sum(c.size for c in self.comps.get(k, []) if c.sort in sorts)

    def dim_L(self, k: int) -> int:
        return self.dim(k, L_SORTS)

    def component_table(self) -> dict[int, dict[str, int]]:
        return {k: {srt: self.dim(k, (srt,)) for srt in SORTS} for k in sorted(self.comps)}

    def offset(self, key: tuple) -> int:
        return self.scheme(key[1]).block(key).offset

    @cached_property
    def _l_index(self) -> dict[int, np.ndarray]:
        out = {}
        for k in range(1, self.max_degree + 2):
            sch = self.scheme(k)
            idx = [np.arange(b.offset, b.offset + b.size) for b in sch.blocks if b.key[0] in L_SORTS]
            out[k] = np.concatenate(idx) if idx else np.zeros(0, dtype=np.int64)
        return out

    def l_indices(self, k: int) -> np.ndarray:
        """Global indices (in the ambient degree-``k`` space) of the ``L`` basis."""
        if k not in self._l_index:
            return np.zeros(0, dtype=np.int64)
        return self._l_index[k]

    def l_position(self, k: int) -> np.ndarray:
        """Map global index -> position inside ``L^k`` (``-1`` outside ``L``)."""
        pos = np.full(self.dim(k), -1, dtype=np.int64)
        li = self.l_indices(k)
        pos[li] = np.arange(li.size)
        return pos

    # ------------------------------------------------------------- elements

    def zero(self, k: int) -> "DgLieElement":
        return DgLieElement(self, k, self.field.zeros(self.dim(k)))

    def basis_element(self, k: int, idx: int) -> "DgLieElement":
        v = self.field.zeros(self.dim(k))
        v[idx] = self.field.one
        return DgLieElement(self, k, v)

    def element(self, k: int, vec) -> "DgLieElement":
        vec = self.field.reduce(self.field.array(list(vec)) if not isinstance(vec, np.ndarray) else vec)
        if vec.shape != (self.dim(k),):
            raise ContractError(f"degree {k} vectors have length {self.dim(k)}")
        return DgLieElement(self, k, vec)

    def element_from_components(self, k: int, parts: dict[tuple, np.ndarray]) -> "DgLieElement":
        vec = self.field.zeros(self.dim(k))
        sch = self.scheme(k)
        for key, arr in parts.items():
            if key[1] != k:
                raise ContractError(f"component {key} does not have degree {k}")
            b = sch.block(key)
            arr = np.asarray(arr, dtype=object)
            if arr.shape != b.shape:
                raise ContractError(f"component {key} needs shape {b.shape}, got {arr.shape}")
            vec[b.offset : b.offset + b.size] = self.field.array(arr.ravel().tolist())
        return DgLieElement(self, k, vec)

    def from_L(self, k: int, vec) -> "DgLieElement":
        full = self.field.zeros(self.dim(k))
        full[self.l_indices(k)] = vec
        return DgLieElement(self, k, full)

    def random_element(self, k: int, rng: np.random.Generator, sorts: Iterable[str] = L_SORTS, support: Optional[int] = None) -> "DgLieElement":
        """Random element with coefficients from ``field.random``; ``support`` limits the number of nonzeros."""
        sorts = tuple(sorts)
        idx = np.concatenate([np.arange(self.offset(c.key), self.offset(c.key) + c.size) for c in self.comps.get(k, []) if c.sort in sorts] or [np.zeros(0, dtype=np.int64)])
        v = self.field.zeros(self.dim(k))
        if idx.size:
            chosen = idx if support is None else rng.choice(idx, size=min(support, idx.size), replace=False)
            for i in chosen:
                v[i] = self.field.random(rng)
        return DgLieElement(self, k, v)

    @cached_property
    def delta(self) -> "DgLieElement":
        """Ring multiplication plus module action, truncated to the window."""
        parts = {}
        for c in self.comps.get(1, []):
            if c.sort == "rho":
                parts[c.key] = self.ring.tensor(c.ins[0], c.ins[1], QQ)
            elif c.sort == "mu":
                parts[c.key] = self.module.tensor(c.ins[0], c.ins[1], QQ)
        return self.element_from_components(1, parts)

    # --------------------------------------------------------------- tables

    def table(self, kx: int, ky: int, left: Iterable[str] = SORTS, right: Iterable[str] = SORTS):
        """Index table of the composition ``x ∘ y`` for ``deg x = kx``, ``deg y = ky``."""
        key = (kx, ky, tuple(sorted(left)), tuple(sorted(right)))
        if key not in self._tables:
            self._tables[key] = self._build_table(kx, ky, key[2], key[3])
        return self._tables[key]

    def _build_table(self, kx, ky, left, right):
        kr = kx + ky
        parts_e, parts_f, parts_r, parts_s = [], [], [], []
        res_scheme = self.scheme(kr)
        by_out: dict[tuple[str, int], list[Component]] = {}
        for F in self.comps.get(ky, []):
            if F.sort in right:
                by_out.setdefault((OUT_SORT[F.sort], F.out), []).append(F)
        for E in self.comps.get(kx, []) if kr <= self.max_degree else []:
            if E.sort not in left:
                continue
            e_off = self.offset(E.key)
            idx_e = np.arange(E.size).reshape(E.shape)
            for i, slot_deg in enumerate(E.ins):
                for F in by_out.get((E.slot_sort(i), slot_deg), []):
                    sort = _result_sort(E.sort, F.sort)
                    rkey = (sort, kr, E.out, E.ins[:i] + F.ins + E.ins[i + 1 :])
                    blk = res_scheme.block(rkey)
                    p = E.shape[1 + i]
                    et = np.moveaxis(idx_e, 1 + i, 0).reshape(p, -1)
                    ft = np.arange(F.size).reshape(p, -1)
                    m = len(F.ins)
                    res = np.arange(blk.size).reshape(blk.shape)
                    res = np.moveaxis(res, list(range(1 + i, 1 + i + m)), list(range(res.ndim - m, res.ndim)))
                    res = res.reshape(et.shape[1], ft.shape[1])
                    nE, nF = et.shape[1], ft.shape[1]
                    parts_e.append((np.broadcast_to(et[:, :, None], (p, nE, nF)) + e_off).ravel())
                    parts_f.append((np.broadcast_to(ft[:, None, :], (p, nE, nF)) + self.offset(F.key)).ravel())
                    parts_r.append((np.broadcast_to(res[None], (p, nE, nF)) + blk.offset).ravel())
                    sign = -1 if (ky * i) % 2 else 1
                    parts_s.append(np.full(p * nE * nF, sign, dtype=np.int8))
        if not parts_e:
            z = np.zeros(0, dtype=np.int64)
            return z, z, z, np.zeros(0, dtype=np.int8)
        return (
            np.concatenate(parts_e).astype(np.int64),
            np.concatenate(parts_f).astype(np.int64),
            np.concatenate(parts_r).astype(np.int64),
            np.concatenate(parts_s),
        )

    # ------------------------------------------------------------ operations

    def _scatter(self, k: int, r: np.ndarray, vals: np.ndarray) -> np.ndarray:
        out = self.field.zeros(self.dim(k))
        if r.size:
            np.add.at(out, r, vals)
        return self.field.reduce(out)

    def compose(self, x: "DgLieElement", y: "DgLieElement", left=SORTS, right=SORTS) -> "DgLieElement":
        kr = x.k + y.k
        e, f, r, sgn = self.table(x.k, y.k, left, right)
        mask = (x.vec != 0)[e] & (y.vec != 0)[f] if e.size else np.zeros(0, dtype=bool)
        e, f, r, sgn = e[mask], f[mask], r[mask], sgn[mask]
        if isinstance(self.field, PrimeField):
            vals = ((x.vec[e] * y.vec[f]) % self.field.q) * sgn.astype(np.int64)
        else:
            vals = sgn.astype(object) * x.vec[e] * y.vec[f]
        return DgLieElement(self, kr, self._scatter(kr, r, vals))

    def bracket(self, x: "DgLieElement", y: "DgLieElement") -> "DgLieElement":
        if x.algebra is not self or y.algebra is not self:
            raise ContractError("bracket of elements from different algebras")
        xy = self.compose(x, y)
        yx = self.compose(y, x)
        return xy - yx if (x.k * y.k) % 2 == 0 else xy + yx

    def differential(self, x: "DgLieElement") -> "DgLieElement":
        return self.bracket(self.delta, x)

    def mc_residual(self, gamma: "DgLieElement") -> "DgLieElement":
        """``d(γ) + ½[γ, γ]``; the half-bracket is computed as ``γ ∘ γ`` so any characteristic works."""
        if gamma.algebra is not self:
            raise ContractError("element belongs to another algebra")
        if gamma.k != 1:
            raise ContractError(f"the Maurer-Cartan residual needs a degree-1 element, got degree {gamma.k}")
        if not gamma.in_L():
            raise ContractError("the Maurer-Cartan residual needs an element of L (phi and psi sorts only)")
        return self.differential(gamma) + self.compose(gamma, gamma, L_SORTS, L_SORTS)

    def twisted_matrix(self, k: int, gamma: Optional["DgLieElement"] = None) -> ExactMatrix:
        """Matrix of ``x ↦ [δ + γ, x]`` from ``L^k`` to ``L^(k+1)`` in ``L`` coordinates."""
        big = self.delta if gamma is None else self.delta + gamma
        rows_pos = self.l_position(k + 1) if k + 1 <= self.max_degree else np.zeros(0, dtype=np.int64)
        cols_pos = self.l_position(k)
        n_rows, n_cols = self.dim_L(k + 1), self.dim_L(k)
        if n_rows == 0 or n_cols == 0:
            return ExactMatrix.zeros(n_rows, n_cols, self.field)
        nz = big.vec != 0
        rs, cs, vs = [], [], []
        e, f, r, sgn = self.table(1, k, SORTS, L_SORTS)
        m = nz[e]
        rs.append(r[m]); cs.append(f[m]); vs.append(sgn[m].astype(object) * big.vec[e[m]])
        e, f, r, sgn = self.table(k, 1, L_SORTS, SORTS)
        m = nz[f]
        factor = 1 if k % 2 else -1  # -(-1)^(1*k)
        rs.append(r[m]); cs.append(e[m]); vs.append(sgn[m].astype(object) * factor * big.vec[f[m]])
        r = np.concatenate(rs); c = np.concatenate(cs); v = np.concatenate(vs)
        rl, cl = rows_pos[r], cols_pos[c]
        if np.any(rl < 0):
            raise AssertionError("twisted differential left the sub-algebra L")
        return ExactMatrix.from_triplets(n_rows, n_cols, zip(rl.tolist(), cl.tolist(), v.tolist()), self.field)

    def structure_constants(self, k1: int, k2: int) -> np.ndarray:
        """Dense array ``B[i, j, :]`` = ``[e_i, e_j]`` on the ``L`` bases of degrees ``k1, k2``."""
        n1, n2, n3 = self.dim_L(k1), self.dim_L(k2), self.dim_L(k1 + k2)
        out = self.field.zeros((n1, n2, n3))
        if 0 in (n1, n2, n3):
            return out
        p1, p2, p3 = self.l_position(k1), self.l_position(k2), self.l_position(k1 + k2)
        sign = 1 if (k1 * k2) % 2 else -1  # [x, y] = x∘y - (-1)^{k1 k2} y∘x
        e, f, r, sgn = self.table(k1, k2, L_SORTS, L_SORTS)
        np.add.at(out, (p1[e], p2[f], p3[r]), sgn.astype(object) if out.dtype == object else sgn.astype(np.int64))
        e, f, r, sgn = self.table(k2, k1, L_SORTS, L_SORTS)
        vals = sgn.astype(object) * sign if out.dtype == object else sgn.astype(np.int64) * sign
        np.add.at(out, (p1[f], p2[e], p3[r]), vals)
        return self.field.reduce(out)

    # ------------------------------------------------------------ truncation

    def truncated(self, s: int) -> "StretchDgLie":
        a, t = self.window
        if not a <= s <= t:
            raise ContractError(f"cannot project [{a}, {t}] onto [{a}, {s}]")
        if s == t:
            return self
        if s not in self._truncations:
            self._truncations[s] = StretchDgLie(self.ring, self.module, self.hilbert.restrict(s), (a, s), self.field)
        return self._truncations[s]

    def project(self, x: "DgLieElement", s: int) -> "DgLieElement":
        """Projection onto ``[a, s]``: drop every component absent from the smaller window."""
        target = self.truncated(s)
        if target is self:
            return x
        src = self.scheme(x.k)
        out = target.field.zeros(target.dim(x.k))
        for b in target.scheme(x.k).blocks:
            sb = src.block(b.key)
            out[b.offset : b.offset + b.size] = x.vec[sb.offset : sb.offset + sb.size]
        return DgLieElement(target, x.k, out)

    def __repr__(self) -> str:
        dims = {k: self.dim_L(k) for k in sorted(self.comps)}
        return f"StretchDgLie(window={self.window}, field={self.field!r}, dim L={dims})"


@dataclass(frozen=True, eq=False)
class DgLieElement:
    algebra: StretchDgLie
    k: int
    vec: np.ndarray

    def _check(self, other: "DgLieElement") -> None:
        if other.algebra is not self.algebra or other.k != self.k:
            raise ContractError("elements live in different algebras or degrees")

    def __add__(self, other: "DgLieElement") -> "DgLieElement":
        self._check(other)
        return DgLieElement(self.algebra, self.k, self.algebra.field.reduce(self.vec + other.vec))

    def __sub__(self, other: "DgLieElement") -> "DgLieElement":
        self._check(other)
        return DgLieElement(self.algebra, self.k, self.algebra.field.reduce(self.vec - other.vec))

    def __neg__(self) -> "DgLieElement":
        return DgLieElement(self.algebra, self.k, self.algebra.field.reduce(-self.vec))

    def __rmul__(self, c) -> "DgLieElement":
        c = self.algebra.field.convert(c)
        return DgLieElement(self.algebra, self.k, self.algebra.field.reduce(self.vec * c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DgLieElement):
            return NotImplemented
        return other.algebra is self.algebra and other.k == self.k and bool(np.all(self.vec == other.vec))

    __hash__ = None

    def is_zero(self) -> bool:
        return not np.any(self.vec != 0)

    def in_L(self) -> bool:
        a = self.algebra
        for b in a.scheme(self.k).blocks:
            if b.key[0] not in L_SORTS and np.any(self.vec[b.offset : b.offset + b.size] != 0):
                return False
        return True

    def component(self, key: tuple) -> np.ndarray:
        b = self.algebra.scheme(self.k).block(key)
        return self.vec[b.offset : b.offset + b.size].reshape(b.shape)

    def nonzero_components(self) -> list[tuple]:
        return [b.key for b in self.algebra.scheme(self.k).blocks if np.any(self.vec[b.offset : b.offset + b.size] != 0)]

    def L_vector(self) -> np.ndarray:
        return self.vec[self.algebra.l_indices(self.k)]


def project_window(x, s: int):
    """Project an element or classical point onto the window ``[a, s]``."""
    if isinstance(x, ClassicalPoint):
        return x.project(s)
    return x.algebra.project(x, s)


def build_ambient(ring: GradedRing, module: GradedModule, h: HilbertData, window: tuple[int, int], field: Field = QQ) -> StretchDgLie:
    return StretchDgLie(ring, module, h, window, field)


# ----------------------------------------------------------------- classical points


@dataclass(frozen=True, eq=False)
class ClassicalPoint:
    """A strict Maurer-Cartan element: an ``A_+``-action ``phi`` on ``S`` and a map ``psi: S → M``."""

    element: DgLieElement

    def __post_init__(self):
        g = self.element
        if g.k != 1 or not g.in_L():
            raise ContractError("a classical point is a degree-1 element of L")
        if not g.algebra.mc_residual(g).is_zero():
            raise ContractError("element does not satisfy the Maurer-Cartan equation")

    @property
    def algebra(self) -> StretchDgLie:
        return self.element.algebra

    def psi(self, s: int) -> np.ndarray:
        """``dim M_s × h(s)`` matrix of ``S_s → M_s``."""
        alg = self.algebra
        key = ("psi", 1, s, (s,))
        if key in alg.scheme(1):
            return self.element.component(key)
        return alg.field.zeros((alg.module.dim(s), alg.h(s)))

    def phi(self, p: int, s_in: int) -> np.ndarray:
        """Array ``(h(s_in+p), dim A_p, h(s_in))`` of ``A_p ⊗ S_{s_in} → S_{s_in+p}``."""
        alg = self.algebra
        key = ("phi", 1, s_in + p, (p, s_in))
        if key in alg.scheme(1):
            return self.element.component(key)
        return alg.field.zeros((alg.h(s_in + p), alg.ring.dim(p), alg.h(s_in)))

    def project(self, s: int) -> "ClassicalPoint":
        return ClassicalPoint(self.algebra.project(self.element, s))


def strict_element(algebra: StretchDgLie, phi: dict[tuple[int, int], np.ndarray], psi: dict[int, np.ndarray]) -> DgLieElement:
    """Assemble a degree-1 element from ``phi[(p, s_in)]`` and ``psi[s]`` arrays."""
    parts = {}
    for (p, s_in), arr in phi.items():
        key = ("phi", 1, s_in + p, (p, s_in))
        if key in algebra.scheme(1):
            parts[key] = arr
    for s, arr in psi.items():
        key = ("psi", 1, s, (s,))
        if key in algebra.scheme(1):
            parts[key] = arr
    return algebra.element_from_components(1, parts)


def classical_point_from_submodule(algebra: StretchDgLie, sub: SubmodulePoint) -> ClassicalPoint:
    """Restrict the module action to ``S`` (``phi``) and take ``psi`` to be the inclusion."""
    module, field = algebra.module, algebra.field
    a, t = algebra.window
    basis = {s: sub.basis[s].with_field(field) if s in sub.basis else ExactMatrix.zeros(module.dim(s), 0, field) for s in range(a, t + 1)}
    for s in range(a, t + 1):
        if basis[s].cols != algebra.h(s):
            raise ContractError(f"submodule has dimension {basis[s].cols} at degree {s}, hilbert value is {algebra.h(s)}")
    bad = check_closed(SubmodulePoint(basis, field), module)
    if bad is not None:
        s, p, j = bad
        raise ContractError(f"submodule not closed: A_{p} times basis vector {j} of degree {s} leaves S_{s + p}")
    phi, psi = {}, {}
    for s_in in range(a, t + 1):
        psi[s_in] = basis[s_in].to_dense()
        for p in range(1, t - s_in + 1):
            src = basis[s_in]
            if src.cols == 0 or basis[s_in + p].cols == 0:
                continue
            coords = solve_many(basis[s_in + p], module.multiply_subspace(p, src, s_in))
            phi[(p, s_in)] = coords.to_dense().reshape(basis[s_in + p].cols, module.ring.dim(p), src.cols)
    return ClassicalPoint(strict_element(algebra, phi, psi))


def rank_locus_predicates(point: ClassicalPoint, b: int) -> dict[str, bool]:
    """``in_M``: ``psi`` injective everywhere; ``in_V``: on ``[a, b]``; ``in_X``: ``in_M`` and the
    action maps ``A_{s-s'} ⊗ S_{s'} → S_s`` are onto for ``t >= s > s' >= b``."""
    alg = point.algebra
    a, t = alg.window
    f = alg.field

    def injective(s):
        return rank_of(ExactMatrix.from_dense(point.psi(s), f)) == alg.h(s)

    in_v = all(injective(s) for s in range(a, min(b, t) + 1))
    in_m = in_v and all(injective(s) for s in range(b + 1, t + 1))
    surj = True
    for s in range(max(b, a) + 1, t + 1):
        for s_in in range(max(b, a), s):
            arr = point.phi(s - s_in, s_in)
            mat = ExactMatrix.from_dense(arr.reshape(arr.shape[0], math.prod(arr.shape[1:])), f)
            if rank_of(mat) != alg.h(s):
                surj = False
    return {"in_M": in_m, "in_V": in_v, "in_X": in_m and surj}


# ------------------------------------------------------------------ tangent complex


def gauge_dim(algebra: StretchDgLie) -> int:
    a, t = algebra.window
    return sum(algebra.h(s) ** 2 for s in range(a, t + 1))


@dataclass(frozen=True)
class GaugeLevel:
    """``⊕_s End(S_s)``, basis ``E_ij`` per degree in row-major order."""

    algebra: StretchDgLie

    @property
    def dim(self) -> int:
        return gauge_dim(self.algebra)

    def labels(self) -> list[tuple[int, int, int]]:
        a, t = self.algebra.window
        return [(s, i, j) for s in range(a, t + 1) for i in range(self.algebra.h(s)) for j in range(self.algebra.h(s))]

    def action_matrix(self, point: "ClassicalPoint") -> ExactMatrix:
        return gauge_matrix(point)


def gauge_matrix(point: ClassicalPoint) -> ExactMatrix:
    """Infinitesimal right action ``ξ ↦ (φ∘(1⊗ξ) − ξ∘φ, ψ∘ξ)`` of ``⊕ End(S_s)`` on ``L^1``."""
    alg = point.algebra
    a, t = alg.window
    pos = alg.l_position(1)
    sch = alg.scheme(1)
    trip = []
    col = 0
    for s in range(a, t + 1):
        n = alg.h(s)
        for i in range(n):
            for j in range(n):
                # psi_s E_ij : column j takes column i of psi_s
                key = ("psi", 1, s, (s,))
                if key in sch:
                    P = point.psi(s)
                    b = sch.block(key)
                    for m in range(P.shape[0]):
                        if P[m, i] != 0:
                            trip.append((pos[b.offset + m * n + j], col, P[m, i]))
                for blk in sch.blocks:
                    if blk.key[0] != "phi":
                        continue
                    _, _, s_out, (p, s_in) = blk.key
                    arr = point.element.component(blk.key)
                    ho, da, hi = blk.shape
                    if s_in == s:
                        for o in range(ho):
                            for aa in range(da):
                                v = arr[o, aa, i]
                                if v != 0:
                                    trip.append((pos[blk.offset + (o * da + aa) * hi + j], col, v))
                    if s_out == s:
                        for aa in range(da):
                            for c in range(hi):
                                v = arr[j, aa, c]
                                if v != 0:
                                    trip.append((pos[blk.offset + (i * da + aa) * hi + c], col, -v))
                col += 1
    return ExactMatrix.from_triplets(alg.dim_L(1), col, trip, alg.field)


@dataclass
class TangentCohomology:
    dims: dict[int, int]
    chain_dims: dict[int, int]
    ranks: dict[int, int]
    augmented: bool

    def __getitem__(self, j: int) -> int:
        return self.dims.get(j, 0)


def tangent_cohomology(point: ClassicalPoint, augmented: bool = True, max_degree: Optional[int] = None, check: bool = True) -> TangentCohomology:
    """Cohomology of ``(L, d + [γ, −])`` with ``L^k`` in degree ``k − 1``.

    With ``augmented`` the gauge Lie algebra sits in degree ``−1``. ``max_degree``
    limits the computation to cohomological degrees ``<= max_degree``.
    """
    alg = point.algebra
    gamma = point.element
    top = alg.max_degree
    if max_degree is not None:
        top = min(top, max_degree + 1)
    chain = {k - 1: alg.dim_L(k) for k in range(1, top + 1)}
    mats: dict[int, ExactMatrix] = {}
    for k in range(1, top + 1):
        if alg.dim_L(k) and alg.dim_L(k + 1) and (max_degree is None or k <= max_degree + 1):
            mats[k] = alg.twisted_matrix(k, gamma)
    ranks: dict[int, int] = {}
    if augmented:
        chain[-1] = gauge_dim(alg)
        g = gauge_matrix(point)
        if check and 1 in mats and not (mats[1] @ g).is_zero():
            raise AssertionError("gauge orbit is not tangent to the Maurer-Cartan locus")
        ranks[0] = rank_of(g)
    if check:
        for k in mats:
            if k + 1 in mats and not (mats[k + 1] @ mats[k]).is_zero():
                raise AssertionError(f"twisted differential squares to nonzero in degree {k}")
    for k, m in mats.items():
        ranks[k] = rank_of(m)
    dims = {}
    lo = -1 if augmented else 0
    for j in range(lo, top):
        k = j + 1
        in_rank = ranks.get(k - 1, 0) if k - 1 >= 1 or augmented else 0
        if k == 0:
            in_rank = 0
        dims[j] = chain.get(j, 0) - ranks.get(k, 0) - in_rank
    if max_degree is not None:
        dims = {j: v for j, v in dims.items() if j <= max_degree}
    return TangentCohomology(dims, chain, ranks, augmented)


# ------------------------------------------------------------------- axiom suite


def _integral(arr: np.ndarray) -> np.ndarray:
    """``int64`` copy when every rational entry is an integer, else the object array itself."""
    if arr.dtype != object:
        return arr
    flat = arr.ravel()
    if all(getattr(v, "denominator", 1) == 1 for v in flat):
        return np.array([int(v) for v in flat], dtype=np.int64).reshape(arr.shape)
    return arr


def _dense_L_differential(alg: StretchDgLie, k: int) -> np.ndarray:
    return _integral(alg.twisted_matrix(k).to_dense())


def _exhaustive_axioms(alg: StretchDgLie) -> dict[str, dict]:
    top = alg.max_degree
    degs = [k for k in range(1, top + 1) if alg.dim_L(k)]
    B = {(i, j): _integral(alg.structure_constants(i, j)) for i in degs for j in degs if i + j <= top}
    D = {k: _dense_L_differential(alg, k) for k in degs if k + 1 <= top}
    red = alg.field.reduce
    out = {}
    ok, n = True, 0
    for (i, j), b in B.items():
        n += b.shape[0] * b.shape[1]
        sign = -1 if (i * j) % 2 else 1
        ok &= bool(np.all(red(b + sign * np.transpose(B[(j, i)], (1, 0, 2))) == 0))
    out["antisymmetry"] = {"mode": "exhaustive", "checked": n, "passed": ok}
    ok, n = True, 0
    for i in degs:
        for j in degs:
            for k in degs:
                if i + j + k > top:
                    continue
                lhs = np.transpose(np.tensordot(B[(j, k)], B[(i, j + k)], axes=([2], [1])), (2, 0, 1, 3))
                t1 = np.tensordot(B[(i, j)], B[(i + j, k)], axes=([2], [0]))
                t2 = np.transpose(np.tensordot(B[(i, k)], B[(j, i + k)], axes=([2], [1])), (0, 2, 1, 3))
                sign = -1 if (i * j) % 2 else 1
                ok &= bool(np.all(red(lhs - t1 - sign * t2) == 0))
                n += lhs.shape[0] * lhs.shape[1] * lhs.shape[2]
    out["jacobi"] = {"mode": "exhaustive", "checked": n, "passed": ok}
    ok, n = True, 0
    for k in D:
        if k + 1 in D:
            ok &= bool(np.all(red(D[k + 1].dot(D[k])) == 0)) if D[k].size and D[k + 1].size else True
        n += alg.dim_L(k)
    out["d_squared"] = {"mode": "exhaustive", "checked": n, "passed": ok}
    ok, n = True, 0
    for (i, j), b in B.items():
        if i + j not in D:
            continue
        lhs = np.tensordot(b, D[i + j], axes=([2], [1]))
        r1 = np.tensordot(D[i], B[(i + 1, j)], axes=([0], [0])) if (i + 1, j) in B else 0
        r2 = np.transpose(np.tensordot(B[(i, j + 1)], D[j], axes=([1], [0])), (0, 2, 1)) if (i, j + 1) in B else 0
        sign = -1 if i % 2 else 1
        ok &= bool(np.all(red(lhs - r1 - sign * r2) == 0))
        n += b.shape[0] * b.shape[1]
    out["leibniz"] = {"mode": "exhaustive", "checked": n, "passed": ok}
    return out


def _random_axioms(alg: StretchDgLie, rng: np.random.Generator, triples: int, support: int) -> dict[str, dict]:
    degs = [k for k in range(1, alg.max_degree + 1) if alg.dim_L(k)]
    anti = jac = leib = dsq = True
    br, d = alg.bracket, alg.differential
    live = [(i, j, k) for i in degs for j in degs for k in degs if i + j + k <= alg.max_degree] or [(degs[0],) * 3]
    for _ in range(triples):
        i, j, k = live[int(rng.integers(len(live)))]
        x, y, z = (alg.random_element(m, rng, support=support) for m in (i, j, k))
        sxy = -1 if (i * j) % 2 else 1
        anti &= br(x, y) == -(sxy * br(y, x))
        jac &= br(x, br(y, z)) == br(br(x, y), z) + sxy * br(y, br(x, z))
        leib &= d(br(x, y)) == br(d(x), y) + (-1 if i % 2 else 1) * br(x, d(y))
        dsq &= d(d(x)).is_zero()
    return {
        "antisymmetry": {"mode": "random", "checked": triples, "passed": bool(anti)},
        "jacobi": {"mode": "random", "checked": triples, "passed": bool(jac)},
        "d_squared": {"mode": "random", "checked": triples, "passed": bool(dsq)},
        "leibniz": {"mode": "random", "checked": triples, "passed": bool(leib)},
    }


def axiom_suite(alg: StretchDgLie, rng: Optional[np.random.Generator] = None, triples: int = 1000, support: int = 4, max_dense: int = 4_000_000) -> dict[str, dict]:
    """Graded antisymmetry, Jacobi, ``d² = 0`` and Leibniz on ``L``.

    Exhaustive on all basis tuples when the dense structure constants are
    small enough, otherwise on ``triples`` random sparse triples.
    """
    degs = [k for k in range(1, alg.max_degree + 1) if alg.dim_L(k)]
    size = sum(alg.dim_L(i) * alg.dim_L(j) * alg.dim_L(k) * alg.dim_L(i + j + k) for i in degs for j in degs for k in degs if i + j + k <= alg.max_degree)
    size = max(size, sum(alg.dim_L(i) * alg.dim_L(j) * alg.dim_L(i + j) for i in degs for j in degs if i + j <= alg.max_degree))
    if size <= max_dense:
        out = _exhaustive_axioms(alg)
    else:
        out = _random_axioms(alg, rng or np.random.default_rng(0), triples, support)
    a, t = alg.window
    out["nilpotency"] = {"mode": "structural", "checked": alg.max_degree, "passed": alg.max_degree <= t - a + 1 and not alg.comps.get(t - a + 2)}
    out["L_closed"] = {"mode": "exhaustive", "checked": sum(alg.dim_L(k) for k in degs), "passed": _l_closed(alg)}
    return out


def _l_closed(alg: StretchDgLie) -> bool:
    """``d`` and the bracket never leave the ``phi``/``psi`` sorts."""
    for k in range(1, alg.max_degree):
        try:
            alg.twisted_matrix(k)
        except AssertionError:
            return False
    for k1 in range(1, alg.max_degree + 1):
        for k2 in range(1, alg.max_degree + 1 - k1):
            e, f, r, _ = alg.table(k1, k2, L_SORTS, L_SORTS)
            if r.size and np.any(alg.l_position(k1 + k2)[r] < 0):
                return False
    return True
