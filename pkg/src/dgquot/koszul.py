"""Free graded-commutative presentations dual to the window algebras.

Generator ``ξ_e`` is dual to the basis vector ``e ∈ L^k`` and sits in degree
``1 - k``. The differential is determined by

    (d ⊗ 1) Γ = (1 ⊗ d_L) Γ + Γ ∘ Γ,   Γ = Σ_e ξ_e ⊗ e,

so evaluating ``d ξ_u`` at degree-0 coordinates ``γ`` returns the
``u``-coefficient of ``d_L γ + γ ∘ γ`` (the Maurer-Cartan residual).

Polynomials are dicts ``{monomial: coefficient}`` where a monomial is a sorted
tuple of generator ids; odd generators appear at most once.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .dgla import L_SORTS, StretchDgLie
from .exact import ContractError, Field, field_from_name

FORMAT = "dgquot-cdga/1"

Monomial = tuple[int, ...]
Polynomial = dict[Monomial, object]


def label_to_str(label: tuple) -> str:
    sort, k, s, ins, pos = label
    return f"{sort}/{k}/{s}/{'.'.join(map(str, ins))}/{'.'.join(map(str, pos))}"


def component_to_str(key: tuple) -> str:
    sort, k, s, ins = key[:4]
    return f"{sort}/{k}/{s}/{'.'.join(map(str, ins))}"


def label_from_str(text: str) -> tuple:
    sort, k, s, ins, pos = text.split("/")
    return (sort, int(k), int(s), tuple(int(v) for v in ins.split(".")), tuple(int(v) for v in pos.split(".")))


@dataclass(frozen=True)
class Generator:
    id: int
    degree: int
    label: str


@dataclass
class CdgaPresentation:
    generators: list[Generator]
    differential: dict[int, Polynomial]
    field: Field
    header: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self._deg = np.array([g.degree for g in self.generators], dtype=np.int64)
        self._by_label = {g.label: g.id for g in self.generators}

    def degree(self, gid: int) -> int:
        return int(self._deg[gid])

    def count_by_degree(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for g in self.generators:
            out[g.degree] = out.get(g.degree, 0) + 1
        return out

    def id_of(self, label: str) -> int:
        try:
            return self._by_label[label]
        except KeyError:
            raise ContractError(f"no generator with label {label}") from None

    def d(self, gid: int) -> Polynomial:
        return self.differential.get(gid, {})

    def evaluate(self, gid: int, point: dict[int, object]):
        """Value of ``d(gid)`` when each degree-0 generator ``j`` takes ``point[j]``."""
        total = self.field.zero
        for mono, c in self.d(gid).items():
            term = c
            for j in mono:
                if self.degree(j) != 0:
                    raise ContractError(f"d({gid}) involves non-degree-0 generator {j}")
                term = term * point.get(j, self.field.zero)
            total = total + term
        if hasattr(self.field, "q"):
            total %= self.field.q
        return total


# ----------------------------------------------------------------- polynomial algebra


def _mul_mono(m1: Monomial, m2: Monomial, deg: np.ndarray) -> Optional[tuple[int, Monomial]]:
    """Graded-commutative product of two monomials: ``(sign, sorted monomial)`` or ``None``."""
    odd2 = [j for j in m2 if deg[j] % 2]
    sign = 1
    if odd2:
        for i in m1:
            if deg[i] % 2:
                if i in odd2:
                    return None
                sign *= -1 if sum(1 for j in odd2 if j < i) % 2 else 1
    return sign, tuple(sorted(m1 + m2))


def _add_term(poly: Polynomial, mono: Monomial, c, fld: Field) -> None:
    v = poly.get(mono, fld.zero) + c
    if hasattr(fld, "q"):
        v %= fld.q
    if v == 0:
        poly.pop(mono, None)
    else:
        poly[mono] = v


def poly_mul(p1: Polynomial, p2: Polynomial, deg: np.ndarray, fld: Field) -> Polynomial:
    out: Polynomial = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            r = _mul_mono(m1, m2, deg)
            if r is not None:
                _add_term(out, r[1], r[0] * c1 * c2, fld)
    return out


def apply_d(pres: CdgaPresentation, poly: Polynomial) -> Polynomial:
    """Extend ``d`` from generators to polynomials as a degree +1 derivation."""
    deg, fld = pres._deg, pres.field
    out: Polynomial = {}
    for mono, c in poly.items():
        before = 0
        for i, g in enumerate(mono):
            dg = pres.d(g)
            if dg:
                sign = -1 if before % 2 else 1
                prefix = {mono[:i]: sign * c}
                suffix = {mono[i + 1 :]: fld.one}
                for m, v in poly_mul(poly_mul(prefix, dg, deg, fld), suffix, deg, fld).items():
                    _add_term(out, m, v, fld)
            before += int(deg[g])
    return out


# ---------------------------------------------------------------------- emission


def algebra_fingerprint(alg: StretchDgLie) -> str:
    """Hash of the instance data an algebra was built from."""
    a, t = alg.window
    text = json.dumps(
        {
            "window": [a, t],
            "hilbert": [alg.h(s) for s in range(a, t + 1)],
            "ring": [alg.ring.dim(s) for s in range(1, t + 1)],
            "module": [alg.module.dim(s) for s in range(a, t + 1)],
            "field": alg.field.name,
        },
        sort_keys=True,
    )
    return hashlib.sha256(text.encode()).hexdigest()


def emit_cdga(alg: StretchDgLie, instance_hash: Optional[str] = None) -> CdgaPresentation:
    fld = alg.field
    gens: list[Generator] = []
    offsets: dict[int, int] = {}
    for k in range(1, alg.max_degree + 1):
        offsets[k] = len(gens)
        sch = alg.scheme(k)
        for gi in alg.l_indices(k):
            gens.append(Generator(len(gens), 1 - k, label_to_str(sch.label(int(gi)))))
    deg = np.array([g.degree for g in gens], dtype=np.int64)
    diff: dict[int, Polynomial] = {}

    def gid(k, global_idx):
        return offsets[k] + int(pos[k][global_idx])

    pos = {k: alg.l_position(k) for k in offsets}
    for k in offsets:
        if k + 1 not in offsets:
            continue
        # linear part: (-1)^{|ξ_e|} (d_L e)_u ξ_e
        D = alg.twisted_matrix(k)
        sign = -1 if (1 - k) % 2 else 1
        for r, c, v in D.entries:
            _add_term(diff.setdefault(offsets[k + 1] + r, {}), (offsets[k] + c,), sign * v, fld)
    for k1 in offsets:
        for k2 in offsets:
            if k1 + k2 not in offsets:
                continue
            e, f, r, sgn = alg.table(k1, k2, L_SORTS, L_SORTS)
            base = -1 if (k1 * (1 - k2)) % 2 else 1
            for ei, fi, ri, si in zip(e.tolist(), f.tolist(), r.tolist(), sgn.tolist()):
                ge, gf = gid(k1, ei), gid(k2, fi)
                res = _mul_mono((ge,), (gf,), deg)
                if res is None:
                    continue
                _add_term(diff.setdefault(gid(k1 + k2, ri), {}), res[1], fld.convert(base * si * res[0]), fld)
    diff = {g: p for g, p in diff.items() if p}
    header = {"instance": instance_hash or algebra_fingerprint(alg), "window": list(alg.window), "field": fld.name}
    return CdgaPresentation(gens, diff, fld, header)


def check_d_squared(pres: CdgaPresentation) -> bool:
    return all(not apply_d(pres, pres.d(g.id)) for g in pres.generators)


def d_squared_failures(pres: CdgaPresentation) -> list[int]:
    return [g.id for g in pres.generators if apply_d(pres, pres.d(g.id))]


def evaluate_at(pres: CdgaPresentation, alg: StretchDgLie, gamma) -> np.ndarray:
    """Evaluate the differentials of all degree ``-1`` generators at a degree-1 element."""
    vals = gamma.L_vector()
    n0 = alg.dim_L(1)
    point = {j: vals[j] for j in range(n0) if vals[j] != 0}
    ids = [g.id for g in pres.generators if g.degree == -1]
    out = alg.field.zeros(len(ids))
    for i, gid in enumerate(ids):
        out[i] = pres.evaluate(gid, point)
    return out


# ------------------------------------------------------------------ tower maps


@dataclass(frozen=True)
class TowerMorphism:
    source: CdgaPresentation
    target: CdgaPresentation
    mapping: dict[int, int]

    @property
    def new_generators(self) -> list[int]:
        hit = set(self.mapping.values())
        return [g.id for g in self.target.generators if g.id not in hit]

    def push(self, poly: Polynomial) -> Polynomial:
        deg, fld = self.target._deg, self.target.field
        out: Polynomial = {}
        for mono, c in poly.items():
            img = {(): c}
            for g in mono:
                img = poly_mul(img, {(self.mapping[g],): fld.one}, deg, fld)
            for m, v in img.items():
                _add_term(out, m, v, fld)
        return out

    def commutes(self) -> bool:
        """``d_t ∘ f = f ∘ d_s`` on every source generator."""
        return all(self.push(self.source.d(g.id)) == self.target.d(self.mapping[g.id]) for g in self.source.generators)

    def compose(self, other: "TowerMorphism") -> "TowerMorphism":
        if other.source is not self.target:
            raise ContractError("morphisms are not composable")
        return TowerMorphism(self.source, other.target, {g: other.mapping[v] for g, v in self.mapping.items()})


def tower_morphism(source: CdgaPresentation, target: CdgaPresentation) -> TowerMorphism:
    """Send each generator of the smaller window to its namesake in the larger one."""
    sw, tw = source.header.get("window"), target.header.get("window")
    if sw and tw and (sw[0] != tw[0] or sw[1] > tw[1]):
        raise ContractError(f"no tower map from window {sw} to {tw}")
    mapping = {}
    for g in source.generators:
        if g.label not in target._by_label:
            raise ContractError(f"generator label {g.label} missing from the target presentation")
        tid = target._by_label[g.label]
        if target.generators[tid].degree != g.degree:
            raise ContractError(f"generator {g.label} changes degree")
        mapping[g.id] = tid
    return TowerMorphism(source, target, mapping)


# ---------------------------------------------------------------- serialization


def _sorted_terms(poly: Polynomial) -> list[tuple[Monomial, object]]:
    return sorted(poly.items(), key=lambda mc: (len(mc[0]), mc[0]))


def dumps(pres: CdgaPresentation) -> str:
    fld = pres.field
    doc = {
        "format": FORMAT,
        "header": pres.header,
        "generators": [[g.id, g.degree, g.label] for g in pres.generators],
        "differential": [
            [gid, [[list(m), fld.format(c)] for m, c in _sorted_terms(pres.differential[gid])]]
            for gid in sorted(pres.differential)
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def loads(text: str) -> CdgaPresentation:
    doc = json.loads(text)
    if doc.get("format") != FORMAT:
        raise ContractError(f"not a {FORMAT} file")
    fld = field_from_name(doc["header"]["field"])
    gens = [Generator(int(i), int(d), str(lbl)) for i, d, lbl in doc["generators"]]
    diff = {int(gid): {tuple(m): fld.parse(c) for m, c in terms} for gid, terms in doc["differential"]}
    return CdgaPresentation(gens, diff, fld, dict(doc["header"]))
