"""Problem instances ``(A, M, h, a, T)`` and the two standard fixtures."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

from .exact import QQ, ExactMatrix, Field
from .graded import GradedModule, GradedRing, HilbertData, SubmodulePoint, build_polynomial_ring, free_module, generated_submodule


@dataclass
class Instance:
    ring: GradedRing
    module: GradedModule
    hilbert: HilbertData
    floor: int
    ceiling: int
    field: Field = QQ
    seed: int = 0
    name: str = ""
    point_seed: Optional[list[list[int]]] = None
    _algebras: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def h(self, s: int) -> int:
        return self.hilbert(s)

    def algebra(self, t: Optional[int] = None, field: Optional[Field] = None):
        from .dgla import StretchDgLie

        t = self.ceiling if t is None else t
        fld = self.field if field is None else field
        key = (t, fld)
        if key not in self._algebras:
            self._algebras[key] = StretchDgLie(self.ring, self.module, self.hilbert.restrict(t), (self.floor, t), fld)
        return self._algebras[key]

    def seed_submodule(self, t: Optional[int] = None, field: Optional[Field] = None) -> SubmodulePoint:
        """Submodule generated by ``point_seed`` (columns spanning ``S_a``)."""
        if self.point_seed is None:
            raise ValueError(f"instance {self.name or '?'} has no reference seed")
        t = self.ceiling if t is None else t
        fld = self.field if field is None else field
        seed = ExactMatrix.from_dense(self.point_seed, fld)
        return generated_submodule(seed, self.module, (self.floor, t))

    def with_ceiling(self, t: int) -> "Instance":
        return Instance(self.ring, self.module, self.hilbert.restrict(t), self.floor, t, self.field, self.seed, self.name, self.point_seed)


def polynomial_instance(num_vars: int, hilbert: Callable[[GradedRing, int], int], ceiling: int, floor: int = 1, field: Field = QQ, name: str = "", point_seed=None) -> Instance:
    """``A`` a polynomial ring, ``M = A_{>=floor}``."""
    ring = build_polynomial_ring(num_vars, ceiling)
    module = free_module(ring, 1, floor=floor)
    h = HilbertData({s: hilbert(ring, s) for s in range(floor, ceiling + 1)}, floor)
    return Instance(ring, module, h, floor, ceiling, field, name=name, point_seed=point_seed)


def line_point_instance(ceiling: int = 6, field: Field = QQ) -> Instance:
    """Two variables, ``h(s) = s``: ideals of a point on the projective line; reference point ``(x)``."""
    return polynomial_instance(2, lambda R, s: s, ceiling, field=field, name="line-point", point_seed=[[1], [0]])


def plane_point_instance(ceiling: int = 4, field: Field = QQ) -> Instance:
    """Three variables, ``h(s) = dim A_s - 1``: ideals of a point in the plane; reference point ``(y, z)``."""
    return polynomial_instance(3, lambda R, s: R.dim(s) - 1, ceiling, field=field, name="plane-point", point_seed=[[0, 0], [1, 0], [0, 1]])
