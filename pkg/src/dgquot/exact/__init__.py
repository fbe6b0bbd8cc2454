from .field import GF, QQ, ContractError, Field, PrimeField, Rationals, field_from_name
from .index import IndexScheme, tensor_hom_dims
from .matrix import ExactMatrix, column_space_basis, inverse, rank_kernel, rank_of, solve_linear, solve_many

__all__ = [
    "GF", "QQ", "ContractError", "Field", "PrimeField", "Rationals", "field_from_name",
    "IndexScheme", "tensor_hom_dims",
    "ExactMatrix", "column_space_basis", "inverse", "rank_kernel", "rank_of", "solve_linear", "solve_many",
]
