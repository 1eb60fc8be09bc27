"""Finite algebras, term operations and hyper-satisfaction checks."""

from ._hyperq import (
    Algebra,
    HyperqError,
    catalog,
    catalog_names,
    check,
    clone_slice,
    derived_algebras,
    direct_product,
    is_abelian,
    is_isomorphic,
    parse_algebra,
    reduced_product,
    replay,
    verify,
)

__all__ = [
    "Algebra",
    "HyperqError",
    "catalog",
    "catalog_names",
    "check",
    "clone_slice",
    "derived_algebras",
    "direct_product",
    "is_abelian",
    "is_isomorphic",
    "parse_algebra",
    "reduced_product",
    "replay",
    "verify",
]
