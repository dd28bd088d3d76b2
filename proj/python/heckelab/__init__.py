"""Python access to the heckelab C++ core.

Functions returning reports give plain dicts decoded from the same JSON the
command line tool writes. Matrices come back as complex numpy arrays.
"""

import json as _json

from . import _core
from ._core import (
    InputError,
    classical_operator,
    conductor_exponent,
    cusp_dimension,
    fixed_dimensions,
    new_dimension,
    supported_basis,
)

__all__ = [
    "InputError",
    "characterize",
    "classical_operator",
    "conductor_exponent",
    "coset_table",
    "cusp_dimension",
    "fixed_dimensions",
    "new_dimension",
    "structure_constants",
    "supported_basis",
    "verify_induced",
    "verify_relations",
]


def coset_table(p, n):
    return _json.loads(_core.coset_table(p, n))


def structure_constants(p, n, conrey):
    return _json.loads(_core.structure_constants(p, n, conrey))


def verify_relations(p, n, conrey):
    return _json.loads(_core.verify_relations(p, n, conrey))


def verify_induced(p, n, conrey, seed=1, samples=100):
    return _json.loads(_core.verify_induced(p, n, conrey, seed, samples))


def characterize(fixture, seed=1):
    return _json.loads(_core.characterize(str(fixture), seed))
