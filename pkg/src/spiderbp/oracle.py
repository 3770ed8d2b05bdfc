"""Exhaustive ground truth by brute-force enumeration.

Everything here is deliberately independent of the message-passing engine:
results come from materializing the full joint table and folding it in a
fixed ascending order, so these functions can arbitrate when the fast path
and a test disagree. A hard size cap trades silent slowness for a loud
error.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from .algebra import get_semiring
from .errors import TooLargeError, ValidationError
from .graph import GraphMode

#: cap on the number of enumerated assignments
DEFAULT_ORACLE_CAP = 1 << 22


def assignments(dims):
    """All index tuples for the given dims, ascending in row-major order."""
    return product(*(range(d) for d in dims))


def _guard(dims, cap):
    total = math.prod(dims) if dims else 1
    if total > cap:
        raise TooLargeError(f"{total} assignments exceed the oracle cap of {cap}")
    return total


def _lifted_factor(factor, var_pos, grid, dims):
    """Factor table broadcast over the full joint shape.

    Repeated neighbors are handled by advanced indexing: each axis of the
    factor is indexed by its variable's position in the joint grid, so a
    factor touching a variable twice lands on the diagonal.
    """
    arr = factor.tensor.as_array()
    if factor.rank == 0:
        return arr.reshape(()) if not dims else np.broadcast_to(arr.reshape(()), dims)
    index = tuple(grid[var_pos[v]] for v in factor.neighbors)
    return arr[index]


def joint_table(g, semiring):
    """Full joint array over variable assignments (spider semantics)."""
    semiring = get_semiring(semiring)
    dims = tuple(v.obj.dim for v in g.variables)
    var_pos = {v.id: i for i, v in enumerate(g.variables)}
    grid = np.indices(dims) if dims else None
    table = semiring.ones(dims)
    for f in sorted(g.factors, key=lambda f: f.id):
        if f.rank == 0:
            table = semiring.array_mul(table, f.tensor.data[0])
        else:
            table = semiring.array_mul(table, _lifted_factor(f, var_pos, grid, dims))
    return np.asarray(table)


def _wire_table(g, semiring):
    """Joint array over independent per-wire indices (bipartite semantics)."""
    wires = g.wires
    wire_pos = {w: i for i, w in enumerate(wires)}
    dims = tuple(g.factor(f).tensor.shape[axis] for f, axis in wires)
    grid = np.indices(dims) if dims else None
    table = semiring.ones(dims)
    for f in sorted(g.factors, key=lambda f: f.id):
        if f.rank == 0:
            table = semiring.array_mul(table, f.tensor.data[0])
            continue
        index = tuple(grid[wire_pos[(f.id, axis)]] for axis in range(f.rank))
        table = semiring.array_mul(table, f.tensor.as_array()[index])
    for v in g.variables:
        inc = g.incident[v.id]
        if not inc:
            continue
        index = tuple(grid[wire_pos[w]] for w in inc)
        table = semiring.array_mul(table, v.tensor.as_array()[index])
    return np.asarray(table)


def exact_contraction(g, semiring, cap=DEFAULT_ORACLE_CAP):
    """Semiring-sum of the joint table over every assignment.

    In spider mode an assignment picks one state per variable; in bipartite
    mode every wire carries its own index and variable-node tensors join the
    product. Terms fold in ascending row-major order.
    """
    semiring = get_semiring(semiring)
    if g.mode is GraphMode.BIPARTITE:
        dims = tuple(g.factor(f).tensor.shape[axis] for f, axis in g.wires)
        _guard(dims, cap)
        table = _wire_table(g, semiring)
        free = semiring.one
        for v in g.variables:
            if not g.incident[v.id]:
                # a variable with no wires contributes one term per state
                free = semiring.mul(free, semiring.fold_add(v.tensor.data if v.tensor else semiring.ones((v.obj.dim,))))
        return semiring.mul(semiring.fold_add(table.reshape(-1)), free)
    dims = tuple(v.obj.dim for v in g.variables)
    _guard(dims, cap)
    table = joint_table(g, semiring)
    return semiring.fold_add(table.reshape(-1))


def exact_marginal(g, semiring, variable_id, cap=DEFAULT_ORACLE_CAP, table=None):
    """Unnormalized marginal of one variable by exhaustive summation.

    Component j sums the joint over every assignment that pins the variable
    to j. Spider mode only. Pass a precomputed ``joint_table`` as ``table``
    to amortize its construction over several variables.
    """
    semiring = get_semiring(semiring)
    if g.mode is not GraphMode.SPIDER:
        raise ValidationError("exact_marginal needs spider-mode variable semantics")
    dims = tuple(v.obj.dim for v in g.variables)
    _guard(dims, cap)
    pos = {v.id: i for i, v in enumerate(g.variables)}[variable_id]
    if table is None:
        table = joint_table(g, semiring)
    rows = np.moveaxis(np.asarray(table), pos, -1).reshape(-1, dims[pos])
    return np.asarray(semiring.fold_axis_add(rows, 0)).copy()


def exact_argmax(g, cap=DEFAULT_ORACLE_CAP):
    """Lexicographically least maximizer of the product, plus its value.

    Works on nonnegative-real tables (prob/maxtimes storage). Returns
    (assignment dict keyed by variable id, max product).
    """
    if g.mode is not GraphMode.SPIDER:
        raise ValidationError("exact_argmax needs spider-mode variable semantics")
    semiring = get_semiring("maxtimes")
    dims = tuple(v.obj.dim for v in g.variables)
    _guard(dims, cap)
    table = joint_table(g, semiring)
    if not dims:
        return {}, float(table.reshape(())[()])
    flat = np.asarray(table, dtype=np.float64).reshape(-1)
    best = int(np.argmax(flat))  # first hit = lexicographically least
    index = np.unravel_index(best, dims)
    assignment = {v.id: int(index[i]) for i, v in enumerate(g.variables)}
    return assignment, float(flat[best])
