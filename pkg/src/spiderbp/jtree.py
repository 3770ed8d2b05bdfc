"""Junction trees: exact inference on loopy graphs by clustering.

The variables' co-occurrence graph is triangulated by min-fill elimination
(ties to the lowest id), the elimination cliques are pruned to the maximal
ones, and a maximum-weight spanning forest over separator sizes (ties to
the lexicographically smallest clique pair) links them so the running
intersection property holds: every variable's cliques form a connected
subtree.

Inference then runs on a derived tree-shaped factor graph: each separator
becomes a composite variable, each clique becomes a factor whose tensor is
the clique potential pushed forward onto its separator axes. Two passes of
the ordinary engine are exact there; original-variable marginals come from
marginalizing a covering clique's member-space belief, and any covering
clique gives the same answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .algebra import get_semiring
from .engine import RunConfig, contraction_from_state, run_two_pass
from .errors import CliqueTooLargeError, ValidationError
from .graph import (
    FactorGraph,
    FactorNode,
    GraphMode,
    ObjectType,
    VariableNode,
    validate_graph,
)
from .tensor import DEFAULT_TENSOR_CAP, DenseTensor, Message


@dataclass(frozen=True)
class Clique:
    id: int
    members: tuple  # sorted variable ids
    factor_ids: tuple = ()  # factors folded into this clique's potential


@dataclass(frozen=True)
class JunctionTree:
    cliques: tuple
    #: tree edges as (clique id a, clique id b, separator variable ids), a < b
    edges: tuple
    #: original variable id -> lowest-id covering clique
    variable_to_clique: dict
    elimination_order: tuple


def _primal_adjacency(g):
    adj = {v.id: set() for v in g.variables}
    for f in g.factors:
        scope = sorted(set(f.neighbors))
        for a, b in combinations(scope, 2):
            adj[a].add(b)
            adj[b].add(a)
    return adj


def _min_fill_order(adj):
    """Elimination order greedily minimizing fill-in, ties to lowest id."""
    adj = {v: set(nbrs) for v, nbrs in adj.items()}
    order, cliques = [], []
    remaining = set(adj)
    while remaining:
        best, best_fill = None, None
        for v in sorted(remaining):
            nbrs = adj[v]
            fill = sum(
                1 for a, b in combinations(sorted(nbrs), 2) if b not in adj[a]
            )
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        nbrs = sorted(adj[best])
        cliques.append(tuple(sorted([best] + nbrs)))
        for a, b in combinations(nbrs, 2):
            adj[a].add(b)
            adj[b].add(a)
        for n in nbrs:
            adj[n].discard(best)
        remaining.discard(best)
        order.append(best)
    return order, cliques


def _maximal(cliques):
    """Drop cliques contained in another; duplicates keep first occurrence."""
    kept = []
    for i, c in enumerate(cliques):
        cs = set(c)
        dominated = False
        for j, d in enumerate(cliques):
            if i == j:
                continue
            ds = set(d)
            if cs < ds or (cs == ds and j < i):
                dominated = True
                break
        if not dominated:
            kept.append(c)
    return kept


def _spanning_forest(cliques):
    """Maximum-weight forest over separator sizes (Kruskal).

    Candidate edges are pairs of cliques with a nonempty intersection;
    equal weights break ties by the lexicographically smallest pair of
    member tuples.
    """
    candidates = []
    for i, j in combinations(range(len(cliques)), 2):
        sep = tuple(sorted(set(cliques[i].members) & set(cliques[j].members)))
        if sep:
            candidates.append((i, j, sep))
    candidates.sort(key=lambda e: (-len(e[2]), cliques[e[0]].members, cliques[e[1]].members))
    parent = list(range(len(cliques)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for i, j, sep in candidates:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            edges.append((i, j, sep))
    return tuple(edges)


def running_intersection_holds(tree):
    """True when each variable's cliques form a connected subtree."""
    adj = {c.id: [] for c in tree.cliques}
    for a, b, _sep in tree.edges:
        adj[a].append(b)
        adj[b].append(a)
    var_cliques = {}
    for c in tree.cliques:
        for v in c.members:
            var_cliques.setdefault(v, set()).add(c.id)
    for v, ids in var_cliques.items():
        start = next(iter(ids))
        seen = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for nb in adj[node]:
                if nb in ids and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if seen != ids:
            return False
    return True


def build_junction_tree(g, cap=DEFAULT_TENSOR_CAP):
    """Cluster a spider-mode graph into a junction tree (forest).

    Deterministic throughout: min-fill ties break to the lowest variable
    id, spanning ties to the smallest clique pair, and each factor lands in
    the lowest-id clique covering its scope. Raises CliqueTooLargeError
    when any clique's state space would exceed ``cap`` entries.
    """
    if g.mode is not GraphMode.SPIDER:
        raise ValidationError("junction trees need spider-mode variable semantics")
    report = validate_graph(g)
    report.raise_if_invalid()
    order, raw_cliques = _min_fill_order(_primal_adjacency(g))
    members = _maximal(raw_cliques)
    dims = {v.id: v.obj.dim for v in g.variables}
    for m in members:
        size = math.prod(dims[v] for v in m)
        if size > cap:
            raise CliqueTooLargeError(
                f"clique {list(m)} has {size} states, over the cap of {cap}"
            )

    assigned = {i: [] for i in range(len(members))}
    for f in sorted(g.factors, key=lambda f: f.id):
        if not members:
            break  # variable-free graph: rank-0 factors fold straight into Z
        scope = set(f.neighbors)
        home = next(i for i, m in enumerate(members) if scope <= set(m))
        assigned[home].append(f.id)

    cliques = tuple(
        Clique(i, m, tuple(assigned[i])) for i, m in enumerate(members)
    )
    edges = _spanning_forest(cliques)
    var_to_clique = {}
    for c in cliques:
        for v in c.members:
            var_to_clique.setdefault(v, c.id)
    tree = JunctionTree(cliques, edges, var_to_clique, tuple(order))
    if not running_intersection_holds(tree):
        raise RuntimeError("internal error: running intersection property violated")
    return tree


def _clique_potential(g, semiring, clique):
    """Member-space product of the factors assigned to this clique."""
    member_pos = {v: i for i, v in enumerate(clique.members)}
    member_dims = tuple(g.variable(v).obj.dim for v in clique.members)
    if math.prod(member_dims) > DEFAULT_TENSOR_CAP:
        raise CliqueTooLargeError(
            f"clique {list(clique.members)} exceeds the tensor cap"
        )
    pot = semiring.ones(member_dims)
    grid = np.indices(member_dims)
    for fid in clique.factor_ids:
        f = g.factor(fid)
        if f.rank == 0:
            pot = semiring.array_mul(pot, f.tensor.data[0])
            continue
        index = tuple(grid[member_pos[v]] for v in f.neighbors)
        pot = semiring.array_mul(pot, f.tensor.as_array()[index])
    return np.asarray(pot), member_dims, member_pos


def _separator_index_map(member_dims, member_pos, sep):
    """Flat separator index for every member state, as an int array."""
    grid = np.indices(member_dims)
    idx = np.zeros(member_dims, dtype=np.int64)
    stride = 1
    for v in reversed(sep):
        idx += grid[member_pos[v]] * stride
        stride *= member_dims[member_pos[v]]
    return idx


def _pushforward(semiring, pot, sep_maps, sep_dims):
    """Scatter-add the potential onto its separator axes.

    Accumulates in ascending member-state order so float results are
    reproducible. With no separators this collapses to the total mass.
    """
    if not sep_dims:
        out = semiring.zeros(())
        out[()] = semiring.fold_add(pot.reshape(-1))
        return DenseTensor((), out.reshape(-1))
    out = semiring.zeros(sep_dims).reshape(-1)
    flat_pot = pot.reshape(-1)
    strides = []
    acc = 1
    for d in reversed(sep_dims):
        strides.append(acc)
        acc *= d
    strides = list(reversed(strides))
    flat_idx = np.zeros(flat_pot.shape[0], dtype=np.int64)
    for m, stride in zip(sep_maps, strides):
        flat_idx += m.reshape(-1) * stride
    for i in range(flat_pot.shape[0]):
        j = int(flat_idx[i])
        out[j] = semiring.add(out[j], flat_pot[i])
    return DenseTensor(sep_dims, out)


@dataclass
class JTResult:
    variable_beliefs: dict
    contraction_value: object
    tree: JunctionTree
    derived_graph: FactorGraph
    #: clique id -> unnormalized member-space belief (potential times all
    #: incoming separator messages); every covering clique of a variable
    #: folds to the same marginal
    clique_beliefs: dict = None
    contradiction: bool = False


def run_junction_tree(g, cfg):
    """Exact marginals and contraction value via the junction tree.

    Builds the tree, runs unnormalized two-pass propagation on the derived
    separator/clique graph, recovers each original variable's marginal from
    its covering clique's member-space belief (rescaled per config), and
    closes the diagram for the contraction value.
    """
    semiring = get_semiring(cfg.semiring)
    tree = build_junction_tree(g)
    if not tree.cliques:
        z = semiring.one
        for f in sorted(g.factors, key=lambda f: f.id):
            z = semiring.mul(z, f.tensor.data[0])
        empty = FactorGraph((), (), mode=GraphMode.SPIDER)
        contradiction = semiring.name == "bool" and z == semiring.zero
        return JTResult({}, z, tree, empty, clique_beliefs={}, contradiction=contradiction)
    pots = {}
    for c in tree.cliques:
        pots[c.id] = _clique_potential(g, semiring, c)

    incident = {c.id: [] for c in tree.cliques}
    sep_objs = []
    for eid, (a, b, sep) in enumerate(tree.edges):
        dim = math.prod(g.variable(v).obj.dim for v in sep)
        name = "sep" + str(eid) + "(" + ",".join(str(v) for v in sep) + ")"
        sep_objs.append(ObjectType(name, dim))
        incident[a].append(eid)
        incident[b].append(eid)

    derived_vars = tuple(
        VariableNode(eid, obj) for eid, obj in enumerate(sep_objs)
    )
    derived_factors = []
    for c in tree.cliques:
        pot, member_dims, member_pos = pots[c.id]
        eids = sorted(incident[c.id])
        sep_maps = [
            _separator_index_map(member_dims, member_pos, tree.edges[e][2])
            for e in eids
        ]
        sep_dims = tuple(sep_objs[e].dim for e in eids)
        if math.prod(sep_dims) > DEFAULT_TENSOR_CAP:
            raise CliqueTooLargeError(
                f"separator space for clique {list(c.members)} exceeds the tensor cap"
            )
        derived_factors.append(
            FactorNode(c.id, _pushforward(semiring, pot, sep_maps, sep_dims), tuple(eids))
        )
    derived = FactorGraph(derived_vars, tuple(derived_factors), mode=GraphMode.SPIDER)

    run_cfg = RunConfig(semiring=cfg.semiring, schedule="tree", normalize=False)
    state, _ = run_two_pass(derived, run_cfg)
    z = contraction_from_state(derived, semiring, state)

    clique_beliefs = {}
    for c in tree.cliques:
        pot, member_dims, member_pos = pots[c.id]
        arr = pot
        for axis, eid in enumerate(sorted(incident[c.id])):
            msg = state.var_to_factor[(eid, c.id, axis)]
            sep_map = _separator_index_map(member_dims, member_pos, tree.edges[eid][2])
            arr = semiring.array_mul(arr, np.asarray(msg.values)[sep_map])
        clique_beliefs[c.id] = DenseTensor(member_dims, np.asarray(arr).reshape(-1))

    result = JTResult({}, z, tree, derived, clique_beliefs=clique_beliefs)
    for v in g.variables:
        cid = tree.variable_to_clique[v.id]
        folded = marginal_from_clique(result, cid, v.id, cfg)
        result.variable_beliefs[v.id] = Message(v.obj, folded.values)
    result.contradiction = semiring.name == "bool" and z == semiring.zero
    return result


def marginal_from_clique(result, cid, variable_id, cfg):
    """Marginal of one variable folded out of one covering clique's belief.

    Every clique containing the variable must yield the same (rescaled)
    answer; exposed so callers can verify that consistency.
    """
    from .errors import ZeroMessageError

    semiring = get_semiring(cfg.semiring)
    clique = result.tree.cliques[cid]
    if variable_id not in clique.members:
        raise ValidationError(
            f"variable {variable_id} is not a member of clique {cid} {list(clique.members)}"
        )
    belief = result.clique_beliefs[cid]
    pos = clique.members.index(variable_id)
    dim = belief.shape[pos]
    moved = np.moveaxis(belief.as_array(), pos, -1)
    rows = moved.reshape(-1, dim)
    acc = rows[0]
    for i in range(1, rows.shape[0]):
        acc = semiring.array_add(acc, rows[i])
    values = np.asarray(acc).copy()
    if cfg.normalize and semiring.has_normalize:
        try:
            values = semiring.normalize(values)
        except ZeroMessageError:
            pass  # dead support: report the raw zeros
    obj = ObjectType(f"v{variable_id}", dim)
    return Message(obj, values)
