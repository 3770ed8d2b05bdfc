"""The message-passing engine: schedules, convergence, contraction, decoding.

Messages live on directed wires. Because a factor can touch the same
variable on several axes, wires are keyed by ``(factor id, axis)``:
``factor_to_var[(f, axis)]`` flows from the factor to the variable on that
axis, and ``var_to_factor[(v, f, axis)]`` flows back. Variable updates take
the pointwise product of the other incoming messages (the copy tensor stays
virtual); factor updates contract the factor against the other incoming
messages. In bipartite mode a variable node carries an explicit tensor and
is updated exactly like a factor, with its axes paired to the incident
wires sorted by ``(factor id, axis)``; its per-node "belief" is then a
tensor over those axes rather than a length-dim message.

Two schedules are provided. ``sync`` recomputes every message from a
snapshot of the previous state (Jacobi style) until the largest
componentwise change falls to the tolerance; on a tree the fixed point is
reached within diameter sweeps. ``tree`` performs the classic two passes,
leaves to root then root to leaves, and is exact on trees in a single
execution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import get_semiring
from .errors import (
    ContradictionError,
    NotATreeError,
    NoTotalOrderError,
    ValidationError,
    ZeroMessageError,
)
from .graph import GraphMode, components, tree_info, validate_graph
from .tensor import DenseTensor, Message, contract_to_axis, full_contraction, hadamard

SCHEDULES = ("sync", "tree")


@dataclass(frozen=True)
class RunConfig:
    """Knobs for one run. ``semiring`` is a registry name.

    ``damping`` blends each new message with the old one as
    (1 - damping) * new + damping * old and is only allowed for prob with
    the sync schedule. ``normalize`` rescales messages when the semiring
    knows how; exact algebras ignore it. ``seed`` is reserved for
    randomized schedules.
    """

    semiring: str = "prob"
    schedule: str = "sync"
    max_iters: int = 1000
    tol: float = 1e-9
    damping: float = 0.0
    normalize: bool = True
    seed: int = 0

    def __post_init__(self):
        get_semiring(self.semiring)
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}, got {self.schedule!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must lie in [0, 1)")
        if self.damping > 0.0 and self.semiring != "prob":
            raise ValueError("damping is only supported for the prob semiring")
        if self.damping > 0.0 and self.schedule != "sync":
            raise ValueError("damping is only supported with the sync schedule")


@dataclass(frozen=True)
class MessageState:
    """Immutable snapshot of every directed message plus run counters."""

    var_to_factor: dict
    factor_to_var: dict
    iteration: int = 0
    residual: float = math.inf


@dataclass
class BPResult:
    state: MessageState
    converged: bool
    iterations: int
    residual: float
    variable_beliefs: dict = field(default_factory=dict)
    factor_beliefs: dict = field(default_factory=dict)
    contradiction: bool = False
    contradiction_wire: tuple = None


def _directed_wires(g):
    """All (kind, factor, axis) in deterministic order, v->f first."""
    v2f = [("v2f", f, a) for f, a in g.wires]
    f2v = [("f2v", f, a) for f, a in g.wires]
    return v2f + f2v


def _wire_var(g, fid, axis):
    return g.factor(fid).neighbors[axis]


def init_messages(g, cfg):
    """Unit (all-ones) messages on every directed wire, iteration 0."""
    semiring = get_semiring(cfg.semiring)
    v2f, f2v = {}, {}
    for fid, axis in g.wires:
        vid = _wire_var(g, fid, axis)
        obj = g.variable(vid).obj
        unit = Message(obj, semiring.ones((obj.dim,)))
        if cfg.normalize and semiring.has_normalize:
            unit = Message(obj, semiring.normalize(unit.values))
        v2f[(vid, fid, axis)] = unit
        f2v[(fid, axis)] = unit
    return MessageState(v2f, f2v, iteration=0, residual=math.inf)


def _node_axis_order(g, vid):
    """Axis pairing of a bipartite variable tensor: wires sorted ascending."""
    return tuple(sorted(g.incident[vid]))


def _finish(semiring, cfg, values, wire, obj):
    """Apply per-config normalization to a freshly computed message."""
    if cfg.normalize and semiring.has_normalize:
        try:
            values = semiring.normalize(values)
        except ZeroMessageError:
            raise ContradictionError(wire) from None
    return Message(obj, np.asarray(values))


def update_variable_message(g, state, cfg, vid, out_wire):
    """Message a variable sends toward ``out_wire`` = (factor id, axis).

    Spider mode: pointwise product of the other incoming messages, the unit
    message when there are none. Bipartite mode: contract the node's own
    tensor against the other incoming messages instead.
    """
    semiring = get_semiring(cfg.semiring)
    v = g.variable(vid)
    incoming_wires = [w for w in g.incident[vid] if w != out_wire]
    if g.mode is GraphMode.BIPARTITE:
        order = _node_axis_order(g, vid)
        target = order.index(out_wire)
        msgs = [state.factor_to_var[w] for w in order if w != out_wire]
        out = contract_to_axis(semiring, v.tensor, target, msgs, out_obj=v.obj)
        return _finish(semiring, cfg, out.values, ("v2f",) + out_wire, v.obj)
    if not incoming_wires:
        values = semiring.ones((v.obj.dim,))
    else:
        values = hadamard(
            semiring, [state.factor_to_var[w] for w in incoming_wires]
        ).values
    return _finish(semiring, cfg, values, ("v2f",) + out_wire, v.obj)


def update_factor_message(g, state, cfg, fid, out_axis):
    """Message a factor sends out of one axis.

    Contracts the factor tensor against the variable-to-factor messages on
    every other axis, summing in ascending row-major order.
    """
    semiring = get_semiring(cfg.semiring)
    f = g.factor(fid)
    msgs = []
    for axis in range(f.rank):
        if axis == out_axis:
            continue
        vid = f.neighbors[axis]
        msgs.append(state.var_to_factor[(vid, fid, axis)])
    obj = g.variable(f.neighbors[out_axis]).obj
    out = contract_to_axis(semiring, f.tensor, out_axis, msgs, out_obj=obj)
    return _finish(semiring, cfg, out.values, ("f2v", fid, out_axis), obj)


def _damp(semiring, cfg, new, old):
    if cfg.damping == 0.0:
        return new
    lam = cfg.damping
    blended = (1.0 - lam) * np.asarray(new.values) + lam * np.asarray(old.values)
    return Message(new.obj, blended)


def sweep_synchronous(g, state, cfg):
    """One Jacobi sweep: every message recomputed from the old snapshot.

    Returns the new state; its ``residual`` is the largest componentwise
    change (after normalization and damping), which doubles as an exact
    change flag for the exact semirings.
    """
    semiring = get_semiring(cfg.semiring)
    new_v2f, new_f2v = {}, {}
    residual = 0.0
    for kind, fid, axis in _directed_wires(g):
        if kind == "v2f":
            vid = _wire_var(g, fid, axis)
            msg = update_variable_message(g, state, cfg, vid, (fid, axis))
            old = state.var_to_factor[(vid, fid, axis)]
            msg = _damp(semiring, cfg, msg, old)
            new_v2f[(vid, fid, axis)] = msg
        else:
            msg = update_factor_message(g, state, cfg, fid, axis)
            old = state.factor_to_var[(fid, axis)]
            msg = _damp(semiring, cfg, msg, old)
            new_f2v[(fid, axis)] = msg
        residual = max(residual, semiring.max_distance(msg.values, old.values))
    return MessageState(new_v2f, new_f2v, iteration=state.iteration + 1, residual=residual)


def two_pass_schedule(g, root=None):
    """Directed-wire order for one exact tree sweep.

    First every wire pointing toward the root in nondecreasing
    distance-from-leaves order, then the same wires reversed. ``root`` is a
    variable id; components not containing it are rooted at their smallest
    variable id. Ties break by ascending node id, so the order is
    deterministic. Entries are ``(kind, factor id, axis)`` with kind
    "v2f" or "f2v".
    """
    info = tree_info(g)
    if not info.is_tree:
        raise NotATreeError("two-pass scheduling needs a cycle-free graph without repeated wires")
    upward = []
    for var_ids, fac_ids in components(g):
        if not var_ids:
            continue  # an isolated rank-0 factor exchanges no messages
        comp_root = root if root in var_ids else var_ids[0]
        upward.extend(_upward_wires(g, comp_root))
    downward = [
        ("f2v" if kind == "v2f" else "v2f", fid, axis)
        for kind, fid, axis in reversed(upward)
    ]
    return upward + downward


def _upward_wires(g, root_vid):
    """Wires of one component pointing toward the root, leaves first."""
    # BFS from the root over (kind, id) nodes, recording each node's parent wire
    parent = {("v", root_vid): None}
    order = [("v", root_vid)]
    frontier = [("v", root_vid)]
    while frontier:
        nxt = []
        for node in frontier:
            kind, nid = node
            if kind == "v":
                nbrs = [("f", fid) for fid, axis in g.incident[nid]]
            else:
                nbrs = [("v", vid) for vid in g.factor(nid).neighbors]
            for nb in sorted(set(nbrs), key=lambda n: n[1]):
                if nb not in parent:
                    parent[nb] = node
                    order.append(nb)
                    nxt.append(nb)
        frontier = nxt
    # deepest nodes emit first; ties break by ascending id
    depth = {}
    for node in order:
        depth[node] = 0 if parent[node] is None else depth[parent[node]] + 1
    wires = []
    for node in sorted(order, key=lambda n: (-depth[n], n[1])):
        if parent[node] is None:
            continue
        kind, nid = node
        pkind, pid = parent[node]
        if kind == "v":
            # variable sends to its parent factor
            axis = next(a for f, a in g.incident[nid] if f == pid)
            wires.append(("v2f", pid, axis))
        else:
            # factor sends to its parent variable
            axis = next(a for a, u in enumerate(g.factor(nid).neighbors) if u == pid)
            wires.append(("f2v", nid, axis))
    return wires


def run_two_pass(g, cfg, root=None):
    """Execute the two-pass schedule once, in order, updating in place.

    Returns (state, contradiction wire or None). A normalized run that hits
    dead support stops at that wire but keeps the messages computed so far.
    """
    schedule = two_pass_schedule(g, root)
    state = init_messages(g, cfg)
    v2f = dict(state.var_to_factor)
    f2v = dict(state.factor_to_var)
    for kind, fid, axis in schedule:
        working = MessageState(v2f, f2v, iteration=state.iteration)
        try:
            if kind == "v2f":
                vid = _wire_var(g, fid, axis)
                v2f[(vid, fid, axis)] = update_variable_message(g, working, cfg, vid, (fid, axis))
            else:
                f2v[(fid, axis)] = update_factor_message(g, working, cfg, fid, axis)
        except ContradictionError as err:
            return MessageState(v2f, f2v, iteration=1, residual=math.inf), err.wire
    return MessageState(v2f, f2v, iteration=1, residual=0.0), None


def _first_zero_wire(g, semiring, state):
    """First all-zero message in deterministic wire order, if any."""
    for kind, fid, axis in _directed_wires(g):
        if kind == "v2f":
            vid = _wire_var(g, fid, axis)
            values = state.var_to_factor[(vid, fid, axis)].values
        else:
            values = state.factor_to_var[(fid, axis)].values
        if all(x == semiring.zero for x in values.tolist()):
            return (kind, fid, axis)
    return None


def beliefs(g, state, cfg):
    """Per-variable and per-factor beliefs from a message state.

    A variable's belief is the pointwise product of everything flowing into
    it (the unit for an isolated variable); a factor's belief is its tensor
    times the incoming messages, one per axis. Normalized per config. In
    bipartite mode variable beliefs are node-space tensors instead.
    """
    semiring = get_semiring(cfg.semiring)
    var_beliefs = {}
    zero_wire = None
    for v in g.variables:
        if g.mode is GraphMode.BIPARTITE:
            var_beliefs[v.id] = _node_belief(g, semiring, state, v)
            continue
        incoming = [state.factor_to_var[w] for w in g.incident[v.id]]
        if incoming:
            values = hadamard(semiring, incoming).values
        else:
            values = semiring.ones((v.obj.dim,))
        if cfg.normalize and semiring.has_normalize:
            try:
                values = semiring.normalize(values)
            except ZeroMessageError:
                zero_wire = zero_wire or ("belief", v.id)
        var_beliefs[v.id] = Message(v.obj, np.asarray(values))
    factor_beliefs = {}
    for f in g.factors:
        arr = f.tensor.as_array()
        for axis in range(f.rank):
            vid = f.neighbors[axis]
            msg = state.var_to_factor[(vid, f.id, axis)]
            shape = [1] * f.rank
            shape[axis] = len(msg.values)
            arr = semiring.array_mul(arr, np.asarray(msg.values).reshape(shape))
        factor_beliefs[f.id] = DenseTensor(f.tensor.shape, np.asarray(arr).reshape(-1))
    return var_beliefs, factor_beliefs, zero_wire


def _node_belief(g, semiring, state, v):
    arr = v.tensor.as_array()
    for axis, wire in enumerate(_node_axis_order(g, v.id)):
        msg = state.factor_to_var[wire]
        shape = [1] * arr.ndim
        shape[axis] = len(msg.values)
        arr = semiring.array_mul(arr, np.asarray(msg.values).reshape(shape))
    return DenseTensor(v.tensor.shape, np.asarray(arr).reshape(-1))


def run_bp(g, cfg, root=None):
    """Run belief propagation under the given config.

    The sync schedule sweeps until the residual falls to ``tol`` or
    ``max_iters`` is hit (reported as not converged, never raised). When the
    detecting sweep leaves every message bit-identical it only confirmed an
    already-reached fixed point, so it is not counted in ``iterations``.
    Otherwise a small residual alone is not trusted: residuals need not
    shrink monotonically on loopy graphs, so ``converged`` is reported only
    once an uncounted probe sweep certifies that one further sweep also
    stays within ``tol`` — which the caller can then reproduce exactly. A
    failed probe counts as a normal sweep and iteration continues. If the
    budget runs out before certification the run reports not converged even
    though the last residual may sit at or below ``tol``.
    The tree schedule executes its two passes once and is exact.

    A normalized run that hits an all-zero aggregate stops early and flags
    ``contradiction`` with the offending wire; partial beliefs are still
    returned. Boolean runs never normalize, so they complete even when
    support dies; they flag ``contradiction`` with the first dead wire and
    their all-false beliefs are exact.
    """
    report = validate_graph(g)
    report.raise_if_invalid()
    semiring = get_semiring(cfg.semiring)
    contradiction_wire = None
    if cfg.schedule == "tree":
        state, halted_wire = run_two_pass(g, cfg, root)
        if halted_wire is not None:
            var_b, fac_b, _ = beliefs(g, state, cfg)
            return BPResult(
                state,
                converged=False,
                iterations=1,
                residual=math.inf,
                variable_beliefs=var_b,
                factor_beliefs=fac_b,
                contradiction=True,
                contradiction_wire=halted_wire,
            )
        converged, iterations = True, 1
    else:
        state = init_messages(g, cfg)
        converged = False
        iterations = 0
        try:
            k = 0
            while k < cfg.max_iters:
                k += 1
                new_state = sweep_synchronous(g, state, cfg)
                iterations = k
                changed = _state_changed(g, state, new_state)
                state = new_state
                if new_state.residual > cfg.tol:
                    continue
                if not changed:
                    # bit-identical: already a fixed point, sweep not counted
                    converged = True
                    iterations = k - 1
                    break
                if k >= cfg.max_iters:
                    break  # no budget left to certify the fixed point
                probe = sweep_synchronous(g, new_state, cfg)
                if probe.residual <= cfg.tol:
                    converged = True  # certified: the next sweep stays put
                    break
                # the probe was real progress after all; adopt and continue
                k += 1
                iterations = k
                state = probe
        except ContradictionError as err:
            var_b, fac_b, _ = beliefs(g, state, cfg)
            return BPResult(
                state,
                converged=False,
                iterations=iterations,
                residual=state.residual,
                variable_beliefs=var_b,
                factor_beliefs=fac_b,
                contradiction=True,
                contradiction_wire=err.wire,
            )
    var_b, fac_b, zero_wire = beliefs(g, state, cfg)
    if semiring.name == "bool":
        # dead support can hide in a belief even when every wire message
        # still has a true entry, so scan both
        contradiction_wire = _first_zero_wire(g, semiring, state)
        if contradiction_wire is None:
            for vid in sorted(var_b):
                values = var_b[vid].values if hasattr(var_b[vid], "values") else var_b[vid].data
                if not any(bool(x) for x in values.tolist()):
                    contradiction_wire = ("belief", vid)
                    break
    if zero_wire is not None and contradiction_wire is None:
        contradiction_wire = zero_wire
    return BPResult(
        state,
        converged=converged,
        iterations=iterations,
        residual=state.residual if cfg.schedule == "sync" else 0.0,
        variable_beliefs=var_b,
        factor_beliefs=fac_b,
        contradiction=contradiction_wire is not None,
        contradiction_wire=contradiction_wire,
    )


def _state_changed(g, old, new):
    for key, msg in new.var_to_factor.items():
        if not np.array_equal(msg.values, old.var_to_factor[key].values):
            return True
    for key, msg in new.factor_to_var.items():
        if not np.array_equal(msg.values, old.factor_to_var[key].values):
            return True
    return False


def contraction_value(g, cfg=None, root=None):
    """Scalar value of the closed diagram (partition sum, count, ...).

    Runs unnormalized two-pass propagation and closes the diagram at one
    root per component (the smallest variable id, or ``root`` in its own
    component), multiplying components together. Exact on trees for every
    semiring; any root choice gives the same value. Rank-0 factors multiply
    in directly; an isolated variable contributes one term per state.
    """
    if cfg is None:
        cfg = RunConfig(normalize=False, schedule="tree")
    if cfg.normalize:
        raise ValidationError("contraction requires normalize=False (raw mass must survive)")
    semiring = get_semiring(cfg.semiring)
    report = validate_graph(g)
    report.raise_if_invalid()
    state, _ = run_two_pass(g, cfg, root)  # unnormalized: never halts
    return contraction_from_state(g, semiring, state, root)


def contraction_from_state(g, semiring, state, root=None):
    """Close the diagram against converged messages, component by component."""
    semiring = get_semiring(semiring)
    total = semiring.one
    for var_ids, fac_ids in components(g):
        if not var_ids:
            f = g.factor(fac_ids[0])
            total = semiring.mul(total, f.tensor.data[0])
            continue
        comp_root = root if root in var_ids else var_ids[0]
        v = g.variable(comp_root)
        incoming = [state.factor_to_var[w] for w in g.incident[comp_root]]
        if g.mode is GraphMode.BIPARTITE:
            z = full_contraction(semiring, v.tensor, [state.factor_to_var[w] for w in _node_axis_order(g, comp_root)])
        elif incoming:
            z = semiring.fold_add(hadamard(semiring, incoming).values)
        else:
            z = semiring.fold_add(semiring.ones((v.obj.dim,)))
        total = semiring.mul(total, z)
    return total


def decode_map(g, state, semiring):
    """Best state per variable from its belief, ties to the lowest index.

    Needs a totally ordered semiring (prob, maxtimes, bool, count). On a
    tree with maxtimes messages and a unique optimum this recovers the
    globally best assignment.
    """
    semiring = get_semiring(semiring)
    if not semiring.has_compare:
        raise NoTotalOrderError(
            f"semiring {semiring.name!r} has no total order to decode with"
        )
    if g.mode is not GraphMode.SPIDER:
        raise ValidationError("decoding needs spider-mode variable semantics")
    assignment = {}
    for v in g.variables:
        incoming = [state.factor_to_var[w] for w in g.incident[v.id]]
        values = (
            hadamard(semiring, incoming).values
            if incoming
            else semiring.ones((v.obj.dim,))
        )
        best, best_val = 0, values[0]
        for j in range(1, len(values)):
            if semiring.compare(values[j], best_val) > 0:
                best, best_val = j, values[j]
        assignment[v.id] = best
    return assignment


def dual_seed(g, factor_id, entry_index):
    """Copy of a numeric graph over dual numbers, one entry carrying eps.

    Every value x becomes x + 0*eps except the chosen factor's flat
    row-major ``entry_index``, which becomes x + 1*eps. Contracting the
    result leaves d(contraction)/d(entry) in the eps component.
    """
    from .algebra import DUAL, DualNumber
    from .graph import FactorGraph, FactorNode, VariableNode

    def lift(tensor, seed_at=None):
        values = [DualNumber(float(x), 0.0) for x in tensor.data.tolist()]
        if seed_at is not None:
            if not 0 <= seed_at < len(values):
                raise ValidationError(
                    f"entry {seed_at} out of range for factor {factor_id} "
                    f"({len(values)} entries)"
                )
            values[seed_at] = DualNumber(values[seed_at].real, 1.0)
        return DenseTensor.from_values(tensor.shape, values, DUAL)

    if factor_id not in {f.id for f in g.factors}:
        raise ValidationError(f"no factor with id {factor_id}")
    factors = tuple(
        FactorNode(f.id, lift(f.tensor, entry_index if f.id == factor_id else None), f.neighbors)
        for f in g.factors
    )
    variables = tuple(
        VariableNode(v.id, v.obj, lift(v.tensor) if v.tensor is not None else None)
        for v in g.variables
    )
    return FactorGraph(variables, factors, mode=g.mode)


def evaluate_assignment(g, semiring, assignment):
    """Product of all factor entries at one full assignment."""
    semiring = get_semiring(semiring)
    total = semiring.one
    for f in sorted(g.factors, key=lambda f: f.id):
        index = tuple(assignment[v] for v in f.neighbors)
        total = semiring.mul(total, f.tensor.entry(index) if f.rank else f.tensor.data[0])
    return total
