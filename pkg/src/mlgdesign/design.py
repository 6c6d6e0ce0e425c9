"""Network-design optimization over a built 3-layer instance.

Two interchangeable formulations of the multicommodity routing problem
(per-arc "node-link" and per-candidate-path "link-path"), capacitated
and uncapacitated drivers on top of the in-package simplex / branch and
bound, and an independent brute-force oracle backed by exhaustive path
enumeration plus scipy's LP solver.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .builder import BuiltInstance
from .errors import InfeasibleError, LimitsExceeded, UncoveredCommodity
from .flows import Commodity, FlowAssignment
from .lp import LinearProgram, LpSolution, branch_and_bound, simplex_solve
from .mlg import NodeRef

FLOW_EPS = 1e-9


@dataclass(frozen=True)
class CandidatePath:
    """Layer-1 simple path from a serving node to a subscriber."""

    server: str
    nodes: tuple[str, ...]
    channels: tuple[str, ...]
    cost: float


@dataclass
class DesignSolution:
    """Interpreted optimum: flows, routes, topology and assignment."""

    objective: float
    routes: dict[str, list[tuple[tuple[str, ...], float]]]
    assignment: dict[str, list[tuple[str, float]]]
    edge_flows: dict[tuple, float]
    selected_channels: list[str]
    flow_assignment: FlowAssignment
    instance: BuiltInstance
    relaxation_objective: Optional[float] = None


# ---------------------------------------------------------------------------
# candidate path enumeration (Yen's k shortest loopless paths)
# ---------------------------------------------------------------------------

def _layer1_adjacency(instance: BuiltInstance) -> dict[str, list[tuple[str, float, str]]]:
    adj: dict[str, list[tuple[str, float, str]]] = {
        n: [] for n in instance.graph.nodes(1)}
    for edge in instance.graph.intra_edges(1):
        a, b = edge.ends
        name = edge.name or f"{a}-{b}"
        adj[a].append((b, edge.cost, name))
        adj[b].append((a, edge.cost, name))
    for lst in adj.values():
        lst.sort()
    return adj


def _shortest_path(adj, src, dst, banned_nodes=frozenset(), banned_edges=frozenset()):
    """Cheapest simple path; ties broken by smallest node sequence.

    Returns (cost, nodes) or None.  ``banned_edges`` holds (from, to)
    pairs in either orientation.
    """
    heap = [(0.0, (src,))]
    best: dict[str, tuple] = {}
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node in best and best[node] <= (cost, path):
            continue
        best[node] = (cost, path)
        if node == dst:
            return cost, path
        for nbr, w, _name in adj.get(node, ()):
            if nbr in banned_nodes or nbr in path:
                continue
            if (node, nbr) in banned_edges or (nbr, node) in banned_edges:
                continue
            heapq.heappush(heap, (cost + w, path + (nbr,)))
    return None


def _k_shortest_paths(adj, src, dst, k):
    first = _shortest_path(adj, src, dst)
    if first is None:
        return []
    found = [first]
    candidates: list[tuple] = []
    seen = {first[1]}
    while len(found) < k:
        _, prev = found[-1]
        for i in range(len(prev) - 1):
            root = prev[:i + 1]
            root_cost = _path_cost(adj, root)
            banned_edges = set()
            for _, p in found:
                if p[:i + 1] == root and len(p) > i + 1:
                    banned_edges.add((p[i], p[i + 1]))
            banned_nodes = frozenset(root[:-1])
            spur = _shortest_path(adj, root[-1], dst, banned_nodes,
                                  frozenset(banned_edges))
            if spur is None:
                continue
            total = (root_cost + spur[0], root[:-1] + spur[1])
            if total[1] not in seen:
                seen.add(total[1])
                heapq.heappush(candidates, total)
        if not candidates:
            break
        found.append(heapq.heappop(candidates))
    return found


def _path_cost(adj, nodes) -> float:
    cost = 0.0
    for a, b in zip(nodes, nodes[1:]):
        for nbr, w, _name in adj[a]:
            if nbr == b:
                cost += w
                break
    return cost


def _path_channels(instance: BuiltInstance, nodes) -> tuple[str, ...]:
    out = []
    for a, b in zip(nodes, nodes[1:]):
        edge = instance.graph.find_intra(1, a, b)
        out.append(edge.name or f"{edge.ends[0]}-{edge.ends[1]}")
    return tuple(out)


def enumerate_candidate_paths(instance: BuiltInstance, commodity: Commodity,
                              k: int) -> list[CandidatePath]:
    """Up to k loop-free cheapest layer-1 paths per server, merged and
    sorted by (cost, node sequence)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    adj = _layer1_adjacency(instance)
    subscriber = commodity.sink.id
    out = []
    for server in instance.server_ids():
        for cost, nodes in _k_shortest_paths(adj, server, subscriber, k):
            out.append(CandidatePath(server=server, nodes=nodes,
                                     channels=_path_channels(instance, nodes),
                                     cost=cost))
    out.sort(key=lambda p: (p.cost, p.nodes))
    return out


def all_candidate_paths(instance: BuiltInstance,
                        commodity: Commodity) -> list[CandidatePath]:
    """Every simple server-to-subscriber path (exhaustive DFS)."""
    adj = _layer1_adjacency(instance)
    subscriber = commodity.sink.id
    out = []
    for server in instance.server_ids():
        for nodes in _simple_paths(adj, server, subscriber):
            out.append(CandidatePath(server=server, nodes=nodes,
                                     channels=_path_channels(instance, nodes),
                                     cost=_path_cost(adj, nodes)))
    out.sort(key=lambda p: (p.cost, p.nodes))
    return out


def _simple_paths(adj, src, dst):
    paths = []

    def walk(path):
        node = path[-1]
        if node == dst:
            paths.append(tuple(path))
            return
        for nbr, _w, _name in adj.get(node, ()):
            if nbr not in path:
                path.append(nbr)
                walk(path)
                path.pop()

    walk([src])
    return paths


# ---------------------------------------------------------------------------
# formulations
# ---------------------------------------------------------------------------

@dataclass
class _Formulation:
    lp: LinearProgram
    # var index -> role tuple, see _assemble_* helpers
    meta: dict[int, tuple] = field(default_factory=dict)
    channel_rows_vars: dict[str, list[int]] = field(default_factory=dict)


def formulate_link_path(instance: BuiltInstance,
                        paths: dict[str, list[CandidatePath]],
                        single_homing: bool = False) -> _Formulation:
    """Per-path flow variables; demand, channel-capacity and server rows."""
    lp = LinearProgram()
    form = _Formulation(lp=lp)
    by_channel: dict[str, list[int]] = {c: [] for c in instance.channel_edges}
    by_server: dict[str, list[int]] = {s: [] for s in instance.server_ids()}
    demand_rows: dict[str, dict[int, float]] = {}
    objective: dict[int, float] = {}

    for commodity in instance.commodities:
        plist = paths.get(commodity.id, [])
        if not plist:
            raise UncoveredCommodity(f"commodity {commodity.id} has no candidate path")
        row: dict[int, float] = {}
        for idx, path in enumerate(plist):
            j = lp.add_var(f"x[{commodity.id},{idx}]")
            form.meta[j] = ("path", commodity.id, path)
            row[j] = 1.0
            objective[j] = path.cost
            for ch in path.channels:
                by_channel[ch].append(j)
            by_server[path.server].append(j)
        demand_rows[commodity.id] = row

    homing_vars: dict[tuple[str, str], int] = {}
    if single_homing:
        for commodity in instance.commodities:
            assign_row: dict[int, float] = {}
            for server in instance.server_ids():
                j = lp.add_var(f"y[{commodity.id},{server}]", upper=1.0, integer=True)
                form.meta[j] = ("assign", commodity.id, server)
                homing_vars[(commodity.id, server)] = j
                assign_row[j] = 1.0
            lp.add_constraint(assign_row, "=", 1.0, name=f"assign[{commodity.id}]")
        for commodity in instance.commodities:
            for server in instance.server_ids():
                coeffs = {j: 1.0 for j in by_server[server]
                          if form.meta[j][1] == commodity.id}
                if not coeffs:
                    continue
                coeffs[homing_vars[(commodity.id, server)]] = -commodity.demand
                lp.add_constraint(coeffs, "<=", 0.0,
                                  name=f"homing[{commodity.id},{server}]")

    for commodity in instance.commodities:
        lp.add_constraint(demand_rows[commodity.id], "=", commodity.demand,
                          name=f"demand[{commodity.id}]")
    for ch_id in sorted(by_channel):
        cols = by_channel[ch_id]
        if cols:
            lp.add_constraint({j: 1.0 for j in cols}, "<=",
                              instance.channel_edges[ch_id].capacity,
                              name=f"capacity[{ch_id}]")
        form.channel_rows_vars[ch_id] = cols
    for server in instance.server_ids():
        cols = by_server[server]
        if cols:
            lp.add_constraint({j: 1.0 for j in cols}, "<=",
                              instance.server_productivity(server),
                              name=f"productivity[{server}]")
    lp.set_objective(objective)
    return form


def formulate_node_link(instance: BuiltInstance,
                        single_homing: bool = False) -> _Formulation:
    """Per-commodity directed arc variables with nodal conservation rows."""
    lp = LinearProgram()
    form = _Formulation(lp=lp)
    channels = sorted(instance.channel_edges)
    servers = instance.server_ids()
    nodes = instance.graph.nodes(1)
    objective: dict[int, float] = {}
    by_channel: dict[str, list[int]] = {c: [] for c in channels}
    by_server: dict[str, list[int]] = {s: [] for s in servers}

    per_commodity_vars: dict[str, dict] = {}
    for commodity in instance.commodities:
        arcs: dict[tuple[str, str], int] = {}
        for ch_id in channels:
            edge = instance.channel_edges[ch_id]
            a, b = edge.ends
            for frm, to in ((a, b), (b, a)):
                j = lp.add_var(f"f[{commodity.id},{ch_id},{frm}->{to}]")
                form.meta[j] = ("arc", commodity.id, ch_id, frm, to)
                arcs[(frm, to)] = j
                objective[j] = edge.cost
                by_channel[ch_id].append(j)
        inject: dict[str, int] = {}
        for server in servers:
            j = lp.add_var(f"inj[{commodity.id},{server}]")
            form.meta[j] = ("inject", commodity.id, server)
            inject[server] = j
            by_server[server].append(j)
        acc = lp.add_var(f"acc[{commodity.id}]")
        form.meta[acc] = ("access", commodity.id)
        per_commodity_vars[commodity.id] = {"arcs": arcs, "inject": inject, "acc": acc}

    homing_vars: dict[tuple[str, str], int] = {}
    if single_homing:
        for commodity in instance.commodities:
            assign_row: dict[int, float] = {}
            for server in servers:
                j = lp.add_var(f"y[{commodity.id},{server}]", upper=1.0, integer=True)
                form.meta[j] = ("assign", commodity.id, server)
                homing_vars[(commodity.id, server)] = j
                assign_row[j] = 1.0
            lp.add_constraint(assign_row, "=", 1.0, name=f"assign[{commodity.id}]")

    for commodity in instance.commodities:
        vars_ = per_commodity_vars[commodity.id]
        lp.add_constraint({j: 1.0 for j in vars_["inject"].values()}, "=",
                          commodity.demand, name=f"demand[{commodity.id}]")
        for node in nodes:
            row: dict[int, float] = {}
            for (frm, to), j in vars_["arcs"].items():
                if to == node:
                    row[j] = row.get(j, 0.0) + 1.0
                if frm == node:
                    row[j] = row.get(j, 0.0) - 1.0
            if node in vars_["inject"]:
                row[vars_["inject"][node]] = 1.0
            if node == commodity.sink.id:
                row[vars_["acc"]] = -1.0
            if row:
                lp.add_constraint(row, "=", 0.0,
                                  name=f"conservation[{commodity.id},{node}]")
        if single_homing:
            for server in servers:
                lp.add_constraint(
                    {vars_["inject"][server]: 1.0,
                     homing_vars[(commodity.id, server)]: -commodity.demand},
                    "<=", 0.0, name=f"homing[{commodity.id},{server}]")

    for ch_id in channels:
        cols = by_channel[ch_id]
        if cols:
            lp.add_constraint({j: 1.0 for j in cols}, "<=",
                              instance.channel_edges[ch_id].capacity,
                              name=f"capacity[{ch_id}]")
        form.channel_rows_vars[ch_id] = cols
    for server in servers:
        cols = by_server[server]
        if cols:
            lp.add_constraint({j: 1.0 for j in cols}, "<=",
                              instance.server_productivity(server),
                              name=f"productivity[{server}]")
    lp.set_objective(objective)
    return form


# ---------------------------------------------------------------------------
# solution assembly
# ---------------------------------------------------------------------------

def _assemble_solution(instance: BuiltInstance,
                       route_flows: dict[str, list[tuple[tuple[str, ...], float]]],
                       selected: Optional[list[str]] = None,
                       fixed_cost_part: float = 0.0,
                       relaxation_objective: Optional[float] = None) -> DesignSolution:
    """Build a DesignSolution from per-commodity layer-1 route flows."""
    adj = _layer1_adjacency(instance)
    service = instance.service_node
    flow_assignment = FlowAssignment()
    assignment: dict[str, list[tuple[str, float]]] = {
        s: [] for s in instance.server_ids()}
    per_server_sub: dict[tuple[str, str], float] = {}
    edge_flows: dict[tuple, float] = {}
    objective = fixed_cost_part

    for commodity in instance.commodities:
        for nodes, flow in route_flows.get(commodity.id, []):
            if flow <= FLOW_EPS:
                continue
            server, subscriber = nodes[0], nodes[-1]
            full = [service, NodeRef(2, server)]
            full.extend(NodeRef(1, n) for n in nodes)
            full.extend([NodeRef(2, subscriber), NodeRef(3, subscriber)])
            flow_assignment.add_path(commodity.id, full, flow)
            per_server_sub[(server, subscriber)] = (
                per_server_sub.get((server, subscriber), 0.0) + flow)
            objective += flow * _path_cost(adj, nodes)

    edge_flows.update(flow_assignment.edge_totals())
    # derived layer-2 / layer-3 annotations (not independently optimized)
    for (server, subscriber), vol in per_server_sub.items():
        edge = instance.graph.find_intra(2, server, subscriber)
        edge_flows[edge.key] = edge_flows.get(edge.key, 0.0) + vol
        star = instance.graph.find_intra(3, instance.problem.service_id, subscriber)
        edge_flows[star.key] = edge_flows.get(star.key, 0.0) + vol

    for (server, subscriber), vol in sorted(per_server_sub.items()):
        assignment[server].append((subscriber, vol))

    if selected is None:
        selected = []
        for ch_id, edge in sorted(instance.channel_edges.items()):
            if edge_flows.get(edge.key, 0.0) > FLOW_EPS:
                selected.append(ch_id)

    routes = {cid: sorted(((n, f) for n, f in lst if f > FLOW_EPS))
              for cid, lst in route_flows.items()}
    return DesignSolution(objective=objective, routes=routes,
                          assignment=assignment, edge_flows=edge_flows,
                          selected_channels=sorted(selected),
                          flow_assignment=flow_assignment, instance=instance,
                          relaxation_objective=relaxation_objective)


def _decompose_node_link(instance: BuiltInstance, form: _Formulation,
                         values: np.ndarray
                         ) -> dict[str, list[tuple[tuple[str, ...], float]]]:
    """Path decomposition of per-commodity arc flows (cycles discarded)."""
    routes: dict[str, list[tuple[tuple[str, ...], float]]] = {}
    per_commodity: dict[str, dict] = {}
    for j, meta in form.meta.items():
        if values[j] <= FLOW_EPS:
            continue
        kind = meta[0]
        if kind == "arc":
            _, cid, _ch, frm, to = meta
            per_commodity.setdefault(cid, {"arcs": {}, "inject": {}})
            arcs = per_commodity[cid]["arcs"]
            arcs[(frm, to)] = arcs.get((frm, to), 0.0) + float(values[j])
        elif kind == "inject":
            _, cid, server = meta
            per_commodity.setdefault(cid, {"arcs": {}, "inject": {}})
            per_commodity[cid]["inject"][server] = float(values[j])

    for commodity in instance.commodities:
        data = per_commodity.get(commodity.id)
        if not data:
            continue
        # cancel opposite-direction flow on the same channel
        arcs = dict(data["arcs"])
        for (frm, to) in list(arcs):
            rev = (to, frm)
            if rev in arcs and arcs.get((frm, to), 0.0) > 0 and arcs[rev] > 0:
                cancel = min(arcs[(frm, to)], arcs[rev])
                arcs[(frm, to)] -= cancel
                arcs[rev] -= cancel
        inject = dict(data["inject"])
        sink = commodity.sink.id
        out: list[tuple[tuple[str, ...], float]] = []
        guard = 0
        while guard < 10000:
            guard += 1
            start = next((s for s in sorted(inject) if inject[s] > FLOW_EPS), None)
            if start is None:
                break
            path = [start]
            while path[-1] != sink:
                node = path[-1]
                nxt = next((to for (frm, to) in sorted(arcs)
                            if frm == node and arcs[(frm, to)] > FLOW_EPS), None)
                if nxt is None:
                    break
                if nxt in path:
                    # remove the cycle's flow and restart the walk
                    cyc = path[path.index(nxt):] + [nxt]
                    relief = min(arcs[(a, b)] for a, b in zip(cyc, cyc[1:]))
                    for a, b in zip(cyc, cyc[1:]):
                        arcs[(a, b)] -= relief
                    path = [start]
                    continue
                path.append(nxt)
            if path[-1] != sink:
                inject[start] = 0.0  # dead end at numerical noise level
                continue
            flow = min([inject[start]]
                       + [arcs[(a, b)] for a, b in zip(path, path[1:])])
            if flow <= FLOW_EPS:
                inject[start] = 0.0
                continue
            for a, b in zip(path, path[1:]):
                arcs[(a, b)] -= flow
            inject[start] -= flow
            out.append((tuple(path), flow))
        routes[commodity.id] = out
    return routes


def _routes_from_path_vars(form: _Formulation, values: np.ndarray
                           ) -> dict[str, list[tuple[tuple[str, ...], float]]]:
    routes: dict[str, list[tuple[tuple[str, ...], float]]] = {}
    for j, meta in form.meta.items():
        if meta[0] == "path" and values[j] > FLOW_EPS:
            _, cid, path = meta
            routes.setdefault(cid, []).append((path.nodes, float(values[j])))
    return routes


def _homing_tie_key(instance: BuiltInstance, form: _Formulation):
    """Tie-break incumbents by the assignment vector (server per
    subscriber, subscribers in id order)."""
    slots: dict[str, list[tuple[str, int]]] = {}
    for j, meta in form.meta.items():
        if meta[0] == "assign":
            _, cid, server = meta
            slots.setdefault(cid, []).append((server, j))
    order = sorted(slots)

    def key(values: np.ndarray) -> tuple:
        vec = []
        for cid in order:
            chosen = sorted(s for s, j in slots[cid] if values[j] > 0.5)
            vec.append(tuple(chosen))
        return tuple(vec)

    return key


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def _empty_solution(instance: BuiltInstance) -> DesignSolution:
    return _assemble_solution(instance, {})


def solve_capacitated(instance: BuiltInstance, formulation: str = "node-link",
                      k: int = 4, single_homing: bool = False) -> DesignSolution:
    """Minimize total carried flow cost under channel and server capacities."""
    if not instance.commodities:
        return _empty_solution(instance)
    form = _build_formulation(instance, formulation, k, single_homing)
    relax = simplex_solve(form.lp)
    if relax.status != "Optimal":
        raise InfeasibleError(certificate=relax.certificate)
    if single_homing:
        sol = branch_and_bound(form.lp, tie_key=_homing_tie_key(instance, form))
        if sol.status != "Optimal":
            raise InfeasibleError(certificate=sol.certificate)
    else:
        sol = relax
    routes = _extract_routes(instance, form, formulation, sol.values)
    return _assemble_solution(instance, routes,
                              relaxation_objective=relax.objective)


def solve_uncapacitated(instance: BuiltInstance,
                        channel_fixed_costs: dict[str, float],
                        formulation: str = "node-link", k: int = 4,
                        single_homing: bool = False) -> DesignSolution:
    """Select channels (binary per-channel decision with fixed cost) and
    route flows over the selected subset."""
    for ch_id, fc in channel_fixed_costs.items():
        if ch_id not in instance.channel_edges:
            raise KeyError(f"unknown channel {ch_id!r} in fixed costs")
        if fc < 0:
            raise ValueError("fixed costs must be >= 0")
    if not instance.commodities:
        return _empty_solution(instance)
    form = _build_formulation(instance, formulation, k, single_homing)
    big_m = sum(c.demand for c in instance.commodities)
    select_vars: dict[str, int] = {}
    objective = dict(form.lp.objective)
    for ch_id in sorted(instance.channel_edges):
        j = form.lp.add_var(f"use[{ch_id}]", upper=1.0, integer=True)
        select_vars[ch_id] = j
        objective[j] = float(channel_fixed_costs.get(ch_id, 0.0))
        cols = form.channel_rows_vars.get(ch_id, [])
        coeffs = {v: 1.0 for v in cols}
        coeffs[j] = -big_m
        form.lp.add_constraint(coeffs, "<=", 0.0, name=f"coupling[{ch_id}]")
    form.lp.set_objective(objective)

    relax = simplex_solve(form.lp)
    if relax.status != "Optimal":
        raise InfeasibleError(certificate=relax.certificate)
    sol = branch_and_bound(form.lp)
    if sol.status != "Optimal":
        raise InfeasibleError(certificate=sol.certificate)
    routes = _extract_routes(instance, form, formulation, sol.values)
    selected = [ch for ch, j in sorted(select_vars.items()) if sol.values[j] > 0.5]
    fixed_part = sum(float(channel_fixed_costs.get(ch, 0.0)) for ch in selected)
    return _assemble_solution(instance, routes, selected=selected,
                              fixed_cost_part=fixed_part,
                              relaxation_objective=relax.objective)


def _build_formulation(instance, formulation, k, single_homing) -> _Formulation:
    if formulation == "node-link":
        return formulate_node_link(instance, single_homing=single_homing)
    if formulation == "link-path":
        paths = {c.id: enumerate_candidate_paths(instance, c, k)
                 for c in instance.commodities}
        return formulate_link_path(instance, paths, single_homing=single_homing)
    raise ValueError(f"unknown formulation {formulation!r}")


def _extract_routes(instance, form, formulation, values):
    if formulation == "node-link":
        return _decompose_node_link(instance, form, values)
    return _routes_from_path_vars(form, values)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleLimits:
    max_commodities: int = 3
    max_channels: int = 8
    max_layer1_nodes: int = 8


def brute_force_oracle(instance: BuiltInstance, mode: str = "capacitated",
                       single_homing: bool = False,
                       channel_fixed_costs: Optional[dict[str, float]] = None,
                       limits: OracleLimits = OracleLimits()) -> DesignSolution:
    """Exact optimum by exhaustive enumeration; independent of the
    simplex path (scipy solves the per-configuration path LPs)."""
    if (len(instance.commodities) > limits.max_commodities
            or len(instance.channel_edges) > limits.max_channels
            or len(instance.graph.nodes(1)) > limits.max_layer1_nodes):
        raise LimitsExceeded("instance exceeds oracle limits")
    if not instance.commodities:
        return _empty_solution(instance)

    all_paths = {c.id: all_candidate_paths(instance, c)
                 for c in instance.commodities}

    if mode == "capacitated" and not single_homing:
        result = _oracle_lp(instance, all_paths)
        if result is None:
            raise InfeasibleError(message="oracle: no feasible routing")
        objective, routes = result
        return _assemble_solution(instance, routes)

    if mode == "capacitated" and single_homing:
        best = None
        cids = [c.id for c in instance.commodities]
        for combo in itertools.product(instance.server_ids(), repeat=len(cids)):
            restricted = {
                cid: [p for p in all_paths[cid] if p.server == combo[i]]
                for i, cid in enumerate(cids)}
            if any(not ps for ps in restricted.values()):
                continue
            result = _oracle_lp(instance, restricted)
            if result is None:
                continue
            objective, routes = result
            key = (objective, combo)
            if best is None or objective < best[0][0] - 1e-9 or (
                    objective <= best[0][0] + 1e-9 and combo < best[0][1]):
                best = (key, routes)
        if best is None:
            raise InfeasibleError(message="oracle: no feasible assignment")
        return _assemble_solution(instance, best[1])

    if mode == "uncapacitated":
        fixed = channel_fixed_costs or {}
        channels = sorted(instance.channel_edges)
        best = None
        for r in range(len(channels) + 1):
            for subset in itertools.combinations(channels, r):
                allowed = set(subset)
                restricted = {
                    cid: [p for p in ps if set(p.channels) <= allowed]
                    for cid, ps in all_paths.items()}
                if any(not ps for ps in restricted.values()):
                    continue
                result = _oracle_lp(instance, restricted)
                if result is None:
                    continue
                flow_obj, routes = result
                total = flow_obj + sum(float(fixed.get(ch, 0.0)) for ch in subset)
                if best is None or total < best[0] - 1e-9 or (
                        total <= best[0] + 1e-9 and subset < best[1]):
                    best = (total, subset, routes, flow_obj)
        if best is None:
            raise InfeasibleError(message="oracle: no feasible channel subset")
        _total, subset, routes, flow_obj = best
        return _assemble_solution(instance, routes, selected=list(subset),
                                  fixed_cost_part=best[0] - flow_obj)

    raise ValueError(f"unknown oracle mode {mode!r}")


def _oracle_lp(instance: BuiltInstance,
               paths: dict[str, list[CandidatePath]]):
    """Min-cost path-flow LP over the given candidate paths (scipy HiGHS)."""
    from scipy.optimize import linprog

    var_index: list[tuple[str, CandidatePath]] = []
    for cid in sorted(paths):
        for p in paths[cid]:
            var_index.append((cid, p))
    n = len(var_index)
    if n == 0:
        return None
    c = np.array([p.cost for _cid, p in var_index])
    commodities = {cm.id: cm for cm in instance.commodities}
    a_eq, b_eq = [], []
    for cid in sorted(paths):
        row = np.array([1.0 if v[0] == cid else 0.0 for v in var_index])
        a_eq.append(row)
        b_eq.append(commodities[cid].demand)
    a_ub, b_ub = [], []
    for ch_id, edge in sorted(instance.channel_edges.items()):
        if not math.isfinite(edge.capacity):
            continue
        row = np.array([float(v[1].channels.count(ch_id)) for v in var_index])
        if row.any():
            a_ub.append(row)
            b_ub.append(edge.capacity)
    for server in instance.server_ids():
        row = np.array([1.0 if v[1].server == server else 0.0 for v in var_index])
        if row.any():
            a_ub.append(row)
            b_ub.append(instance.server_productivity(server))
    res = linprog(c, A_ub=np.array(a_ub) if a_ub else None,
                  b_ub=np.array(b_ub) if b_ub else None,
                  A_eq=np.array(a_eq), b_eq=np.array(b_eq),
                  bounds=(0, None), method="highs")
    if not res.success:
        return None
    routes: dict[str, list[tuple[tuple[str, ...], float]]] = {}
    for (cid, p), x in zip(var_index, res.x):
        if x > FLOW_EPS:
            routes.setdefault(cid, []).append((p.nodes, float(x)))
    return float(res.fun), routes
