"""Flow annotations, conservation and capacity checks, downward projection.

Flows are kept per commodity as directed arc volumes between NodeRefs
(any mix of intra- and inter-layer steps).  Paths can be registered
directly, which both records the route and accumulates its arcs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import MissingRealization, MlgError
from .mlg import IntraEdge, MultiLayerGraph, NodeRef, RealizationPath, inter_key, intra_key

CONSERVATION_TOL = 1e-6
PROJECTION_TOL = 1e-9


@dataclass
class Session:
    """One subscriber session and its traffic volume."""

    subscriber: str
    volume: float

    def __post_init__(self):
        if self.volume < 0:
            raise MlgError(f"session volume must be >= 0, got {self.volume}")


@dataclass(frozen=True)
class Commodity:
    """A demand volume routed from the service side to one subscriber."""

    id: str
    source: NodeRef
    sink: NodeRef
    demand: float

    def __post_init__(self):
        if self.source == self.sink:
            raise MlgError("commodity source and sink must differ")
        if self.demand <= 0:
            raise MlgError("commodity demand must be > 0")


@dataclass
class CheckReport:
    """Outcome of a feasibility check; ``violations`` are (subject, detail) pairs."""

    violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _arc_edge_key(a: NodeRef, b: NodeRef) -> tuple:
    if a.layer == b.layer:
        return intra_key(a.layer, a.id, b.id)
    upper, lower = (a, b) if a.layer > b.layer else (b, a)
    return inter_key(upper, lower)


class FlowAssignment:
    """Per-commodity directed arc flows with optional recorded routes."""

    def __init__(self):
        self._arcs: dict[str, dict[tuple[NodeRef, NodeRef], float]] = {}
        self.routes: dict[str, list[tuple[tuple[NodeRef, ...], float]]] = {}

    def add_arc(self, commodity_id: str, a: NodeRef, b: NodeRef, flow: float) -> None:
        if flow < 0:
            raise MlgError("arc flow must be >= 0")
        arcs = self._arcs.setdefault(commodity_id, {})
        arcs[(a, b)] = arcs.get((a, b), 0.0) + flow

    def add_path(self, commodity_id: str, nodes: Sequence[NodeRef], flow: float) -> None:
        nodes = tuple(NodeRef(*n) for n in nodes)
        self.routes.setdefault(commodity_id, []).append((nodes, flow))
        for a, b in zip(nodes, nodes[1:]):
            self.add_arc(commodity_id, a, b, flow)

    def commodity_ids(self) -> list[str]:
        return sorted(self._arcs)

    def arcs(self, commodity_id: str) -> dict[tuple[NodeRef, NodeRef], float]:
        return dict(self._arcs.get(commodity_id, {}))

    def edge_totals(self) -> dict[tuple, float]:
        """Total flow per edge key, both directions and all commodities summed."""
        totals: dict[tuple, float] = {}
        for arcs in self._arcs.values():
            for (a, b), flow in arcs.items():
                key = _arc_edge_key(a, b)
                totals[key] = totals.get(key, 0.0) + flow
        return totals


def aggregate_service_flows(sessions: Iterable[Session]) -> dict[str, float]:
    """Per-subscriber demand: sum of that subscriber's session volumes."""
    totals: dict[str, float] = {}
    for s in sessions:
        if s.volume < 0:
            raise MlgError("session volume must be >= 0")
        totals[s.subscriber] = totals.get(s.subscriber, 0.0) + s.volume
    return totals


def check_productivity_projection(server_productivities: Sequence[float],
                                  service_productivity: float,
                                  tol: float = PROJECTION_TOL) -> CheckReport:
    """Verify the server productivities sum to the service productivity."""
    total = sum(server_productivities)
    report = CheckReport()
    diff = total - service_productivity
    if abs(diff) > tol:
        report.violations.append(("productivity", diff))
    return report


def check_conservation(graph: MultiLayerGraph, flows: FlowAssignment,
                       commodities: Sequence[Commodity],
                       tol: float = CONSERVATION_TOL) -> CheckReport:
    """Per commodity, net flow must be +demand at the source, -demand at
    the sink and zero at every transit node."""
    report = CheckReport()
    by_id = {c.id: c for c in commodities}
    for cid in flows.commodity_ids():
        if cid not in by_id:
            raise MlgError(f"flows reference unknown commodity {cid!r}")
    for commodity in commodities:
        arcs = flows.arcs(commodity.id)
        net: dict[NodeRef, float] = {}
        for (a, b), flow in arcs.items():
            if graph.find_edge(a, b) is None:
                raise MlgError(f"flow on nonexistent edge {a}-{b}")
            net[a] = net.get(a, 0.0) + flow
            net[b] = net.get(b, 0.0) - flow
        if not arcs and commodity.demand == 0:
            continue
        for node in sorted(set(net) | {commodity.source, commodity.sink}):
            expected = 0.0
            if node == commodity.source:
                expected = commodity.demand
            elif node == commodity.sink:
                expected = -commodity.demand
            residual = net.get(node, 0.0) - expected
            if abs(residual) > tol:
                report.violations.append((node, commodity.id, residual))
    return report


def check_capacities(graph: MultiLayerGraph, flows: FlowAssignment,
                     tol: float = CONSERVATION_TOL) -> CheckReport:
    """Every finite-capacity edge must carry total flow <= capacity + tol."""
    report = CheckReport()
    totals = flows.edge_totals()
    capacities: dict[tuple, float] = {}
    for edge in graph.all_intra_edges():
        capacities[edge.key] = edge.capacity
    for edge in graph.inter_edges():
        capacities[edge.key] = edge.capacity
    for key in sorted(totals):
        if key not in capacities:
            raise MlgError(f"flow on nonexistent edge {key}")
        cap = capacities[key]
        if cap != float("inf") and totals[key] > cap + tol:
            report.violations.append((key, totals[key] - cap))
    return report


def project_flows_down(graph: MultiLayerGraph,
                       upper_flows: Mapping[IntraEdge, float] | Sequence[tuple[IntraEdge, float]],
                       realizations: Mapping[tuple, RealizationPath]) -> dict[tuple, float]:
    """Push upper-layer edge flows onto the edges of their realization paths.

    ``realizations`` maps edge keys to paths.  Returns the increment per
    lower edge key (hop edges plus the boundary inter edges).
    """
    if isinstance(upper_flows, Mapping):
        items = list(upper_flows.items())
    else:
        items = list(upper_flows)
    increment: dict[tuple, float] = {}
    for edge, flow in items:
        if flow == 0:
            continue
        path = realizations.get(edge.key)
        if path is None:
            raise MissingRealization(f"edge {edge} carries flow but has no realization")
        seq = path.sequence
        for a, b in ((seq[0], seq[1]), (seq[-2], seq[-1])):
            key = _arc_edge_key(a, b)
            increment[key] = increment.get(key, 0.0) + flow
        for hop in path.hop_edges:
            increment[hop.key] = increment.get(hop.key, 0.0) + flow
    return increment
