import pytest

from mlgdesign import (Commodity, FlowAssignment, MissingRealization, NodeRef,
                       Session, aggregate_service_flows, check_capacities,
                       check_conservation, check_productivity_projection,
                       project_flows_down, realization_path, solve_capacitated)
from mlgdesign.errors import MlgError


class TestAggregateServiceFlows:
    def test_sums_per_subscriber(self):
        totals = aggregate_service_flows([Session("u1", 2.0), Session("u1", 1.0)])
        assert totals == {"u1": 3.0}

    def test_empty(self):
        assert aggregate_service_flows([]) == {}

    def test_t1_demands(self):
        totals = aggregate_service_flows([Session("u1", 3.0), Session("u2", 4.0)])
        assert totals == {"u1": 3.0, "u2": 4.0}

    def test_negative_volume_rejected(self):
        with pytest.raises(MlgError):
            Session("u1", -1.0)


class TestProductivityProjection:
    def test_exact_match(self):
        assert check_productivity_projection([5.0, 5.0], 10.0).ok

    def test_deficit_reported(self):
        report = check_productivity_projection([5.0, 5.0], 12.0)
        assert not report.ok
        assert report.violations[0][1] == pytest.approx(-2.0)

    def test_empty_sum(self):
        assert check_productivity_projection([], 0.0).ok


def t1_route(instance, cid, server, layer1_nodes, flow):
    nodes = ([instance.service_node, NodeRef(2, server)]
             + [NodeRef(1, n) for n in layer1_nodes]
             + [NodeRef(2, cid), NodeRef(3, cid)])
    return cid, nodes, flow


class TestConservation:
    def test_telescoping_path_ok(self, t1_instance):
        flows = FlowAssignment()
        cid, nodes, f = t1_route(t1_instance, "u1", "s1", ["s1", "z1", "u1"], 3.0)
        flows.add_path(cid, nodes, f)
        commodity = next(c for c in t1_instance.commodities if c.id == "u1")
        assert check_conservation(t1_instance.graph, flows, [commodity]).ok

    def test_imbalance_detected(self, t1_instance):
        flows = FlowAssignment()
        flows.add_arc("u1", NodeRef(1, "s1"), NodeRef(1, "z1"), 3.0)
        flows.add_arc("u1", NodeRef(1, "z1"), NodeRef(1, "u1"), 2.0)
        commodity = Commodity(id="u1", source=NodeRef(1, "s1"),
                              sink=NodeRef(1, "u1"), demand=3.0)
        report = check_conservation(t1_instance.graph, flows, [commodity])
        assert not report.ok
        residuals = {(node, cid): res for node, cid, res in report.violations}
        assert abs(residuals[(NodeRef(1, "z1"), "u1")]) == pytest.approx(1.0)

    def test_no_commodities_no_flows_ok(self, t1_instance):
        assert check_conservation(t1_instance.graph, FlowAssignment(), []).ok

    def test_empty_assignment_with_demand_fails(self, t1_instance):
        report = check_conservation(t1_instance.graph, FlowAssignment(),
                                    t1_instance.commodities)
        assert not report.ok

    def test_unknown_edge_rejected(self, t1_instance):
        flows = FlowAssignment()
        flows.add_arc("u1", NodeRef(1, "u1"), NodeRef(1, "u2"), 1.0)
        with pytest.raises(MlgError, match="nonexistent"):
            check_conservation(t1_instance.graph, flows, t1_instance.commodities)


class TestCapacities:
    def test_optimal_t1_within_caps(self, t1_instance):
        solution = solve_capacitated(t1_instance)
        assert check_capacities(t1_instance.graph, solution.flow_assignment).ok

    def test_inter_edge_excess(self, t1_instance):
        flows = FlowAssignment()
        flows.add_arc("u1", t1_instance.service_node, NodeRef(2, "s1"), 5.5)
        report = check_capacities(t1_instance.graph, flows)
        assert not report.ok
        assert report.violations[0][1] == pytest.approx(0.5)

    def test_unbounded_edge_never_violates(self, t1_instance):
        flows = FlowAssignment()
        flows.add_arc("u1", NodeRef(3, "u1"), NodeRef(2, "u1"), 1e9)
        assert check_capacities(t1_instance.graph, flows).ok


class TestProjection:
    def realizations_for(self, instance, *edges):
        return {e.key: realization_path(instance.graph, e) for e in edges}

    def test_t1_projection(self, t1_instance):
        g = t1_instance.graph
        edge = g.find_intra(2, "s1", "u1")
        increment = project_flows_down(
            g, [(edge, 3.0)], self.realizations_for(t1_instance, edge))
        b1 = t1_instance.channel_edges["b1"]
        b3 = t1_instance.channel_edges["b3"]
        assert increment[b1.key] == pytest.approx(3.0)
        assert increment[b3.key] == pytest.approx(3.0)

    def test_zero_flow_no_change(self, t1_instance):
        g = t1_instance.graph
        edge = g.find_intra(2, "s1", "u1")
        assert project_flows_down(g, [(edge, 0.0)], {}) == {}

    def test_missing_realization_raises(self, t1_instance):
        g = t1_instance.graph
        edge = g.find_intra(2, "s1", "u1")
        with pytest.raises(MissingRealization):
            project_flows_down(g, [(edge, 1.0)], {})

    def test_additivity(self, t1_instance):
        g = t1_instance.graph
        e1 = g.find_intra(2, "s1", "u1")
        e2 = g.find_intra(2, "s2", "u2")
        realizations = self.realizations_for(t1_instance, e1, e2)
        combined = project_flows_down(g, [(e1, 2.0), (e2, 5.0)], realizations)
        first = project_flows_down(g, [(e1, 2.0)], realizations)
        second = project_flows_down(g, [(e2, 5.0)], realizations)
        for key in set(first) | set(second):
            total = first.get(key, 0.0) + second.get(key, 0.0)
            assert combined.get(key, 0.0) == pytest.approx(total, abs=1e-12)

    def test_demand_preserved_at_access_node(self, t1_instance):
        g = t1_instance.graph
        e1 = g.find_intra(2, "s1", "u1")
        e2 = g.find_intra(2, "s2", "u2")
        realizations = self.realizations_for(t1_instance, e1, e2)
        increment = project_flows_down(g, [(e1, 3.0), (e2, 4.0)], realizations)
        for sub, demand in (("u1", 3.0), ("u2", 4.0)):
            entering = sum(v for k, v in increment.items()
                           if k[0] == "intra" and k[1] == 1 and sub in k[2:])
            assert entering == pytest.approx(demand, abs=1e-9)
