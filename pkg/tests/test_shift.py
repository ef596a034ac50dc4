"""Quotient shift: fold rule, transitions, weight table, and the DP."""

import pytest

from buildingflow import shift
from buildingflow.shift import QVertex, QuotientEdge


def E(sm, sn, tm, tn):
    return QuotientEdge.from_vertices(sm, sn, tm, tn)


def by_target(trans):
    return {e.target: w for e, w in trans.items()}


def test_sector_neighbors_cases():
    assert set(shift.sector_neighbors(QVertex(0, 0))) == {QVertex(1, 0), QVertex(1, 1)}
    assert set(shift.sector_neighbors(QVertex(3, 1))) == {
        QVertex(2, 1), QVertex(4, 1), QVertex(3, 0),
        QVertex(3, 2), QVertex(2, 0), QVertex(4, 2),
    }
    assert set(shift.sector_neighbors(QVertex(2, 2))) == {
        QVertex(3, 2), QVertex(2, 1), QVertex(3, 3), QVertex(1, 1),
    }
    assert set(shift.sector_neighbors(QVertex(4, 0))) == {
        QVertex(5, 0), QVertex(3, 0), QVertex(4, 1), QVertex(5, 1),
    }


def test_fold_examples():
    for m in range(1, 5):
        assert shift.fold(m - 1, -1) == QVertex(m, 1)
    assert shift.fold(1, 2) == QVertex(2, 1)
    assert shift.fold(-1, -1) == QVertex(1, 0)
    assert shift.fold(2, 1) == QVertex(2, 1)  # already inside


def test_edge_names_roundtrip():
    for e in shift.all_valid_edges(5):
        assert QuotientEdge.from_doubled(e.k2, e.l2) == e
        assert e.displacement in shift.DISPLACEMENTS
    with pytest.raises(ValueError):
        QuotientEdge.from_doubled(2, 2)  # both even: no edge
    with pytest.raises(ValueError):
        QuotientEdge.from_doubled(0, 1)  # source would leave the sector


def test_base_edge_name():
    b = shift.base_edge()
    assert (b.k2, b.l2) == (1, 0)
    assert b.pretty() == "e(1/2,0)"


@pytest.mark.parametrize("q", [2, 3, 5])
def test_transition_rule_interior(q):
    # straight edge arriving at (4, 1), deep inside the sector
    trans = by_target(shift.edge_transitions(E(3, 1, 4, 1), q))
    assert trans == {
        QVertex(5, 1): 1,
        QVertex(4, 2): q - 1,
        QVertex(3, 0): q * q - q,
    }


@pytest.mark.parametrize("q", [2, 3, 5])
def test_transition_rule_axis(q):
    for m in (2, 3, 5):
        trans = by_target(shift.edge_transitions(E(m - 1, 0, m, 0), q))
        assert trans == {QVertex(m + 1, 0): 1, QVertex(m, 1): q * q - 1}


@pytest.mark.parametrize("q", [2, 3, 5])
def test_transition_rule_origin(q):
    trans = by_target(shift.edge_transitions(E(1, 1, 0, 0), q))
    assert trans == {QVertex(1, 0): q * q}


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_out_weights_sum_and_alphabet(q):
    allowed = shift.weight_alphabet(q)
    for e in shift.all_valid_edges(6):
        trans = shift.edge_transitions(e, q)
        assert sum(trans.values()) == q * q
        assert set(trans.values()) <= allowed
        for succ in trans:
            assert succ.is_valid()


def test_profiles_q2_hand_values():
    profs = shift.dp_profiles(2, 3)

    def named(p):
        return {(e.k2, e.l2): c for e, c in p.items()}

    assert named(profs[0]) == {(1, 0): 1}
    assert named(profs[1]) == {(3, 0): 1, (2, 1): 3}
    assert named(profs[2]) == {(5, 0): 1, (4, 1): 3, (3, 2): 6, (1, 1): 6}
    assert named(profs[3]) == {
        (1, 0): 24, (3, 1): 18, (4, 3): 12, (5, 2): 6, (6, 1): 3, (7, 0): 1,
    }
    assert sum(profs[3].values()) == 64


@pytest.mark.parametrize("q", [2, 3])
def test_mass_conservation_and_grading(q):
    profs = shift.dp_profiles(q, 8)
    for s, p in enumerate(profs):
        assert shift.profile_mass(p) == (q * q) ** s
        for e in p:
            assert (e.k2 + e.l2) % 3 == (1 + 2 * s) % 3


def test_dp_examples():
    assert shift.dp_g(2, 6) == 1536
    assert shift.dp_f(2, 9) == 38400
    assert shift.dp_g(3, 5) == 0
    assert shift.dp_f(2, 4) == 0


def test_dp_ratio_rigidity():
    for q in (2, 3):
        gs = [shift.dp_g(q, 3 * n) for n in range(1, 5)]
        fs = [shift.dp_f(q, 3 * n) for n in range(1, 5)]
        for a, b in zip(gs, gs[1:]):
            assert b == a * q**6
        for a, b in zip(fs, fs[1:]):
            assert b == a * q**3 * (q * q + q - 1)


def test_three_step_coefficients():
    assert shift.three_step_coefficients(2) == (24, 32, 32, 64)
    assert shift.three_step_coefficients(3) == (432, 486, 486, 729)
    # combined with the step-3 profile this reproduces g_6
    prof = shift.dp_profiles(2, 3)[3]
    coeffs = shift.three_step_coefficients(2)
    feeders = [
        QuotientEdge.from_doubled(1, 0),
        QuotientEdge.from_doubled(3, 1),
        QuotientEdge.from_doubled(4, 3),
        QuotientEdge.from_doubled(5, 5),
    ]
    total = sum(c * prof.get(e, 0) for c, e in zip(coeffs, feeders))
    assert total == 1536 == shift.dp_g(2, 6)


def test_graph_bounds_and_reachability():
    for q in (2, 3):
        table = shift.build_graph(q, 4)
        assert set(table) == set(shift.all_valid_edges(4))
        for e, succs in table.items():
            assert max(e.source.m, e.target.m) <= 4
            assert sum(succs.values()) == q * q


def test_graph_three_cycle_q2():
    table = shift.build_graph(2, 3)
    base = shift.base_edge()
    e_up = QuotientEdge.from_doubled(2, 1)
    e_down = QuotientEdge.from_doubled(1, 1)
    assert table[base][e_up] == 3
    assert table[e_up][e_down] == 2
    assert table[e_down][base] == 4
    # the only length-3 cycle through the base edge
    cycles = [
        (a, b)
        for a in table[base]
        if a in table
        for b in table[a]
        if b in table and base in table[b]
    ]
    assert cycles == [(e_up, e_down)]
    w = table[base][e_up] * table[e_up][e_down] * table[e_down][base]
    assert w == 24 == shift.dp_g(2, 3)


def test_dot_export_deterministic():
    table = shift.build_graph(2, 3)
    dot1 = shift.graph_to_dot(table)
    dot2 = shift.graph_to_dot(shift.build_graph(2, 3))
    assert dot1 == dot2
    assert '"e(1/2,1/2)" -> "e(1/2,0)" [label="4"];' in dot1


def test_graph_records_wire_format():
    table = shift.build_graph(2, 3)
    recs = shift.graph_records(table)
    assert recs == sorted(
        recs, key=lambda r: (r["from"]["k2"], r["from"]["l2"], r["to"]["k2"], r["to"]["l2"])
    )
    first = recs[0]
    assert first["from"] == {"k2": 1, "l2": 0}
    assert isinstance(first["weight"], str)
