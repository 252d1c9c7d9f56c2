from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from ncclab import fixtures, flow, network, reduction, ds
from ncclab.errors import Infeasible, ParseError, Unbounded
from ncclab.network import Edge, Network
from ncclab.simplex import solve_lp


def small_fixtures():
    rng = np.random.default_rng(2024)
    nets = [fixtures.butterfly(), fixtures.path()]
    for _ in range(12):
        nv = int(rng.integers(4, 9))
        nets.append(fixtures.random_dag(rng, nv, int(rng.integers(nv, 2 * nv)), int(rng.integers(1, 4))))
    return nets + [flow.undirect(n) for n in nets]


# -- network model and file format --------------------------------------------


def test_undirect_single_edge():
    u = flow.undirect(Network(2, (Edge(0, 1, 2.0),), ((0, 1),)))
    assert not u.directed and [(e.u, e.v, e.cap) for e in u.edges] == [(0, 1, 2.0)]


def test_undirect_merges_antiparallel_edges():
    net = Network(2, (Edge(0, 1, 1.0), Edge(1, 0, 1.0)), ((0, 1),))
    u = flow.undirect(net)
    assert [(e.u, e.v, e.cap) for e in u.edges] == [(0, 1, 2.0)]
    parallel = Network(2, (Edge(0, 1, 1.0), Edge(0, 1, 1.0)), ((0, 1),), directed=False)
    assert flow.flow_rate(u).rate == pytest.approx(flow.flow_rate(parallel).rate, abs=1e-9)


def test_undirected_reduction_network_keeps_edge_count():
    prob = reduction.InversionProblem(ds.InvBlock(8, 2))
    net = reduction.build_reduction(prob, q=4).network()
    assert len(flow.undirect(net).edges) == len(net.edges)


def test_network_text_round_trip():
    net = fixtures.butterfly()
    back = network.loads(network.dumps(net))
    assert back.edges == net.edges and back.pairs == net.pairs and back.directed


@pytest.mark.parametrize("text", [
    "",
    "network directed 2 1 1\ne 0 1 x\np 0 1\n",
    "network directed 2 2 1\ne 0 1 1\np 0 1\n",
    "graph 2 1 1\n",
    "network directed 2 1 1\ne 0 5 1\np 0 1\n",
])
def test_malformed_network_files(text):
    with pytest.raises(ParseError):
        network.loads(text)


def test_capacity_format():
    assert network.format_capacity(3.0) == "3"
    assert network.format_capacity(0.5) == "0.5"


# -- flow rates -----------------------------------------------------------------


def test_path_rate_is_bottleneck():
    assert flow.flow_rate(fixtures.path()).rate == pytest.approx(3.0, abs=1e-9)


def test_directed_butterfly_half():
    sol = flow.flow_rate(fixtures.butterfly())
    assert sol.rate == pytest.approx(0.5, abs=1e-6)
    # both commodities are forced through m1 -> m2
    load = sum(sol.flows[:, a].sum() for a, (u, v, _) in enumerate(sol.arcs) if (u, v) == (2, 3))
    assert load == pytest.approx(1.0, abs=1e-9)


def test_undirected_butterfly_one():
    assert flow.flow_rate(flow.undirect(fixtures.butterfly())).rate >= 1 - 1e-6


def test_scaling_scales_rate():
    net = fixtures.butterfly()
    assert flow.flow_rate(net.scaled(3.0)).rate == pytest.approx(1.5, abs=1e-9)


@pytest.mark.parametrize("idx", range(28))
def test_edge_lp_matches_path_lp(idx):
    net = small_fixtures()[idx]
    sol = flow.flow_rate(net)
    oracle = flow.flow_rate_paths(net)
    assert abs(sol.rate - oracle) <= 1e-7 * max(1.0, abs(oracle))
    assert flow.residuals(net, sol) < 1e-9
    assert sol.cs_residual < 1e-7


def test_flow_csv_header():
    csv = flow.flow_rate(fixtures.path()).to_csv()
    assert csv.splitlines()[0] == "commodity,u,v,flow"
    assert len(csv.splitlines()) == 4


def test_gap_report():
    rep = flow.ncc_gap_report(fixtures.butterfly(), 1.0)
    assert rep["directed_gap"] == pytest.approx(2.0)
    assert rep["directed_gap_flag"] and not rep["undirected_counterexample_flag"]
    rep = flow.ncc_gap_report(fixtures.path(), 3.0)
    assert rep["directed_gap"] == pytest.approx(1.0)


# -- long-pairs bound arithmetic ---------------------------------------------


def test_lemma_example_holds():
    res = flow.long_pairs_check(40, 100, Fraction(9, 10), 5)
    assert res["delta_prime_exact"] == "1/150"
    assert Fraction(res["delta_prime_exact"]) * 5 == Fraction(1, 30)
    assert res["edges_per_pair"] == 0.4 and res["holds"] is True and not res["vacuous"]


def test_lemma_vacuous_when_delta_small():
    res = flow.long_pairs_check(10, 10, Fraction(5, 6), 3)
    assert res["vacuous"] and res["holds"] is None


def test_lemma_zero_edges():
    res = flow.long_pairs_check(0, 4, Fraction(1, 2), 2)
    assert res["edges_per_pair"] == 0.0 and res["vacuous"]
    res = flow.long_pairs_check(0, 4, Fraction(1), 2)
    assert res["holds"] is False


# -- simplex --------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_simplex_matches_highs(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 6)), int(rng.integers(1, 6))
    A = rng.integers(0, 5, size=(m, n)).astype(float)
    A[:, A.sum(axis=0) == 0] = 1.0  # bounded: every column has a positive entry
    b = rng.integers(1, 10, size=m).astype(float)
    c = rng.integers(-3, 6, size=n).astype(float)
    res = solve_lp(c, A, b, None, None)
    ref = linprog(-c, A_ub=A, b_ub=b, method="highs")
    assert res.objective == pytest.approx(-ref.fun, abs=1e-7)
    assert res.certificate_residual(c, A, b, None, None) < 1e-7


def test_simplex_equality_rows():
    # max x + y with x + y = 2, x <= 1.5
    res = solve_lp([1, 1], np.array([[1.0, 0.0]]), np.array([1.5]), np.array([[1.0, 1.0]]), np.array([2.0]))
    assert res.objective == pytest.approx(2.0)


def test_simplex_unbounded_and_infeasible():
    with pytest.raises(Unbounded):
        solve_lp([1.0], np.array([[-1.0]]), np.array([1.0]), None, None)
    with pytest.raises(Infeasible):
        solve_lp([1.0], np.array([[1.0]]), np.array([1.0]), np.array([[1.0]]), np.array([3.0]))
