import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from energynet.energy import dipole, energy_inner, energy_norm
from energynet.frame import (
    analysis,
    build_frame,
    current,
    current_decomposition,
    currents,
    frame_diagnostics,
    frame_norm_squared,
    orient,
    path_dissipation,
    synthesis,
)
from energynet.models import PathModel, TriangleModel, random_connected_network, triangle_network
from energynet.network import Network


def unit_triangle():
    return triangle_network(TriangleModel(1.0, 1.0, 1.0))


def test_lexicographic_orientation():
    ori = orient(unit_triangle())
    assert ori.edges == (("0", "1"), ("0", "2"), ("1", "2"))
    assert ori.scheme == "arbitrary-lexicographic"


def test_current_orientation_on_a_series_path():
    net = PathModel([1.0, 3.0]).network()
    assert orient(net, "current-induced", "0", "2").edges == (("0", "1"), ("1", "2"))
    assert orient(net, "current-induced", "2", "0").edges == (("1", "0"), ("2", "1"))


def test_current_orientation_unit_triangle():
    net = unit_triangle()
    ori = orient(net, "current-induced", "0", "1")
    assert set(ori.edges) == {("0", "1"), ("0", "2"), ("2", "1")}
    u = dipole(net, "0", "1")
    assert current(net, u, ("0", "2")) == pytest.approx(1 / 3)
    assert current(net, u, ("2", "1")) == pytest.approx(1 / 3)


def test_balanced_bridge_falls_back_to_lexicographic():
    # Wheatstone bridge with equal arms: no current through the bridge b-c
    net = Network(["s", "b", "c", "t"],
                  [("s", "b", 1.0), ("s", "c", 1.0), ("b", "t", 1.0), ("c", "t", 1.0),
                   ("b", "c", 5.0)])
    ori = orient(net, "current-induced", "s", "t")
    assert ("b", "c") in ori.edges


def test_geometric_orientation_points_away_from_base():
    net = PathModel([1.0, 1.0, 1.0]).network()
    assert orient(net, "geometric").edges == (("0", "1"), ("1", "2"), ("2", "3"))


def test_orientation_errors():
    net = unit_triangle()
    with pytest.raises(ValueError):
        orient(net, "current-induced", "0", "0")
    with pytest.raises(ValueError):
        orient(net, "current-induced")
    with pytest.raises(ValueError):
        orient(net, "sideways")


def test_current_basics():
    net = PathModel([1.0, 2.0]).network()
    u = dipole(net, "0", "2")
    assert current(net, u, ("0", "1")) == pytest.approx(1.0)
    assert current(net, u, ("1", "2")) == pytest.approx(1.0)
    assert current(net, u, ("1", "0")) == pytest.approx(-1.0)
    assert np.allclose(currents(net, np.full(3, 2.0)), 0.0)
    with pytest.raises(KeyError):
        current(net, u, ("0", "2"))


def test_unit_triangle_current_and_frame_norm():
    net = unit_triangle()
    assert current(net, dipole(net, "0", "1"), ("0", "1")) == pytest.approx(2 / 3)
    diag = frame_diagnostics(build_frame(net))
    np.testing.assert_allclose(diag.norms_squared, [2 / 3] * 3, rtol=1e-12)
    assert diag.redundancy == 1 and not diag.is_onb and diag.rank == 2


def test_path_frame_is_onb():
    net = PathModel([0.5, 3.0, 7.0, 1.25]).network()
    diag = frame_diagnostics(build_frame(net))
    assert diag.is_onb and diag.redundancy == 0
    np.testing.assert_allclose(diag.norms_squared, 1.0, rtol=1e-12)


def test_tree_coefficients_are_scaled_differences():
    net = random_connected_network(12, np.random.default_rng(5), tree=True)
    frame = build_frame(net)
    u = np.random.default_rng(6).standard_normal(len(net))
    coeffs = analysis(frame, u)
    expected = [np.sqrt(net.conductance(x, y)) * (u[net.index[x]] - u[net.index[y]])
                for x, y in frame.oriented]
    np.testing.assert_allclose(coeffs, expected, rtol=1e-10, atol=1e-12)


def test_analysis_of_a_frame_vector_is_a_gramian_column():
    frame = build_frame(random_connected_network(10, np.random.default_rng(8)))
    k = 3
    np.testing.assert_allclose(analysis(frame, frame.vectors[k]), frame.gramian[:, k], atol=1e-12)


def test_cycle_coefficients_synthesize_to_zero():
    frame = build_frame(unit_triangle())
    # v01 + v12 - v02 = 0 with the lexicographic orientation (0,1), (0,2), (1,2)
    out = synthesis(frame, [1.0, -1.0, 1.0])
    assert np.abs(out.values).max() <= 1e-15
    with pytest.raises(ValueError):
        synthesis(frame, [1.0, 2.0])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from(["lex", "geometric", "current-induced"]))
def test_parseval_and_reconstruction(seed, scheme):
    rng = np.random.default_rng(seed)
    net = random_connected_network(int(rng.integers(3, 25)), rng)
    s, t = net.vertices[0], net.vertices[-1]
    frame = build_frame(net, orient(net, scheme, s, t))
    u = rng.standard_normal(len(net))
    norm2 = energy_inner(net, u, u)
    assert frame_norm_squared(frame, u) == pytest.approx(norm2, rel=1e-9)
    back = synthesis(frame, analysis(frame, u)).values
    assert energy_norm(net, back - u) <= 1e-9 * np.sqrt(norm2)
    rebuilt = current_decomposition(frame, u).values
    assert energy_norm(net, rebuilt - u) <= 1e-9 * np.sqrt(norm2)


def test_coefficients_are_scaled_currents(random_nets):
    for net in random_nets[:5]:
        frame = build_frame(net)
        u = np.random.default_rng(0).standard_normal(len(net))
        coeffs = analysis(frame, u)
        cur = currents(net, u, frame.oriented)
        np.testing.assert_allclose(coeffs, cur / np.sqrt(frame.conductances), rtol=1e-9, atol=1e-11)


def test_frame_norm_is_orientation_independent():
    net = random_connected_network(15, np.random.default_rng(11))
    u = np.random.default_rng(12).standard_normal(len(net))
    values = [frame_norm_squared(build_frame(net, orient(net, s, net.vertices[1], net.vertices[7])), u)
              for s in ("lex", "geometric", "current-induced")]
    assert max(values) - min(values) <= 1e-12 * max(values)


def test_kirchhoff_node_law(random_nets):
    for net in random_nets[:6]:
        s, t = net.vertices[0], net.vertices[-1]
        u = dipole(net, s, t)
        for x in net.vertices:
            net_out = sum(current(net, u, (x, y)) for y in net.neighbors(x))
            assert net_out == pytest.approx((x == s) - (x == t), abs=1e-10)


def test_dissipation_along_a_path_bounds_the_potential_drop():
    net = random_connected_network(10, np.random.default_rng(2))
    u = np.random.default_rng(3).standard_normal(10)
    path = [net.vertices[0]]
    while len(path) < 4:
        nxt = [y for y in net.neighbors(path[-1]) if y not in path]
        if not nxt:
            break
        path.append(nxt[0])
    drop = abs(u[net.index[path[0]]] - u[net.index[path[-1]]])
    resist = sum(1.0 / net.conductance(a, b) for a, b in zip(path[:-1], path[1:]))
    assert drop**2 <= resist * path_dissipation(net, u, path) * (1 + 1e-12)


def test_onb_exactly_for_trees(random_nets):
    for net in random_nets:
        diag = frame_diagnostics(build_frame(net))
        assert diag.is_onb == net.is_tree()
        assert diag.rank == len(net) - 1
        assert diag.idempotence_defect <= 1e-9
        assert np.all(diag.norms_squared <= 1 + 1e-12)


def test_edges_on_cycles_have_norm_below_one():
    net = unit_triangle()
    assert np.all(frame_diagnostics(build_frame(net)).norms_squared < 1 - 1e-6)


def test_diagnostic_rows():
    rows = dict(frame_diagnostics(build_frame(unit_triangle())).rows())
    assert rows["is_onb"] == "false"
    assert rows["norm2[0->1]"] == "0.666666666667"
    assert rows["trace"] == "2"


def test_bad_orientation_rejected():
    net = unit_triangle()
    from energynet.frame import OrientedEdgeSet

    with pytest.raises(ValueError):
        build_frame(net, OrientedEdgeSet((("0", "1"), ("1", "0"), ("1", "2")), "lex"))
