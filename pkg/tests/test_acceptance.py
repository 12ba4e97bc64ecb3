"""Acceptance gate: the eleven primary criteria at their stated tolerances.

Each test records one PASS/FAIL line (printed in the pytest terminal summary)
and then asserts.  Criteria that combine several checks fail when any part
fails; the recorded line names the failing parts and the measured values.
"""

import math

import numpy as np
import pytest

from conftest import random_corpus
from energynet.cli import main
from energynet.energy import dipole, energy_gram
from energynet.frame import build_frame, current, frame_diagnostics, orient
from energynet.models import (
    BinaryTreeModel,
    GeometricModel,
    PathModel,
    TriangleModel,
    binary_tree_network,
    bounded_metric_probe,
    deficiency_recurrence,
    dipole_path_defect,
    friedrichs_domain_test,
    harmonic_geometric,
    metric_axioms_defect,
    path_closed_forms,
    tree_energy_trend,
    tree_interior,
    tree_reversibility_defect,
    triangle_closed_forms,
    triangle_network,
    triangle_spectrum,
)
from energynet.network import load
from energynet.operators import (
    adjointness_defect,
    build_K,
    build_L,
    deficiency_probe,
    friedrichs_matrix,
    greedy_growth_path,
    greens_gauss_check,
    harmonic_fixed_point_agreement,
    quadratic_form_defect,
    transition_operator,
)

RESULTS: dict[int, str] = {}
CORPUS = ["triangle", "tree", "path", "strip", "mesh"]


class Checks:
    """Collects named sub-checks for one criterion."""

    def __init__(self, number, title):
        self.number, self.title, self.failed, self.notes = number, title, [], []

    def check(self, name, ok, value=None):
        if value is not None:
            self.notes.append(f"{name}={value:.3g}" if isinstance(value, float) else f"{name}={value}")
        if not ok:
            self.failed.append(name)

    def finish(self):
        status = "FAIL" if self.failed else "PASS"
        line = f"{status} criterion {self.number:2d}: {self.title}"
        if self.failed:
            line += " [failed: " + ", ".join(self.failed) + "]"
        if self.notes:
            line += " (" + "; ".join(self.notes) + ")"
        RESULTS[self.number] = line
        print(line)
        assert not self.failed, line


@pytest.fixture(scope="module")
def big_corpus():
    return random_corpus(count=50, max_vertices=50, seed=42)


@pytest.fixture(scope="module")
def all_networks(corpus, big_corpus):
    return list(corpus.values()) + big_corpus


def test_criterion_01_triangle_closed_forms():
    c = Checks(1, "triangle closed forms")
    unit = TriangleModel(1.0, 1.0, 1.0)
    v = dipole(triangle_network(unit), "0", "1").values
    c.check("unit dipole", np.max(np.abs((v - v[2]) - np.array([1 / 3, -1 / 3, 0.0]))) <= 1e-12)
    v01 = triangle_closed_forms(unit)["v01"]
    c.check("closed-form current is 2/3", 1.0 * (v01[0] - v01[1]) == 2 / 3)
    net = triangle_network(unit)
    c.check("solver current", abs(current(net, v, ("0", "1")) - 2 / 3) <= 1e-12)

    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(20):
        model = TriangleModel(*rng.uniform(0.1, 10.0, 3))
        net = triangle_network(model)
        frame = build_frame(net, orient(net, "lex"))
        forms = triangle_closed_forms(model)
        expected = {("0", "1"): forms["w01"], ("1", "2"): forms["w12"], ("0", "2"): -forms["w20"]}
        for k, e in enumerate(frame.oriented.edges):
            got, want = frame.vectors[k], expected[e]
            worst = max(worst, float(np.max(np.abs((got - got[2]) - (want - want[2])))))
    c.check("frame vectors", worst <= 1e-12, worst)
    c.finish()


def test_criterion_02_triangle_spectrum():
    c = Checks(2, "triangle spectrum and gap")
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(100):
        rep = triangle_spectrum(TriangleModel(*rng.uniform(0.1, 10.0, 3)))
        gap_err = abs(rep.gap - (rep.direct[2] - rep.direct[1])) / rep.direct.sum()
        worst = max(worst, rep.discrepancy, gap_err)
    c.check("formula vs eigh", worst <= 1e-10, worst)
    unit = triangle_spectrum(TriangleModel(1.0, 1.0, 1.0)).eigenvalues
    c.check("unit {0,3,3}", np.allclose(unit, [0.0, 3.0, 3.0], atol=1e-12))
    c.finish()


def test_criterion_03_parseval(corpus, big_corpus):
    c = Checks(3, "Parseval frame suite")
    rng = np.random.default_rng(42)
    parseval = idem = 0.0
    rank_ok = onb_ok = True
    for net in big_corpus:
        frame = build_frame(net, orient(net))
        diag = frame_diagnostics(frame)
        U = rng.normal(size=(100, len(net)))
        coeffs = energy_gram(net, frame.vectors, U)  # <w_e, u>_E, edges x samples
        norms = np.diag(energy_gram(net, U))
        parseval = max(parseval, float(np.max(np.abs(np.sum(coeffs**2, axis=0) - norms) / norms)))
        idem = max(idem, diag.idempotence_defect)
        rank_ok &= diag.rank == len(net) - 1
        onb_ok &= diag.is_onb == net.is_tree()
    for net in corpus.values():
        onb_ok &= frame_diagnostics(build_frame(net, orient(net))).is_onb == net.is_tree()
    c.check("Parseval identity", parseval <= 1e-9, parseval)
    c.check("idempotence", idem <= 1e-9, idem)
    c.check("rank |V|-1", rank_ok)
    c.check("ONB iff tree", onb_ok)
    c.finish()


def test_criterion_04_factorization(all_networks):
    c = Checks(4, "LL* factorization, quadratic form, adjointness")
    ll = qf = adj = 0.0
    for net in all_networks:
        ll = max(ll, friedrichs_matrix(net).defect)
        qf = max(qf, quadratic_form_defect(net))
        adj = max(adj, adjointness_defect(net, build_K(net)), adjointness_defect(net, build_L(net)))
    c.check("LL* = Laplacian", ll <= 1e-10, ll)
    c.check("quadratic form", qf <= 1e-10, qf)
    c.check("K/L adjointness", adj <= 1e-10, adj)
    c.finish()


def test_criterion_05_greens_gauss(all_networks):
    c = Checks(5, "Greens-Gauss identity")
    worst = max(greens_gauss_check(net) for net in all_networks)
    c.check("defect", worst <= 1e-9, worst)
    c.finish()


def test_criterion_06_transition(all_networks):
    c = Checks(6, "transition operator")
    asym = radius = fact = 0.0
    fixed = True
    for net in all_networks:
        rep = transition_operator(net)
        asym = max(asym, rep.asymmetry)
        radius = max(radius, rep.spectral_radius)
        fact = max(fact, rep.factorization_defect)
        fixed &= harmonic_fixed_point_agreement(net)
    c.check("asymmetry", asym <= 1e-12, asym)
    c.check("spectral radius", radius <= 1 + 1e-12, radius)
    c.check("Laplacian = diag(c)(I-P)", fact <= 1e-12, fact)
    c.check("harmonic iff fixed", fixed)
    c.finish()


def test_criterion_07_path_model(big_corpus):
    c = Checks(7, "path model")
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(20):
        model = PathModel(list(rng.uniform(0.1, 10.0, int(rng.integers(3, 40)))))
        x = int(rng.integers(0, model.N))
        y = int(rng.integers(x + 1, model.N + 1))
        worst = max(worst, dipole_path_defect(model, x, y))
    c.check("closed-form dipole", worst <= 1e-10, worst)
    c.check("dist(0,3) = 1.75", path_closed_forms(PathModel([1.0, 2.0, 4.0]), 0, 3)[1] == 1.75)
    axioms = max(metric_axioms_defect(net) for net in big_corpus[:10])
    c.check("metric axioms", axioms <= 1e-10, axioms)
    geo = bounded_metric_probe(PathModel(lambda n: 2.0**n, 320), 320)
    c.check("2^n bounded", geo.classification == "bounded" and abs(geo.limit - 1.0) <= 1e-6,
            geo.limit)
    unit = bounded_metric_probe(PathModel([1.0] * 40), 40)
    c.check("unit unbounded", unit.classification == "unbounded")
    c.finish()


def test_criterion_08_geometric_model():
    c = Checks(8, "geometric model")
    for Q in (1.5, 2.0, 5.0):
        rep = deficiency_recurrence(GeometricModel(Q, 41))
        err = abs(rep.diff_ratio[40] - 1.0 / Q)
        c.check(f"ratio->1/Q at n=40 (Q={Q:g})", err <= 1e-6, err)
    for Q, N in ((1.5, 640), (2.0, 320), (5.0, 320)):
        verdict = deficiency_recurrence(GeometricModel(Q, N)).energy_classification
        c.check(f"energy convergent (Q={Q:g})", verdict == "convergent")
    verdict = deficiency_recurrence(GeometricModel(1.0, 640)).energy_classification
    c.check("unit path divergent", verdict == "divergent")
    harm = harmonic_geometric(GeometricModel(2.0, 30))
    c.check("harmonic energy", abs(harm.energy - harm.limit) <= 1e-8, abs(harm.energy - harm.limit))
    dom = friedrichs_domain_test(GeometricModel(2.0, 40), lambda n: 2.0**-n)
    c.check("domain test divergent", dom.classification == "divergent"
            and np.allclose(dom.terms, dom.terms[0], rtol=1e-12))
    c.finish()


def test_criterion_09_binary_tree():
    c = Checks(9, "binary tree")
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(10):
        p = rng.dirichlet([1.0, 1.0, 1.0])
        worst = max(worst, tree_reversibility_defect(BinaryTreeModel(*p, depth=8)))
    c.check("reversibility", worst <= 1e-12, worst)
    finite = tree_energy_trend(BinaryTreeModel(0.4, 0.4, 0.2, 5))
    c.check("(0.4,0.4,0.2) finite", finite.classification == "finite")
    c.notes.append(f"trend(0.4,0.4,0.2)={finite.classification}")
    infinite = tree_energy_trend(BinaryTreeModel(0.25, 0.25, 0.5, 5))
    c.check("(0.25,0.25,0.5) infinite", infinite.classification == "infinite")
    c.notes.append(f"trend(0.25,0.25,0.5)={infinite.classification}")
    c.finish()


def test_criterion_10_growth_bound():
    c = Checks(10, "growth bound on defect vectors")
    cases = []
    for Q, N in ((1.5, 640), (2.0, 320), (5.0, 320), (1.0, 40)):
        net = GeometricModel(Q, N).network()
        cases.append((net, [str(n) for n in range(N)]))
    for p in ((0.4, 0.4, 0.2), (0.25, 0.25, 0.5), (0.45, 0.45, 0.1)):
        for depth in (5, 6, 7, 8):
            model = BinaryTreeModel(*p, depth=depth)
            cases.append((binary_tree_network(model).network, tree_interior(model)))
    worst = math.inf
    for net, interior in cases:
        rep = deficiency_probe(net, interior)
        worst = min(worst, greedy_growth_path(net, rep.values, interior, slack=math.inf).min_slack)
    c.check("min relative slack", worst >= -1e-10, worst)
    c.finish()


def test_criterion_11_cli_golden(capsys, data_dir):
    c = Checks(11, "CLI golden corpus and exit codes")
    identical = True
    for name in CORPUS:
        path = str(data_dir / f"{name}.json")
        net = load(path)
        x, y = net.vertices[0], net.vertices[-1]
        for argv in (["validate", path], ["dipole", path, x, y], ["resistance", path, "--all-pairs"],
                     ["gramian", path], ["frame-check", path], ["frame-check", path, "--csv"],
                     ["currents", path, x, y], ["factorize", path], ["transition", path]):
            runs = []
            for _ in range(2):
                code = main(argv)
                runs.append((code, capsys.readouterr().out))
            identical &= runs[0] == runs[1] and runs[0][0] == 0 and runs[0][1] != ""
    c.check("byte-identical", identical)
    codes = {}
    for label, argv in {
        "valid": ["validate", str(data_dir / "mesh.json")],
        "invalid": ["gramian", str(data_dir / "broken.json")],
        "usage": ["dipole", str(data_dir / "triangle.json"), "0", "nowhere"],
        "missing file": ["validate", str(data_dir / "absent.json")],
        "bad flag": ["gramian", "--bogus"],
    }.items():
        codes[label] = main(argv)
        capsys.readouterr()
    expected = {"valid": 0, "invalid": 1, "usage": 2, "missing file": 2, "bad flag": 2}
    c.check("exit codes", codes == expected, ",".join(f"{k}:{v}" for k, v in codes.items()))
    c.finish()
