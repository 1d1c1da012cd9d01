"""Oracle enumeration and the property-test harness."""

import pytest

from fractions import Fraction as Q

from flathull import coxeter as cx
from flathull import flats as fl
from flathull import hull as hl
from flathull import models as md
from flathull import verify as vf

TREE2 = md.TreeModel(q=2, radius=2)
TREE3 = md.TreeModel(q=3, radius=2)


def test_tree_oracle_lines_through_base():
    res = vf.oracle_apartments_containing(TREE2, [md.base_vertex(TREE2)], 2)
    # [DERIVED] frozen from the oracle's own first run
    assert len(res.apartments) == 12
    assert dict(res.bounds)["window_radius"] == 2


def test_tree_oracle_matches_path_pair_enumeration():
    for model in (TREE2, TREE3):
        res = vf.oracle_apartments_containing(
            model, [md.base_vertex(model)], model.radius)
        pairs = vf.tree_lines_by_path_pairs(model, model.radius)
        assert len(res.apartments) == len(pairs)
        assert {frozenset(a.image()) for a in res.apartments} == \
            {frozenset(line) for line in pairs}


def test_oracle_full_apartment_unique():
    line = md.tree_line(TREE2, (0, 0), (1, 1))
    res = vf.oracle_apartments_containing(TREE2, line.image(), 2)
    assert len(res.apartments) == 1
    assert set(res.apartments[0].image()) == set(line.image())


def test_oracle_tripod_empty():
    tripod = [md.Vertex("tree", a) for a in ((), (0,), (1,), (2,))]
    res = vf.oracle_apartments_containing(TREE2, tripod, 2)
    assert res.apartments == ()


def test_oracle_results_reverify():
    res = vf.oracle_apartments_containing(TREE2, [md.base_vertex(TREE2)], 2)
    imgs = [frozenset(a.image()) for a in res.apartments]
    assert len(set(imgs)) == len(imgs)
    for a in res.apartments:
        md.eucl_apartment(TREE2, dict(a.mapping))  # raises if not isometric
        assert md.base_vertex(TREE2) in set(a.image())


def test_oracle_rejects_oversized_query():
    far = md.Vertex("tree", (0, 0))
    with pytest.raises(vf.OracleError):
        vf.oracle_apartments_containing(TREE2, [far, md.Vertex("tree", (1, 1))], 1)


def test_oracle_confirms_solver_tree():
    tree = md.TreeModel(q=2, radius=4)
    line = md.tree_line(tree, (0, 0), (1, 1))
    seg = fl.flat_polyhedron(line, [cx.Halfspace((1,), Q(-1)),
                                    cx.Halfspace((-1,), Q(-1))])
    cert = hl.apartment_containing_polyhedron(tree, seg)
    res = vf.oracle_apartments_containing(tree, fl.realize(tree, seg), 2)
    assert vf.oracle_confirms(res, cert.apartment)


def test_oracle_confirms_solver_lattice():
    lattice = md.LatticeModel(q=2, radius=3)
    ap = md.frame_apartment(lattice, [[(1,), (), ()], [(), (1,), ()],
                                      [(), (), (1,)]])
    tri = fl.flat_polyhedron(ap, [cx.Halfspace((1, 0), Q(0)),
                                  cx.Halfspace((-1, 1), Q(0)),
                                  cx.Halfspace((0, -1), Q(-1))])
    cert = hl.apartment_containing_polyhedron(lattice, tri)
    res = vf.oracle_apartments_containing(lattice, fl.realize(lattice, tri), 1)
    assert res.apartments
    assert vf.oracle_confirms(res, cert.apartment)


def test_oracle_rejects_foreign_apartment():
    res = vf.oracle_apartments_containing(TREE2, [md.Vertex("tree", (0,))], 2)
    # a line avoiding (0,) entirely cannot extend any oracle answer
    other = md.tree_line(TREE2, (1, 1), (2, 0))
    assert not vf.oracle_confirms(res, other)


def test_property_suite_default_passes():
    rep = vf.property_suite(vf.SuiteConfig(samples=4, lattice_radius=3))
    assert rep.passed
    names = {r.name for r in rep.records}
    assert "axioms-tree" in names and "lattice-solver-vs-oracle" in names
    assert all(r.passed for r in rep.records)


def test_property_suite_fault_injection():
    rep = vf.property_suite(vf.SuiteConfig(samples=2, fault_injection=True))
    assert not rep.passed
    by_name = {r.name: r for r in rep.records}
    assert not by_name["axioms-tree"].passed
    assert by_name["solver-vs-oracle"].note.startswith("skipped")


def test_property_suite_zero_samples_vacuous():
    rep = vf.property_suite(vf.SuiteConfig(samples=0))
    assert rep.passed
    assert "warning" in rep.records[0].note


def test_property_suite_invalid_config():
    with pytest.raises(vf.OracleError):
        vf.property_suite(vf.SuiteConfig(samples=-1))
    with pytest.raises(vf.OracleError):
        vf.property_suite(vf.SuiteConfig(tree_radius=0))
