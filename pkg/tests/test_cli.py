"""Command-line interface: exit codes, documents, determinism."""

import os

import pytest

from fractions import Fraction as Q

from flathull import cli
from flathull import coxeter as cx
from flathull import flats as fl
from flathull import hull as hl
from flathull import models as md
from flathull import schema as sc
from flathull import spherical as sp

TREE = md.TreeModel(q=2, radius=4)
LATTICE = md.LatticeModel(q=2, radius=3)
FRAME = [[(1,), (), ()], [(), (1,), ()], [(), (), (1,)]]


@pytest.fixture
def triangle_file(tmp_path):
    ap = md.frame_apartment(LATTICE, FRAME)
    tri = fl.flat_polyhedron(ap, [cx.Halfspace((1, 0), Q(0)),
                                  cx.Halfspace((-1, 1), Q(0)),
                                  cx.Halfspace((0, -1), Q(-2))])
    p = tmp_path / "tri.txt"
    p.write_text(sc.print_document(sc.Document("polyhedron", tri)))
    return str(p)


def test_gen_model(tmp_path):
    out = tmp_path / "m.txt"
    assert cli.run(["gen", "--model", "tree", "--q", "3", "--radius", "5",
                    "--out", str(out)]) == 0
    doc = sc.parse_document(out.read_text())
    assert doc.payload == md.TreeModel(q=3, radius=5)


def test_hull_then_check(tmp_path, triangle_file):
    cert = tmp_path / "cert.txt"
    assert cli.run(["hull", "--in", triangle_file, "--out", str(cert)]) == 0
    assert cli.run(["check", str(cert)]) == 0


def test_check_rejects_any_single_field_mutation(tmp_path, triangle_file):
    cert = tmp_path / "cert.txt"
    assert cli.run(["hull", "--in", triangle_file, "--out", str(cert)]) == 0
    lines = cert.read_text().splitlines()
    image = set(sc.parse_document(cert.read_text()).payload.apartment.image())
    outsider = next(w for w in md.neighbors(LATTICE, md.base_vertex(LATTICE))
                    if w not in image)
    mutated = 0
    for i, line in enumerate(lines):
        bad = None
        if line.startswith("distance: "):
            bad = line.rsplit(" ; ", 1)[0] + " ; 99"
        elif line.startswith("placed: "):
            bad = line.rsplit(" @ ", 1)[0] + " @ 9,9"
        elif line.startswith("required: "):
            bad = "required: " + sc.format_vertex(outsider)
        if bad is None or bad == line:
            continue
        mutated += 1
        twisted = list(lines)
        twisted[i] = bad
        victim = tmp_path / f"bad{i}.txt"
        victim.write_text("\n".join(twisted) + "\n")
        assert cli.run(["check", str(victim)]) == 1, line
    assert mutated >= 3


def test_hull_rejects_tripod(tmp_path):
    tripod = tuple(md.Vertex("tree", a) for a in ((), (0,), (1,), (2,)))
    p = tmp_path / "tripod.txt"
    p.write_text(sc.print_document(sc.Document("vertexset", (TREE, tripod))))
    assert cli.run(["hull", "--in", str(p)]) == 1


def test_hull_from_vertex_set(tmp_path):
    seg = tuple(md.Vertex("tree", a) for a in ((), (0,), (1,)))
    p = tmp_path / "seg.txt"
    p.write_text(sc.print_document(sc.Document("vertexset", (TREE, seg))))
    cert = tmp_path / "cert.txt"
    assert cli.run(["hull", "--in", str(p), "--out", str(cert)]) == 0
    doc = sc.parse_document(cert.read_text())
    assert set(seg) <= set(doc.payload.apartment.image())


def test_hull_with_tangent(tmp_path):
    ap = md.frame_apartment(LATTICE, FRAME)
    base = ap.vertex((0, 0))
    pt = fl.flat_polyhedron(ap, [cx.Halfspace((1, 0), Q(0)),
                                 cx.Halfspace((-1, 0), Q(0)),
                                 cx.Halfspace((0, 1), Q(0)),
                                 cx.Halfspace((0, -1), Q(0))])
    a_x = hl.link_apartment_at(LATTICE, ap, base)
    poly_p = tmp_path / "pt.txt"
    poly_p.write_text(sc.print_document(sc.Document("polyhedron", pt)))
    tan_p = tmp_path / "tan.txt"
    tan_p.write_text(sc.print_document(sc.Document(
        "tangent", (LATTICE, base, sp.canonical_cycle(a_x.cycle)))))
    cert = tmp_path / "cert.txt"
    assert cli.run(["hull", "--in", str(poly_p), "--tangent", str(tan_p),
                    "--out", str(cert)]) == 0
    doc = sc.parse_document(cert.read_text())
    assert doc.payload.tangent == (base, sp.canonical_cycle(a_x.cycle))
    assert cli.run(["check", str(cert)]) == 0


def test_cone_command(tmp_path):
    line = md.tree_line(TREE, (0, 0), (1, 1))
    ray = fl.flat_polyhedron(line, [cx.Halfspace((1,), Q(0))])
    poly_p = tmp_path / "ray.txt"
    poly_p.write_text(sc.print_document(sc.Document("polyhedron", ray)))
    tan_p = tmp_path / "tan.txt"
    tan_p.write_text(sc.print_document(sc.Document(
        "tangent", (TREE, md.base_vertex(TREE), ((1,), (2,))))))
    cert = tmp_path / "cert.txt"
    assert cli.run(["cone", "--in", str(poly_p), "--tangent", str(tan_p),
                    "--out", str(cert)]) == 0
    assert cli.run(["check", str(cert)]) == 0


def test_chain_command(tmp_path):
    ap = md.frame_apartment(LATTICE, FRAME)
    docs = []
    for i in (1, 2):
        tri = fl.flat_polyhedron(ap, [cx.Halfspace((1, 0), Q(0)),
                                      cx.Halfspace((-1, 1), Q(0)),
                                      cx.Halfspace((0, -1), Q(-i))])
        docs.append(sc.print_document(sc.Document("polyhedron", tri)))
    p = tmp_path / "chain.txt"
    p.write_text("".join(docs))
    cert = tmp_path / "cert.txt"
    assert cli.run(["chain", "--in", str(p), "--out", str(cert)]) == 0
    assert cli.run(["check", str(cert)]) == 0


def test_parallel_command(tmp_path, triangle_file):
    out = tmp_path / "par.txt"
    assert cli.run(["parallel", "--in", triangle_file, "--radius", "2",
                    "--out", str(out)]) == 0
    doc = sc.parse_document(out.read_text())
    assert doc.kind == "vertexset"
    assert doc.payload[1]


def test_oracle_command(tmp_path):
    seg = tuple(md.Vertex("tree", a) for a in ((), (0,), (1,)))
    p = tmp_path / "seg.txt"
    p.write_text(sc.print_document(sc.Document("vertexset", (TREE, seg))))
    out = tmp_path / "oracle.txt"
    assert cli.run(["oracle", "--in", str(p), "--radius", "2",
                    "--out", str(out)]) == 0
    doc = sc.parse_document(out.read_text())
    assert doc.payload[1].apartments


def test_suite_command(tmp_path):
    out = tmp_path / "rep.txt"
    assert cli.run(["suite", "--model", "tree", "--q", "2", "--seed", "7",
                    "--samples", "3", "--out", str(out)]) == 0
    doc = sc.parse_document(out.read_text())
    assert doc.payload.passed
    assert all(r.passed for r in doc.payload.records)


def test_suite_fault_injection(tmp_path):
    out = tmp_path / "rep.txt"
    assert cli.run(["suite", "--samples", "2", "--fault-injection",
                    "--out", str(out)]) == 1
    doc = sc.parse_document(out.read_text())
    assert not doc.payload.passed
    skipped = [r for r in doc.payload.records if "skipped" in r.note]
    assert skipped


def test_suite_deterministic_under_seed(tmp_path):
    outs = []
    for name in ("a.txt", "b.txt"):
        out = tmp_path / name
        assert cli.run(["suite", "--seed", "11", "--samples", "3",
                        "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_export_formats(tmp_path):
    dot = tmp_path / "g.dot"
    assert cli.run(["export", "--model", "tree", "--q", "2", "--radius", "2",
                    "--format", "dot", "--out", str(dot)]) == 0
    assert dot.read_text().startswith("graph flathull {")
    svg = tmp_path / "g.svg"
    assert cli.run(["export", "--model", "lattice", "--q", "2",
                    "--radius", "2", "--format", "svg", "--link",
                    "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")


def test_usage_errors(tmp_path):
    assert cli.run(["hull"]) == 2
    assert cli.run(["nosuchcommand"]) == 2
    assert cli.run(["check", str(tmp_path / "missing.txt")]) == 2


def test_wrong_document_kind_is_usage_error(tmp_path, triangle_file):
    assert cli.run(["check", triangle_file]) == 2
