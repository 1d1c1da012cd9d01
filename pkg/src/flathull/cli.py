"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 truncation overflow (the request does not fit in the model ball).
"""

import argparse
import sys

from . import coxeter as cx
from . import flats as fl
from . import hull as hl
from . import models as md
from . import schema as sc
from . import spherical as sp
from . import verify as vf

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_TRUNCATION = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="flathull",
        description="Flat convex subsets of desk-scale Euclidean buildings")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(p):
        p.add_argument("--model", choices=("tree", "lattice"),
                       default="lattice")
        p.add_argument("--q", type=int, default=2)
        p.add_argument("--radius", type=int, default=4)

    def io_flags(p, needs_in=True):
        if needs_in:
            p.add_argument("--in", dest="infile", required=True,
                           help="input document file")
        p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("gen", help="emit a model descriptor")
    model_flags(p)
    io_flags(p, needs_in=False)

    p = sub.add_parser("hull", help="apartment containing a flat polyhedron")
    io_flags(p)
    p.add_argument("--tangent", help="tangent document (prescribed link)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("chain", help="apartment containing a nested chain")
    io_flags(p)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("cone", help="apartment with prescribed germ at a tip")
    io_flags(p)
    p.add_argument("--tangent", required=True,
                   help="tangent document (link apartment at the tip)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("parallel", help="parallel set of a flat, in a ball")
    io_flags(p)
    p.add_argument("--radius", type=int, default=3)

    p = sub.add_parser("oracle", help="brute-force apartment enumeration")
    io_flags(p)
    p.add_argument("--radius", type=int, default=2,
                   help="chart window radius")

    p = sub.add_parser("suite", help="run the property-test suite")
    model_flags(p)
    io_flags(p, needs_in=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--fault-injection", action="store_true")

    p = sub.add_parser("check", help="re-verify a serialized certificate")
    p.add_argument("certificate", help="certificate document file")

    p = sub.add_parser("export", help="render a model ball or link graph")
    model_flags(p)
    io_flags(p, needs_in=False)
    p.add_argument("--format", choices=("dot", "svg"), required=True)
    p.add_argument("--link", action="store_true",
                   help="render the link at the base vertex instead")
    return parser


def _write(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _make_model(args):
    if args.model == "tree":
        return md.TreeModel(q=args.q, radius=args.radius)
    return md.LatticeModel(q=args.q, radius=args.radius)


def _read_doc(path, kinds):
    with open(path) as fh:
        doc = sc.parse_document(fh.read())
    if doc.kind not in kinds:
        raise sc.SchemaError(1, f"expected a {'/'.join(kinds)} document, "
                                f"got {doc.kind!r}")
    return doc


def _polyhedron_input(path):
    """A polyhedron for the solvers: direct, or fit to a bare vertex set."""
    doc = _read_doc(path, ("polyhedron", "vertexset"))
    if doc.kind == "polyhedron":
        return doc.payload.apartment.model, doc.payload
    model, vertices = doc.payload
    rep = fl.is_flat_convex(model, vertices)
    if not rep.passed:
        raise hl.HullError(f"input vertex set rejected: {rep.reason}")
    chart = md.apartment_containing_vertices(model, vertices)
    return model, fl.chart_fit(chart, vertices)


def _link_apartment(model, tangent):
    x, cycle = tangent
    link = md.link_at(model, x)
    return x, sp.make_apartment(link.building, cycle)


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _dispatch(args)
    except md.TruncationError as exc:
        print(f"truncation: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (sc.SchemaError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (hl.HullError, fl.PolyhedronError, fl.GlueConditionError,
            sp.SphericalInputError, md.ModelInputError,
            vf.OracleError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


def _dispatch(args) -> int:
    if args.command == "gen":
        _write(args, sc.print_document(sc.Document("model", _make_model(args))))
        return EXIT_OK

    if args.command == "hull":
        model, poly = _polyhedron_input(args.infile)
        if args.tangent:
            tdoc = _read_doc(args.tangent, ("tangent",))
            _tmodel, x, cycle = tdoc.payload
            x, a_x = _link_apartment(model, (x, cycle))
            cert = hl.apartment_with_tangent(model, poly, x, a_x)
        else:
            cert = hl.apartment_containing_polyhedron(model, poly)
        return _emit_certificate(args, model, cert)

    if args.command == "chain":
        with open(args.infile) as fh:
            docs = sc.split_documents(fh.read())
        polys = [d.payload for d in docs if d.kind == "polyhedron"]
        if not polys:
            raise sc.SchemaError(1, "chain input has no polyhedron documents")
        model = polys[0].apartment.model
        cert = hl.apartment_containing_chain(model, polys)
        return _emit_certificate(args, model, cert)

    if args.command == "cone":
        model, poly = _polyhedron_input(args.infile)
        tdoc = _read_doc(args.tangent, ("tangent",))
        _tmodel, x, cycle = tdoc.payload
        x, a_x = _link_apartment(model, (x, cycle))
        cert = hl.cone_apartment(model, poly, a_x, tip=x)
        return _emit_certificate(args, model, cert)

    if args.command == "parallel":
        model, poly = _polyhedron_input(args.infile)
        vertices = hl.parallel_set_ball(model, poly, args.radius)
        _write(args, sc.print_document(
            sc.Document("vertexset", (model, tuple(sorted(vertices))))))
        return EXIT_OK

    if args.command == "oracle":
        model, poly = _polyhedron_input(args.infile)
        result = vf.oracle_apartments_containing(
            model, fl.realize(model, poly), args.radius)
        _write(args, sc.print_document(
            sc.Document("oracle", (model, result))))
        return EXIT_OK

    if args.command == "suite":
        config = vf.SuiteConfig(
            tree_q=args.q if args.model == "tree" else 2,
            lattice_q=args.q if args.model == "lattice" else 2,
            tree_radius=args.radius if args.model == "tree" else 6,
            lattice_radius=min(args.radius, 3) if args.model == "lattice"
            else 3,
            samples=args.samples, seed=args.seed,
            fault_injection=args.fault_injection)
        report = vf.property_suite(config)
        _write(args, sc.print_document(sc.Document("report", report)))
        return EXIT_OK if report.passed else EXIT_VERIFY

    if args.command == "check":
        doc = _read_doc(args.certificate, ("certificate",))
        cert = doc.payload
        report = hl.verify_certificate(cert.apartment.model, cert)
        if not report.passed:
            print(f"verification failure: {report.reason}", file=sys.stderr)
            return EXIT_VERIFY
        print(f"certificate ok ({report.pairs_checked} pairs checked)")
        return EXIT_OK

    if args.command == "export":
        model = _make_model(args)
        edges, nodes = _export_graph(model, args.link)
        text = (_render_dot(nodes, edges) if args.format == "dot"
                else _render_svg(nodes, edges))
        _write(args, text)
        return EXIT_OK

    raise sc.SchemaError(1, f"unknown command {args.command!r}")


def _emit_certificate(args, model, cert) -> int:
    report = hl.verify_certificate(model, cert)
    if not report.passed:
        print(f"verification failure: {report.reason}", file=sys.stderr)
        return EXIT_VERIFY
    _write(args, sc.print_document(sc.Document("certificate", cert)))
    return EXIT_OK


# --- diagram export ---------------------------------------------------------


def _export_graph(model, link: bool):
    if link or isinstance(model, md.LatticeModel):
        lk = md.link_at(model, md.base_vertex(model))
        b = lk.building
        nodes = [sc.format_vertex(md.Vertex(model_kind(model), v))
                 for v in b.vertices]
        edges = [(sc.format_vertex(md.Vertex(model_kind(model), e[0])),
                  sc.format_vertex(md.Vertex(model_kind(model), e[1])))
                 for e in b.edges]
        return edges, nodes
    # tree ball
    nodes = []
    edges = []
    stack = [md.base_vertex(model)]
    seen = set()
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        nodes.append(sc.format_vertex(v))
        for w in md.neighbors(model, v):
            if md.in_ball(model, w) and len(w.address) > len(v.address):
                edges.append((sc.format_vertex(v), sc.format_vertex(w)))
                stack.append(w)
    return edges, sorted(nodes)


def model_kind(model):
    return "tree" if isinstance(model, md.TreeModel) else "lattice"


def _render_dot(nodes, edges) -> str:
    lines = ["graph flathull {"]
    for n in sorted(nodes):
        lines.append(f'  "{n}";')
    for a, b in sorted(edges):
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _render_svg(nodes, edges) -> str:
    import math
    nodes = sorted(nodes)
    n = max(len(nodes), 1)
    size = 600
    cx0 = cy0 = size // 2
    r = size * 0.42
    pos = {}
    for i, name in enumerate(nodes):
        ang = 2 * math.pi * i / n
        pos[name] = (cx0 + r * math.cos(ang), cy0 + r * math.sin(ang))
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" '
           f'width="{size}" height="{size}">']
    for a, b in sorted(edges):
        (x1, y1), (x2, y2) = pos[a], pos[b]
        out.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" '
                   f'y2="{y2:.1f}" stroke="black" stroke-width="1"/>')
    for name, (x, y) in sorted(pos.items()):
        out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="4" fill="steelblue">'
                   f'<title>{name}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
