"""Line-oriented text serialization for models, polyhedra, apartments,
certificates and reports.

The format is deliberately restricted: one `key: value` pair per line,
explicit section markers, integers and canonical fractions only.  That
makes canonical forms byte-exact, so a serialized certificate can be
re-verified bit-for-bit.
"""

from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Optional

from . import coxeter as cx
from . import flats as fl
from . import hull as hl
from . import models as md
from . import verify as vf

VERSION = "v1"
HEADER = "flathull"

KINDS = ("model", "polyhedron", "apartment", "certificate", "tangent",
         "report", "oracle", "vertexset")


class SchemaError(ValueError):
    """Malformed document text, with line diagnostics."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Document:
    kind: str
    payload: object        # model / FlatPolyhedron / EuclApartment / ...


# --- scalars --------------------------------------------------------------


def format_number(x) -> str:
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_number(text: str, line_no=0) -> Q:
    text = text.strip()
    if "/" in text:
        try:
            num, den = text.split("/")
            n, d = int(num), int(den)
        except ValueError:
            raise SchemaError(line_no, f"malformed fraction {text!r}")
        if d <= 0:
            raise SchemaError(line_no, f"non-positive denominator in {text!r}")
        frac = Q(n, d)
        if (frac.numerator, frac.denominator) != (n, d):
            raise SchemaError(line_no, f"non-canonical fraction {text!r}")
        if d == 1:
            raise SchemaError(line_no, f"integer written as fraction {text!r}")
        return frac
    try:
        return Q(int(text))
    except ValueError:
        raise SchemaError(line_no, f"malformed number {text!r}")


def format_point(z) -> str:
    return ",".join(format_number(c) for c in z)


def parse_point(text: str, line_no=0) -> tuple:
    parts = [parse_number(p, line_no) for p in text.split(",")]
    return tuple(int(p) if p.denominator == 1 else p for p in parts)


# --- vertex addresses -------------------------------------------------------


def format_vertex(v: md.Vertex) -> str:
    if v.kind == "tree":
        return "t" if not v.address else "t:" + ".".join(map(str, v.address))
    rows = []
    for row in v.address:
        rows.append(";".join("".join(str(c) for c in poly) for poly in row))
    return "l:" + "|".join(rows)


def format_address(kind: str, address) -> str:
    return format_vertex(md.Vertex(kind, address))


def parse_vertex(text: str, line_no=0) -> md.Vertex:
    text = text.strip()
    if text == "t":
        return md.Vertex("tree", ())
    if text.startswith("t:"):
        try:
            return md.Vertex("tree",
                             tuple(int(p) for p in text[2:].split(".")))
        except ValueError:
            raise SchemaError(line_no, f"malformed tree address {text!r}")
    if text.startswith("l:"):
        rows = []
        for row in text[2:].split("|"):
            polys = []
            for poly in row.split(";"):
                if not all(ch.isdigit() for ch in poly):
                    raise SchemaError(
                        line_no, f"malformed lattice address {text!r}")
                polys.append(tuple(int(ch) for ch in poly))
            rows.append(tuple(polys))
        return md.Vertex("lattice", tuple(rows))
    raise SchemaError(line_no, f"unknown vertex form {text!r}")


# --- documents --------------------------------------------------------------


def _model_lines(model):
    kind = "tree" if isinstance(model, md.TreeModel) else "lattice"
    return [f"model.type: {kind}", f"model.q: {model.q}",
            f"model.radius: {model.radius}"]


def _apartment_lines(apartment: md.EuclApartment):
    return [f"point: {format_point(z)} => {format_vertex(v)}"
            for z, v in sorted(apartment.mapping)]


def print_document(doc: Document) -> str:
    lines = [f"{HEADER} {VERSION} {doc.kind}"]
    p = doc.payload
    if doc.kind == "model":
        lines += _model_lines(p)
    elif doc.kind == "apartment":
        lines += _model_lines(p.model) + _apartment_lines(p)
    elif doc.kind == "polyhedron":
        lines += _model_lines(p.apartment.model)
        lines += _apartment_lines(p.apartment)
        for h in p.all_constraints():
            lines.append(f"halfspace: {format_point(h.normal)} >= "
                         f"{format_number(h.offset)}")
    elif doc.kind == "certificate":
        model = p.apartment.model
        lines += _model_lines(model) + _apartment_lines(p.apartment)
        for v in p.required:
            lines.append(f"required: {format_vertex(v)}")
        for v, z in p.containment:
            lines.append(f"placed: {format_vertex(v)} @ {format_point(z)}")
        for (v1, v2), want in p.flatness:
            lines.append(f"distance: {format_vertex(v1)} ; "
                         f"{format_vertex(v2)} ; {format_number(want)}")
        if p.tangent is not None:
            x, cyc = p.tangent
            kind = "tree" if isinstance(model, md.TreeModel) else "lattice"
            lines.append(f"tangent.at: {format_vertex(x)}")
            lines.append("tangent.cycle: " + " ".join(
                format_address(kind, lbl) for lbl in cyc))
    elif doc.kind == "tangent":
        model, x, cycle = p
        kind = "tree" if isinstance(model, md.TreeModel) else "lattice"
        lines += _model_lines(model)
        lines.append(f"tangent.at: {format_vertex(x)}")
        lines.append("tangent.cycle: " + " ".join(
            format_address(kind, lbl) for lbl in cycle))
    elif doc.kind == "report":
        lines.append(f"passed: {'true' if p.passed else 'false'}")
        for r in p.records:
            lines.append(f"record: {r.name} ; {r.instances} ; "
                         f"{'pass' if r.passed else 'fail'} ; {r.note}")
    elif doc.kind == "vertexset":
        model, vertices = p
        lines += _model_lines(model)
        lines += [f"vertex: {format_vertex(v)}" for v in sorted(set(vertices))]
    elif doc.kind == "oracle":
        model, result = p
        lines += _model_lines(model)
        lines.append(f"query: {result.query}")
        for name, value in result.bounds:
            lines.append(f"bound: {name} = {value}")
        for a in result.apartments:
            lines.append("[apartment]")
            lines += _apartment_lines(a)
    else:
        raise SchemaError(0, f"unknown document kind {doc.kind!r}")
    return "\n".join(lines) + "\n"


def _split_key(line, line_no):
    if ": " not in line:
        raise SchemaError(line_no, f"expected 'key: value' in {line!r}")
    key, value = line.split(": ", 1)
    return key, value


def _read_model(fields, line_no=0):
    try:
        kind = fields["model.type"]
        q = int(fields["model.q"])
        radius = int(fields["model.radius"])
    except (KeyError, ValueError):
        raise SchemaError(line_no, "incomplete or malformed model descriptor")
    if kind == "tree":
        return md.TreeModel(q=q, radius=radius)
    if kind == "lattice":
        return md.LatticeModel(q=q, radius=radius)
    raise SchemaError(line_no, f"unknown model type {kind!r}")


def parse_document(text: str) -> Document:
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SchemaError(1, "empty document")
    head = lines[0].split(" ")
    if len(head) != 3 or head[0] != HEADER:
        raise SchemaError(1, f"bad header {lines[0]!r}")
    if head[1] != VERSION:
        raise SchemaError(1, f"unknown schema version {head[1]!r}")
    kind = head[2]
    if kind not in KINDS:
        raise SchemaError(1, f"unknown document kind {kind!r}")

    fields = {}
    points = []
    halfspaces = []
    required = []
    placed = []
    distances = []
    records = []
    bounds = []
    vertex_set = []
    oracle_groups = []
    current_points = points
    for i, line in enumerate(lines[1:], start=2):
        if line == "[apartment]":
            oracle_groups.append([])
            current_points = oracle_groups[-1]
            continue
        key, value = _split_key(line, i)
        if key == "point":
            if " => " not in value:
                raise SchemaError(i, f"expected 'chart => vertex' in {value!r}")
            zt, vt = value.split(" => ", 1)
            current_points.append((parse_point(zt, i), parse_vertex(vt, i)))
        elif key == "halfspace":
            if " >= " not in value:
                raise SchemaError(i, f"expected 'normal >= offset' in {value!r}")
            nt, ot = value.split(" >= ", 1)
            halfspaces.append(cx.Halfspace(parse_point(nt, i),
                                           parse_number(ot, i)))
        elif key == "required":
            required.append(parse_vertex(value, i))
        elif key == "vertex":
            vertex_set.append(parse_vertex(value, i))
        elif key == "placed":
            if " @ " not in value:
                raise SchemaError(i, f"expected 'vertex @ chart' in {value!r}")
            vt, zt = value.split(" @ ", 1)
            placed.append((parse_vertex(vt, i), parse_point(zt, i)))
        elif key == "distance":
            parts = value.split(" ; ")
            if len(parts) != 3:
                raise SchemaError(i, f"expected three fields in {value!r}")
            distances.append(((parse_vertex(parts[0], i),
                               parse_vertex(parts[1], i)),
                              parse_number(parts[2], i)))
        elif key == "record":
            parts = value.split(" ; ")
            if len(parts) < 3:
                raise SchemaError(i, f"expected record fields in {value!r}")
            note = parts[3] if len(parts) > 3 else ""
            if parts[2] not in ("pass", "fail"):
                raise SchemaError(i, f"bad record status {parts[2]!r}")
            records.append(vf.PropertyRecord(parts[0], int(parts[1]),
                                             parts[2] == "pass", note))
        elif key == "bound":
            name, val = value.split(" = ", 1)
            bounds.append((name, int(val)))
        else:
            fields[key] = value

    if kind == "model":
        return Document("model", _read_model(fields))
    if kind == "apartment":
        model = _read_model(fields)
        return Document("apartment",
                        md.eucl_apartment(model, dict(points)))
    if kind == "polyhedron":
        model = _read_model(fields)
        apartment = md.eucl_apartment(model, dict(points))
        return Document("polyhedron",
                        fl.flat_polyhedron(apartment, halfspaces))
    if kind == "certificate":
        model = _read_model(fields)
        apartment = md.eucl_apartment(model, dict(points))
        tangent = _read_tangent(fields)
        cert = hl.ApartmentCertificate(
            apartment, tuple(sorted(required)), tuple(sorted(placed)),
            tuple(sorted(distances)), tangent)
        return Document("certificate", cert)
    if kind == "tangent":
        model = _read_model(fields)
        tangent = _read_tangent(fields)
        if tangent is None:
            raise SchemaError(1, "tangent document without tangent fields")
        x, cycle = tangent
        return Document("tangent", (model, x, cycle))
    if kind == "report":
        if "passed" not in fields or fields["passed"] not in ("true", "false"):
            raise SchemaError(1, "report needs a 'passed: true|false' line")
        return Document("report", vf.SuiteReport(fields["passed"] == "true",
                                                 tuple(records)))
    if kind == "vertexset":
        model = _read_model(fields)
        return Document("vertexset", (model, tuple(sorted(set(vertex_set)))))
    if kind == "oracle":
        model = _read_model(fields)
        apartments = tuple(md.eucl_apartment(model, dict(group))
                           for group in oracle_groups)
        result = vf.OracleResult(fields.get("query", ""), apartments,
                                 tuple(bounds))
        return Document("oracle", (model, result))
    raise SchemaError(1, f"unknown document kind {kind!r}")


def split_documents(text: str):
    """Parse a concatenation of documents (split at header lines)."""
    chunks = []
    current = []
    for line in text.splitlines():
        if line.startswith(f"{HEADER} ") and current:
            chunks.append("\n".join(current))
            current = []
        current.append(line)
    if current:
        chunks.append("\n".join(current))
    return [parse_document(c) for c in chunks if c.strip()]


def _read_tangent(fields) -> Optional[tuple]:
    if "tangent.at" not in fields:
        return None
    x = parse_vertex(fields["tangent.at"])
    cycle = tuple(parse_vertex(t).address
                  for t in fields.get("tangent.cycle", "").split())
    return (x, cycle)
