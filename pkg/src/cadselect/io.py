"""Spec files (YAML) for mappings and integrands, CSV output for paths.

Mapping spec, version 1::

    format: cadselect-mapping
    version: 1
    dimension: 1
    horizon: 1.0
    pieces:
      - start: 0.0
        end: 1.0
        family: box            # box | ball | hpolytope | oscillator
        right: {lower: [0.0], upper: [1.0]}
        left:  {lower: [0.0], upper: [0.0]}
    overrides:
      - time: 1.0
        set: {family: box, lower: [2.0], upper: [2.0]}

``right`` holds the parameters at ``start``, ``left`` their left limits at
``end``. Moving parameters (box bounds, ball centre and radius, polytope
offsets) need both; oscillator pieces take only ``right``.

Integrand spec, version 1::

    format: cadselect-integrand
    version: 1
    domain: { ...mapping spec... }   # or domain_file: path relative to this file
    integrand:
      kind: linear_on_domain         # quadratic_tracking | linear_on_domain | indicator_plus
      q: {breakpoints: [0, 1], right: [[1.0]], left: [[1.0]]}
    measure:
      density: {breakpoints: [0, 1], values: [1.0]}
      atoms: [{time: 0.5, mass: 1.0}]

Coefficients are either a constant (number or list) or a piecewise-affine
table ``{breakpoints, right, left, terminal?}``.
"""

import os

import numpy as np
import yaml

from .errors import EmptyValue, ParseError, ValidationError
from .geometry import Ball, Box, HPolytope
from .integral import NormalIntegrand, RadonMeasure
from .mappings import CoefficientFunction, Piece, SetValuedMapping

MAPPING_FORMAT = "cadselect-mapping"
INTEGRAND_FORMAT = "cadselect-integrand"
VERSION = 1

_MOVING = {"box": ("lower", "upper"), "ball": ("center", "radius"),
           "hpolytope": ("offsets",), "oscillator": ()}


class _Doc:
    """Plain values plus the source line of every node, keyed by path."""

    def __init__(self, text):
        try:
            root = yaml.compose(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ParseError(str(getattr(exc, "problem", exc)),
                             None if mark is None else mark.line + 1) from None
        if root is None:
            raise ParseError("empty document", 1)
        self.lines = {}
        self.data = self._build(root, ())

    def _build(self, node, path):
        self.lines[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            out = {}
            for k, v in node.value:
                key = k.value
                self.lines[path + (key,)] = k.start_mark.line + 1
                out[key] = self._build(v, path + (key,))
            return out
        if isinstance(node, yaml.SequenceNode):
            return [self._build(v, path + (i,)) for i, v in enumerate(node.value)]
        return yaml.safe_load(yaml.serialize(node))

    def line(self, path):
        path = tuple(path)
        while path not in self.lines and path:
            path = path[:-1]
        return self.lines.get(path)


def _fail(doc, path, msg, cls=ValidationError):
    raise cls(msg, doc.line(path) if doc is not None else None)


def _get(doc, obj, path, key, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        _fail(doc, path, f"missing required field {key!r}" + (f" in {'/'.join(map(str, path))}" if path else ""))
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        _fail(doc, path + (key,), f"field {key!r} has the wrong type")
    return val


def _array(doc, path, val, dim=None):
    try:
        arr = np.asarray(val, float)
    except (TypeError, ValueError):
        _fail(doc, path, "expected a number or a list of numbers", ParseError)
    if dim is not None and arr.shape != (dim,):
        _fail(doc, path, f"expected a list of {dim} numbers")
    return arr


def _set_from(doc, path, spec, dim):
    fam = _get(doc, spec, path, "family", str)
    try:
        if fam == "box":
            return Box(_array(doc, path + ("lower",), _get(doc, spec, path, "lower"), dim),
                       _array(doc, path + ("upper",), _get(doc, spec, path, "upper"), dim))
        if fam == "ball":
            return Ball(_array(doc, path + ("center",), _get(doc, spec, path, "center"), dim),
                        float(_get(doc, spec, path, "radius")))
        if fam == "hpolytope":
            return HPolytope(_get(doc, spec, path, "normals"), _get(doc, spec, path, "offsets"),
                             _get(doc, spec, path, "lower"), _get(doc, spec, path, "upper"))
    except EmptyValue as exc:
        _fail(doc, path, f"empty set: {exc}")
    _fail(doc, path + ("family",), f"unknown set family {fam!r}")


def _mapping_from(doc, data, path=()):
    if data.get("format", MAPPING_FORMAT) != MAPPING_FORMAT:
        _fail(doc, path + ("format",), f"expected format {MAPPING_FORMAT!r}", ParseError)
    if data.get("version", VERSION) != VERSION:
        _fail(doc, path + ("version",), f"unsupported version {data.get('version')!r}", ParseError)
    dim = _get(doc, data, path, "dimension", int)
    T = float(_get(doc, data, path, "horizon", (int, float)))
    pieces_raw = _get(doc, data, path, "pieces", list)
    if not pieces_raw:
        _fail(doc, path + ("pieces",), "pieces list is empty")
    pieces = []
    expect = 0.0
    for i, pr in enumerate(pieces_raw):
        pp = path + ("pieces", i)
        if not isinstance(pr, dict):
            _fail(doc, pp, "piece must be a mapping", ParseError)
        start = float(_get(doc, pr, pp, "start", (int, float)))
        end = float(_get(doc, pr, pp, "end", (int, float)))
        fam = _get(doc, pr, pp, "family", str)
        if fam not in _MOVING:
            _fail(doc, pp + ("family",), f"unknown family {fam!r}")
        if start != expect:
            _fail(doc, pp + ("start",), f"piece starts at {start}, expected {expect}: pieces must partition [0, T]")
        if end <= start:
            _fail(doc, pp + ("end",), "piece end must exceed its start")
        right = _get(doc, pr, pp, "right", dict)
        left = pr.get("left", {})
        if not isinstance(left, dict):
            _fail(doc, pp + ("left",), "left must be a mapping", ParseError)
        for key in _MOVING[fam]:
            if key not in left:
                _fail(doc, pp + ("left",) if "left" in pr else pp,
                      f"piece {i}: left-limit value {key!r} is missing")
        rv = {k: _array(doc, pp + ("right", k), v) for k, v in right.items()}
        lv = {k: _array(doc, pp + ("left", k), v) for k, v in left.items()}
        try:
            piece = Piece(start, end, fam, rv, lv)
            piece.validate(dim)
        except EmptyValue as exc:
            _fail(doc, pp, f"piece {i} has an empty value: {exc}")
        except (ValueError, KeyError) as exc:
            _fail(doc, pp, f"piece {i}: {exc}")
        pieces.append(piece)
        expect = end
    if expect != T:
        _fail(doc, path + ("pieces",), f"pieces end at {expect}, expected the horizon {T}")
    overrides = {}
    for i, o in enumerate(data.get("overrides", []) or []):
        op = path + ("overrides", i)
        t = float(_get(doc, o, op, "time", (int, float)))
        overrides[t] = _set_from(doc, op + ("set",), _get(doc, o, op, "set", dict), dim)
    try:
        return SetValuedMapping(dim, T, pieces, overrides, name=data.get("name"))
    except (ValueError, EmptyValue) as exc:
        _fail(doc, path, str(exc))


def parse_mapping(text):
    """Parse mapping spec text.

    Raises
    ------
    ParseError
        Malformed YAML or wrong types, with the 1-based line.
    ValidationError
        Well-formed input that breaks an invariant (empty pieces, missing
        left values, crossing bounds, gaps between pieces).
    """
    doc = _Doc(text)
    if not isinstance(doc.data, dict):
        raise ParseError("top level must be a mapping", 1)
    return _mapping_from(doc, doc.data)


def _coef_from(doc, path, spec, T):
    if isinstance(spec, dict):
        try:
            return CoefficientFunction(_get(doc, spec, path, "breakpoints"), _get(doc, spec, path, "right"),
                                       _get(doc, spec, path, "left"), spec.get("terminal"))
        except ValueError as exc:
            _fail(doc, path, str(exc))
    return CoefficientFunction.constant(_array(doc, path, spec), T)


def parse_integrand(text, base_dir="."):
    """Parse an integrand spec; returns ``(NormalIntegrand, RadonMeasure)``."""
    doc = _Doc(text)
    data = doc.data
    if not isinstance(data, dict):
        raise ParseError("top level must be a mapping", 1)
    if data.get("format") != INTEGRAND_FORMAT:
        _fail(doc, ("format",), f"expected format {INTEGRAND_FORMAT!r}", ParseError)
    if data.get("version", VERSION) != VERSION:
        _fail(doc, ("version",), "unsupported version", ParseError)
    if "domain" in data:
        S = _mapping_from(doc, data["domain"], ("domain",))
    elif "domain_file" in data:
        with open(os.path.join(base_dir, data["domain_file"])) as fh:
            S = parse_mapping(fh.read())
    else:
        _fail(doc, (), "missing required field 'domain'")
    T = S.horizon
    spec = _get(doc, data, (), "integrand", dict)
    kind = _get(doc, spec, ("integrand",), "kind", str)
    kw = {}
    for key in ("target", "alpha", "q", "p"):
        if key in spec:
            kw[key] = _coef_from(doc, ("integrand", key), spec[key], T)
    if "Q" in spec:
        kw["Q"] = _array(doc, ("integrand", "Q"), spec["Q"])
    try:
        h = NormalIntegrand(kind, S, **kw)
    except ValueError as exc:
        _fail(doc, ("integrand",), str(exc))
    ms = data.get("measure", {"density": {"breakpoints": [0.0, T], "values": [1.0]}})
    dens = ms.get("density", {"breakpoints": [0.0, T], "values": [0.0]})
    atoms = [(a["time"], a["mass"]) for a in ms.get("atoms", []) or []]
    try:
        mu = RadonMeasure(dens["breakpoints"], dens["values"], atoms)
    except (ValueError, KeyError) as exc:
        _fail(doc, ("measure",), f"invalid measure: {exc}")
    return h, mu


def _tolist(a):
    a = np.asarray(a, float)
    return float(a) if a.ndim == 0 else a.tolist()


def _set_spec(S):
    if isinstance(S, Box):
        return {"family": "box", "lower": _tolist(S.lower), "upper": _tolist(S.upper)}
    if isinstance(S, Ball):
        return {"family": "ball", "center": _tolist(S.center), "radius": float(S.radius)}
    if isinstance(S, HPolytope):
        return {"family": "hpolytope", "normals": _tolist(S.normals), "offsets": _tolist(S.offsets),
                "lower": _tolist(S.box.lower), "upper": _tolist(S.box.upper)}
    raise TypeError(f"cannot serialise {type(S).__name__}")


def mapping_to_dict(mapping):
    pieces = []
    for p in mapping.pieces:
        entry = {"start": float(p.start), "end": float(p.end), "family": p.family,
                 "right": {k: _tolist(v) for k, v in p.right.items()}}
        if p.family != "oscillator":
            entry["left"] = {k: _tolist(p.left[k]) for k in _MOVING[p.family]}
        pieces.append(entry)
    doc = {"format": MAPPING_FORMAT, "version": VERSION, "dimension": mapping.dimension,
           "horizon": float(mapping.horizon), "pieces": pieces}
    if mapping.name:
        doc["name"] = mapping.name
    if mapping.overrides:
        doc["overrides"] = [{"time": float(t), "set": _set_spec(S)} for t, S in sorted(mapping.overrides.items())]
    return doc


def emit_mapping(mapping):
    """Mapping spec text; ``parse_mapping(emit_mapping(m))`` rebuilds ``m``."""
    return yaml.safe_dump(mapping_to_dict(mapping), sort_keys=False, default_flow_style=None)


def path_csv(path, mapping=None):
    """CSV text ``t,x1..xd,piece,flag`` with 17 significant digits.

    At jump nodes the left limit is written first (flag ``breakpoint_left``)
    followed by the value (flag ``breakpoint_right``).
    """
    d = path.dimension
    head = "t," + ",".join(f"x{i + 1}" for i in range(d)) + ",piece,flag"
    rows = [head]
    bps = set() if mapping is None else set(float(t) for t in mapping.breakpoints)
    jumps = set(path.jump_nodes(0.0).tolist())
    interior = "projected" if path.flag == "projected" else "interior"

    def row(t, x, flag):
        piece = -1 if mapping is None or not hasattr(mapping, "piece_at") else mapping.piece_at(t)
        return f"{t:.17g}," + ",".join(f"{v:.17g}" for v in x) + f",{piece},{flag}"

    for j, t in enumerate(path.times):
        if j in jumps:
            rows.append(row(t, path.left[j], "breakpoint_left"))
        flag = "breakpoint_right" if (float(t) in bps or j in jumps) and j > 0 else interior
        rows.append(row(t, path.right[j], flag))
    return "\n".join(rows) + "\n"


def write_text(filename, text):
    with open(filename, "w", newline="\n") as fh:
        fh.write(text)


def family_manifest(entries):
    """CSV index of a family: ``member,file,target,level,run,a,b``."""
    lines = ["member,file,target,level,run,a,b"]
    for i, (fname, member) in enumerate(entries):
        m, k = member.target
        r, a, b = member.run
        lines.append(f"{i},{fname},{m},{k},{r},{a:.17g},{b:.17g}")
    return "\n".join(lines) + "\n"
