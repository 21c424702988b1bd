"""Network and findings documents.

Network documents are JSON with a fixed key order::

    {
      "format": "strawnet/1",
      "name": "cancer",
      "variables": [
        {
          "name": "Breast Cancer",
          "role": "Target",
          "states": ["yes", "no"],
          "parents": ["Gender", "Age"],
          "cpt": [
            [0, 1],
            [0.01, 0.99],
            [0.2, 0.8],
            [0.5, 0.5]
          ]
        }
      ]
    }

``cpt`` rows follow the row-major convention of :mod:`strawnet.network`: the
first parent varies slowest, so with ``Gender = [male, female]`` and
``Age = [below 30, above 30]`` the rows are (male, below 30),
(male, above 30), (female, below 30), (female, above 30).

Findings documents are ``VAR=STATE`` pairs separated by commas, semicolons
or newlines (``#`` starts a comment), or a flat JSON object.
"""

from __future__ import annotations

import json
import re
from importlib import resources

from .exceptions import EvidenceError, ParseError
from .network import Cpt, Evidence, Network, Role, Variable, validate_network

FORMAT_TAG = "strawnet/1"
_KEYS = ("name", "role", "states", "parents", "cpt")


def _line_of(text: str, name: str) -> int | None:
    m = re.search(r'"name"\s*:\s*' + re.escape(json.dumps(name)), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def parse_network(text: str, renormalize: bool = False) -> Network:
    """Parse a network document.

    Parameters
    ----------
    text : str
        Document contents.
    renormalize : bool, default False
        Rescale every CPT row to sum to one before validation. Off by
        default: rows that do not sum to one within 1e-6 are rejected.

    Raises
    ------
    ParseError
        On malformed JSON (with line number) or on any structural or numeric
        problem (naming the variable at fault).
    """
    if not text.strip():
        raise ParseError("empty network document", line=1)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", line=1)
    fmt = doc.get("format", FORMAT_TAG)
    if fmt != FORMAT_TAG:
        raise ParseError(f"unsupported format {fmt!r}, expected {FORMAT_TAG!r}")
    name = doc.get("name")
    if not isinstance(name, str):
        raise ParseError('"name" must be a string')
    records = doc.get("variables")
    if not isinstance(records, list) or not records:
        raise ParseError('"variables" must be a nonempty list')

    variables, cpts = [], []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or not isinstance(rec.get("name"), str):
            raise ParseError(f"variable record {i} needs a string \"name\"")
        vname = rec["name"]
        line = _line_of(text, vname)

        def fail(msg, vname=vname, line=line):
            raise ParseError(msg, line=line, variable=vname)

        unknown = set(rec) - set(_KEYS)
        if unknown:
            fail(f"unknown fields {sorted(unknown)}")
        for key in _KEYS:
            if key not in rec:
                fail(f'missing field "{key}"')
        try:
            role = Role(rec["role"])
        except ValueError:
            fail(f"role {rec['role']!r} is not one of Target, Evidence, Other")
        states = rec["states"]
        if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
            fail('"states" must be a list of strings')
        parents = rec["parents"]
        if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
            fail('"parents" must be a list of variable names')
        rows = rec["cpt"]
        if not isinstance(rows, list) or not all(
            isinstance(r, list)
            and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in r)
            for r in rows
        ):
            fail('"cpt" must be a list of rows of numbers')
        variables.append(Variable(vname, tuple(states), role))
        cpts.append(Cpt(vname, tuple(parents), tuple(tuple(r) for r in rows)))

    net = Network(name, tuple(variables), tuple(cpts))
    if renormalize:
        try:
            net = net.renormalized()
        except ZeroDivisionError:
            pass
    report = validate_network(net)
    if not report.ok:
        first = report.violations[0]
        line = _line_of(text, first.variable) if first.variable else None
        raise ParseError(
            "; ".join(str(v) for v in report.violations),
            line=line,
            variable=first.variable,
        )
    return net


def _num(p: float) -> str:
    s = format(p, ".12g")
    return "0" if s == "-0" else s


def serialize_network(net: Network) -> str:
    """Canonical document for ``net``: declaration order, fixed key order,
    probabilities with at most 12 significant digits, trailing newline."""
    dump = json.dumps
    out = ["{", f'  "format": {dump(FORMAT_TAG)},', f'  "name": {dump(net.name)},']
    out.append('  "variables": [')
    for i, var in enumerate(net.variables):
        cpt = net.cpt(var.name)
        out.append("    {")
        out.append(f'      "name": {dump(var.name)},')
        out.append(f'      "role": {dump(var.role.value)},')
        out.append(f'      "states": {dump(list(var.states))},')
        out.append(f'      "parents": {dump(list(cpt.parents))},')
        out.append('      "cpt": [')
        rows = ["        [" + ", ".join(_num(p) for p in row) + "]" for row in cpt.rows]
        out.append(",\n".join(rows))
        out.append("      ]")
        out.append("    }" + ("," if i < len(net.variables) - 1 else ""))
    out.append("  ]")
    out.append("}")
    return "\n".join(out) + "\n"


def parse_findings(text: str, net: Network) -> Evidence:
    """Parse findings and validate them against ``net``."""
    pairs: list[tuple[str, str, int]] = []
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            items = json.loads(stripped, object_pairs_hook=list)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno) from None
        for k, v in items:
            if not isinstance(v, str):
                raise ParseError(f"state for {k!r} must be a string", variable=k)
            pairs.append((k, v, None))
    else:
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0]
            for chunk in re.split(r"[,;]", line):
                chunk = chunk.strip()
                if not chunk:
                    continue
                if "=" not in chunk:
                    raise ParseError(f"expected VAR=STATE, got {chunk!r}", line=lineno)
                var, state = (s.strip() for s in chunk.split("=", 1))
                pairs.append((var, state, lineno))

    found: dict[str, str] = {}
    for var, state, lineno in pairs:
        if var not in net:
            raise EvidenceError(_where(lineno) + f"unknown variable {var!r}")
        if var in found:
            raise EvidenceError(_where(lineno) + f"duplicate finding for {var!r}")
        try:
            net.variable(var).index(state)
        except EvidenceError as exc:
            raise EvidenceError(_where(lineno) + str(exc)) from None
        found[var] = state
    return Evidence(found)


def _where(lineno):
    return f"line {lineno}: " if lineno is not None else ""


def serialize_findings(evidence: Evidence) -> str:
    return "\n".join(f"{k}={v}" for k, v in evidence.items()) + "\n"


def load_network(path, renormalize: bool = False) -> Network:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read(), renormalize=renormalize)


def bundled_network_text(name: str = "cancer") -> str:
    return resources.files("strawnet").joinpath(f"data/{name}.net").read_text("utf-8")


def load_cancer_network() -> Network:
    """The liver/breast cancer diagnostic network shipped with the package."""
    return parse_network(bundled_network_text("cancer"))
