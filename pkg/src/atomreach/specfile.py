"""Text and JSON formats for atoms, pushdown systems and automata.

Text format::

    atoms total_order

    pds Mono {
      letter k(1);
      loc lI(0);
      push lI k -> lI k k : lt(y1,u1) & eq(v1,y1);
    }

    nfa A for Mono {
      state lI(0);
      state l0(1) final;
      state l1(1);
      trans lI k -> l0 : le(p1,y1);
    }

    set S { component a(2); component b(3) where le(x1,x2); }

Component formulas range over ``x1..``; rules and transitions over the
blocks ``x`` (source), ``y`` (letter read), ``p`` (target), and for push
rules ``u``, ``v`` (the two pushed letters, ``u`` on top). Several lines
with the same key are joined by disjunction. ``#`` and ``//`` start
comments.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .atoms import AtomBackend, get_backend
from .automata import FoNfa, FoPds, FoSet, block
from .errors import AtomreachError, UnknownVariable, VocabularyMismatch
from .formula import FormulaSyntaxError, parse_formula
from .logic import Ldnf, Literal, Theory, clause_from_literals


class SpecError(AtomreachError):
    """Spec-file diagnostic with a 1-based line and column."""

    def __init__(self, kind: str, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.kind = kind
        self.line = line
        self.column = column


@dataclass
class SpecFile:
    backend: AtomBackend
    pds: dict[str, FoPds] = field(default_factory=dict)
    nfa: dict[str, FoNfa] = field(default_factory=dict)
    nfa_for: dict[str, str] = field(default_factory=dict)
    sets: dict[str, FoSet] = field(default_factory=dict)

    def get_pds(self, name: str) -> FoPds:
        if name not in self.pds:
            raise UnknownVariable(f"no pds named {name!r}")
        return self.pds[name]

    def get_nfa(self, name: str) -> FoNfa:
        if name not in self.nfa:
            raise UnknownVariable(f"no nfa named {name!r}")
        return self.nfa[name]

    def get_set(self, name: str) -> FoSet:
        """A declared set, or ``NAME.letters`` / ``NAME.locations`` / ``NAME.states``."""
        if name in self.sets:
            return self.sets[name]
        owner, _, part = name.partition(".")
        if owner in self.pds and part in ("letters", "alphabet", "locations"):
            p = self.pds[owner]
            return p.locations if part == "locations" else p.alphabet
        if owner in self.nfa and part in ("letters", "alphabet", "states"):
            a = self.nfa[owner]
            return a.states if part == "states" else a.alphabet
        raise UnknownVariable(f"no set named {name!r}")


# ---------------------------------------------------------------------------
# Scanner
# ---------------------------------------------------------------------------

_COMMENT = re.compile(r"(#|//)[^\n]*")
_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_INT = re.compile(r"\d+")


class _Scanner:
    def __init__(self, text: str):
        self.text = _COMMENT.sub(lambda m: " " * len(m.group()), text)
        self.pos = 0

    def where(self, offset=None):
        offset = self.pos if offset is None else offset
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def error(self, message, offset=None, kind="syntax"):
        return SpecError(kind, message, *self.where(offset))

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self):
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def peek_word(self):
        self.skip()
        m = _WORD.match(self.text, self.pos)
        return m.group() if m else None

    def expect(self, s: str):
        self.skip()
        if not self.text.startswith(s, self.pos):
            found = self.text[self.pos:self.pos + 10].split("\n")[0] or "end of input"
            raise self.error(f"expected {s!r}, found {found!r}")
        self.pos += len(s)

    def word(self, what="name") -> tuple[str, int]:
        self.skip()
        m = _WORD.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected {what}")
        self.pos = m.end()
        return m.group(), m.start()

    def keyword(self, kw: str):
        w, off = self.word(repr(kw))
        if w != kw:
            raise self.error(f"expected {kw!r}, found {w!r}", off)

    def integer(self) -> int:
        self.skip()
        m = _INT.match(self.text, self.pos)
        if not m:
            raise self.error("expected a dimension")
        self.pos = m.end()
        return int(m.group())

    def formula_text(self, stop_final=False) -> tuple[str, int]:
        """Raw text up to ';' (or a top-level ``final`` keyword)."""
        self.skip()
        start = self.pos
        end = self.text.find(";", start)
        if end < 0:
            raise self.error("missing ';' after formula")
        stop = end
        if stop_final:
            m = re.compile(r"\bfinal\b").search(self.text, start, end)
            if m:
                stop = m.start()
        self.pos = stop
        return self.text[start:stop], start


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _backend_name(sc: _Scanner) -> str:
    sc.skip()
    m = re.compile(r"[^;\n]+").match(sc.text, sc.pos)
    if not m:
        raise sc.error("expected an atoms backend name")
    sc.pos = m.end()
    if sc.peek(";"):
        sc.expect(";")
    return m.group().strip()


def _no_offset(e) -> str:
    return re.sub(r"\s*\(?(at )?offset \d+\)?$", "", str(e))


class _Builder:
    def __init__(self, sc: _Scanner, theory: Theory):
        self.sc = sc
        self.theory = theory
        self.backend = theory.backend

    def ldnf(self, text: str, offset: int, variables) -> Ldnf:
        variables = tuple(variables)
        try:
            f = parse_formula(text, self.backend, variables)
        except FormulaSyntaxError as e:
            raise self.sc.error(f"formula: {_no_offset(e)}", offset + e.offset)
        except UnknownVariable as e:
            raise self.sc.error(_no_offset(e), offset + getattr(e, "offset", 0), "unknown-variable")
        except VocabularyMismatch as e:
            raise self.sc.error(_no_offset(e), offset + getattr(e, "offset", 0), "vocabulary")
        return self.theory.normalize(f, variables)

    def component(self, dims: dict, name: str, n: int, off: int, decls: dict):
        if name in dims and dims[name] != n:
            raise self.sc.error(f"{name} declared with dimensions {dims[name]} and {n}", off, "dimension")
        dims[name] = n
        xs = block("x", n)
        if self.sc.peek_word() == "where":
            self.sc.word()
            text, at = self.sc.formula_text(stop_final=True)
            d = self.ldnf(text, at, xs)
        else:
            d = self.theory.top(xs)
        prev = decls.get(name)
        decls[name] = d if prev is None else prev.intersection(d)

    def label(self, dims: dict, what: str) -> str:
        name, off = self.sc.word(what)
        if name not in dims:
            raise self.sc.error(f"undeclared {what} {name!r}", off, "dimension")
        return name


def parse_spec(text: str, max_width: int = 8) -> SpecFile:
    """Parse a spec file; every formula is normalized against the declared atoms."""
    sc = _Scanner(text)
    sc.keyword("atoms")
    sc.skip()
    name_off = sc.pos
    name = _backend_name(sc)
    try:
        backend = get_backend(name)
    except Exception as e:  # unknown backend names
        raise sc.error(str(e), name_off, "vocabulary") from None
    theory = Theory(backend, max_width)
    spec = SpecFile(backend)
    b = _Builder(sc, theory)
    while not sc.at_end():
        kind, off = sc.word("'pds', 'nfa' or 'set'")
        if kind == "pds":
            _parse_pds(sc, b, spec)
        elif kind == "nfa":
            _parse_nfa(sc, b, spec)
        elif kind == "set":
            _parse_set(sc, b, spec)
        else:
            raise sc.error(f"unexpected {kind!r}", off)
    return spec


def _unique(sc, spec, name, off):
    if name in spec.pds or name in spec.nfa or name in spec.sets:
        raise sc.error(f"duplicate block name {name!r}", off)


def _parse_set(sc, b, spec):
    name, off = sc.word("set name")
    _unique(sc, spec, name, off)
    sc.expect("{")
    dims, comps = {}, {}
    while not sc.peek("}"):
        sc.keyword("component")
        label, loff = sc.word("component name")
        sc.expect("(")
        n = sc.integer()
        sc.expect(")")
        b.component(dims, label, n, loff, comps)
        sc.expect(";")
    sc.expect("}")
    spec.sets[name] = FoSet(comps)


def _parse_pds(sc, b, spec):
    name, off = sc.word("pds name")
    _unique(sc, spec, name, off)
    sc.expect("{")
    ldims, kdims, locs, letters = {}, {}, {}, {}
    rules = []
    while not sc.peek("}"):
        kw, koff = sc.word("declaration")
        if kw in ("letter", "loc"):
            label, loff = sc.word(f"{kw} name")
            sc.expect("(")
            n = sc.integer()
            sc.expect(")")
            if kw == "letter":
                b.component(kdims, label, n, loff, letters)
            else:
                b.component(ldims, label, n, loff, locs)
            sc.expect(";")
        elif kw in ("push", "pop"):
            l = b.label(ldims, "location")
            k = b.label(kdims, "letter")
            sc.expect("->")
            l2 = b.label(ldims, "location")
            pushed = ()
            if kw == "push":
                pushed = (b.label(kdims, "letter"), b.label(kdims, "letter"))
            sc.expect(":")
            text, at = sc.formula_text()
            sc.expect(";")
            rules.append((kw, (l, k, l2) + pushed, text, at))
        else:
            raise sc.error(f"unexpected {kw!r} in pds block", koff)
    sc.expect("}")
    gamma, lset = FoSet(letters), FoSet(locs)
    push, pop = {}, {}
    shell = FoPds(gamma, lset)
    for kw, key, text, at in rules:
        if kw == "push":
            d = b.ldnf(text, at, shell.push_vars(*key))
            push[key] = push[key].union(d) if key in push else d
        else:
            d = b.ldnf(text, at, shell.pop_vars(*key))
            pop[key] = pop[key].union(d) if key in pop else d
    spec.pds[name] = FoPds(gamma, lset, push, pop)


def _parse_nfa(sc, b, spec):
    name, off = sc.word("nfa name")
    _unique(sc, spec, name, off)
    sc.keyword("for")
    owner, ooff = sc.word("pds name")
    if owner not in spec.pds:
        raise sc.error(f"unknown pds {owner!r}", ooff)
    gamma = spec.pds[owner].alphabet
    kdims = {k: gamma.dim(k) for k in gamma.labels}
    sc.expect("{")
    sdims, states, finals = {}, {}, {}
    trans = []
    while not sc.peek("}"):
        kw, koff = sc.word("declaration")
        if kw == "state":
            label, loff = sc.word("state name")
            sc.expect("(")
            n = sc.integer()
            sc.expect(")")
            b.component(sdims, label, n, loff, states)
            if sc.peek_word() == "final":
                sc.word()
                if sc.peek(":"):
                    sc.expect(":")
                    text, at = sc.formula_text()
                    d = b.ldnf(text, at, block("x", n)).intersection(states[label])
                else:
                    d = states[label]
                finals[label] = finals[label].union(d) if label in finals else d
            sc.expect(";")
        elif kw == "trans":
            src = b.label(sdims, "state")
            k = b.label(kdims, "letter")
            sc.expect("->")
            dst = b.label(sdims, "state")
            sc.expect(":")
            text, at = sc.formula_text()
            sc.expect(";")
            trans.append(((src, k, dst), text, at))
        else:
            raise sc.error(f"unexpected {kw!r} in nfa block", koff)
    sc.expect("}")
    shell = FoNfa(gamma, FoSet(states))
    delta = {}
    for key, text, at in trans:
        d = b.ldnf(text, at, shell.transition_vars(*key))
        delta[key] = delta[key].union(d) if key in delta else d
    spec.nfa[name] = FoNfa(gamma, FoSet(states), finals, delta)
    spec.nfa_for[name] = owner


# ---------------------------------------------------------------------------
# Text output
# ---------------------------------------------------------------------------


def _where(theory: Theory, d: Ldnf) -> str:
    if d.clauses == theory.top(d.variables).clauses:
        return ""
    return f" where {theory.render(d)}"


def _rule_lines(theory: Theory, head: str, d: Ldnf) -> list[str]:
    return [f"  {head} : {theory.render_clause(c, d.variables)};" for c in d.sorted_clauses()]


def pds_text(theory: Theory, name: str, pds: FoPds) -> str:
    lines = [f"pds {name} {{"]
    for k in pds.alphabet.labels:
        lines.append(f"  letter {k}({pds.alphabet.dim(k)}){_where(theory, pds.alphabet[k])};")
    for l in pds.locations.labels:
        lines.append(f"  loc {l}({pds.locations.dim(l)}){_where(theory, pds.locations[l])};")
    for (l, k, l2, k1, k2), d in pds.sorted_push():
        lines += _rule_lines(theory, f"push {l} {k} -> {l2} {k1} {k2}", d)
    for (l, k, l2), d in pds.sorted_pop():
        lines += _rule_lines(theory, f"pop {l} {k} -> {l2}", d)
    lines.append("}")
    return "\n".join(lines)


def nfa_text(theory: Theory, name: str, owner: str, nfa: FoNfa) -> str:
    lines = [f"nfa {name} for {owner} {{"]
    for s in nfa.states.labels:
        line = f"  state {s}({nfa.states.dim(s)}){_where(theory, nfa.states[s])}"
        f = nfa.finals.get(s)
        if f is not None:
            line += " final" if f.clauses == nfa.states[s].clauses else f" final : {theory.render(f)}"
        lines.append(line + ";")
    for (s, k, t), d in nfa.sorted_delta():
        lines += _rule_lines(theory, f"trans {s} {k} -> {t}", d)
    lines.append("}")
    return "\n".join(lines)


def set_text(theory: Theory, name: str, s: FoSet) -> str:
    body = " ".join(f"component {l}({s.dim(l)}){_where(theory, s[l])};" for l in s.labels)
    return f"set {name} {{ {body} }}"


def spec_text(spec: SpecFile, theory: Theory | None = None) -> str:
    theory = theory or Theory(spec.backend)
    parts = [f"atoms {spec.backend.name}"]
    parts += [set_text(theory, n, s) for n, s in spec.sets.items()]
    parts += [pds_text(theory, n, p) for n, p in spec.pds.items()]
    parts += [nfa_text(theory, n, spec.nfa_for[n], a) for n, a in spec.nfa.items()]
    return "\n\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def ldnf_json(backend: AtomBackend, d: Ldnf) -> list[list[str]]:
    """Clauses as sorted arrays of literal strings, in clause order."""
    return [sorted(str(lit) for lit in c.literals(backend.vocabulary, d.variables)) for c in d.sorted_clauses()]


_LIT = re.compile(r"^(!?)([A-Za-z_][A-Za-z0-9_]*)\(([^)]*)\)$")


def ldnf_from_json(backend: AtomBackend, variables, data) -> Ldnf:
    variables = tuple(variables)
    clauses = set()
    for lits in data:
        parsed = []
        for s in lits:
            m = _LIT.match(s.replace(" ", ""))
            if not m:
                raise ValueError(f"bad literal {s!r}")
            args = tuple(a for a in m.group(3).split(",") if a)
            parsed.append(Literal(m.group(2), args, not m.group(1)))
        clauses.add(clause_from_literals(backend.vocabulary, variables, parsed))
    return Ldnf(variables, frozenset(clauses))


def _set_json(backend, s: FoSet) -> dict:
    return {l: {"dim": s.dim(l), "clauses": ldnf_json(backend, s[l])} for l in s.labels}


def _set_from_json(backend, data) -> FoSet:
    return FoSet({l: ldnf_from_json(backend, block("x", c["dim"]), c["clauses"]) for l, c in data.items()})


def pds_json(backend, pds: FoPds) -> dict:
    return {
        "letters": _set_json(backend, pds.alphabet),
        "locations": _set_json(backend, pds.locations),
        "push": [{"rule": list(k), "clauses": ldnf_json(backend, d)} for k, d in pds.sorted_push()],
        "pop": [{"rule": list(k), "clauses": ldnf_json(backend, d)} for k, d in pds.sorted_pop()],
    }


def pds_from_json(backend, data) -> FoPds:
    gamma = _set_from_json(backend, data["letters"])
    locs = _set_from_json(backend, data["locations"])
    shell = FoPds(gamma, locs)
    push = {tuple(r["rule"]): ldnf_from_json(backend, shell.push_vars(*r["rule"]), r["clauses"]) for r in data["push"]}
    pop = {tuple(r["rule"]): ldnf_from_json(backend, shell.pop_vars(*r["rule"]), r["clauses"]) for r in data["pop"]}
    return FoPds(gamma, locs, push, pop)


def nfa_json(backend, nfa: FoNfa, owner: str | None = None) -> dict:
    out = {
        "letters": _set_json(backend, nfa.alphabet),
        "states": _set_json(backend, nfa.states),
        "finals": {l: ldnf_json(backend, nfa.finals[l]) for l in nfa.states.labels if l in nfa.finals},
        "delta": [{"transition": list(k), "clauses": ldnf_json(backend, d)} for k, d in nfa.sorted_delta()],
    }
    if owner is not None:
        out["for"] = owner
    return out


def nfa_from_json(backend, data) -> FoNfa:
    gamma = _set_from_json(backend, data["letters"])
    states = _set_from_json(backend, data["states"])
    finals = {l: ldnf_from_json(backend, block("x", states.dim(l)), c) for l, c in data["finals"].items()}
    shell = FoNfa(gamma, states)
    delta = {
        tuple(t["transition"]): ldnf_from_json(backend, shell.transition_vars(*t["transition"]), t["clauses"])
        for t in data["delta"]
    }
    return FoNfa(gamma, states, finals, delta)


def spec_json(spec: SpecFile) -> dict:
    b = spec.backend
    return {
        "atoms": b.name,
        "sets": {n: _set_json(b, s) for n, s in spec.sets.items()},
        "pds": {n: pds_json(b, p) for n, p in spec.pds.items()},
        "nfa": {n: nfa_json(b, a, spec.nfa_for[n]) for n, a in spec.nfa.items()},
    }


def spec_from_json(data) -> SpecFile:
    b = get_backend(data["atoms"])
    spec = SpecFile(b)
    spec.sets = {n: _set_from_json(b, s) for n, s in data.get("sets", {}).items()}
    spec.pds = {n: pds_from_json(b, p) for n, p in data.get("pds", {}).items()}
    for n, a in data.get("nfa", {}).items():
        spec.nfa[n] = nfa_from_json(b, a)
        spec.nfa_for[n] = a["for"]
    return spec


def dumps(spec: SpecFile) -> str:
    return json.dumps(spec_json(spec), indent=2, sort_keys=False) + "\n"


def load(path: str, max_width: int = 8) -> SpecFile:
    """Read a spec file; ``.json`` files use the JSON export format."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        return spec_from_json(json.loads(text))
    return parse_spec(text, max_width)
