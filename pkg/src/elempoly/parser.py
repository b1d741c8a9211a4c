"""Text syntax for space terms and reduction scripts.

Term grammar (ASCII, whitespace insignificant)::

    term   := term 'x' wedge | wedge          # product, loosest
    wedge  := wedge 'v' bsum | bsum
    bsum   := bsum '&' csum | csum            # boundary connected sum
    csum   := csum '#' atom | atom            # connected sum, tightest
    atom   := 'S'<d> | 'D'<d> | 'PT' | 'SB+' | 'SB-' | '@'<name> | '(' term ')'

so ``A # B x C`` reads ``(A # B) x C``. Chains of one operator such as
``A v B v C`` become a single n-ary node; products stay binary and nest
to the left.

A line whose first non-blank character is ``#`` is a comment (a ``#``
anywhere else is the connected-sum operator). Custom atoms are declared
on their own lines before use::

    atom @M dim=4 closed orientable simply_connected H2=Z^2 H4=Z embed=3t

Flags: ``closed``, ``boundary``, ``orientable``, ``simply_connected``,
``disconnected``, ``nonmanifold``, ``homotopy_sphere``. Homology entries
``H<k>=<group>`` use the group syntax ``Z^2+Z/2``; ``H0=Z`` is implied for
connected atoms. Capabilities: ``embed=``/``immerse=`` take comma-separated
codimensions, suffix ``t`` for a trivial normal bundle; ``embeds_into=`` and
``immerses_into=`` take ambient dimensions.

Reduction scripts::

    root:
    0: S2 smooth=1 p=1
    1: S3 smooth=1 p=1
    steps:
    bouquet 0 1

Step lines are ``bouquet k1 k2``, ``product k1 k2 smooth=left|right`` and
``connsum k1 k2``; indices refer to the sequence current at that step.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from typing import Mapping

from .abelian import parse_group
from .elementary import MergeKind, MergeStep, RootSequence, TripleValue, TypeTag
from .terms import (
    BoundaryConnSum,
    Capabilities,
    ConnSum,
    CustomAtom,
    Disc,
    ManifoldFlags,
    Point,
    Product,
    SpaceTerm,
    Sphere,
    SphereBundle,
    TermError,
    Wedge,
    custom_atoms,
    render,
)

__all__ = [
    "SourceSpan",
    "ParseError",
    "UnknownAtomError",
    "TermConstructionError",
    "ScriptError",
    "parse_term",
    "parse_declarations",
    "parse_root_script",
    "render_document",
    "render_script",
]


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int
    line: int
    column: int

    def __post_init__(self):
        if self.begin > self.end:
            raise ValueError("span begin after end")

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}")


class UnknownAtomError(ParseError):
    pass


class TermConstructionError(ParseError):
    """A combinator rejected its operands (arity, dimension, flags)."""


class ScriptError(ParseError):
    pass


class _Source:
    def __init__(self, text: str):
        self.text = text
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def span(self, begin: int, end: int) -> SourceSpan:
        begin = max(0, min(begin, len(self.text)))
        end = max(begin, min(end, len(self.text)))
        line = bisect_right(self.line_starts, begin)
        return SourceSpan(begin, end, line, begin - self.line_starts[line - 1] + 1)


_TOKEN = re.compile(
    r"(?P<sphere>S\d+)|(?P<disc>D\d+)|(?P<bundle>SB[+-])|(?P<point>PT)"
    r"|(?P<custom>@[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[xv&#])|(?P<lparen>\()|(?P<rparen>\))"
)
_OPERATORS = {"x": Product, "v": Wedge, "&": BoundaryConnSum, "#": ConnSum}
_BINDING = {"x": 1, "v": 2, "&": 3, "#": 4}


@dataclass
class _Tok:
    kind: str
    text: str
    begin: int
    end: int


def _line_is(text: str, pos: int, prefix: str) -> bool:
    line_start = text.rfind("\n", 0, pos) + 1
    return text[line_start:pos].strip() == "" and text.startswith(prefix, pos)


def _tokenize(src: _Source, start: int, end: int) -> list[_Tok]:
    text = src.text
    toks: list[_Tok] = []
    i = start
    while i < end:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if not c.isascii():
            raise ParseError(f"non-ASCII character {c!r}", src.span(i, i + 1))
        if (c == "#" and _line_is(text, i, "#")) or _line_is(text, i, "atom "):
            # comment or declaration line; declarations are collected separately
            nl = text.find("\n", i, end)
            i = end if nl < 0 else nl + 1
            continue
        m = _TOKEN.match(text, i, end)
        if m is None:
            raise ParseError(f"unexpected character {c!r}", src.span(i, i + 1))
        toks.append(_Tok(m.lastgroup, m.group(), i, m.end()))
        i = m.end()
    toks.append(_Tok("eof", "", end, end))
    return toks


class _TermParser:
    def __init__(self, src: _Source, toks: list[_Tok], atoms: Mapping[str, CustomAtom]):
        self.src = src
        self.toks = toks
        self.pos = 0
        self.atoms = atoms

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def take(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, tok: _Tok, message: str, cls=ParseError):
        where = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise cls(f"{message} at {where}", self.src.span(tok.begin, max(tok.end, tok.begin)))

    def parse(self) -> SpaceTerm:
        t = self.expr(1)
        tok = self.peek()
        if tok.kind != "eof":
            self.fail(tok, "expected an operator or end of input")
        return t

    def expr(self, level: int) -> SpaceTerm:
        if level > 4:
            return self.atom()
        first_tok = self.peek()
        left = self.expr(level + 1)
        op = next(o for o, b in _BINDING.items() if b == level)
        if self.peek().text != op or self.peek().kind != "op":
            return left
        operands = [left]
        while self.peek().kind == "op" and self.peek().text == op:
            self.take()
            operands.append(self.expr(level + 1))
        end = self.toks[self.pos - 1].end
        span = self.src.span(first_tok.begin, end)
        try:
            if op == "x":
                out = operands[0]
                for right in operands[1:]:
                    out = Product(out, right, span=span)
                return out
            return _OPERATORS[op](tuple(operands), span=span)
        except TermError as exc:
            raise TermConstructionError(str(exc), span) from exc

    def atom(self) -> SpaceTerm:
        tok = self.take()
        span = self.src.span(tok.begin, tok.end)
        if tok.kind == "sphere":
            return Sphere(int(tok.text[1:]), span=span)
        if tok.kind == "disc":
            return Disc(int(tok.text[1:]), span=span)
        if tok.kind == "point":
            return Point(span=span)
        if tok.kind == "bundle":
            return SphereBundle(tok.text == "SB-", span=span)
        if tok.kind == "custom":
            name = tok.text[1:]
            if name not in self.atoms:
                raise UnknownAtomError(f"unknown atom reference @{name}", span)
            return _with_span(self.atoms[name], span)
        if tok.kind == "lparen":
            inner = self.expr(1)
            close = self.take()
            if close.kind != "rparen":
                self.pos -= 1
                self.fail(close, "expected ')'")
            return inner
        self.pos -= 1
        self.fail(tok, "expected a term")


def _with_span(atom: CustomAtom, span: SourceSpan) -> CustomAtom:
    return CustomAtom(
        atom.name, atom.dim, atom.homology, atom.flags, atom.capabilities, span=span
    )


_FLAG_WORDS = {
    "closed", "boundary", "orientable", "simply_connected",
    "disconnected", "nonmanifold", "homotopy_sphere",
}


def _parse_codims(value: str) -> set[tuple[int, bool]]:
    out = set()
    for item in value.split(","):
        m = re.fullmatch(r"(\d+)(t?)", item)
        if m is None:
            raise ValueError(f"bad codimension {item!r}")
        out.add((int(m.group(1)), bool(m.group(2))))
    return out


def _parse_declaration(src: _Source, begin: int, line: str) -> CustomAtom:
    span = src.span(begin, begin + len(line))
    words = line.split()
    if len(words) < 2 or not re.fullmatch(r"@[A-Za-z_][A-Za-z0-9_]*", words[1]):
        raise ParseError("declaration needs 'atom @name ...'", span)
    name = words[1][1:]
    dim = None
    flag_set: set[str] = set()
    homology = {}
    caps: dict[str, object] = {}
    try:
        for w in words[2:]:
            if "=" not in w:
                if w not in _FLAG_WORDS:
                    raise ValueError(f"unknown flag {w!r}")
                flag_set.add(w)
                continue
            key, value = w.split("=", 1)
            if key == "dim":
                dim = int(value)
            elif re.fullmatch(r"H\d+", key):
                homology[int(key[1:])] = parse_group(value)
            elif key in ("embed", "immerse"):
                caps[key] = _parse_codims(value)
            elif key in ("embeds_into", "immerses_into"):
                caps[key] = {int(v) for v in value.split(",")}
            else:
                raise ValueError(f"unknown key {key!r}")
        if dim is None:
            raise ValueError("missing dim=")
        flags = ManifoldFlags(
            is_manifold="nonmanifold" not in flag_set,
            is_closed="closed" in flag_set,
            has_boundary="boundary" in flag_set,
            is_connected="disconnected" not in flag_set,
            is_orientable="orientable" in flag_set,
            is_simply_connected="simply_connected" in flag_set,
            is_homotopy_sphere="homotopy_sphere" in flag_set,
        )
        capabilities = Capabilities(
            immerse_codims=caps.get("immerse", ()),
            embed_codims=caps.get("embed", ()),
            immerses_into_Rn=caps.get("immerses_into", ()),
            embeds_into_Rn=caps.get("embeds_into", ()),
        )
        return CustomAtom(name, dim, homology, flags, capabilities)
    except (ValueError, TermError) as exc:
        raise ParseError(f"bad declaration of @{name}: {exc}", span) from exc


def _declarations(src: _Source, start: int, end: int) -> dict[str, CustomAtom]:
    atoms: dict[str, CustomAtom] = {}
    pos = start
    for raw in src.text[start:end].splitlines(keepends=True):
        stripped = raw.lstrip()
        if stripped.startswith("atom "):
            begin = pos + len(raw) - len(stripped)
            atom = _parse_declaration(src, begin, stripped.rstrip("\r\n"))
            if atom.name in atoms:
                raise ParseError(
                    f"@{atom.name} declared twice", src.span(begin, begin + len(stripped))
                )
            atoms[atom.name] = atom
        pos += len(raw)
    return atoms


def parse_declarations(text: str) -> dict[str, CustomAtom]:
    """Custom atoms declared in ``text`` keyed by name."""
    src = _Source(text)
    return _declarations(src, 0, len(text))


def _parse_term_range(src, start, end, atoms) -> SpaceTerm:
    toks = _tokenize(src, start, end)
    if len(toks) == 1:
        raise ParseError("empty term", src.span(start, end))
    return _TermParser(src, toks, atoms).parse()


def parse_term(text: str, atoms: Mapping[str, CustomAtom] | None = None) -> SpaceTerm:
    """Parse a term, with optional declaration lines ahead of it."""
    src = _Source(text)
    known = dict(atoms or {})
    known.update(_declarations(src, 0, len(text)))
    return _parse_term_range(src, 0, len(text), known)


_ENTRY = re.compile(r"^(\s*)(\d+)\s*:\s*(.*?)\s+smooth=(\S*)\s+p=(\S*)\s*$")
_STEP = re.compile(r"^\s*(bouquet|product|connsum)\s+(-?\d+)\s+(-?\d+)(?:\s+smooth=(\S+))?\s*$")


def parse_root_script(
    text: str, atoms: Mapping[str, CustomAtom] | None = None
) -> tuple[RootSequence, list[MergeStep]]:
    """Read a root and its merge steps; indices are validated against the
    sequence length current at each step."""
    src = _Source(text)
    known = dict(atoms or {})
    known.update(_declarations(src, 0, len(text)))

    entries: list[TripleValue] = []
    steps: list[MergeStep] = []
    section = None
    pos = 0
    last_span = src.span(len(text), len(text))
    current = 0
    for raw in text.splitlines(keepends=True):
        line = raw.rstrip("\r\n")
        begin = pos
        pos += len(raw)
        stripped = line.strip()
        span = src.span(begin, begin + len(line))
        if not stripped or stripped.startswith("#") or stripped.startswith("atom "):
            continue
        last_span = span
        if stripped == "root:":
            if section is not None:
                raise ScriptError("'root:' must come first and only once", span)
            section = "root"
            continue
        if stripped == "steps:":
            if section != "root":
                raise ScriptError("'steps:' must follow the root section", span)
            if not entries:
                raise ScriptError("the root section is empty", span)
            section = "steps"
            current = len(entries)
            continue
        if section == "root":
            m = _ENTRY.match(line)
            if m is None:
                raise ScriptError("expected '<i>: <term> smooth=<0|1> p=<0|1>'", span)
            idx = int(m.group(2))
            if idx != len(entries):
                raise ScriptError(f"root entries must be numbered in order; expected {len(entries)}", span)
            if m.group(4) not in ("0", "1") or m.group(5) not in ("0", "1"):
                raise ScriptError("smooth and p must be 0 or 1", span)
            term_start = begin + m.start(3)
            term = _parse_term_range(src, term_start, begin + m.end(3), known)
            smooth = int(m.group(4))
            tag = TypeTag.DIFF if smooth else TypeTag.PL
            try:
                entries.append(TripleValue(term, tag, smooth, int(m.group(5))))
            except ValueError as exc:
                raise ScriptError(str(exc), span) from exc
        elif section == "steps":
            m = _STEP.match(line)
            if m is None:
                raise ScriptError(
                    "expected 'bouquet k1 k2', 'product k1 k2 smooth=left|right' or 'connsum k1 k2'",
                    span,
                )
            kind = MergeKind(m.group(1))
            k1, k2 = int(m.group(2)), int(m.group(3))
            side = m.group(4)
            if k1 >= k2:
                raise ScriptError(f"merge step requires k1 < k2, got {k1} and {k2}", span)
            if k1 < 0 or k2 >= current:
                raise ScriptError(
                    f"index out of range: step {len(steps)} sees a sequence of length {current}", span
                )
            if kind is MergeKind.PRODUCT:
                if side not in ("left", "right"):
                    raise ScriptError("product steps need smooth=left or smooth=right", span)
            elif side is not None:
                raise ScriptError(f"{kind.value} steps take no smooth= option", span)
            steps.append(MergeStep(kind, k1, k2, side))
            current -= 1
        else:
            raise ScriptError("script must start with 'root:'", span)
    if not entries:
        raise ScriptError("script has no root entries", last_span)
    if len(steps) != len(entries) - 1:
        raise ScriptError(
            f"a root of {len(entries)} entries needs exactly {len(entries) - 1} steps, got {len(steps)}",
            last_span,
        )
    return RootSequence(tuple(entries)), steps


def _declaration_line(atom: CustomAtom) -> str:
    f = atom.flags
    words = [f"atom @{atom.name}", f"dim={atom.dim}"]
    for word, on in (
        ("closed", f.is_closed), ("boundary", f.has_boundary), ("orientable", f.is_orientable),
        ("simply_connected", f.is_simply_connected), ("disconnected", not f.is_connected),
        ("nonmanifold", not f.is_manifold), ("homotopy_sphere", f.is_homotopy_sphere),
    ):
        if on:
            words.append(word)
    for deg, g in atom.homology:
        words.append(f"H{deg}={str(g).replace(' ', '')}")
    c = atom.capabilities

    def codims(xs):
        return ",".join(f"{a}{'t' if t else ''}" for a, t in sorted(xs))

    if c.embed_codims:
        words.append("embed=" + codims(c.embed_codims))
    extra = c.immerse_codims - c.embed_codims
    if extra:
        words.append("immerse=" + codims(extra))
    if c.embeds_into_Rn:
        words.append("embeds_into=" + ",".join(map(str, sorted(c.embeds_into_Rn))))
    extra_into = c.immerses_into_Rn - c.embeds_into_Rn
    if extra_into:
        words.append("immerses_into=" + ",".join(map(str, sorted(extra_into))))
    return " ".join(words)


def render_document(t: SpaceTerm) -> str:
    """Declarations for every custom atom in ``t`` followed by the term."""
    lines = [_declaration_line(a) for a in custom_atoms(t)]
    return "\n".join(lines + [render(t)])


def render_script(root: RootSequence, steps) -> str:
    atoms = {}
    for v in root:
        for a in custom_atoms(v.space):
            atoms.setdefault(a.name, a)
    lines = [_declaration_line(a) for a in atoms.values()]
    lines.append("root:")
    for i, v in enumerate(root):
        lines.append(f"{i}: {render(v.space)} smooth={v.smooth} p={v.p}")
    if steps:
        lines.append("steps:")
        lines.extend(str(s) for s in steps)
    return "\n".join(lines) + "\n"
