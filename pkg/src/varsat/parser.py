"""Parser for ``.vsat`` theory files, terms and quantifier-free formulas.

Theory files are sequences of statements terminated by a standalone ``.``::

    sorts Nat NatSet Pred .
    subsorts Nat < NatSet .
    op _+_ : Nat Nat -> Nat [ctor assoc comm id: 0 prec 33] .
    vars N M : Nat .
    rl max(N, N + M) => N + M .
    npattern N > N + M =/= tt .
    npattern even(N , NS) =/= tt if N <= NS =/= tt /\\ NS =/= empty .

Comments start with ``***`` or ``---`` and run to the end of the line.
Operator precedence follows the usual convention: a lower number binds
tighter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import And, Atom, Formula, Iff, Implies, Not, Or
from .rewrite import Rule
from .terms import (
    CTOR, DEFINED, PRED, App, Op, Signature, SortGraph, Term, TermError, Var, mk,
)
from .theory import Diagnostic, NegativePattern, Theory, TheoryError, make_rule

DEFAULT_PREC = {"_+_": 33, "_>_": 37, "_,_": 121, "_<=_": 125}
INFIX_PREC = 41
POSTFIX_PREC = 15
FORMULA_SYMBOLS = ("<=>", "=/=", "=>", "/\\", "\\/", "~", "=")
KEYWORDS = {"sorts", "sort", "subsorts", "subsort", "op", "ops", "var", "vars", "rl", "eq",
            "npattern", "finite", "convergent", "theory", "endth"}

_IDENT = re.compile(r"[A-Za-z0-9][A-Za-z0-9'#$@]*")
_VAR = re.compile(r"([A-Za-z][A-Za-z0-9'#$@]*):([A-Za-z][A-Za-z0-9]*)")


class ParseError(TheoryError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        where = f" (column {col})" if col else ""
        super().__init__([Diagnostic("syntax", message + where, line=line)])
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Tok:
    kind: str  # ident | var | sym | end
    text: str
    col: int
    sort: str | None = None


class Lexer:
    """Tokenizer parameterized by the symbolic operator tokens in scope."""

    def __init__(self, symbols: set[str] = frozenset()):
        base = {"(", ")", ",", *FORMULA_SYMBOLS}
        self.symbols = sorted(base | set(symbols), key=len, reverse=True)

    def tokens(self, text: str, line: int | None = None) -> list[Tok]:
        out: list[Tok] = []
        i, n = 0, len(text)
        while i < n:
            c = text[i]
            if c.isspace():
                i += 1
                continue
            m = _VAR.match(text, i)
            if m and not (m.end() < n and (text[m.end()].isalnum())):
                out.append(Tok("var", m.group(1), i + 1, m.group(2)))
                i = m.end()
                continue
            m = _IDENT.match(text, i)
            if m:
                out.append(Tok("ident", m.group(0), i + 1))
                i = m.end()
                continue
            for s in self.symbols:
                if text.startswith(s, i):
                    out.append(Tok("sym", s, i + 1))
                    i += len(s)
                    break
            else:
                raise ParseError(f"unexpected character {c!r}", line, i + 1)
        out.append(Tok("end", "", n + 1))
        return out


def _op_tokens(op: Op) -> list[str]:
    return [p for p in op.name.split("_") if p]


class TermParser:
    """Pratt parser for terms and formulas over a signature."""

    def __init__(self, sig: Signature, variables: dict[str, Var] | None = None):
        self.sig = sig
        self.variables = variables if variables is not None else {}
        syms: set[str] = set()
        self.infix: dict[str, Op] = {}
        self.postfix: dict[tuple[str, ...], Op] = {}
        self.prefix: dict[str, Op] = {}
        for op in sig.ops.values():
            parts = _op_tokens(op)
            if op.is_infix and op.arity == 2:
                self.infix[parts[0]] = op
            elif op.is_postfix and op.arity == 1:
                self.postfix[tuple(self._split(parts[0]))] = op
            else:
                self.prefix[op.name] = op
            for p in parts:
                if not _IDENT.fullmatch(p):
                    syms.update(self._symbol_chunks(p))
        self.lexer = Lexer(syms)

    @staticmethod
    def _symbol_chunks(p: str) -> list[str]:
        # a token like ":NeList" contributes ":" as a symbol, identifiers stay identifiers
        out, buf = [], ""
        for ch in p:
            if ch.isalnum():
                if buf:
                    out.append(buf)
                    buf = ""
            else:
                buf += ch
        if buf:
            out.append(buf)
        return out

    @staticmethod
    def _split(p: str) -> list[str]:
        return [m.group(0) for m in re.finditer(r"[A-Za-z0-9][A-Za-z0-9'#$@]*|[^A-Za-z0-9\s]+", p)]

    # --- entry points ------------------------------------------------------
    def parse_term(self, text: str, line: int | None = None) -> Term:
        self._start(text, line)
        t, _ = self._expr(10**9, commas=True)
        self._expect_end()
        return t

    def parse_formula(self, text: str, line: int | None = None) -> Formula:
        self._start(text, line)
        f = self._iff()
        self._expect_end()
        return f

    def _start(self, text: str, line: int | None) -> None:
        self.text = text
        self.line = line
        self.toks = self.lexer.tokens(text, line)
        self.pos = 0

    def _peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def _next(self) -> Tok:
        t = self._peek()
        self.pos += 1
        return t

    def _error(self, msg: str, tok: Tok | None = None) -> ParseError:
        tok = tok or self._peek()
        return ParseError(msg, self.line, tok.col)

    def _expect(self, text: str) -> None:
        t = self._next()
        if t.text != text or t.kind == "end":
            raise self._error(f"expected {text!r} but found {t.text or 'end of input'!r}", t)

    def _expect_end(self) -> None:
        if self._peek().kind != "end":
            raise self._error(f"unexpected {self._peek().text!r}")

    # --- formulas ----------------------------------------------------------
    def _iff(self) -> Formula:
        left = self._implies()
        while self._peek().text == "<=>":
            self._next()
            left = Iff(left, self._implies())
        return left

    def _implies(self) -> Formula:
        left = self._or()
        if self._peek().text == "=>":
            self._next()
            return Implies(left, self._implies())
        return left

    def _or(self) -> Formula:
        parts = [self._and()]
        while self._peek().text == "\\/":
            self._next()
            parts.append(self._and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def _and(self) -> Formula:
        parts = [self._unary()]
        while self._peek().text == "/\\":
            self._next()
            parts.append(self._unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def _unary(self) -> Formula:
        tok = self._peek()
        if tok.text == "~":
            self._next()
            return Not(self._unary())
        if tok.text == "(" and tok.kind == "sym":
            # a parenthesized formula, unless the parentheses wrap a term
            save = self.pos
            try:
                return self._atom()
            except ParseError:
                self.pos = save
            self._next()
            f = self._iff()
            self._expect(")")
            return f
        return self._atom()

    def _atom(self) -> Formula:
        lhs, _ = self._expr(10**9, commas=True)
        tok = self._next()
        if tok.text not in ("=", "=/="):
            raise self._error("expected '=' or '=/=' in atom", tok)
        rhs, _ = self._expr(10**9, commas=True)
        self._check_literal(lhs, rhs, tok)
        atom = Atom(lhs, rhs)
        return atom if tok.text == "=" else Not(atom)

    def _check_literal(self, lhs: Term, rhs: Term, tok: Tok) -> None:
        a, b = _sort_of(lhs), _sort_of(rhs)
        if not self.sig.sorts.connected(a, b):
            raise self._error(f"sides of the atom have unrelated sorts {a} and {b}", tok)

    # --- terms -------------------------------------------------------------
    def _expr(self, limit: int, commas: bool) -> tuple[Term, int]:
        left, lprec = self._primary()
        while True:
            tok = self._peek()
            if tok.kind == "end":
                break
            if tok.text == "," and not commas:
                break
            op = self._postfix_at()
            if op is not None:
                if op.prec > limit or lprec > op.prec:
                    break
                self.pos += len(self._split(_op_tokens(op)[0]))
                left, lprec = self._build(op, [left], tok), op.prec
                continue
            op = self.infix.get(tok.text) if tok.kind in ("sym", "ident") else None
            if op is None or op.prec > limit or lprec > op.prec:
                break
            self._next()
            right, _ = self._expr(op.prec - 1 if not op.assoc else op.prec, commas)
            left, lprec = self._build(op, [left, right], tok), op.prec
        return left, lprec

    def _postfix_at(self) -> Op | None:
        for toks, op in self.postfix.items():
            if all(self._peek(k).text == t for k, t in enumerate(toks)):
                return op
        return None

    def _primary(self) -> tuple[Term, int]:
        tok = self._next()
        if tok.kind == "var":
            if tok.sort not in self.sig.sorts.sorts:
                raise self._error(f"unknown sort {tok.sort!r} for variable {tok.text}", tok)
            return Var(tok.text, tok.sort), 0
        if tok.text == "(":
            t, _ = self._expr(10**9, commas=True)
            self._expect(")")
            return t, 0
        if tok.kind == "ident":
            name = tok.text
            if name in self.variables and self._peek().text != "(":
                return self.variables[name], 0
            op = self.prefix.get(name)
            if op is None:
                if name in self.variables:
                    return self.variables[name], 0
                raise self._error(f"unknown symbol {name!r}", tok)
            if op.arity == 0:
                return self._build(op, [], tok), 0
            self._expect("(")
            if op.arity == 1 and not op.is_ac:
                arg, _ = self._expr(10**9, commas=True)
                args = [arg]
            else:
                args = [self._expr(10**9, commas=False)[0]]
                while self._peek().text == ",":
                    self._next()
                    args.append(self._expr(10**9, commas=False)[0])
            self._expect(")")
            return self._build(op, args, tok), 0
        raise self._error(f"unexpected {tok.text or 'end of input'!r}", tok)

    def _build(self, op: Op, args: list[Term], tok: Tok) -> Term:
        if not op.is_ac and len(args) != op.arity:
            raise self._error(f"{op.name} expects {op.arity} arguments, got {len(args)}", tok)
        expected = [op.arg_sorts[0]] * len(args) if op.is_ac else op.arg_sorts
        for a, s in zip(args, expected):
            ls = _sort_of(a)
            if not self.sig.leq(ls, s):
                raise self._error(f"argument of sort {ls} where {op.name} expects {s}", tok)
        return mk(op, args)


def _sort_of(t: Term) -> str:
    return t.sort if isinstance(t, Var) else t.op.result


# --- theory files ---------------------------------------------------------------

_COMMENT = re.compile(r"(\*\*\*|---).*$", re.M)


@dataclass
class Statement:
    words: str
    line: int


def split_statements(text: str) -> list[Statement]:
    text = _COMMENT.sub("", text)
    out: list[Statement] = []
    buf: list[str] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        for m in re.finditer(r"\S+", raw):
            w = m.group(0)
            if start is None:
                start = lineno
            if w == ".":
                out.append(Statement(" ".join(buf), start))
                buf, start = [], None
            elif w.endswith(".") and w[:-1] and w[:-1] in KEYWORDS | {"convergent"}:
                buf.append(w[:-1])
                out.append(Statement(" ".join(buf), start))
                buf, start = [], None
            else:
                buf.append(w)
    if buf and buf != ["endth"]:
        raise ParseError("statement not terminated by ' .'", start)
    return out


_ATTR_WORDS = {"ctor", "pred", "assoc", "comm", "idem"}


def _split_attrs(rest: str, line: int) -> tuple[str, str]:
    if rest.rstrip().endswith("]"):
        i = rest.rfind("[")
        if i < 0:
            raise ParseError("unbalanced ']' in declaration", line)
        return rest[:i].strip(), rest[i + 1:rest.rstrip().rfind("]")].strip()
    return rest.strip(), ""


class TheoryParser:
    def __init__(self, name: str = "theory"):
        self.name = name
        self.sig = Signature(SortGraph())
        self.variables: dict[str, Var] = {}
        self.rules: list[Rule] = []
        self.patterns: list[NegativePattern] = []
        self.finite: set[str] = set()
        self.convergent = False
        self.pending_ids: list[tuple[Op, str, int]] = []
        self.rule_lines: list[tuple[str, int]] = []
        self._tp: TermParser | None = None

    @property
    def tp(self) -> TermParser:
        if self._tp is None:
            self._resolve_identities()
            self._tp = TermParser(self.sig, self.variables)
        return self._tp

    def parse(self, text: str) -> Theory:
        stmts = split_statements(text)
        if not stmts:
            raise ParseError("empty theory: no sorts declared", 1)
        for st in stmts:
            self._statement(st)
        if not self.sig.sorts.sorts:
            raise ParseError("no sorts declared", 1)
        self._resolve_identities()
        th = Theory(self.name, self.sig, self.rules, self.patterns, self.variables,
                    self.finite, self.convergent)
        th.rule_lines = self.rule_lines  # type: ignore[attr-defined]
        return th

    def _statement(self, st: Statement) -> None:
        words = st.words.split()
        if not words:
            return
        kw, rest = words[0], st.words[len(words[0]):].strip()
        line = st.line
        if kw == "theory":
            if len(words) < 3 or words[2] != "is":
                raise ParseError("expected 'theory <name> is'", line)
            self.name = words[1]
            self._statement(Statement(" ".join(words[3:]), line))
            return
        if kw == "endth":
            return
        if kw in ("sorts", "sort"):
            for s in rest.split():
                self.sig.sorts.add_sort(s)
            return
        if kw in ("subsorts", "subsort"):
            chain = [p.split() for p in rest.split("<")]
            if len(chain) < 2:
                raise ParseError("subsort declaration needs '<'", line)
            try:
                for lows, highs in zip(chain, chain[1:]):
                    for lo in lows:
                        for hi in highs:
                            self.sig.sorts.add_subsort(lo, hi)
            except TermError as e:
                raise ParseError(str(e), line) from e
            self._tp = None
            return
        if kw in ("op", "ops"):
            self._op_decl(kw, rest, line)
            return
        if kw in ("var", "vars"):
            if ":" not in rest:
                raise ParseError("variable declaration needs ':'", line)
            names, sort = rest.rsplit(":", 1)
            sort = sort.strip()
            if sort not in self.sig.sorts.sorts:
                raise ParseError(f"unknown sort {sort!r} in variable declaration", line)
            for n in names.split():
                if n in self.sig.ops:
                    raise ParseError(f"variable {n!r} clashes with an operator", line)
                self.variables[n] = Var(n, sort)
            self._tp = None
            return
        if kw in ("rl", "eq"):
            sep = "=>" if kw == "rl" else "="
            label = None
            m = re.match(r"\[([^\]]+)\]\s*:\s*(.*)$", rest)
            if m:
                label, rest = m.group(1), m.group(2)
            parts = self._split_top(rest, sep)
            if parts is None:
                raise ParseError(f"rule needs '{sep}'", line)
            lhs = self.tp.parse_term(parts[0], line)
            rhs = self.tp.parse_term(parts[1], line)
            try:
                rule = make_rule(self.sig, lhs, rhs, label)
            except ValueError as e:
                raise ParseError(str(e), line) from e
            self.rules.append(rule)
            self.rule_lines.append((rule.label or "", line))
            return
        if kw == "npattern":
            self._npattern(rest, line)
            return
        if kw == "finite":
            ws = rest.split()
            if len(ws) != 2 or ws[0] != "sort":
                raise ParseError("expected 'finite sort <Sort> .'", line)
            if ws[1] not in self.sig.sorts.sorts:
                raise ParseError(f"unknown sort {ws[1]!r}", line)
            self.finite.add(ws[1])
            return
        if kw == "convergent":
            self.convergent = True
            return
        raise ParseError(f"unknown statement {kw!r}", line)

    @staticmethod
    def _split_top(text: str, sep: str) -> tuple[str, str] | None:
        # split at the first separator outside parentheses, surrounded by spaces
        depth = 0
        i = 0
        n = len(text)
        while i < n:
            c = text[i]
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
            elif depth == 0 and text.startswith(sep, i):
                before = text[i - 1] if i else " "
                after = text[i + len(sep)] if i + len(sep) < n else " "
                if before.isspace() and after.isspace():
                    return text[:i].strip(), text[i + len(sep):].strip()
            i += 1
        return None

    def _op_decl(self, kw: str, rest: str, line: int) -> None:
        body, attrs = _split_attrs(rest, line)
        if " : " not in f" {body} " and ":" not in body:
            raise ParseError("operator declaration needs ':'", line)
        m = re.match(r"^(.*?)\s:\s(.*)$", body) or re.match(r"^(\S+):\s*(.*)$", body)
        if not m:
            raise ParseError("operator declaration needs ' : '", line)
        names_part, arity = m.group(1).strip(), m.group(2).strip()
        names = names_part.split() if kw == "ops" else [names_part]
        if "->" not in arity:
            raise ParseError("operator declaration needs '->'", line)
        args_s, result = arity.split("->", 1)
        arg_sorts = args_s.split()
        result = result.strip()
        role = DEFINED
        flags = dict(assoc=False, comm=False, idem=False)
        ident: str | None = None
        prec: int | None = None
        extra: dict[str, object] = {}
        toks = attrs.split()
        i = 0
        while i < len(toks):
            a = toks[i]
            if a == "ctor":
                role = CTOR
            elif a == "pred":
                role = PRED
            elif a in flags:
                flags[a] = True
            elif a in ("id:", "id"):
                i += 1
                if i < len(toks) and toks[i] == ":":
                    i += 1
                if i >= len(toks):
                    raise ParseError("missing identity term after 'id:'", line)
                ident = toks[i]
            elif a == "prec":
                i += 1
                try:
                    prec = int(toks[i])
                except (IndexError, ValueError):
                    raise ParseError("'prec' needs an integer", line) from None
            elif a == "sel:":
                extra["sel"] = toks[i + 1:]
                i = len(toks)
                continue
            elif a == "subsort:":
                i += 1
                extra["subsort"] = toks[i]
            else:
                raise ParseError(f"unknown operator attribute {a!r}", line)
            i += 1
        for name in names:
            if prec is None:
                p = DEFAULT_PREC.get(name)
            else:
                p = prec
            op = Op(name, arg_sorts, result, role=role, prec=p, attrs=extra, **flags)
            if p is None:
                if op.is_postfix:
                    op.prec = POSTFIX_PREC
            if name in self.variables:
                raise ParseError(f"operator {name!r} clashes with a variable", line)
            try:
                self.sig.add_op(op)
            except TermError as e:
                raise ParseError(str(e), line) from e
            if ident is not None:
                self.pending_ids.append((op, ident, line))
        self._tp = None

    def _resolve_identities(self) -> None:
        pending, self.pending_ids = self.pending_ids, []
        for op, name, line in pending:
            c = self.sig.ops.get(name)
            if c is None or c.arity:
                raise ParseError(f"identity {name!r} of {op.name} is not a declared constant", line)
            op.identity = App(c, ())

    def _npattern(self, rest: str, line: int) -> None:
        cond = None
        parts = re.split(r"\s+if\s+", rest, maxsplit=1)
        head = parts[0]
        if len(parts) == 2:
            cond = parts[1]
        m = re.match(r"^(.*)\s=/=\s+tt\s*$", head)
        if not m:
            raise ParseError("negative pattern must have the form '<atom> =/= tt'", line)
        atom = self.tp.parse_term(m.group(1), line)
        constraint: list[tuple[Term, Term]] = []
        if cond:
            f = self.tp.parse_formula(cond, line)
            for lit in (f.parts if isinstance(f, And) else (f,)):
                if not (isinstance(lit, Not) and isinstance(lit.body, Atom)):
                    raise ParseError("pattern constraints must be disequalities", line)
                constraint.append((lit.body.lhs, lit.body.rhs))
        self.patterns.append(NegativePattern(atom, constraint, line))


def parse_theory(text: str, name: str = "theory") -> Theory:
    return TheoryParser(name).parse(text)


def load_theory(path: str) -> Theory:
    import os
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_theory(text, os.path.splitext(os.path.basename(path))[0])


def parse_term(theory: Theory, text: str) -> Term:
    return TermParser(theory.signature, theory.variables).parse_term(text)


def parse_formula(theory: Theory, text: str) -> Formula:
    return TermParser(theory.signature, theory.variables).parse_formula(text)


def parse_equations(theory: Theory, text: str) -> list[tuple[Term, Term]]:
    """A conjunction of equations ``u = v /\\ ...`` as a list of pairs."""
    f = parse_formula(theory, text)
    out = []
    for part in (f.parts if isinstance(f, And) else (f,)):
        if not isinstance(part, Atom):
            raise ParseError("a unification problem is a conjunction of equations")
        out.append((part.lhs, part.rhs))
    return out
