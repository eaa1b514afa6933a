"""Concrete syntax for effect trees.

Grammar (whitespace insensitive)::

    expr  ::= 'bot' | 'top' | 'x' NAT
            | 'rec' IDENT '.' expr
            | IDENT                          -- back-reference to a rec binder
            | OP ( '(' expr (',' expr)* ')' )?
            | 'lkp' '(' NAT '->' expr (',' NAT '->' expr)* ')'
    OP    ::= IDENT ( '[' PARAM ']' )?

``print_tree`` emits the canonical form, and ``parse_tree(print_tree(t)) == t``.
"""
from __future__ import annotations

import re

from .trees import (BOT, TOP, Bot, Leaf, Node, Rec, Ref, RegularTree, Signature,
                    Top, Tree, TreeLike, as_term, contains_rec)

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[()\[\],.])
""", re.VERBOSE)

_VAR = re.compile(r"x(\d+)")
KEYWORDS = {"bot", "top", "rec"}


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.message = message
        self.pos = pos
        self.line = line
        self.column = col


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, signature: Signature | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = signature

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2], self.text)

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value:
            self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def parse(self) -> Tree:
        t = self.expr(())
        if self.peek()[0] != "eof":
            self.error(f"unexpected {self.peek()[1]!r}")
        return t

    def expr(self, bound: tuple[str, ...]) -> Tree:
        tok = self.next()
        kind, val, _ = tok
        if kind != "ident":
            self.error(f"expected an expression, found {val or 'end of input'!r}", tok)
        if val == "bot":
            return BOT
        if val == "top":
            return TOP
        m = _VAR.fullmatch(val)
        if m:
            return Leaf(int(m.group(1)))
        if val == "rec":
            name_tok = self.next()
            if name_tok[0] != "ident" or name_tok[1] in KEYWORDS or _VAR.fullmatch(name_tok[1]):
                self.error("expected a binder name after 'rec'", name_tok)
            self.expect(".")
            body = self.expr(bound + (name_tok[1],))
            return Rec(name_tok[1], body)
        op = val
        if self.peek()[1] == "[":
            self.next()
            parts = []
            while self.peek()[1] != "]":
                if self.peek()[0] == "eof":
                    self.error("unterminated operator parameter")
                parts.append(self.next()[1])
            self.next()
            op = f"{val}[{''.join(parts)}]"
        if self.peek()[1] != "(":
            if op == val and val in bound:
                return Ref(val)
            if self.sig is not None and op in self.sig and self.sig.arity(op) == 0:
                return Node(op, ())
            if self.sig is None and op != val:
                return Node(op, ())
            if op == val:
                self.error(f"unbound name {val!r}", tok)
            self.error(f"operator {op!r} needs arguments", tok)
        if self.sig is not None and op not in self.sig:
            self.error(f"unknown operator {op!r} for this effect", tok)
        self.expect("(")
        if op == "lkp":
            children = self.lookup_branches(bound, tok)
        else:
            children = [self.expr(bound)]
            while self.peek()[1] == ",":
                self.next()
                children.append(self.expr(bound))
            self.expect(")")
        if self.sig is not None and len(children) != self.sig.arity(op):
            self.error(f"arity mismatch: {op} takes {self.sig.arity(op)} "
                       f"argument(s), got {len(children)}", tok)
        return Node(op, tuple(children))

    def lookup_branches(self, bound, op_tok) -> list[Tree]:
        branches: dict[int, Tree] = {}
        while True:
            ntok = self.next()
            if ntok[0] != "num":
                self.error("expected a branch index in lkp", ntok)
            idx = int(ntok[1])
            if idx in branches:
                self.error(f"duplicate lkp branch {idx}", ntok)
            self.expect("->")
            branches[idx] = self.expr(bound)
            if self.peek()[1] == ",":
                self.next()
                continue
            self.expect(")")
            break
        width = self.sig.arity("lkp") if self.sig is not None else len(branches)
        if sorted(branches) != list(range(width)):
            self.error(f"lkp needs exactly the branches 0..{width - 1}, "
                       f"got {sorted(branches)}", op_tok)
        return [branches[i] for i in range(width)]


def parse_tree(text: str, signature: Signature | None = None) -> TreeLike:
    """Parse ``text``; a term containing ``rec`` comes back as a RegularTree."""
    term = _Parser(text, signature).parse()
    if contains_rec(term):
        return RegularTree(term)
    return term


def print_tree(t: TreeLike) -> str:
    parts: list[str] = []
    _emit(as_term(t), parts)
    return "".join(parts)


def _emit(t: Tree, out: list[str]) -> None:
    if isinstance(t, Bot):
        out.append("bot")
    elif isinstance(t, Top):
        out.append("top")
    elif isinstance(t, Leaf):
        v = t.value
        if isinstance(v, int) and not isinstance(v, bool):
            out.append(f"x{v}")
        elif isinstance(v, (Tree, RegularTree)):
            out.append("<" + print_tree(v) + ">")
        else:
            out.append(f"<{v}>")
    elif isinstance(t, Ref):
        out.append(t.name)
    elif isinstance(t, Rec):
        out.append(f"rec {t.name}. ")
        _emit(t.body, out)
    elif isinstance(t, Node):
        out.append(t.op)
        if not t.children:
            return
        out.append("(")
        for i, c in enumerate(t.children):
            if i:
                out.append(", ")
            if t.op == "lkp":
                out.append(f"{i} -> ")
            _emit(c, out)
        out.append(")")
    else:
        raise TypeError(f"not a tree: {t!r}")
