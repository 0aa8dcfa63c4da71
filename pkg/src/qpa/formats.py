"""Textual v1 file formats for probabilistic automata and DFAs.

Automaton format (UTF-8, line oriented, '#' starts a comment):

    states: s t u
    alphabet: a b
    init: s=1/2 t=1/2
    acceptance: parity s=1 t=1 u=0     # or: buchi s | cobuchi s | safety s t | reach u
    trans: s a s 1/2

Probabilities are exact rationals: "1/2", "1", "0.25" all parse exactly.
The acceptance line is optional (bare tables are legal); everything else is
required.  DFA format replaces init/acceptance/trans with:

    init: q0
    accept: q1 q2
    trans: src letter dst
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import Acceptance, Automaton, SET_KINDS, validate_automaton
from .errors import FormatError, InputError

_TOKEN = re.compile(r"\S+")
_KEY = re.compile(r"^(\w+)\s*:\s*(.*)$")


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if line.strip():
            yield lineno, line


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(line)]


def _parse_prob(tok: str, lineno: int, col: int) -> Fraction:
    try:
        p = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad probability {tok!r}", lineno, col)
    if p < 0 or p > 1:
        raise FormatError(f"probability {tok!r} outside [0,1]", lineno, col)
    return p


def _split_lines(text: str, keys: tuple[str, ...]):
    """Yield (lineno, key, body-tokens) and reject unknown keys."""
    for lineno, line in _content_lines(text):
        m = _KEY.match(line.strip())
        if not m:
            raise FormatError("expected 'key: ...'", lineno, 1)
        key = m.group(1)
        if key not in keys:
            raise FormatError(f"unknown section {key!r}", lineno, 1)
        body = line.split(":", 1)[1]
        offset = line.index(":") + 1
        toks = [(t, offset + c) for t, c in _tokens(body)]
        yield lineno, key, toks


def parse_automaton(text: str) -> Automaton:
    """Parse the v1 automaton format; raises FormatError / InputError."""
    states: list[str] = []
    alphabet: list[str] = []
    init: dict[str, Fraction] = {}
    acceptance: Acceptance | None = None
    trans: dict[tuple[str, str, str], Fraction] = {}
    seen: set[str] = set()

    for lineno, key, toks in _split_lines(text, ("states", "alphabet", "init", "acceptance", "trans")):
        if key in ("states", "alphabet") and key in seen:
            raise FormatError(f"duplicate {key!r} section", lineno, 1)
        if key == "states":
            for t, c in toks:
                if t in states:
                    raise FormatError(f"duplicate state {t!r}", lineno, c)
                states.append(t)
        elif key == "alphabet":
            for t, c in toks:
                if t in alphabet:
                    raise FormatError(f"duplicate letter {t!r}", lineno, c)
                alphabet.append(t)
        elif key == "init":
            if "init" in seen:
                raise FormatError("duplicate 'init' section", lineno, 1)
            for t, c in toks:
                if "=" not in t:
                    raise FormatError(f"expected state=prob, got {t!r}", lineno, c)
                q, _, ptok = t.partition("=")
                if q not in states:
                    raise FormatError(f"unknown state {q!r}", lineno, c)
                if q in init:
                    raise FormatError(f"duplicate initial weight for {q!r}", lineno, c)
                init[q] = _parse_prob(ptok, lineno, c + len(q) + 1)
        elif key == "acceptance":
            if acceptance is not None:
                raise FormatError("duplicate 'acceptance' section", lineno, 1)
            if not toks:
                raise FormatError("empty acceptance line", lineno, 1)
            kind, kcol = toks[0]
            if kind in SET_KINDS:
                for t, c in toks[1:]:
                    if t not in states:
                        raise FormatError(f"unknown state {t!r}", lineno, c)
                acceptance = Acceptance(kind, frozenset(t for t, _ in toks[1:]))
            elif kind == "parity":
                prio: dict[str, int] = {}
                for t, c in toks[1:]:
                    if "=" not in t:
                        raise FormatError(f"expected state=priority, got {t!r}", lineno, c)
                    q, _, ptok = t.partition("=")
                    if q not in states:
                        raise FormatError(f"unknown state {q!r}", lineno, c)
                    if q in prio:
                        raise FormatError(f"duplicate priority for {q!r}", lineno, c)
                    try:
                        prio[q] = int(ptok)
                    except ValueError:
                        raise FormatError(f"bad priority {ptok!r}", lineno, c + len(q) + 1)
                acceptance = Acceptance.parity(prio)
            else:
                raise FormatError(f"unknown acceptance kind {kind!r}", lineno, kcol)
        else:  # trans
            if len(toks) != 4:
                raise FormatError("expected 'trans: src letter dst prob'", lineno, 1)
            (src, c1), (letter, c2), (dst, c3), (ptok, c4) = toks
            if src not in states:
                raise FormatError(f"unknown state {src!r}", lineno, c1)
            if letter not in alphabet:
                raise FormatError(f"unknown letter {letter!r}", lineno, c2)
            if dst not in states:
                raise FormatError(f"unknown state {dst!r}", lineno, c3)
            if (src, letter, dst) in trans:
                raise FormatError(f"duplicate transition {src} {letter} {dst}", lineno, c1)
            trans[(src, letter, dst)] = _parse_prob(ptok, lineno, c4)
        seen.add(key)

    for required in ("states", "alphabet", "init", "trans"):
        if required not in seen:
            raise InputError(f"missing '{required}:' line")

    sidx = {q: i for i, q in enumerate(states)}
    n = len(states)
    matrices = []
    for letter in alphabet:
        mat = [[Fraction(0)] * n for _ in range(n)]
        matrices.append(mat)
    for (src, letter, dst), p in trans.items():
        matrices[alphabet.index(letter)][sidx[src]][sidx[dst]] = p
    initial = [init.get(q, Fraction(0)) for q in states]

    a = Automaton(states, alphabet, matrices, initial, acceptance)
    problems = validate_automaton(a)
    if problems:
        raise InputError("; ".join(problems))
    return a


def serialize_automaton(a: Automaton) -> str:
    """Canonical v1 text; parsing it back yields an equal automaton."""
    lines = [
        "states: " + " ".join(a.states),
        "alphabet: " + " ".join(a.alphabet),
        "init: " + " ".join(f"{q}={p}" for q, p in zip(a.states, a.initial) if p > 0),
    ]
    acc = a.acceptance
    if acc is not None:
        if acc.kind in SET_KINDS:
            members = " ".join(q for q in a.states if q in acc.states)
            lines.append(f"acceptance: {acc.kind} {members}".rstrip())
        else:
            pm = acc.priority_map
            lines.append("acceptance: parity " + " ".join(f"{q}={pm[q]}" for q in a.states))
    for k, letter in enumerate(a.alphabet):
        for i, src in enumerate(a.states):
            for j, dst in enumerate(a.states):
                p = a.matrices[k][i][j]
                if p > 0:
                    lines.append(f"trans: {src} {letter} {dst} {p}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DFA:
    """A deterministic, total finite automaton on finite words."""

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    init: str
    accepting: frozenset[str]
    delta: tuple[tuple[int, ...], ...]  # delta[letter][state] -> state index

    def step(self, q: str, letter: str) -> str:
        return self.states[self.delta[self.alphabet.index(letter)][self.states.index(q)]]

    def accepts(self, word) -> bool:
        i = self.states.index(self.init)
        for letter in word:
            i = self.delta[self.alphabet.index(letter)][i]
        return self.states[i] in self.accepting


def parse_dfa(text: str) -> DFA:
    """Parse the v1 DFA format; the transition table must be deterministic and total."""
    states: list[str] = []
    alphabet: list[str] = []
    init: str | None = None
    accepting: list[str] = []
    moves: dict[tuple[str, str], str] = {}
    seen: set[str] = set()

    for lineno, key, toks in _split_lines(text, ("states", "alphabet", "init", "accept", "trans")):
        if key in ("states", "alphabet", "init", "accept") and key in seen:
            raise FormatError(f"duplicate {key!r} section", lineno, 1)
        if key == "states":
            for t, c in toks:
                if t in states:
                    raise FormatError(f"duplicate state {t!r}", lineno, c)
                states.append(t)
        elif key == "alphabet":
            for t, c in toks:
                if t in alphabet:
                    raise FormatError(f"duplicate letter {t!r}", lineno, c)
                alphabet.append(t)
        elif key == "init":
            if len(toks) != 1:
                raise FormatError("expected a single initial state", lineno, 1)
            t, c = toks[0]
            if t not in states:
                raise FormatError(f"unknown state {t!r}", lineno, c)
            init = t
        elif key == "accept":
            for t, c in toks:
                if t not in states:
                    raise FormatError(f"unknown state {t!r}", lineno, c)
                accepting.append(t)
        else:
            if len(toks) != 3:
                raise FormatError("expected 'trans: src letter dst'", lineno, 1)
            (src, c1), (letter, c2), (dst, c3) = toks
            if src not in states:
                raise FormatError(f"unknown state {src!r}", lineno, c1)
            if letter not in alphabet:
                raise FormatError(f"unknown letter {letter!r}", lineno, c2)
            if dst not in states:
                raise FormatError(f"unknown state {dst!r}", lineno, c3)
            if (src, letter) in moves:
                raise FormatError(f"nondeterministic move for {src!r} on {letter!r}", lineno, c1)
            moves[(src, letter)] = dst
        seen.add(key)

    for required in ("states", "alphabet", "init", "trans"):
        if required not in seen:
            raise InputError(f"missing '{required}:' line")
    assert init is not None
    for q in states:
        for letter in alphabet:
            if (q, letter) not in moves:
                raise InputError(f"missing move for state {q!r} on letter {letter!r}")

    sidx = {q: i for i, q in enumerate(states)}
    delta = tuple(
        tuple(sidx[moves[(q, letter)]] for q in states) for letter in alphabet
    )
    return DFA(tuple(states), tuple(alphabet), init, frozenset(accepting), delta)


def serialize_dfa(d: DFA) -> str:
    lines = [
        "states: " + " ".join(d.states),
        "alphabet: " + " ".join(d.alphabet),
        f"init: {d.init}",
        ("accept: " + " ".join(q for q in d.states if q in d.accepting)).rstrip(),
    ]
    for k, letter in enumerate(d.alphabet):
        for i, src in enumerate(d.states):
            lines.append(f"trans: {src} {letter} {d.states[d.delta[k][i]]}")
    return "\n".join(lines) + "\n"
