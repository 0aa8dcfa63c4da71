"""Finite profile monoids abstracting finite words for the decision procedures.

A priority profile of a word stores, per state pair (q, q'), the minimum
priority seen on any positive-probability path from q to q' reading that
word (endpoints included), or INF when no such path exists.  Profiles
compose associatively, so the profiles of all nonempty words form a finite
monoid generated by the letter profiles.

A safe profile, for a fixed set F, stores the state pairs connected by
positive paths that remain inside F throughout, together with the set of
states whose entire positive tree stays inside F for the word.
"""
from __future__ import annotations

from collections import deque
from typing import Callable, Mapping, Sequence, TypeVar

from .core import Automaton, bits
from .errors import BudgetExceededError, InputError
from .graphs import bottom_scc_masks

INF = 1 << 30

Profile = tuple[tuple[int, ...], ...]
SafeProfile = tuple[tuple[int, ...], int]

T = TypeVar("T")


def normalize_priorities(a: Automaton, p: Mapping[str, int] | Sequence[int] | None) -> tuple[int, ...]:
    """Priority vector by state index; defaults to the automaton's acceptance."""
    if p is None:
        return a.priorities()
    if isinstance(p, Mapping):
        missing = [q for q in a.states if q not in p]
        if missing:
            raise InputError(f"priorities missing for {missing}")
        return tuple(int(p[q]) for q in a.states)
    vec = tuple(int(x) for x in p)
    if len(vec) != a.n:
        raise InputError("priority vector length differs from state count")
    return vec


def letter_profile(a: Automaton, priorities: Mapping[str, int] | Sequence[int] | None, letter: str | int) -> Profile:
    """Profile of a single letter: entry (q,q') = min(p(q), p(q')) on positive moves."""
    p = normalize_priorities(a, priorities)
    k = letter if isinstance(letter, int) else a.word([letter])[0]
    rel = a.relation(k)
    return tuple(
        tuple(min(p[i], p[j]) if rel[i] >> j & 1 else INF for j in range(a.n))
        for i in range(a.n)
    )


def compose_profiles(x: Profile, y: Profile) -> Profile:
    n = len(x)
    out = []
    for i in range(n):
        xi = x[i]
        row = [INF] * n
        for m in range(n):
            c = xi[m]
            if c == INF:
                continue
            ym = y[m]
            for j in range(n):
                v = ym[j]
                if v != INF:
                    best = c if c < v else v
                    if best < row[j]:
                        row[j] = best
        out.append(tuple(row))
    return tuple(out)


def profile_of_word(a: Automaton, priorities, word) -> Profile:
    """Profile of a nonempty word by left-to-right composition."""
    w = a.word(word)
    if not w:
        raise InputError("the empty word has no profile")
    prof = letter_profile(a, priorities, w[0])
    for k in w[1:]:
        prof = compose_profiles(prof, letter_profile(a, priorities, k))
    return prof


def profile_digraph(profile: Profile) -> tuple[int, ...]:
    """Finite-entry rows of a profile as destination bitmasks."""
    rows = []
    for row in profile:
        m = 0
        for j, v in enumerate(row):
            if v != INF:
                m |= 1 << j
        rows.append(m)
    return tuple(rows)


def profile_image(profile: Profile, mask: int) -> int:
    rows = profile_digraph(profile)
    out = 0
    for i in bits(mask):
        out |= rows[i]
    return out


def class_minima(profile: Profile, mask: int) -> list[tuple[int, int]]:
    """Per bottom SCC of the profile digraph within mask, the internal minimum entry.

    The minimum ranges over all finite entries (q, q') with both states in
    the component; it covers every state visited at intermediate positions
    of the underlying word, because profile entries already fold those in.
    """
    rows = profile_digraph(profile)
    out = []
    for comp in bottom_scc_masks(rows, mask):
        m = INF
        for i in bits(comp):
            row = profile[i]
            for j in bits(comp):
                if row[j] < m:
                    m = row[j]
        out.append((comp, m))
    return out


def monoid_closure(
    generators: Sequence[T],
    compose: Callable[[T, T], T],
    budget: int,
    what: str = "monoid",
) -> dict[T, tuple[int, ...]]:
    """Close generators under composition, mapping each element to a witness word.

    The witness is the shortest generating word as a tuple of generator
    indices, ties broken by generator order (BFS in length-lexicographic
    order).  Raises BudgetExceededError before the element count passes the
    budget.
    """
    elems: dict[T, tuple[int, ...]] = {}
    queue: deque[T] = deque()
    for k, g in enumerate(generators):
        if g not in elems:
            elems[g] = (k,)
            queue.append(g)
    while queue:
        e = queue.popleft()
        w = elems[e]
        for k, g in enumerate(generators):
            c = compose(e, g)
            if c not in elems:
                if len(elems) >= budget:
                    raise BudgetExceededError(f"{what} closure exceeded {budget} elements")
                elems[c] = w + (k,)
                queue.append(c)
    return elems


def build_profile_monoid(a: Automaton, priorities=None, budget: int = 1_000_000) -> dict[Profile, tuple[int, ...]]:
    """Closure of the letter profiles; maps profile -> shortest generating word."""
    gens = [letter_profile(a, priorities, k) for k in range(len(a.alphabet))]
    return monoid_closure(gens, compose_profiles, budget, "priority profile")


def letter_safe_profile(a: Automaton, safe_mask: int, letter: str | int) -> SafeProfile:
    k = letter if isinstance(letter, int) else a.word([letter])[0]
    rel = a.relation(k)
    rows = tuple(rel[i] & safe_mask if safe_mask >> i & 1 else 0 for i in range(a.n))
    full = 0
    for i in bits(safe_mask):
        if rel[i] & ~safe_mask == 0:
            full |= 1 << i
    return rows, full


def compose_safe_profiles(x: SafeProfile, y: SafeProfile) -> SafeProfile:
    xrows, xfull = x
    yrows, yfull = y
    n = len(xrows)
    rows = []
    for i in range(n):
        m = 0
        for j in bits(xrows[i]):
            m |= yrows[j]
        rows.append(m)
    full = 0
    for i in bits(xfull):
        if xrows[i] & ~yfull == 0:
            full |= 1 << i
    return tuple(rows), full


def safe_identity(a: Automaton, safe_mask: int) -> SafeProfile:
    """Safe profile of the empty word: stay put, inside F."""
    rows = tuple(1 << i if safe_mask >> i & 1 else 0 for i in range(a.n))
    return rows, safe_mask


def build_safe_monoid(a: Automaton, safe_mask: int, budget: int = 1_000_000) -> dict[SafeProfile, tuple[int, ...]]:
    """Closure of the letter safe-profiles for the set F given as a mask."""
    gens = [letter_safe_profile(a, safe_mask, k) for k in range(len(a.alphabet))]
    return monoid_closure(gens, compose_safe_profiles, budget, "safe profile")
