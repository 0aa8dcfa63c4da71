"""Decision procedures for positive, almost-sure, and limit acceptance.

The existential word quantification is replaced by two finite closures: the
subset construction enumerates every exactly reachable support, and the
profile monoid enumerates the finitely many ways a nonempty word can act on
state pairs together with the minimal priority seen along the way.  A yes
answer always ships a lasso witness that is re-verified exactly before it
is returned.
"""
from __future__ import annotations

from collections import deque

from .core import (
    Acceptance,
    Automaton,
    Budgets,
    DEFAULT_BUDGETS,
    LassoWord,
    Verdict,
    bits,
    support_mask,
)
from .errors import BudgetExceededError, InputError
from .lasso import lasso_acceptance_probability
from .profiles import (
    build_profile_monoid,
    build_safe_monoid,
    class_minima,
    profile_image,
    safe_identity,
)
from .semantics import make_accepting_absorbing, support_step

PROBLEMS = ("positive", "almost", "limit")
MODES = ("simple", "general", "lasso", "struct-simple")


def reachable_supports(a: Automaton, start: int, budget: int) -> dict[int, tuple[int, ...]]:
    """Exact supports reachable from start, each with its shortest word.

    Breadth-first over the subset construction, letters in alphabet order,
    so dict order is shortest-word-first with lexicographic tie-breaking.
    """
    out: dict[int, tuple[int, ...]] = {start: ()}
    queue: deque[int] = deque([start])
    while queue:
        s = queue.popleft()
        w = out[s]
        for k in range(len(a.alphabet)):
            t = support_step(a, s, (k,))
            if t not in out:
                if len(out) >= budget:
                    raise BudgetExceededError(f"subset construction exceeded {budget} supports")
                out[t] = w + (k,)
                queue.append(t)
    return out


def _lasso(a: Automaton, rho1: tuple[int, ...], rho2: tuple[int, ...]) -> LassoWord:
    return LassoWord(
        tuple(a.alphabet[k] for k in rho1),
        tuple(a.alphabet[k] for k in rho2),
    )


def _verified_yes(a: Automaton, w: LassoWord, need_one: bool, extra: dict) -> Verdict:
    p = lasso_acceptance_probability(a, w)
    if (p != 1) if need_one else (p <= 0):
        raise RuntimeError(f"witness {w} failed exact re-verification (probability {p})")
    witness = {
        "prefix": list(w.prefix),
        "period": list(w.period),
        "probability": str(p),
    }
    witness.update(extra)
    return Verdict("yes", witness)


def decide_almost_simple(a: Automaton, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """Is some word accepted with probability one?

    Yes iff some exactly reachable support G admits a profile P that maps G
    into G with every bottom component of P's graph on G having an even
    internal minimum; the witness lasso glues the support word to P's
    generating word.
    """
    acc = a.acceptance
    if acc is None:
        raise InputError("acceptance condition required")
    if acc.kind == "safety":
        return decide_safety(a, "almost", budgets)
    if acc.kind == "reach":
        b = make_accepting_absorbing(a).with_acceptance(Acceptance.buchi(acc.states))
        v = decide_almost_simple(b, budgets)
        if v.answer == "yes":
            w = LassoWord(tuple(v.witness["prefix"]), tuple(v.witness["period"]))
            return _verified_yes(a, w, True, {"support": v.witness.get("support", [])})
        return v
    supports = reachable_supports(a, support_mask(a.initial), budgets.subset)
    monoid = build_profile_monoid(a, None, budgets.monoid)
    for g, rho1 in supports.items():
        for prof, rho2 in monoid.items():
            if profile_image(prof, g) & ~g:
                continue
            if all(mn % 2 == 0 for _, mn in class_minima(prof, g)):
                return _verified_yes(
                    a, _lasso(a, rho1, rho2), True, {"support": list(a.names(g))}
                )
    return Verdict("no", reason="no reachable support admits an almost-surely accepting period")


def decide_positive_simple(a: Automaton, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """Is some word accepted with positive probability?

    Yes iff some profile has a bottom component C with even internal minimum
    that fits inside a reachable support; positive mass lands on C after the
    support word and then never leaves it.
    """
    acc = a.acceptance
    if acc is None:
        raise InputError("acceptance condition required")
    if acc.kind == "safety":
        return decide_safety(a, "positive", budgets)
    if acc.kind == "reach":
        b = make_accepting_absorbing(a).with_acceptance(Acceptance.buchi(acc.states))
        v = decide_positive_simple(b, budgets)
        if v.answer == "yes":
            w = LassoWord(tuple(v.witness["prefix"]), tuple(v.witness["period"]))
            return _verified_yes(a, w, False, {"class": v.witness.get("class", [])})
        return v
    supports = reachable_supports(a, support_mask(a.initial), budgets.subset)
    monoid = build_profile_monoid(a, None, budgets.monoid)
    for prof, rho2 in monoid.items():
        for comp, mn in class_minima(prof, a.full_mask):
            if mn % 2:
                continue
            for s, rho1 in supports.items():
                if comp & ~s == 0:
                    return _verified_yes(
                        a, _lasso(a, rho1, rho2), False, {"class": list(a.names(comp))}
                    )
    return Verdict("no", reason="no profile component accepts from a reachable support")


def _safe_subset_walk(a: Automaton, start: int, fmask: int, budget: int):
    """Lasso through supports that stay inside F, or None.

    Nodes are supports contained in F; an edge exists only when the letter
    image stays inside F.  A lasso exists iff some node keeps an outgoing
    edge after sink-stripping, and the walk then never leaves such nodes.
    """
    nodes: dict[int, tuple[int, ...]] = {start: ()}
    queue: deque[int] = deque([start])
    succ: dict[int, list[tuple[int, int]]] = {}
    while queue:
        s = queue.popleft()
        w = nodes[s]
        succ[s] = []
        for k in range(len(a.alphabet)):
            t = support_step(a, s, (k,))
            if t & ~fmask:
                continue
            succ[s].append((k, t))
            if t not in nodes:
                if len(nodes) >= budget:
                    raise BudgetExceededError(f"subset construction exceeded {budget} supports")
                nodes[t] = w + (k,)
                queue.append(t)
    alive = set(nodes)
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            if not any(t in alive for _, t in succ[s]):
                alive.discard(s)
                changed = True
    if start not in alive:
        return None
    cur = start
    index = {start: 0}
    letters: list[int] = []
    while True:
        k, t = next((k, t) for k, t in succ[cur] if t in alive)
        letters.append(k)
        cur = t
        if cur in index:
            i = index[cur]
            return tuple(letters[:i]), tuple(letters[i:])
        index[cur] = len(letters)


def decide_safety(a: Automaton, problem: str, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """Safety decisions; the limit and almost variants coincide here.

    Almost: the initial support must sit inside F and some support cycle of
    F-contained supports must be reachable through F-contained images.
    Positive: a fixed set C inside F must be closed under some word whose
    whole positive tree stays in F, with C touched by an F-only path from
    the initial support.
    """
    acc = a.acceptance
    if acc is None or acc.kind != "safety":
        raise InputError("decide_safety needs a safety acceptance condition")
    if problem not in PROBLEMS:
        raise InputError(f"unknown problem {problem!r}")
    fmask = a.acceptance_mask()
    alpha = support_mask(a.initial)
    if problem in ("almost", "limit"):
        if alpha & ~fmask:
            return Verdict("no", reason="the initial support already leaves the safe set")
        found = _safe_subset_walk(a, alpha, fmask, budgets.subset)
        if found is None:
            return Verdict("no", reason="every word eventually pushes the support out of the safe set")
        rho1, rho2 = found
        return _verified_yes(a, _lasso(a, rho1, rho2), True, {})
    a0 = alpha & fmask
    if not a0:
        return Verdict("no", reason="the initial support misses the safe set")
    monoid = build_safe_monoid(a, fmask, budgets.monoid)
    r1_options = [(safe_identity(a, fmask), ())]
    r1_options.extend((e, w) for e, w in monoid.items())
    for (rows2, full2), rho2 in monoid.items():
        c = full2
        while True:
            nxt = 0
            for i in bits(c):
                if rows2[i] & ~c == 0:
                    nxt |= 1 << i
            if nxt == c:
                break
            c = nxt
        if not c:
            continue
        for (rows1, _), rho1 in r1_options:
            img = 0
            for i in bits(a0):
                img |= rows1[i]
            if img & c:
                return _verified_yes(
                    a, _lasso(a, rho1, rho2), False, {"class": list(a.names(c))}
                )
    return Verdict("no", reason="no safe set is closed under any word with a fully safe tree")


def decide(a: Automaton, problem: str, mode: str, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """Dispatch a decision query to the procedure that is actually decidable.

    simple and lasso modes share the simple procedures; general mode answers
    only the decidable corners and reports the rest as undecidable; the
    struct-simple mode first proves the automaton structurally simple and may
    then answer limit questions through the support-graph procedures.
    """
    if problem not in PROBLEMS:
        raise InputError(f"unknown problem {problem!r}")
    if mode not in MODES:
        raise InputError(f"unknown mode {mode!r}")
    acc = a.acceptance
    if acc is None:
        raise InputError("acceptance condition required")
    kind = acc.kind
    if mode in ("simple", "lasso"):
        if problem == "almost":
            return decide_almost_simple(a, budgets)
        if problem == "positive":
            return decide_positive_simple(a, budgets)
        if kind == "safety":
            return decide_safety(a, "limit", budgets)
        return Verdict(
            "undecidable_in_general",
            reason=f"the simple limit problem is undecidable for {kind} acceptance",
        )
    if mode == "general":
        if kind == "safety":
            return decide_safety(a, problem, budgets)
        if problem == "almost" and kind in ("reach", "buchi"):
            return decide_almost_simple(a, budgets)
        if problem == "positive" and kind in ("reach", "cobuchi"):
            return decide_positive_simple(a, budgets)
        return Verdict(
            "undecidable_in_general",
            reason=f"the {problem} problem is undecidable for {kind} acceptance on general automata",
        )
    verdict = _structural_gate(a, budgets)
    if verdict.answer != "yes":
        raise InputError("struct-simple mode needs a structurally simple automaton")
    if problem == "almost":
        return decide_almost_simple(a, budgets)
    if problem == "positive":
        return decide_positive_simple(a, budgets)
    if kind == "safety":
        return decide_safety(a, "limit", budgets)
    from .supportgraph import decide_limit_parity_structsimple, decide_limit_reach_structsimple

    if kind == "reach":
        return decide_limit_reach_structsimple(a, budgets)
    return decide_limit_parity_structsimple(a, budgets)


def _structural_gate(a: Automaton, budgets: Budgets) -> Verdict:
    from .classify import is_structurally_simple

    return is_structurally_simple(a, budgets)
