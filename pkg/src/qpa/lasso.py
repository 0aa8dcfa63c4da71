"""Exact analysis of lasso words.

After its prefix, a lasso word rho1 . rho2^omega drives the automaton as a
time-homogeneous Markov chain on pairs (state, position inside the period).
This module computes that chain exactly, derives acceptance probabilities,
builds an eventually-periodic jet decomposition with a certified positive
floor on jet-state masses, and offers seeded Monte Carlo simulation as an
independent cross-check.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm, log, sqrt
from typing import Sequence

from .core import Acceptance, Automaton, LassoWord, Matrix, bits, support_mask
from .errors import BudgetExceededError, InputError
from .graphs import bottom_scc_masks
from .profiles import class_minima, profile_of_word
from .semantics import (
    ChainAnalysis,
    chain_analysis,
    identity_matrix,
    make_accepting_absorbing,
    mat_mul,
    propagate_vector,
    solve_linear,
    support_step,
    vec_mat,
)


@dataclass
class LassoChain:
    """The periodic chain induced by a lasso word, homogenized over one period.

    product_states lists the reachable (state, phase) pairs after the prefix;
    phase p means the next letter read is period[p].  analysis describes the
    m-step chain on the phase-0 support closure.
    """

    automaton: Automaton
    word: LassoWord
    m: int
    prefix_vector: tuple[Fraction, ...]
    product_states: tuple[tuple[str, int], ...]
    step_matrices: tuple[Matrix, ...]
    analysis: ChainAnalysis


@dataclass(frozen=True)
class SupportSequence:
    """Eventually periodic sequence of supports: head entries, then a cycle."""

    head: tuple[int, ...]
    cycle: tuple[int, ...]

    def at(self, n: int) -> int:
        if n < 0:
            raise InputError("step index must be nonnegative")
        if n < len(self.head):
            return self.head[n]
        return self.cycle[(n - len(self.head)) % len(self.cycle)]


@dataclass
class JetDecomposition:
    """Per recurrent class, the periodic support its absorbed mass occupies.

    For every step n the masks (j0.at(n), jets[0].at(n), ...) partition Q.
    From stabilization_index on, each jet is forward-closed under the word
    and every jet state carries exact probability at least lambda_bound.
    """

    automaton: Automaton
    word: LassoWord
    chain: LassoChain
    jets: tuple[SupportSequence, ...]
    j0: SupportSequence
    stabilization_index: int
    lambda_bound: Fraction

    def jet_at(self, i: int, n: int) -> int:
        """Support mask of jet i at step n; i = 0 addresses the complement."""
        if i == 0:
            return self.j0.at(n)
        if not 1 <= i <= len(self.jets):
            raise InputError(f"jet index {i} out of range")
        return self.jets[i - 1].at(n)

    def distribution(self, n: int) -> tuple[Fraction, ...]:
        """Exact state distribution after the first n letters of the word."""
        a = self.automaton
        prefix = a.word(self.word.prefix)
        period = a.word(self.word.period)
        if n <= len(prefix):
            return propagate_vector(a, a.initial, prefix[:n])
        vec = propagate_vector(a, a.initial, prefix)
        for t in range(n - len(prefix)):
            vec = vec_mat(vec, a.matrices[period[t % len(period)]])
        return vec

    def j0_mass(self, n: int) -> Fraction:
        vec = self.distribution(n)
        return sum((vec[i] for i in bits(self.j0.at(n))), Fraction(0))

    def horizon(self, eps: Fraction, max_steps: int = 1_000_000) -> int:
        """First step N, N+m, ... where the mass outside all jets drops below eps.

        The mass outside the jets never increases once the jets are seeded,
        so the returned step bounds every later aligned step as well.
        """
        eps = Fraction(eps)
        if eps <= 0:
            raise InputError("eps must be positive")
        a = self.automaton
        period = a.word(self.word.period)
        m = len(period)
        prefix_len = len(a.word(self.word.prefix))
        n = self.stabilization_index
        vec = self.distribution(n)
        steps = 0
        while True:
            mass = sum((vec[i] for i in bits(self.j0.at(n))), Fraction(0))
            if mass < eps:
                return n
            for t in range(m):
                vec = vec_mat(vec, a.matrices[period[(n - prefix_len + t) % m]])
            n += m
            steps += m
            if steps > max_steps:
                raise BudgetExceededError(f"no horizon below {eps} within {max_steps} steps")


def _closure(a: Automaton, start: int, period: Sequence[int]) -> int:
    g = start
    while True:
        nxt = g | support_step(a, g, period)
        if nxt == g:
            return g
        g = nxt


def build_lasso_chain(a: Automaton, w: LassoWord) -> LassoChain:
    """Exact prefix distribution plus the homogenized chain of the period."""
    prefix = a.word(w.prefix)
    period = a.word(w.period)
    m = len(period)
    vec0 = propagate_vector(a, a.initial, prefix)
    g = _closure(a, support_mask(vec0), period)
    analysis = chain_analysis(a, g, period)
    sups, _, _ = _support_run(a, support_mask(vec0), period)
    per_phase = [0] * m
    for t, s in enumerate(sups):
        per_phase[t % m] |= s
    product_states = tuple(
        (a.states[q], phase) for phase in range(m) for q in bits(per_phase[phase])
    )
    step_matrices = tuple(a.matrices[k] for k in period)
    return LassoChain(a, w, m, vec0, product_states, step_matrices, analysis)


def _class_acceptance(a: Automaton, period: Sequence[int], g: int) -> dict[int, bool]:
    """Per recurrent class of (g, period): is the minimal priority seen even?

    Within a recurrent class every positive path between class states recurs
    infinitely often almost surely, so the class minimum over the period's
    min-priority profile is the priority realized by almost every run.
    """
    prof = profile_of_word(a, None, period)
    return {comp: mn % 2 == 0 for comp, mn in class_minima(prof, g)}


def lasso_acceptance_probability(a: Automaton, w: LassoWord) -> Fraction:
    """Exact probability that a run under the lasso word is accepting."""
    acc = a.acceptance
    if acc is None:
        raise InputError("acceptance condition required")
    if acc.kind == "reach":
        b = make_accepting_absorbing(a).with_acceptance(Acceptance.buchi(acc.states))
        return lasso_acceptance_probability(b, w)
    if acc.kind == "safety":
        return _safety_probability(a, w)
    chain = build_lasso_chain(a, w)
    ok = _class_acceptance(a, a.word(w.period), chain.analysis.closed_set)
    masses = chain.analysis.class_mass(chain.prefix_vector)
    total = Fraction(0)
    for comp, mass in zip(chain.analysis.classes, masses):
        if ok[comp]:
            total += mass
    return total


def _restricted(mat: Matrix, fmask: int, n: int) -> Matrix:
    zero = Fraction(0)
    return tuple(
        tuple(mat[i][j] if fmask >> j & 1 else zero for j in range(n))
        if fmask >> i & 1
        else (zero,) * n
        for i in range(n)
    )


def _safety_probability(a: Automaton, w: LassoWord) -> Fraction:
    """Mass of runs that never leave F, the initial state included.

    Killing all transitions that touch the complement of F makes the word
    matrices substochastic; the surviving mass in the limit is the mass
    absorbed by recurrent classes of the period matrix that keep row sum 1.
    """
    fmask = a.acceptance_mask()
    n = a.n
    restricted = [_restricted(mat, fmask, n) for mat in a.matrices]
    vec = tuple(a.initial[i] if fmask >> i & 1 else Fraction(0) for i in range(n))
    for k in a.word(w.prefix):
        vec = vec_mat(vec, restricted[k])
    r = identity_matrix(n)
    for k in a.word(w.period):
        r = mat_mul(r, restricted[k])
    rows = tuple(
        sum(1 << j for j in range(n) if r[i][j] > 0) if fmask >> i & 1 else 0
        for i in range(n)
    )
    safe = 0
    for comp in bottom_scc_masks(rows, fmask):
        if all(sum(r[i]) == 1 for i in bits(comp)):
            safe |= comp
    survival = {i: Fraction(1) for i in bits(safe)}
    transient = fmask & ~safe
    if transient and safe:
        tlist = list(bits(transient))
        lhs = [
            [
                (Fraction(1) if s == t else Fraction(0)) - r[q][tlist[t]]
                for t in range(len(tlist))
            ]
            for s, q in enumerate(tlist)
        ]
        rhs = [[sum((r[q][j] for j in bits(safe)), Fraction(0))] for q in tlist]
        sol = solve_linear(lhs, rhs)
        for s, q in enumerate(tlist):
            survival[q] = sol[s][0]
    return sum((vec[i] * survival.get(i, Fraction(0)) for i in bits(fmask)), Fraction(0))


# -- jet decomposition -------------------------------------------------------


def _dense_pow(mat: list[list[Fraction]], e: int) -> list[list[Fraction]]:
    size = len(mat)
    out = [[Fraction(1) if i == j else Fraction(0) for j in range(size)] for i in range(size)]
    base = [row[:] for row in mat]
    while e:
        if e & 1:
            out = _dense_mul(out, base)
        e >>= 1
        if e:
            base = _dense_mul(base, base)
    return out


def _dense_mul(x: list[list[Fraction]], y: list[list[Fraction]]) -> list[list[Fraction]]:
    size = len(x)
    yt = list(zip(*y))
    return [
        [sum(xi[k] * yj[k] for k in range(size)) for yj in yt] for xi in x
    ]


def _min_positive(mat: list[list[Fraction]]) -> Fraction | None:
    best: Fraction | None = None
    for row in mat:
        for v in row:
            if v > 0 and (best is None or v < best):
                best = v
    return best


@dataclass
class _ClassInfo:
    mask: int
    slice0: int
    states: list[int]
    d: int
    kstar: int
    eps: Fraction
    blocks: list[int]
    cyc: dict[int, int]
    actives: list[int]
    t_full: int


def _product_rows(a: Automaton, period: Sequence[int]) -> list[int]:
    n = a.n
    m = len(period)
    rows = [0] * (n * m)
    for phase in range(m):
        rel = a.relation(period[phase])
        shift = ((phase + 1) % m) * n
        for q in range(n):
            rows[phase * n + q] = rel[q] << shift
    return rows


def _support_run(a: Automaton, start: int, period: Sequence[int]):
    """Stepwise supports after the prefix until (phase, support) repeats."""
    m = len(period)
    sups: list[int] = []
    seen: dict[tuple[int, int], int] = {}
    cur = start
    t = 0
    while (t % m, cur) not in seen:
        seen[(t % m, cur)] = t
        sups.append(cur)
        cur = support_step(a, cur, (period[t % m],))
        t += 1
    t_start = seen[(t % m, cur)]
    return sups, t_start, t - t_start


def _analyze_class(
    a: Automaton,
    period: Sequence[int],
    prod_rows: Sequence[int],
    cmask: int,
    sups: list[int],
    t_start: int,
    p_sup: int,
) -> _ClassInfo:
    n = a.n
    m = len(period)
    states = list(bits(cmask))
    pos = {x: i for i, x in enumerate(states)}
    # BFS levels; the class period is the gcd of level defects over its edges
    level = {states[0]: 0}
    queue = [states[0]]
    while queue:
        u = queue.pop(0)
        for v in bits(prod_rows[u] & cmask):
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    d = 0
    for u in states:
        for v in bits(prod_rows[u] & cmask):
            d = gcd(d, abs(level[u] + 1 - level[v]))
    cyc = {x: level[x] % d for x in states}
    blocks = [0] * d
    for x in states:
        blocks[cyc[x]] |= 1 << pos[x]
    # exact one-step matrix inside the class
    dense = [[Fraction(0)] * len(states) for _ in states]
    for x in states:
        phase, q = divmod(x, n)
        row = a.matrices[period[phase]][q]
        shift = ((phase + 1) % m) * n
        for qq in range(n):
            if row[qq] > 0:
                dense[pos[x]][pos[shift + qq]] = row[qq]
    td = _dense_pow(dense, d)
    # smallest power of the d-step matrix that is positive on every block
    rel_td = [sum(1 << j for j in range(len(states)) if td[i][j] > 0) for i in range(len(states))]
    power = list(rel_td)
    kstar = 1
    cap = max((bin(b).count("1") - 1) ** 2 + 2 for b in blocks)
    while any(power[i] != blocks[cyc[states[i]]] for i in range(len(states))):
        power = [
            _or_rows(power[i], rel_td) for i in range(len(states))
        ]
        kstar += 1
        if kstar > cap:
            raise RuntimeError("cyclic block power failed to stabilize")
    stabilized = _dense_pow(td, kstar)
    eps = _min_positive(stabilized)
    walk = stabilized
    for _ in range(d - 1):
        walk = _dense_mul(walk, dense)
        step_min = _min_positive(walk)
        if step_min is not None and step_min < eps:
            eps = step_min
    # alignments that ever receive absorbed mass all appear within one
    # common period of the support sequence and the class rotation
    horizon = t_start + lcm(p_sup, d)
    first_seen: dict[int, int] = {}
    for t in range(horizon + 1):
        sup = sups[t] if t < len(sups) else sups[t_start + (t - t_start) % p_sup]
        inter = (sup << ((t % m) * n)) & cmask
        for x in bits(inter):
            first_seen.setdefault((cyc[x] - t) % d, t)
    actives = sorted(first_seen)
    t_full = max(first_seen.values())
    return _ClassInfo(cmask, _slice0(cmask, n), states, d, kstar, eps, blocks, cyc, actives, t_full)


def _or_rows(mask: int, rows: Sequence[int]) -> int:
    out = 0
    for j in bits(mask):
        out |= rows[j]
    return out


def _slice0(cmask: int, n: int) -> int:
    return cmask & ((1 << n) - 1)


def _project(block: int, states: list[int], n: int) -> int:
    out = 0
    for i in bits(block):
        out |= 1 << (states[i] % n)
    return out


def lasso_jet_decomposition(a: Automaton, w: LassoWord) -> JetDecomposition:
    """Jets, their stabilization step, and a certified floor on jet masses.

    Each recurrent class of the product chain contributes one jet: the
    rotation of those cyclic blocks that absorbed mass occupies.  The floor
    multiplies the absorbed seed mass per rotation offset by the least
    positive entry of a stabilized power of the class matrix; minimums of
    the column minima of stochastic powers never decrease with the exponent,
    so the bound holds for every step past the stabilization index.
    """
    chain = build_lasso_chain(a, w)
    prefix = a.word(w.prefix)
    period = a.word(w.period)
    n = a.n
    m = len(period)
    sups, t_start, p_sup = _support_run(a, support_mask(chain.prefix_vector), period)
    reach = 0
    for t, s in enumerate(sups):
        reach |= s << ((t % m) * n)
    prod_rows = _product_rows(a, period)
    infos = [
        _analyze_class(a, period, prod_rows, cmask, sups, t_start, p_sup)
        for cmask in bottom_scc_masks(tuple(prod_rows), reach)
    ]
    t0 = max(info.t_full for info in infos)
    n_t = t0 + max(info.d * info.kstar for info in infos)
    n_t += (-n_t) % m
    big_n = len(prefix) + n_t
    vec = chain.prefix_vector
    for t in range(t0):
        vec = vec_mat(vec, a.matrices[period[t % m]])
    lam: Fraction | None = None
    for info in infos:
        for alignment in info.actives:
            block = info.blocks[(alignment + t0) % info.d]
            mass = sum(
                (vec[info.states[i] % n] for i in bits(block)), Fraction(0)
            )
            cand = mass * info.eps
            if lam is None or cand < lam:
                lam = cand
    jets_by_slice: dict[int, SupportSequence] = {}
    for info in infos:
        cyc = []
        for j in range(info.d):
            mask = 0
            for alignment in info.actives:
                mask |= _project(info.blocks[(alignment + n_t + j) % info.d], info.states, n)
            cyc.append(mask)
        jets_by_slice[info.slice0] = SupportSequence((0,) * big_n, tuple(cyc))
    jets = tuple(jets_by_slice[comp] for comp in chain.analysis.classes)
    full = a.full_mask
    l0 = 1
    for info in infos:
        l0 = lcm(l0, info.d)
    cyc0 = []
    for j in range(l0):
        used = 0
        for jet in jets:
            used |= jet.at(big_n + j)
        cyc0.append(full & ~used)
    j0 = SupportSequence((full,) * big_n, tuple(cyc0))
    return JetDecomposition(a, w, chain, jets, j0, big_n, lam)


# -- Monte Carlo -------------------------------------------------------------


def _cumulative(row: Sequence[Fraction]) -> list[tuple[Fraction, int]]:
    out = []
    acc = Fraction(0)
    for j, p in enumerate(row):
        if p > 0:
            acc += p
            out.append((acc, j))
    return out


def _draw(rng: random.Random, cum: list[tuple[Fraction, int]]) -> int:
    u = Fraction(rng.getrandbits(53), 1 << 53)
    for threshold, j in cum:
        if u < threshold:
            return j
    return cum[-1][1]


def simulate_runs(a: Automaton, w: LassoWord, samples: int, seed: int) -> dict[str, float]:
    """Monte Carlo acceptance estimate; deterministic for a fixed seed.

    Each run is simulated on the product chain until it enters a recurrent
    class, which settles acceptance structurally; the half width comes from
    the Hoeffding bound at confidence 95%.
    """
    if samples < 1:
        raise InputError("samples must be >= 1")
    acc = a.acceptance
    if acc is None:
        raise InputError("acceptance condition required")
    if acc.kind == "reach":
        b = make_accepting_absorbing(a).with_acceptance(Acceptance.buchi(acc.states))
        return simulate_runs(b, w, samples, seed)
    prefix = a.word(w.prefix)
    period = a.word(w.period)
    n = a.n
    m = len(period)
    vec0 = propagate_vector(a, a.initial, prefix)
    sups, t_start, p_sup = _support_run(a, support_mask(vec0), period)
    reach = 0
    g0 = 0
    for t, s in enumerate(sups):
        reach |= s << ((t % m) * n)
        if t % m == 0:
            g0 |= s
    prod_rows = _product_rows(a, period)
    classes = bottom_scc_masks(tuple(prod_rows), reach)
    class_of: dict[int, int] = {}
    for ci, cmask in enumerate(classes):
        for x in bits(cmask):
            class_of[x] = ci
    safety = acc.kind == "safety"
    if safety:
        fmask = a.acceptance_mask()
        accepts = []
        for cmask in classes:
            proj = 0
            for x in bits(cmask):
                proj |= 1 << (x % n)
            accepts.append(proj & ~fmask == 0)
    else:
        ok = _class_acceptance(a, period, g0)
        accepts = [ok[_slice0(cmask, n)] for cmask in classes]
    cum_init = _cumulative(a.initial)
    cum = [[_cumulative(mat[i]) for i in range(n)] for mat in a.matrices]
    rng = random.Random(seed)
    hits = 0
    for _ in range(samples):
        q = _draw(rng, cum_init)
        if safety and not fmask >> q & 1:
            continue
        dead = False
        for k in prefix:
            q = _draw(rng, cum[k][q])
            if safety and not fmask >> q & 1:
                dead = True
                break
        if dead:
            continue
        phase = 0
        while True:
            ci = class_of.get(phase * n + q)
            if ci is not None:
                if accepts[ci]:
                    hits += 1
                break
            q = _draw(rng, cum[period[phase]][q])
            phase = (phase + 1) % m
            if safety and not fmask >> q & 1:
                break
    return {
        "accept_fraction": hits / samples,
        "half_width_95": sqrt(log(2 / 0.05) / (2 * samples)),
    }
