"""Word search in the group generated by two maps, and the reduction that
turns an arbitrary target into a search on a small conjugated window."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

from .acmetric import Partition, variation
from .constructions import BlowUpSpec, GeneratorPair, blow_up
from .dynamics import push_sup
from .errors import BadParameter, BudgetExhausted, IterationCapExceeded, NoEscape, PushFailed
from .orbitmaps import DEFAULT_ITERATION_CAP, Atom, Compose, LazyHomeo, Power, compose_all, lazy_eval
from .plcore import UNIT, Interval, PLHomeo, as_rational, decimal_str, format_rational

LETTER_NAMES = ("F", "F^-1", "G", "G^-1")
COMPACT = "FfGg"


# -- words -------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Word:
    """Reduced word; letter ``2*i`` is generator ``i``, ``2*i + 1`` its inverse."""

    letters: Tuple[int, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.letters, self.letters[1:]):
            if a ^ 1 == b:
                raise BadParameter(f"word {self.letters} is not reduced")

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if not self.letters:
            return "e"
        if max(self.letters) < 4:
            return "".join(COMPACT[c] for c in self.letters)
        return ".".join(f"a{c // 2}" + ("^-1" if c & 1 else "") for c in self.letters)

    def inverse(self) -> "Word":
        return Word(tuple(c ^ 1 for c in reversed(self.letters)))

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse the compact form, e.g. ``"FgF"`` (lower case = inverse)."""
        if text in ("", "e"):
            return cls(())
        try:
            return cls(tuple(COMPACT.index(ch) for ch in text))
        except ValueError as exc:
            raise BadParameter(f"bad word {text!r}") from exc


def free_reduce(letters: Sequence[int]) -> Word:
    out: List[int] = []
    for c in letters:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return Word(tuple(out))


def enumerate_words(max_len: int, rank: int = 2) -> Iterator[Word]:
    """All reduced words of length <= ``max_len``, length first then lexicographic."""
    if max_len < 0:
        raise BadParameter("max_len must be >= 0")
    yield Word(())
    level = [()]
    for _ in range(max_len):
        nxt = []
        for w in level:
            for c in range(2 * rank):
                if w and w[-1] == c ^ 1:
                    continue
                nxt.append(w + (c,))
        for w in nxt:
            yield Word(w)
        level = nxt


def apply_word(word: Word, generators: Sequence[LazyHomeo], domain: Interval = None) -> LazyHomeo:
    """Expression tree for the word; the leftmost letter is applied last."""
    gens = [g if isinstance(g, LazyHomeo) else Atom(g) for g in generators]
    domain = domain or gens[0].domain
    maps = [gens[c // 2] if not c & 1 else gens[c // 2].inverse() for c in word.letters]
    return compose_all(maps, domain)


# -- search reports ------------------------------------------------------------

@dataclass(frozen=True)
class SearchReport:
    best_word: Word
    lower: Fraction
    uniform: Fraction
    trace: Tuple[Fraction, ...]  # best distance among words of length <= L
    evaluations: int
    skipped: int = 0

    def to_json(self) -> dict:
        return {
            "best_word": str(self.best_word),
            "lower": format_rational(self.lower),
            "lower_decimal": decimal_str(self.lower),
            "uniform": format_rational(self.uniform),
            "uniform_decimal": decimal_str(self.uniform),
            "trace": [format_rational(t) for t in self.trace],
            "evaluations": self.evaluations,
            "skipped": self.skipped,
        }

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["length", "best_distance_decimal"])
        for length, d in enumerate(self.trace):
            w.writerow([length, decimal_str(d)])
        return buf.getvalue()


def _letter_maps(generators, cap):
    out = []
    for g in generators:
        if isinstance(g, LazyHomeo):
            inv = g.inverse()
            out.append(lambda x, g=g: lazy_eval(g, x, cap))
            out.append(lambda x, g=inv: lazy_eval(g, x, cap))
        else:
            out.append(g.eval)
            out.append(g.inverse().eval)
    return out


def _search_branch(generators, target_vals, points, max_len, last_letter, cap):
    """Best word among those whose innermost (first applied) letter is fixed.

    Values are built outward: the values of ``c·w`` come from those of ``w``.
    Returns per-length bests as ``(distance, letters)`` plus counters.
    """
    letters = _letter_maps(generators, cap)
    rank = len(generators)
    per_length: Dict[int, Tuple[Fraction, Tuple[int, ...]]] = {}
    evaluations = skipped = 0
    level = {(last_letter,): None}
    try:
        vals = [letters[last_letter](t) for t in points]
    except IterationCapExceeded:
        vals = None
    level[(last_letter,)] = vals
    for length in range(1, max_len + 1):
        if length > 1:
            nxt = {}
            for w, wv in level.items():
                for c in range(2 * rank):
                    if c ^ 1 == w[0]:
                        continue
                    if wv is None:
                        nxt[(c,) + w] = None
                        continue
                    try:
                        nxt[(c,) + w] = [letters[c](v) for v in wv]
                    except IterationCapExceeded:
                        nxt[(c,) + w] = None
            level = nxt
        for w in sorted(level):
            wv = level[w]
            if wv is None:
                skipped += 1
                continue
            evaluations += 1
            d = variation([a - b for a, b in zip(wv, target_vals)])
            best = per_length.get(length)
            if best is None or (d, w) < best:
                per_length[length] = (d, w)
    return per_length, evaluations, skipped


def best_approx(generators: Sequence, target: PLHomeo, max_len: int, partition: Partition = None,
                iteration_cap: int = DEFAULT_ITERATION_CAP, workers: int = 1) -> SearchReport:
    """Minimise the sampled ρ lower bound to ``target`` over reduced words.

    Ties are broken by length, then lexicographically, so the result does not
    depend on ``workers``.
    """
    if partition is None:
        partition = Partition.dyadic(target.domain.lo, target.domain.hi, 5)
    points = partition.points
    target_vals = [target(t) for t in points]
    rank = len(generators)
    best_d = variation([t - v for t, v in zip(points, target_vals)])
    best_w: Tuple[int, ...] = ()
    per_length = {0: (best_d, ())}
    evaluations, skipped = 1, 0

    jobs = [(generators, target_vals, points, max_len, c, iteration_cap) for c in range(2 * rank)]
    if max_len > 0:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_search_branch_star, jobs))
        else:
            results = [_search_branch(*job) for job in jobs]
        for branch, ev, sk in results:
            evaluations += ev
            skipped += sk
            for length, cand in branch.items():
                cur = per_length.get(length)
                if cur is None or cand < cur:
                    per_length[length] = cand

    trace = []
    for length in range(max_len + 1):
        cand = per_length.get(length)
        if cand is not None and (cand[0], len(cand[1]), cand[1]) < (best_d, len(best_w), best_w):
            best_d, best_w = cand
        trace.append(best_d)

    best = Word(best_w)
    maps = _letter_maps(generators, iteration_cap)
    vals = list(points)
    for c in reversed(best.letters):
        vals = [maps[c](v) for v in vals]
    uniform = max(abs(a - b) for a, b in zip(vals, target_vals))
    return SearchReport(best, best_d, uniform, tuple(trace), evaluations, skipped)


def _search_branch_star(job):
    return _search_branch(*job)


# -- proof-guided reduction --------------------------------------------------

@dataclass(frozen=True)
class ProofGuidedReport:
    """Outcome of the reduction; certified terms are exact rationals.

    ``blowup_bound`` bounds ρ(target, ψ); ``outer_budget`` = 2(a + 1 - b)
    bounds ρ on [0, a] and [b, 1]; ``middle`` is the sampled search estimate
    on [a, b] (not certified).
    """

    epsilon: Fraction
    gamma: Fraction
    a: Fraction
    b: Fraction
    anchor: Fraction  # h(x_{n+1}); Φ fixes it, so it equals ``a``
    n: int
    m: int
    push_word: Tuple[Tuple[int, int], ...]
    blowup_bound: Fraction
    outer_budget: Fraction
    middle: Fraction
    inner: SearchReport
    shortfall: bool

    @property
    def best_word(self) -> Word:
        return self.inner.best_word

    @property
    def outer_certified(self) -> bool:
        return self.outer_budget < self.epsilon / 3 and self.blowup_bound < self.epsilon / 3

    def to_json(self) -> dict:
        q = format_rational
        return {
            "epsilon": q(self.epsilon),
            "gamma": q(self.gamma),
            "a": q(self.a),
            "b": q(self.b),
            "anchor": q(self.anchor),
            "n": self.n,
            "m": self.m,
            "push_word": [list(step) for step in self.push_word],
            "blowup_bound": q(self.blowup_bound),
            "outer_budget": q(self.outer_budget),
            "outer_certified": self.outer_certified,
            "middle_estimate": q(self.middle),
            "middle_estimate_decimal": decimal_str(self.middle),
            "shortfall": self.shortfall,
            "inner": self.inner.to_json(),
        }


def _edge_blowup_bound(target: PLHomeo, gamma: Fraction) -> Fraction:
    # sup over a < gamma, 1 - b < gamma of the blow-up bound for sites [0,a], [b,1]
    return 2 * max(gamma, target(gamma)) + 2 * max(gamma, 1 - target(1 - gamma))


def choose_gamma(target: PLHomeo, epsilon: Fraction, max_halvings: int = 64) -> Fraction:
    gamma = min(Fraction(1, 2), epsilon / 12) / 2
    for _ in range(max_halvings):
        if _edge_blowup_bound(target, gamma) < epsilon / 3:
            return gamma
        gamma /= 2
    raise BadParameter("could not find gamma; target too steep at the endpoints")


def proof_guided_approx(pair: GeneratorPair, target: PLHomeo, epsilon, max_len: int = 4,
                        cells: int = 16, push_budget: int = 2000, escape_cap: int = 1 << 10,
                        iteration_cap: int = DEFAULT_ITERATION_CAP) -> ProofGuidedReport:
    """Run the density reduction for ``target`` with the pair's generators.

    1. pick γ so the edge blow-up ψ of ``target`` is within ε/3;
    2. push ``y0`` above ``1 - γ`` with a word ``h`` in f~, g~;
    3. find ``n`` with ``h(x_{n+1}) < γ``;
    4. find ``m`` with ``f~^m(g~(x0)) > y0``;
    5. search words in the ``Φ``-conjugated generators on ``[a, b]``.
    """
    epsilon = as_rational(epsilon)
    if epsilon <= 0:
        raise BadParameter("epsilon must be positive")
    zero = Fraction(0)
    if target.is_identity():
        empty = SearchReport(Word(()), zero, zero, (zero,) * (max_len + 1), 1)
        return ProofGuidedReport(epsilon, zero, zero, Fraction(1), zero, 0, 0, (), zero, zero, zero,
                                 empty, False)

    gamma = choose_gamma(target, epsilon)
    F, G = pair.f_tilde, Atom(pair.g_tilde)
    gens = (F, G)

    # step 2
    try:
        pushed = push_sup(gens, pair.y0, 1 - gamma, push_budget)
    except BudgetExhausted as exc:
        raise PushFailed(f"could not push y0 above 1 - gamma: {exc}") from exc
    steps = [gens[i] if e > 0 else gens[i].inverse() for i, e in pushed.word]
    h = compose_all(steps[::-1], UNIT)

    # step 3
    n = 0
    xs = pair.xs()
    next(xs)
    x_n, x_n1 = pair.x0, next(xs)
    while lazy_eval(h, x_n1, iteration_cap) >= gamma:
        n += 1
        if n > escape_cap:
            raise NoEscape(f"no n <= {escape_cap} with h(x_(n+1)) < gamma")
        x_n, x_n1 = x_n1, next(xs)

    # step 4: direction of ascent for f~ on (x0, y0]
    start = pair.g_tilde(pair.x0)
    up = F if lazy_eval(F, start, iteration_cap) > start else F.inverse()
    m, z = 0, start
    while z <= pair.y0:
        z = lazy_eval(up, z, iteration_cap)
        m += 1
        if m > escape_cap:
            raise NoEscape(f"no m <= {escape_cap} with f~^m(g~(x0)) > y0")
    m = m if up is F else -m

    # step 5
    K = compose_all([h, Power(G, -(n + 1)), Power(F, m), Power(G, n + 1)], UNIT)
    Phi = Compose(K, h.inverse())
    anchor = lazy_eval(h, x_n1, iteration_cap)
    a = lazy_eval(Phi, anchor, iteration_cap)
    b = lazy_eval(Phi, lazy_eval(h, x_n, iteration_cap), iteration_cap)
    if not (a < gamma and 1 - gamma < b):
        raise NoEscape(f"window [{a}, {b}] does not reach the gamma margins")

    psi, _ = blow_up(BlowUpSpec(target, ((0, 0, a), (b, 1, 1))))
    blowup_bound = _edge_blowup_bound(target, gamma)
    outer = 2 * (a + (1 - b))

    inner_gens = []
    for i in range(pair.spec.N):
        conj = compose_all([K, Power(G, i), F, Power(G, -i), K.inverse()], UNIT)
        inner_gens.append(conj)
    window = Partition.uniform(a, b, cells)
    inner = best_approx(inner_gens, psi, max_len, window, iteration_cap)
    middle = inner.lower
    return ProofGuidedReport(epsilon, gamma, a, b, anchor, n, m, pushed.word, blowup_bound, outer,
                             middle, inner, middle > epsilon / 3)
