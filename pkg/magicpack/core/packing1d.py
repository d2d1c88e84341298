"""
One-dimensional packings for MagicPack

A packing of unit intervals on the half-line is a word of consecutive centre
distances drawn from a finite distance set K. Cutting the word into blocks of
N = ⌈sup K⌉ letters turns admissible packings into walks on the domino graph,
whose best cycle ratio is the optimal density. This module builds that graph,
solves the ratio problem exactly, and carries the closed form for three
distances, the greedy baseline, the reduction of sets with accumulation points
to finite ones, and the Fejér family showing the kissing bound is sharp.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import sympy

from ..config import get_global_config
from ..exceptions import (
    AccumulationError, AcyclicGraphError, DeadEndError, GraphSizeError, ValidationError
)
from ..types import Word

logger = logging.getLogger(__name__)


# Distance sets and words

@dataclass(frozen=True)
class DistanceSet:
    """
    A finite set K ⊂ [1, ∞) of admissible centre distances, sorted increasingly.

    Attributes:
        values: Distinct rationals ≥ 1 in increasing order
    """
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.values:
            raise ValidationError("Distance set is empty", field="K", value=[])
        for a, b in zip(self.values, self.values[1:]):
            if a >= b:
                raise ValidationError("Distances must be strictly increasing", field="K", value=str(b))
        if self.values[0] < 1:
            raise ValidationError("Distances must be >= 1", field="K", value=str(self.values[0]))

    @classmethod
    def of(cls, values: Iterable, require_unit: bool = True) -> "DistanceSet":
        """
        Build from any iterable of rationals (duplicates dropped).

        Raises:
            ValidationError: If a value is below 1, or 1 is missing and require_unit is set
        """
        result = cls(tuple(sorted({Fraction(v) for v in values})))
        if require_unit and result.values[0] != 1:
            raise ValidationError("Distance set must contain 1", field="K",
                                  value=[str(v) for v in result.values])
        return result

    @property
    def sup(self) -> Fraction:
        return self.values[-1]

    @property
    def block_length(self) -> int:
        """Letters per domino block: ⌈sup K / min K⌉."""
        return math.ceil(self.sup / self.values[0])

    def admits(self, distance: Fraction) -> bool:
        """distance ∈ K ∪ (sup K, ∞)."""
        return distance > self.sup or distance in self.values

    def scaled(self, factor) -> "DistanceSet":
        factor = Fraction(factor)
        if factor < 1:
            raise ValidationError("Scale factor must be >= 1", field="factor", value=str(factor))
        return DistanceSet(tuple(v * factor for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __str__(self) -> str:
        return ",".join(render_letter(v) for v in self.values)


def parse_distance_set(text: str) -> DistanceSet:
    """
    Parse "1,3/2,5/2" into a DistanceSet.

    Raises:
        ValidationError: On malformed entries or a set without 1
    """
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ValidationError("No distances given", field="K", value=text)
    try:
        values = [Fraction(item) for item in items]
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"Distances must be exact rationals: {text!r}", field="K", value=text)
    return DistanceSet.of(values)


def render_letter(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def render_word(word: Sequence[Fraction]) -> str:
    return " ".join(render_letter(x) for x in word)


def word_norm(word: Sequence[Fraction]) -> Fraction:
    """|w|, the sum of the letters."""
    return sum(word, Fraction(0))


def extends_admissibly(prefix: Sequence[Fraction], letter: Fraction, K: DistanceSet) -> bool:
    """Whether every subword of prefix+letter ending at the new letter has admissible norm."""
    total = letter
    if not K.admits(total):
        return False
    for x in reversed(prefix):
        if total > K.sup:
            return True
        total += x
        if not K.admits(total):
            return False
    return True


def is_admissible(word: Sequence[Fraction], K: DistanceSet, periods: int = 1) -> bool:
    """
    Check that `periods` repetitions of the word form a K-admissible packing:
    every contiguous subword has norm in K ∪ (sup K, ∞).
    """
    if not word:
        return False
    repeats = max(periods, -(-(K.block_length + 1) // len(word)) + 1)
    letters = list(word) * repeats
    for i in range(1, len(letters) + 1):
        if not extends_admissibly(letters[:i - 1], letters[i - 1], K):
            return False
    return True


def primitive_period(word: Sequence[Fraction]) -> Word:
    """Shortest cyclic period of the word, rotated to its lexicographically least form."""
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and all(word[i] == word[i % p] for i in range(n)):
            block = tuple(word[:p])
            return min(block[i:] + block[:i] for i in range(p))
    return tuple(word)


@dataclass(frozen=True)
class PeriodicPacking:
    """
    A periodic packing ββ... with density #β/|β|.

    Attributes:
        period_word: The repeating block β
        density: #β/|β|
    """
    period_word: Word
    density: Fraction

    @classmethod
    def from_word(cls, word: Sequence[Fraction]) -> "PeriodicPacking":
        block = primitive_period([Fraction(x) for x in word])
        return cls(block, Fraction(len(block)) / word_norm(block))

    def render(self) -> str:
        return render_word(self.period_word)

    def to_dict(self) -> Dict[str, str]:
        return {"period": self.render(), "density": render_letter(self.density),
                "decimal": f"{float(self.density):.10f}"}


# Domino graph

@dataclass
class DominoGraph:
    """
    Domino graph of a distance set.

    Vertices are internally admissible words of N letters (N = ⌈sup K⌉ for K ∋ 1);
    (w, w′) is an edge when every subword of ww′ has admissible norm. Each vertex
    carries its norm, which is the length it adds to a packing.
    """
    K: DistanceSet
    graph: nx.DiGraph = field(repr=False)

    @property
    def block_length(self) -> int:
        return self.K.block_length

    @property
    def vertex_count(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def edge_count(self) -> int:
        return self.graph.number_of_edges()

    def norm(self, vertex: Word) -> Fraction:
        return self.graph.nodes[vertex]["norm"]

    def cycle_density(self, cycle: Sequence[Word]) -> Fraction:
        """#/|·| of the concatenated cycle."""
        return Fraction(self.block_length * len(cycle)) / sum(self.norm(v) for v in cycle)

    def cycle_word(self, cycle: Sequence[Word]) -> Word:
        return tuple(x for vertex in cycle for x in vertex)


def _admissible_words(K: DistanceSet, length: int, prefix: Tuple[Fraction, ...] = ()) -> Iterable[Word]:
    """Words of the given length extending prefix with every subword admissible, in lexicographic order."""
    stack = [prefix]
    while stack:
        current = stack.pop()
        if len(current) == len(prefix) + length:
            yield current[len(prefix):]
            continue
        for letter in reversed(K.values):
            if extends_admissibly(current, letter, K):
                stack.append(current + (letter,))


def build_domino_graph(K: DistanceSet, max_vertices: Optional[int] = None) -> DominoGraph:
    """
    Build the domino graph of K by extending admissible prefixes.

    Args:
        K: Distance set
        max_vertices: Vertex cap (packing.max_vertices by default)

    Returns:
        DominoGraph

    Raises:
        GraphSizeError: If the number of admissible blocks exceeds the cap
    """
    if max_vertices is None:
        max_vertices = get_global_config().get("packing.max_vertices", 20000)
    n = K.block_length
    graph = nx.DiGraph()
    for word in _admissible_words(K, n):
        graph.add_node(word, norm=word_norm(word))
        if graph.number_of_nodes() > max_vertices:
            raise GraphSizeError(graph.number_of_nodes(), max_vertices)
    for word in list(graph.nodes):
        for follower in _admissible_words(K, n, word):
            graph.add_edge(word, follower)
    logger.debug("Domino graph for K={%s}: N=%d, %d vertices, %d edges", K, n,
                 graph.number_of_nodes(), graph.number_of_edges())
    return DominoGraph(K, graph)


# Ratio cycles

def _positive_cycle(graph: nx.DiGraph, weights: Dict[Tuple, Fraction]) -> Optional[List]:
    """
    A cycle of positive total weight, or None.

    Longest-path Bellman–Ford from a virtual source joined to every vertex; a vertex
    still improving after |V| rounds leads back, through predecessors, into a
    positive cycle.
    """
    nodes = list(graph.nodes)
    dist = {v: Fraction(0) for v in nodes}
    pred: Dict = {v: None for v in nodes}
    edges = [(u, v, weights[u, v]) for u, v in graph.edges]
    updated = None
    for _ in range(len(nodes)):
        updated = None
        for u, v, w in edges:
            if dist[u] + w > dist[v]:
                dist[v] = dist[u] + w
                pred[v] = u
                updated = v
        if updated is None:
            return None

    vertex = updated
    for _ in range(len(nodes)):
        vertex = pred[vertex]
    cycle = [vertex]
    current = pred[vertex]
    while current != vertex:
        cycle.append(current)
        current = pred[current]
    cycle.reverse()
    return cycle


def _first_cycle(G: DominoGraph) -> List[Word]:
    try:
        edges = nx.find_cycle(G.graph)
    except nx.NetworkXNoCycle:
        raise AcyclicGraphError([render_letter(x) for x in G.K.values])
    return [u for u, _ in edges]


def max_density_cycle(G: DominoGraph) -> PeriodicPacking:
    """
    Densest periodic packing through a cycle of maximal ratio #/|·|.

    Starting from any cycle, repeatedly reweight edges by N − ρ·|u| and replace the
    cycle by a positive one while Bellman–Ford finds it; ratios strictly increase
    over the finitely many simple cycles, so the loop ends at the optimum.

    Raises:
        AcyclicGraphError: If the graph has no cycle
    """
    n = G.block_length
    cycle = _first_cycle(G)
    ratio = G.cycle_density(cycle)
    rounds = 0
    while True:
        rounds += 1
        weights = {(u, v): n - ratio * G.norm(u) for u, v in G.graph.edges}
        better = _positive_cycle(G.graph, weights)
        if better is None:
            break
        candidate = G.cycle_density(better)
        if candidate <= ratio:
            break
        cycle, ratio = better, candidate
    packing = PeriodicPacking.from_word(G.cycle_word(cycle))
    logger.debug("Ratio search on K={%s} settled at %s after %d rounds", G.K, ratio, rounds)
    return packing


def max_density_bruteforce(G: DominoGraph) -> PeriodicPacking:
    """
    Best density over all simple cycles enumerated with networkx.

    Raises:
        AcyclicGraphError: If the graph has no cycle
    """
    best: Optional[Tuple[Fraction, List[Word]]] = None
    for cycle in nx.simple_cycles(G.graph):
        density = G.cycle_density(cycle)
        if best is None or density > best[0]:
            best = (density, cycle)
    if best is None:
        raise AcyclicGraphError([render_letter(x) for x in G.K.values])
    return PeriodicPacking.from_word(G.cycle_word(best[1]))


def optimal_packing(K: Union[DistanceSet, str], max_vertices: Optional[int] = None) -> PeriodicPacking:
    """Optimal periodic packing for K (a DistanceSet or "1,3/2,5/2")."""
    if isinstance(K, str):
        K = parse_distance_set(K)
    packing = max_density_cycle(build_domino_graph(K, max_vertices))
    if not is_admissible(packing.period_word, K, periods=3):
        raise ValidationError("Optimal cycle is not K-admissible", field="period",
                              value=packing.render())
    return packing


# Three distances

def kalbe_rows(alpha, beta) -> Union[str, int]:
    """
    Case of K = {1, α, β}: "preamble" when β ≤ 2, otherwise the row number 1..6.

    Raises:
        ValidationError: Unless 1 < α < β
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not 1 < alpha < beta:
        raise ValidationError("Need 1 < alpha < beta", field="alpha", value=str(alpha))
    if beta <= 2:
        return "preamble"
    if alpha == 2:
        return 1 if beta <= 3 else 2
    if beta <= 1 + alpha:
        return 3
    if beta <= 2 * alpha:
        return 4 if 2 * alpha <= beta + 1 else 5
    return 6


def kalbe(alpha, beta) -> PeriodicPacking:
    """Closed-form optimal periodic packing for K = {1, α, β}."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    row = kalbe_rows(alpha, beta)
    one = Fraction(1)
    words = {
        "preamble": (one,),
        1: (one,),
        2: (one, one, beta),
        3: (one, alpha),
        4: (alpha,),
        5: (one, beta),
        6: (one, beta),
    }
    return PeriodicPacking.from_word(words[row])


@dataclass(frozen=True)
class GreedyResult:
    """Leftmost-feasible prefix with its density #w/|w|."""
    word: Word
    density: Fraction

    def render(self) -> str:
        return render_word(self.word)


def greedy(K: DistanceSet, steps: int) -> GreedyResult:
    """
    Place `steps` centres, each at the smallest distance keeping the prefix admissible.

    Raises:
        ValidationError: If steps < 1
        DeadEndError: If no distance extends the prefix
    """
    if steps < 1:
        raise ValidationError("steps must be >= 1", field="steps", value=steps)
    word: List[Fraction] = []
    for _ in range(steps):
        letter = next((x for x in K.values if extends_admissibly(word, x, K)), None)
        if letter is None:
            raise DeadEndError([render_letter(x) for x in word])
        word.append(letter)
    return GreedyResult(tuple(word), Fraction(len(word)) / word_norm(word))


# Accumulation points

@dataclass(frozen=True)
class GeometricTail:
    """Distances α + c·ρ^k for k ≥ 1 accumulating at α."""
    alpha: Fraction
    c: Fraction
    rho: Fraction

    def __post_init__(self):
        if self.c <= 0 or not 0 < self.rho < 1:
            raise AccumulationError(f"Tail at {self.alpha} is not geometric with c > 0 and 0 < rho < 1",
                                    condition="iii")

    def gap(self, k: int) -> Fraction:
        return self.c * self.rho ** k

    def term(self, k: int) -> Fraction:
        return self.alpha + self.gap(k)

    def index_of(self, x: Fraction) -> Optional[int]:
        """k with term(k) = x, or None."""
        y = (x - self.alpha) / self.c
        if y <= 0 or y >= 1:
            return None
        k = 0
        while y < 1:
            y /= self.rho
            k += 1
        return k if y == 1 else None

    def last_index_at_least(self, bound: Fraction) -> int:
        """Largest k with gap(k) ≥ bound (0 when even gap(1) is smaller)."""
        k = 0
        while self.gap(k + 1) >= bound:
            k += 1
        return k


@dataclass(frozen=True)
class AccumulationDescription:
    """
    K = core ∪ ⋃_j {α_j + c_j·ρ_j^k : k ≥ 1}.

    Attributes:
        core: Finite part, containing 1, every α_j and max K
        tails: One geometric tail per accumulation point α_j
    """
    core: DistanceSet
    tails: Tuple[GeometricTail, ...] = ()

    @property
    def alphas(self) -> Tuple[Fraction, ...]:
        return tuple(t.alpha for t in self.tails)

    @property
    def beta_max(self) -> Fraction:
        return self.core.sup

    def validate(self) -> None:
        """
        Raises:
            AccumulationError: If a reduction precondition fails
        """
        alphas = self.alphas
        if len(set(alphas)) != len(alphas):
            raise AccumulationError("Two tails share an accumulation point", condition="tails")
        for a in alphas:
            if a not in self.core.values:
                raise AccumulationError(f"Accumulation point {a} is not in the core", condition="core")
        for a in alphas:
            for b in alphas:
                if a + b in alphas:
                    raise AccumulationError(f"{a} + {b} is an accumulation point", condition="i")
        if len(alphas) > 1:
            ordered = sorted(alphas)
            delta = min(y - x for x, y in zip(ordered, ordered[1:]))
            for t in self.tails:
                if t.gap(1) >= delta / 2:
                    raise AccumulationError(f"Tail at {t.alpha} starts at gap {t.gap(1)} >= {delta / 2}",
                                            condition="ii")
        if self.beta_max in alphas:
            raise AccumulationError("max K is an accumulation point", condition="iv")
        for t in self.tails:
            if t.term(1) >= self.beta_max:
                raise AccumulationError(f"Tail at {t.alpha} reaches max K", condition="iv")

    def contains(self, x: Fraction) -> bool:
        if x in self.core.values:
            return True
        return any(t.index_of(x) is not None for t in self.tails)

    def admits(self, x: Fraction) -> bool:
        return x > self.beta_max or self.contains(x)

    def next_above(self, x: Fraction, skip: Optional[GeometricTail] = None) -> Fraction:
        """Least element of K greater than x, ignoring `skip`; x must not be a right limit of the others."""
        candidates = [v for v in self.core.values if v > x]
        for t in self.tails:
            if t is skip or t.alpha >= x:
                continue
            k = t.last_index_at_least(x - t.alpha)
            if k >= 1 and t.term(k) == x:
                k -= 1
            if k >= 1:
                candidates.append(t.term(k))
        return min(candidates)

    def truncated(self, C: int) -> DistanceSet:
        values = set(self.core.values)
        for t in self.tails:
            values.update(t.term(k) for k in range(1, C + 1))
        return DistanceSet.of(values)


def _exponents(x: Fraction) -> Dict[int, int]:
    result: Dict[int, int] = {}
    for p, e in sympy.factorint(x.numerator).items():
        result[p] = result.get(p, 0) + e
    for p, e in sympy.factorint(x.denominator).items():
        result[p] = result.get(p, 0) - e
    return result


def _shared_gaps(r: GeometricTail, w: GeometricTail) -> Tuple[bool, Optional[int]]:
    """
    Solutions of c_r·ρ_r^s = c_w·ρ_w^k in s, k ≥ 1, via prime exponent vectors.

    Returns:
        (infinitely many, the unique s when there is exactly one)
    """
    vr, vw, t = _exponents(r.rho), _exponents(w.rho), _exponents(w.c / r.c)
    primes = sorted(set(vr) | set(vw) | set(t))
    A = sympy.Matrix([[vr.get(p, 0), -vw.get(p, 0)] for p in primes])
    b = sympy.Matrix([t.get(p, 0) for p in primes])
    if A.rank() == 2:
        try:
            solution, _ = A.gauss_jordan_solve(b)
        except ValueError:
            return False, None
        s, k = solution
        if s.is_integer and k.is_integer and s >= 1 and k >= 1:
            return False, int(s)
        return False, None
    # ρ_r and ρ_w are powers of a common base u: v_r = a·u, v_w = b·u
    column = [vr.get(p, 0) for p in primes]
    g = math.gcd(*column)
    u = [x // g for x in column]
    a = g
    b_coeff = next(vw.get(p, 0) // ui for p, ui in zip(primes, u) if ui)
    pivot = next(i for i, ui in enumerate(u) if ui)
    c = Fraction(t.get(primes[pivot], 0), u[pivot])
    if c.denominator != 1 or any(t.get(p, 0) != c * ui for p, ui in zip(primes, u)):
        return False, None
    return int(c) % math.gcd(a, b_coeff) == 0, None


def _max_index(desc: AccumulationDescription, x0: Fraction, r: GeometricTail) -> Optional[int]:
    """
    M(x0, r) = sup{s ≥ 1 : x0 + λ_s^r ∈ K ∪ (max K, ∞)}, None when infinite, 0 when empty.
    """
    if x0 >= desc.beta_max:
        return None
    limit_tail = next((t for t in desc.tails if t.alpha == x0), None)
    best = 0
    if limit_tail is not None:
        if limit_tail is r:
            return None
        infinite, unique = _shared_gaps(r, limit_tail)
        if infinite:
            return None
        if unique is not None:
            best = unique
    gap = desc.next_above(x0, skip=limit_tail) - x0
    for s in range(1, r.last_index_at_least(gap) + 1):
        if desc.admits(x0 + r.gap(s)):
            best = max(best, s)
    return best


def reduction_constant(desc: AccumulationDescription) -> int:
    """
    A constant C bounding every finite M(γ, α_i, r) over γ ∈ K.

    For γ = α_j + λ_k^j with k large, γ + α_i sits within half the gap above
    y = α_j + α_i, so M is bounded by the last s with λ_s^r at least that half-gap;
    smaller k are computed exactly.
    """
    C = 0
    for ti in desc.tails:
        for r in desc.tails:
            for gamma in desc.core.values:
                m = _max_index(desc, gamma + ti.alpha, r)
                if m is not None:
                    C = max(C, m)
            for tj in desc.tails:
                y = tj.alpha + ti.alpha
                if y >= desc.beta_max:
                    continue
                half_gap = (desc.next_above(y) - y) / 2
                k0 = tj.last_index_at_least(half_gap)
                for k in range(1, k0 + 1):
                    m = _max_index(desc, tj.term(k) + ti.alpha, r)
                    if m is not None:
                        C = max(C, m)
                C = max(C, r.last_index_at_least(half_gap))
    return max(C, 1)


def reduce_to_finite(desc: AccumulationDescription) -> DistanceSet:
    """
    Finite K̃ ⊆ K with the same optimal density: the core plus the first C terms of each tail.

    Raises:
        AccumulationError: If the description violates a precondition
    """
    desc.validate()
    if not desc.tails:
        return desc.core
    C = reduction_constant(desc)
    reduced = desc.truncated(C)
    logger.info("Reduced K with %d accumulation points to %d distances (C=%d)",
                len(desc.tails), len(reduced), C)
    return reduced


# Fejér family

def fejer_sharpness(lam) -> Tuple[int, Fraction]:
    """
    (N, (2+λ)/(1+2N)) with N = ⌊(λ−1)/6⌋, the Fejér kernel family in d = 1.

    Raises:
        ValidationError: If λ < 7
    """
    lam = Fraction(lam)
    if lam < 7:
        raise ValidationError("lambda must be >= 7", field="lambda", value=str(lam))
    n = math.floor((lam - 1) / 6)
    return n, (2 + lam) / (1 + 2 * n)


def fejer_kissing_bound(lam):
    """The kissing bound in d = 1 with Δ₁ = 1 and the Fejér ratio F(0)/F̂(0) = 1/(1+2N)."""
    from .bounds import kissing_bound

    n, _ = fejer_sharpness(lam)
    return kissing_bound(1, Fraction(lam), Fraction(1, 1 + 2 * n), 1)
