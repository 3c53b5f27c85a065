"""Matroid oracles over a dense integer ground set, with query metering.

Every oracle answers ``is_independent`` and ``rank`` over sets of element ids
in ``[0, ground_size)``.  Base families count their own calls on a
:class:`ResourceLedger`; composite views (restriction, contraction) delegate
to the oracle they wrap, so the wrapped ledger sees exactly the delegated
calls.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

ElementSet = frozenset

# memo tables are dropped once they grow past this many entries
_MEMO_LIMIT = 1 << 18


class MatroidError(Exception):
    """Base class for every error raised by this package."""


class InputError(MatroidError, ValueError):
    """Malformed input: out-of-range ids, bad weights, bad parameters."""


class BudgetError(MatroidError):
    """A configured size or search budget would be exceeded."""


class PreconditionError(MatroidError):
    """An operation was called on arguments violating its precondition."""


class ContractViolation(MatroidError):
    """A pluggable component returned something its contract forbids."""


class ProtocolViolation(MatroidError):
    """A simulated party touched information it is not allowed to see."""


@dataclass
class ResourceLedger:
    """Counters for oracle calls, retained elements, passes and messages.

    Ledgers are plain mutable records and are not locked; concurrent runs
    should each own one and combine them with :meth:`merged`.
    """

    independence_calls: int = 0
    rank_calls: int = 0
    stored_elements_peak: int = 0
    passes: int = 0
    message_elements: int = 0

    def observe_stored(self, count: int) -> None:
        if count > self.stored_elements_peak:
            self.stored_elements_peak = count

    def copy(self) -> "ResourceLedger":
        return ResourceLedger(**asdict(self))

    def merged(self, other: "ResourceLedger") -> "ResourceLedger":
        return ResourceLedger(
            independence_calls=self.independence_calls + other.independence_calls,
            rank_calls=self.rank_calls + other.rank_calls,
            stored_elements_peak=max(self.stored_elements_peak, other.stored_elements_peak),
            passes=self.passes + other.passes,
            message_elements=self.message_elements + other.message_elements,
        )

    def since(self, earlier: "ResourceLedger") -> "ResourceLedger":
        """Call counts accumulated after ``earlier`` was copied."""
        return ResourceLedger(
            independence_calls=self.independence_calls - earlier.independence_calls,
            rank_calls=self.rank_calls - earlier.rank_calls,
            stored_elements_peak=self.stored_elements_peak,
            passes=self.passes - earlier.passes,
            message_elements=self.message_elements - earlier.message_elements,
        )

    def as_dict(self) -> dict:
        return asdict(self)


def as_element_set(S: Iterable[int]) -> frozenset:
    return S if isinstance(S, frozenset) else frozenset(S)


class Matroid:
    """Independence/rank oracle over ``range(ground_size)``.

    Subclasses implement ``_independent`` and usually ``_rank``; the public
    methods validate ids and meter the call first.
    """

    kind = "abstract"
    memoize = True

    def __init__(self, ground_size: int, ledger: Optional[ResourceLedger] = None):
        if ground_size < 0:
            raise InputError(f"negative ground size {ground_size}")
        self.ground_size = ground_size
        self.ledger = ledger if ledger is not None else ResourceLedger()
        self._indep_memo: dict = {}
        self._rank_memo: dict = {}

    @property
    def elements(self) -> frozenset:
        """Ids this oracle accepts in queries."""
        return frozenset(range(self.ground_size))

    def _check(self, S: Iterable[int]) -> frozenset:
        S = as_element_set(S)
        if S:
            lo, hi = min(S), max(S)
            if lo < 0 or hi >= self.ground_size:
                raise InputError(
                    f"element id out of range for ground set of size {self.ground_size}: "
                    f"{lo if lo < 0 else hi}"
                )
        return S

    def is_independent(self, S: Iterable[int]) -> bool:
        S = self._check(S)
        self.ledger.independence_calls += 1
        if not self.memoize:
            return self._independent(S)
        memo = self._indep_memo
        hit = memo.get(S)
        if hit is None:
            if len(memo) > _MEMO_LIMIT:
                memo.clear()
            hit = memo[S] = self._independent(S)
        return hit

    def rank(self, S: Iterable[int]) -> int:
        S = self._check(S)
        self.ledger.rank_calls += 1
        if not self.memoize:
            return self._rank(S)
        memo = self._rank_memo
        hit = memo.get(S)
        if hit is None:
            if len(memo) > _MEMO_LIMIT:
                memo.clear()
            hit = memo[S] = self._rank(S)
        return hit

    def extends(self, I: Iterable[int], e: int) -> bool:
        """Whether ``I + e`` is independent, for ``I`` already known to be independent."""
        return self.is_independent(as_element_set(I) | {e})

    def find_circuit(self, I: frozenset, e: int) -> Optional[frozenset]:
        """Circuit of ``I + e`` through ``e``, or None if ``I + e`` is independent.

        ``I`` is assumed independent.  Probes each ``I - x + e`` once.
        """
        if self.is_independent(I | {e}):
            return None
        circuit = [e]
        for x in sorted(I):
            if self.is_independent((I - {x}) | {e}):
                circuit.append(x)
        return frozenset(circuit)

    def _independent(self, S: frozenset) -> bool:
        raise NotImplementedError

    def _rank(self, S: frozenset) -> int:
        # greedy is exact on a matroid; uncounted since it runs on the raw predicate
        basis: set = set()
        for e in sorted(S):
            basis.add(e)
            if not self._independent(frozenset(basis)):
                basis.discard(e)
        return len(basis)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.ground_size})"


class UniformMatroid(Matroid):
    kind = "uniform"
    memoize = False

    def __init__(self, n: int, k: int, ledger=None):
        super().__init__(n, ledger)
        if k < 0:
            raise InputError(f"uniform matroid needs k >= 0, got {k}")
        self.k = k

    def _independent(self, S):
        return len(S) <= self.k

    def _rank(self, S):
        return min(len(S), self.k)

    def params(self) -> dict:
        return {"k": self.k}


class PartitionMatroid(Matroid):
    kind = "partition"

    def __init__(self, blocks: list[int], caps: list[int], ledger=None):
        super().__init__(len(blocks), ledger)
        if any(b < 0 or b >= len(caps) for b in blocks):
            raise InputError("partition block index out of range")
        if any(c < 0 for c in caps):
            raise InputError("partition capacities must be non-negative")
        self.blocks = list(blocks)
        self.caps = list(caps)

    def _counts(self, S):
        counts = [0] * len(self.caps)
        for e in S:
            counts[self.blocks[e]] += 1
        return counts

    def _independent(self, S):
        return all(c <= cap for c, cap in zip(self._counts(S), self.caps))

    def _rank(self, S):
        return sum(min(c, cap) for c, cap in zip(self._counts(S), self.caps))

    def params(self) -> dict:
        return {"blocks": list(self.blocks), "caps": list(self.caps)}


class _DisjointSets:
    __slots__ = ("parent",)

    def __init__(self):
        self.parent: dict = {}

    def find(self, v):
        parent = self.parent
        root = v
        while parent.get(root, root) != root:
            root = parent[root]
        while v != root:
            nxt = parent.get(v, v)
            parent[v] = root
            v = nxt
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


class GraphicMatroid(Matroid):
    """Cycle matroid of a multigraph; element i is edge ``edges[i]``."""

    kind = "graphic"

    def __init__(self, vertices: int, edges: list[tuple[int, int]], ledger=None):
        super().__init__(len(edges), ledger)
        for u, v in edges:
            if not (0 <= u < vertices and 0 <= v < vertices):
                raise InputError(f"edge ({u}, {v}) outside {vertices} vertices")
        self.vertices = vertices
        self.edges = [tuple(e) for e in edges]

    def _forest_size(self, S, stop_on_cycle: bool):
        dsu = _DisjointSets()
        merged = 0
        for e in S:
            u, v = self.edges[e]
            if dsu.union(u, v):
                merged += 1
            elif stop_on_cycle:
                return -1
        return merged

    def _independent(self, S):
        return self._forest_size(S, True) >= 0

    def _rank(self, S):
        return self._forest_size(S, False)

    def params(self) -> dict:
        return {"vertices": self.vertices, "edges": [list(e) for e in self.edges]}


class LinearMatroidGF2(Matroid):
    """Column matroid of a 0/1 matrix over GF(2); columns stored as int bitmasks."""

    kind = "linear_gf2"

    def __init__(self, rows: int, columns: list[int], ledger=None):
        super().__init__(len(columns), ledger)
        if any(c < 0 or c >> rows for c in columns):
            raise InputError(f"column does not fit in {rows} rows")
        self.rows = rows
        self.columns = list(columns)

    def _rank(self, S):
        basis: dict[int, int] = {}  # pivot bit -> reduced vector
        rank = 0
        for e in S:
            v = self.columns[e]
            while v:
                top = v.bit_length() - 1
                if top not in basis:
                    basis[top] = v
                    rank += 1
                    break
                v ^= basis[top]
        return rank

    def _independent(self, S):
        return self._rank(S) == len(S)

    def params(self) -> dict:
        return {
            "rows": self.rows,
            "columns": [format(c, f"0{self.rows}b") if self.rows else "" for c in self.columns],
        }


class Restriction(Matroid):
    """``M | S`` with original ids kept; ids outside ``S`` are rejected."""

    kind = "restriction"

    def __init__(self, base: Matroid, S: Iterable[int]):
        S = base._check(S)
        if isinstance(base, Restriction):
            if not S <= base.allowed:
                raise InputError("restriction set leaves the restricted ground set")
            base = base.base
        super().__init__(base.ground_size, base.ledger)
        self.base = base
        self.allowed = S

    @property
    def elements(self):
        return self.allowed

    def _check(self, S):
        S = as_element_set(S)
        if not S <= self.allowed:
            bad = min(S - self.allowed)
            raise InputError(f"element {bad} is outside the restricted ground set")
        return S

    def is_independent(self, S):
        return self.base.is_independent(self._check(S))

    def rank(self, S):
        return self.base.rank(self._check(S))

    def find_circuit(self, I, e):
        self._check(I | {e})
        return self.base.find_circuit(I, e)


class Contraction(Matroid):
    """``M / S`` over ``N - S`` using one fixed lowest-id greedy base of ``M | S``."""

    kind = "contraction"

    def __init__(self, base: Matroid, S: Iterable[int]):
        S = base._check(S)
        super().__init__(base.ground_size, base.ledger)
        self.base = base
        self.contracted = S
        self.allowed = base.elements - S
        basis: frozenset = frozenset()
        for e in sorted(S):
            if base.is_independent(basis | {e}):
                basis = basis | {e}
        self.contracted_base = basis

    @property
    def elements(self):
        return self.allowed

    def _check(self, S):
        S = as_element_set(S)
        if not S <= self.allowed:
            bad = min(S - self.allowed)
            raise InputError(f"element {bad} is not in the contracted ground set")
        return S

    def is_independent(self, S):
        return self.base.is_independent(self._check(S) | self.contracted_base)

    def rank(self, S):
        return self.base.rank(self._check(S) | self.contracted_base) - len(self.contracted_base)


def is_independent(m: Matroid, S: Iterable[int]) -> bool:
    return m.is_independent(S)


def rank(m: Matroid, S: Iterable[int]) -> int:
    return m.rank(S)


def restrict(m: Matroid, S: Iterable[int]) -> Restriction:
    return Restriction(m, S)


def contract(m: Matroid, S: Iterable[int]) -> Contraction:
    return Contraction(m, S)


def fundamental_circuit(m: Matroid, I: Iterable[int], e: int) -> frozenset:
    """The unique circuit inside ``I + e``; it always contains ``e``."""
    I = as_element_set(I)
    if e in I:
        raise PreconditionError(f"element {e} already in I")
    if not m.is_independent(I):
        raise PreconditionError("I is not independent")
    circuit = m.find_circuit(I, e)
    if circuit is None:
        raise PreconditionError(f"I + {e} is independent, there is no circuit")
    return circuit


@dataclass
class AxiomReport:
    ok: bool
    checked_sets: int
    violation: Optional[str] = None
    witness: tuple = field(default_factory=tuple)

    def __bool__(self):
        return self.ok


def verify_matroid_axioms(
    m: Matroid, elements: Optional[Iterable[int]] = None, max_ground: int = 12
) -> AxiomReport:
    """Exhaustively check the matroid axioms and rank consistency of ``m``.

    The exchange axiom is tested in its equivalent form: for each independent
    ``B`` the set ``B`` together with everything that cannot extend it has
    rank exactly ``|B|``.
    """
    elements = sorted(m.elements if elements is None else elements)
    size = len(elements)
    if size > max_ground:
        raise BudgetError(f"exhaustive axiom check refuses {size} > {max_ground} elements")
    full = 1 << size

    def members(mask):
        return frozenset(elements[b] for b in range(size) if mask >> b & 1)

    indep = [m.is_independent(members(mask)) for mask in range(full)]
    if not indep[0]:
        return AxiomReport(False, full, "empty set is dependent", (frozenset(),))

    for mask in range(full):
        if indep[mask]:
            for b in range(size):
                if mask >> b & 1 and not indep[mask ^ (1 << b)]:
                    return AxiomReport(
                        False, full, "downward closure",
                        (members(mask), members(mask ^ (1 << b))),
                    )

    best = [0] * full
    for mask in range(1, full):
        if indep[mask]:
            best[mask] = bin(mask).count("1")
        else:
            best[mask] = max(best[mask ^ (1 << b)] for b in range(size) if mask >> b & 1)

    for mask in range(full):
        if not indep[mask]:
            continue
        blocked = mask
        for b in range(size):
            bit = 1 << b
            if not mask & bit and not indep[mask | bit]:
                blocked |= bit
        if best[blocked] != best[mask]:
            return AxiomReport(
                False, full, "exchange",
                (members(mask), members(blocked), best[blocked]),
            )

    for mask in range(full):
        reported = m.rank(members(mask))
        if reported != best[mask]:
            return AxiomReport(
                False, full, "rank disagrees with independence",
                (members(mask), reported, best[mask]),
            )
    return AxiomReport(True, full)


@dataclass
class WeightedInstance:
    """Two matroids over one ground set plus positive weights on the active elements.

    The keys of ``weights`` form the active ground set; the oracles may be
    views over a larger global id space.
    """

    m1: Matroid
    m2: Matroid
    weights: dict

    def __post_init__(self):
        if self.m1.ground_size != self.m2.ground_size:
            raise InputError("matroids disagree on the ground set size")
        clean = {}
        for e, w in self.weights.items():
            if not 0 <= e < self.m1.ground_size:
                raise InputError(f"weighted element {e} outside the ground set")
            w = Fraction(w)
            if w <= 0:
                raise InputError(f"weight of element {e} must be positive, got {w}")
            clean[e] = w
        self.weights = clean

    @property
    def n(self) -> int:
        return self.m1.ground_size

    @property
    def elements(self) -> list[int]:
        return sorted(self.weights)

    def weight(self, S: Iterable[int]) -> Fraction:
        return sum((self.weights[e] for e in S), Fraction(0))

    def aspect_ratio(self) -> Fraction:
        if not self.weights:
            return Fraction(1)
        values = self.weights.values()
        return max(values) / min(values)

    def is_common_independent(self, S: Iterable[int]) -> bool:
        S = as_element_set(S)
        if not S <= self.weights.keys():
            return False
        return self.m1.is_independent(S) and self.m2.is_independent(S)

    def restrict(self, S: Iterable[int]) -> "WeightedInstance":
        S = as_element_set(S)
        missing = S - self.weights.keys()
        if missing:
            raise InputError(f"cannot restrict to inactive elements {sorted(missing)}")
        return WeightedInstance(
            Restriction(self.m1, S), Restriction(self.m2, S),
            {e: self.weights[e] for e in S},
        )

    def reweighted(self, weights: dict) -> "WeightedInstance":
        return WeightedInstance(self.m1, self.m2, weights)
