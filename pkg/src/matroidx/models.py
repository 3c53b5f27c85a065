"""Simulators for the semi-streaming and one-way two-party models.

Space is metered in retained elements (copies, for algorithms that work on
unfolded instances) and communication in message elements.  Weighted
wrappers split each model into per-class unweighted runs over unfolded
copies, then refold, extract and merge as the static pipeline does.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .core import (
    BudgetError,
    ContractViolation,
    InputError,
    Matroid,
    ProtocolViolation,
    ResourceLedger,
    WeightedInstance,
    as_element_set,
)
from .io import format_fraction
from .reduction import (
    RoundingParams,
    Unfolding,
    as_fraction,
    check_epsilon,
    floor_log,
    greedy_merge,
    round_weight,
    spread_interval,
    spread_position,
)
from .solvers import DEFAULT_CLASS_RESOLUTION, composed_bound, exact_mi, extract


@dataclass
class RunReport:
    selected: frozenset
    weight: Fraction
    passes: int
    peak_stored: int
    message_elements: int
    space_violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "selected": sorted(self.selected),
            "weight": format_fraction(self.weight),
            "passes": self.passes,
            "peak_stored": self.peak_stored,
            "message_elements": self.message_elements,
            "space_violations": self.space_violations,
            "details": self.details,
        }


# ----------------------------------------------------------- shared plumbing


class ClassPlan:
    """Spread classes computed from a declared weight range, usable element by element.

    Rounding scales by the declared minimum, and every class converts its
    rounded weights to integers against its own lower edge (never below the
    rounded declared minimum), so no look-ahead is needed.
    """

    def __init__(self, eps, weight_range: tuple, resolution: int = DEFAULT_CLASS_RESOLUTION):
        self.eps = check_epsilon(eps)
        w_min, w_max = (as_fraction(w) for w in weight_range)
        if not 0 < w_min <= w_max:
            raise InputError(f"bad declared weight range [{w_min}, {w_max}]")
        self.w_min, self.w_max = w_min, w_max
        self.resolution = resolution
        self.params = RoundingParams(self.eps, w_min, 2 / (self.eps * w_min))
        self.q = 1 / self.eps
        self.beta = math.ceil(self.q)
        self.base = Fraction(round_weight(w_min, self.params)[1])

    def rounded(self, w) -> int:
        w = as_fraction(w)
        if not self.w_min <= w <= self.w_max:
            raise InputError(f"weight {w} outside the declared range [{self.w_min}, {self.w_max}]")
        return round_weight(w, self.params)[1]

    def classes_of(self, w_r: int) -> list[tuple[int, int]]:
        x = Fraction(w_r) / self.base
        out = []
        for i in range(1, self.beta + 1):
            level = spread_position(x, self.q, self.beta, i)
            if level is not None:
                out.append((i, level))
        return out

    def class_floor(self, key: tuple[int, int]) -> Fraction:
        lo, _ = spread_interval(self.q, self.beta, *key)
        return max(lo * self.base, self.base)

    def class_weight(self, key, w_r: int) -> int:
        return math.floor(w_r * self.resolution / self.class_floor(key))

    def all_classes(self) -> list[tuple[int, int]]:
        """Every class any weight in the declared range can land in."""
        lo = floor_log(Fraction(self.rounded(self.w_min)) / self.base, self.q)
        hi = floor_log(Fraction(self.rounded(self.w_max)) / self.base, self.q)
        keys = set()
        for i in range(1, self.beta + 1):
            for k in range(lo, hi + 1):
                d = k - i
                if d % self.beta:
                    keys.add((i, d // self.beta + 1))
        return sorted(keys)

    def bound(self, alpha) -> Fraction:
        return composed_bound(Fraction(alpha), self.eps, self.resolution)


def merge_classes(m1: Matroid, m2: Matroid, rounded: dict, original: dict,
                  extracted: dict) -> tuple[frozenset, Optional[int], dict]:
    """Merge per-class sets for each index (heaviest class first) and keep the best index."""
    inst = WeightedInstance(m1, m2, rounded)
    by_index: dict = {}
    for (i, level), S in extracted.items():
        by_index.setdefault(i, []).append((level, S))
    merged = {}
    for i, parts in sorted(by_index.items()):
        parts.sort(key=lambda item: -item[0])
        merged[i] = greedy_merge([S for _, S in parts], inst)
    if not merged:
        return frozenset(), None, {}
    weights = {i: sum((original[e] for e in S), Fraction(0)) for i, S in merged.items()}
    best = max(merged, key=lambda i: (weights[i], -i))
    return merged[best], best, weights


def _check_common(u: Unfolding, chosen, who: str) -> frozenset:
    chosen = as_element_set(chosen)
    if chosen and (min(chosen) < 0 or max(chosen) >= u.size):
        raise ContractViolation(f"{who} returned copies outside its unfolded ground set")
    if not (u.m1.is_independent(chosen) and u.m2.is_independent(chosen)):
        raise ContractViolation(f"{who} returned a set that is not common independent")
    return chosen


# ---------------------------------------------------------------- streaming


class StreamingAlgorithm:
    """Weighted streaming algorithm driven by :func:`run_stream`."""

    name = "abstract"
    passes = 1
    alpha = Fraction(1)

    def start(self, m1: Matroid, m2: Matroid, weight_range: tuple) -> None:
        raise NotImplementedError

    def on_element(self, e: int, w: Fraction) -> None:
        raise NotImplementedError

    def on_pass_end(self) -> None:
        pass

    def finalize(self) -> frozenset:
        raise NotImplementedError

    def stored_count(self) -> int:
        raise NotImplementedError


class UnweightedStreamingAlgorithm:
    """Cardinality streaming algorithm over an (unfolded) pair of oracles."""

    name = "abstract"
    passes = 1
    alpha = Fraction(1)

    def start(self, m1: Matroid, m2: Matroid) -> None:
        raise NotImplementedError

    def on_element(self, c: int) -> None:
        raise NotImplementedError

    def on_pass_end(self) -> None:
        pass

    def finalize(self) -> frozenset:
        raise NotImplementedError

    def stored_count(self) -> int:
        raise NotImplementedError


class StreamingGreedy(UnweightedStreamingAlgorithm):
    """Keep every arriving element that stays common independent; half-approximate."""

    name = "greedy"
    alpha = Fraction(1, 2)

    def start(self, m1, m2):
        self.m1, self.m2 = m1, m2
        self.kept: frozenset = frozenset()

    def on_element(self, c):
        if self.m1.extends(self.kept, c) and self.m2.extends(self.kept, c):
            self.kept = self.kept | {c}

    def finalize(self):
        return self.kept

    def stored_count(self):
        return len(self.kept)


class BufferedExact(UnweightedStreamingAlgorithm):
    """Offline stub: retain every element and solve exactly at the end."""

    name = "buffered-exact"

    def start(self, m1, m2):
        self.m1, self.m2 = m1, m2
        self.seen: list = []

    def on_element(self, c):
        self.seen.append(c)

    def finalize(self):
        return exact_mi(self.m1, self.m2, self.seen)

    def stored_count(self):
        return len(self.seen)


def parse_order(spec: str, elements: list[int]) -> list[int]:
    if spec == "natural":
        return list(elements)
    if spec == "reverse":
        return list(reversed(elements))
    kind, _, seed = spec.partition(":")
    if kind == "random" and seed:
        try:
            rng = random.Random(int(seed))
        except ValueError:
            raise InputError(f"bad random seed in order {spec!r}") from None
        order = list(elements)
        rng.shuffle(order)
        return order
    raise InputError(f"order must be natural, reverse or random:<seed>, got {spec!r}")


def declared_range(inst: WeightedInstance, weight_range=None) -> tuple:
    if weight_range is not None:
        return tuple(as_fraction(w) for w in weight_range)
    if not inst.weights:
        return Fraction(1), Fraction(1)
    values = inst.weights.values()
    return min(values), max(values)


def run_stream(alg: StreamingAlgorithm, inst: WeightedInstance, order="natural",
               passes: Optional[int] = None, space_cap: Optional[int] = None,
               weight_range=None) -> RunReport:
    """Deliver every element once per pass, metering peak retained elements."""
    passes = alg.passes if passes is None else passes
    if passes < 1:
        raise InputError("a stream needs at least one pass")
    elements = inst.elements
    sequence = parse_order(order, elements) if isinstance(order, str) else list(order)
    if sorted(sequence) != elements:
        raise InputError("stream order must be a permutation of the weighted elements")
    ledger = ResourceLedger()
    violations = []
    alg.start(inst.m1, inst.m2, declared_range(inst, weight_range))
    for p in range(passes):
        for e in sequence:
            alg.on_element(e, inst.weights[e])
            stored = alg.stored_count()
            ledger.observe_stored(stored)
            if space_cap is not None and stored > space_cap:
                violations.append({"pass": p + 1, "element": e, "stored": stored})
        alg.on_pass_end()
        ledger.passes += 1
    selected = as_element_set(alg.finalize())
    if not inst.is_common_independent(selected):
        raise ContractViolation(f"stream algorithm {alg.name} output is not common independent")
    details = alg.report() if hasattr(alg, "report") else {}
    return RunReport(selected, inst.weight(selected), ledger.passes, ledger.stored_elements_peak,
                     0, violations, details)


class _StreamClass:
    def __init__(self, key, m1, m2, budget):
        self.key = key
        self.unfolding = Unfolding(m1, m2, budget)
        self.peak = 0


class StreamingWeightedWrapper(StreamingAlgorithm):
    """Run one unweighted streaming algorithm per weight class on unfolded copies.

    Each arriving element is rounded, assigned to its classes, expanded to
    its copies and fed to the owning class instances copy by copy.  At the
    end every class output is refolded and a heavy subset extracted; classes
    are merged per index and the heaviest index wins.
    """

    name = "weighted-wrapper"

    def __init__(self, factory: Callable[[], UnweightedStreamingAlgorithm], eps,
                 class_resolution: int = DEFAULT_CLASS_RESOLUTION, extraction: str = "auction",
                 budget: Optional[int] = None):
        self.factory = factory
        self.eps = check_epsilon(eps)
        self.resolution = class_resolution
        self.extraction = extraction
        self.budget = budget
        probe = factory()
        self.passes = probe.passes
        self.alpha = probe.alpha
        self.name = f"weighted[{probe.name}]"

    def start(self, m1, m2, weight_range):
        self.m1, self.m2 = m1, m2
        self.plan = ClassPlan(self.eps, weight_range, self.resolution)
        self.classes: dict = {}
        self.rounded: dict = {}
        self.original: dict = {}
        self.merge_buffer = 0

    def _open(self, key) -> _StreamClass:
        cls = _StreamClass(key, self.m1, self.m2, self.budget)
        cls.alg = self.factory()
        cls.alg.start(cls.unfolding.m1, cls.unfolding.m2)
        return cls

    def _feed(self, cls: _StreamClass, e: int, copies: list[int]) -> None:
        for c in copies:
            cls.alg.on_element(c)

    def _class_stored(self, cls) -> int:
        return cls.alg.stored_count()

    def _class_output(self, cls) -> frozenset:
        return cls.alg.finalize()

    def _on_class_pass_end(self, cls) -> None:
        cls.alg.on_pass_end()

    def on_element(self, e, w):
        w_r = self.plan.rounded(w)
        self.rounded[e] = w_r
        self.original[e] = as_fraction(w)
        for key in self.plan.classes_of(w_r):
            cls = self.classes.get(key)
            if cls is None:
                cls = self.classes[key] = self._open(key)
            u = cls.unfolding
            copies = u.copies.get(e)
            if copies is None:
                copies = u.add(e, self.plan.class_weight(key, w_r))
            self._feed(cls, e, copies)
            cls.peak = max(cls.peak, self._class_stored(cls))

    def on_pass_end(self):
        for cls in self.classes.values():
            self._on_class_pass_end(cls)

    def stored_count(self):
        return sum(self._class_stored(cls) for cls in self.classes.values()) + self.merge_buffer

    def finalize(self):
        extracted = {}
        self.class_log = []
        rounded_inst = WeightedInstance(self.m1, self.m2, self.rounded)
        for key in sorted(self.classes):
            cls = self.classes[key]
            chosen = _check_common(cls.unfolding, self._class_output(cls), self.name)
            support = cls.unfolding.refold(chosen)
            picked, _, _ = extract(rounded_inst, support, self.eps, self.extraction)
            extracted[key] = picked
            self.class_log.append({"class": list(key), "copies": cls.unfolding.size,
                                   "output": len(chosen), "peak": cls.peak,
                                   "extracted": sorted(picked)})
        self.merge_buffer = sum(len(S) for S in extracted.values())
        selected, self.chosen_index, self.index_weights = merge_classes(
            self.m1, self.m2, self.rounded, self.original, extracted)
        return selected

    def report(self) -> dict:
        return {
            "classes": self.class_log,
            "chosen_index": self.chosen_index,
            "bound": format_fraction(self.plan.bound(self.alpha)),
            "merge_buffer": self.merge_buffer,
            "max_class_peak": max((c.peak for c in self.classes.values()), default=0),
            "class_count": len(self.classes),
        }


class OnePassGreedyWeighted(StreamingWeightedWrapper):
    """One-pass weighted greedy: streaming greedy on each class's copies, checked per slice.

    A new copy only changes one slice on each side, so independence of the
    grown set is tested on those two slices alone; decisions match plain
    greedy over the unfolded copies.
    """

    name = "one-pass-greedy"

    def __init__(self, eps, class_resolution: int = DEFAULT_CLASS_RESOLUTION,
                 extraction: str = "auction", budget: Optional[int] = None):
        super().__init__(StreamingGreedy, eps, class_resolution, extraction, budget)
        self.name = "one-pass-greedy"

    def _open(self, key):
        cls = _StreamClass(key, self.m1, self.m2, self.budget)
        cls.kept = set()
        cls.side1: dict = {}  # slice index -> originals kept there
        cls.side2: dict = {}
        return cls

    def _feed(self, cls, e, copies):
        u = cls.unfolding
        w = len(copies)
        for j, c in enumerate(copies, start=1):
            if c in cls.kept:
                continue
            s1 = cls.side1.setdefault(j, set())
            s2 = cls.side2.setdefault(w - j + 1, set())
            # unfolded oracles meter one call each, as for the generic greedy
            u.ledger.independence_calls += 2
            if self.m1.is_independent(frozenset(s1 | {e})) and \
                    self.m2.is_independent(frozenset(s2 | {e})):
                s1.add(e)
                s2.add(e)
                cls.kept.add(c)

    def _class_stored(self, cls):
        return len(cls.kept)

    def _class_output(self, cls):
        return frozenset(cls.kept)

    def _on_class_pass_end(self, cls):
        pass


def one_pass_greedy_weighted(eps, **kwargs) -> OnePassGreedyWeighted:
    return OnePassGreedyWeighted(eps, **kwargs)


def streaming_weighted_wrapper(factory, eps, **kwargs) -> StreamingWeightedWrapper:
    return StreamingWeightedWrapper(factory, eps, **kwargs)


# ------------------------------------------------------------ communication


class GuardedMatroid(Matroid):
    """View of an oracle that raises ProtocolViolation on any id outside ``visible``."""

    kind = "guarded"
    memoize = False

    def __init__(self, base: Matroid, visible: Iterable[int], party: str):
        super().__init__(base.ground_size, base.ledger)
        self.base = base
        self.visible = frozenset(visible)
        self.party = party
        self.violations = 0

    @property
    def elements(self):
        return self.visible

    def _check(self, S):
        S = as_element_set(S)
        if not S <= self.visible:
            self.violations += 1
            raise ProtocolViolation(
                f"{self.party} queried elements {sorted(S - self.visible)} it has not seen"
            )
        return S

    def is_independent(self, S):
        return self.base.is_independent(self._check(S))

    def rank(self, S):
        return self.base.rank(self._check(S))

    def extends(self, I, e):
        self._check(as_element_set(I) | {e})
        return self.base.extends(I, e)

    def find_circuit(self, I, e):
        self._check(I | {e})
        return self.base.find_circuit(I, e)


@dataclass
class PartyView:
    m1: Matroid
    m2: Matroid
    elements: frozenset
    weights: dict
    weight_range: tuple


@dataclass
class ClassMessage:
    key: Optional[tuple]
    copies: list  # (element, copy index) pairs
    weights: dict  # original weights of the elements appearing in copies


@dataclass
class Message:
    parts: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return sum(len(p.copies) for p in self.parts)

    def elements(self) -> frozenset:
        return frozenset(e for p in self.parts for e, _ in p.copies)

    def weights(self) -> dict:
        out = {}
        for p in self.parts:
            out.update(p.weights)
        return out


class UnweightedProtocol:
    """One-way cardinality protocol: Alice picks a message set, Bob completes it."""

    name = "abstract"
    alpha = Fraction(1)

    def alice(self, m1: Matroid, m2: Matroid, part: Iterable[int]) -> frozenset:
        raise NotImplementedError

    def bob(self, message: frozenset, m1: Matroid, m2: Matroid, part: Iterable[int]) -> frozenset:
        raise NotImplementedError


class GreedyProtocol(UnweightedProtocol):
    """Alice sends her greedy common independent set; Bob continues greedy on his part."""

    name = "greedy"
    alpha = Fraction(1, 2)

    def alice(self, m1, m2, part):
        return _greedy_extend(frozenset(), m1, m2, sorted(part))

    def bob(self, message, m1, m2, part):
        return _greedy_extend(frozenset(message), m1, m2, sorted(part))


class SendAllProtocol(UnweightedProtocol):
    """Alice forwards her whole part; Bob solves exactly.  Exact but expensive."""

    name = "send-all"

    def alice(self, m1, m2, part):
        return frozenset(part)

    def bob(self, message, m1, m2, part):
        return exact_mi(m1, m2, sorted(set(message) | set(part)))


def _greedy_extend(start: frozenset, m1, m2, order) -> frozenset:
    current = start
    for e in order:
        if m1.extends(current, e) and m2.extends(current, e):
            current = current | {e}
    return current


class OneWayProtocol:
    """Weighted one-way protocol driven by :func:`run_protocol`."""

    name = "abstract"
    alpha = Fraction(1)

    def alice(self, view: PartyView) -> Message:
        raise NotImplementedError

    def bob(self, message: Message, view: PartyView) -> frozenset:
        raise NotImplementedError


class UnweightedAsWeighted(OneWayProtocol):
    """Run a cardinality protocol on the original elements, ignoring weights."""

    def __init__(self, protocol: UnweightedProtocol):
        self.protocol = protocol
        self.name = protocol.name
        self.alpha = protocol.alpha

    def alice(self, view):
        sent = self.protocol.alice(view.m1, view.m2, view.elements)
        return Message([ClassMessage(None, [(e, 1) for e in sorted(sent)],
                                     {e: view.weights[e] for e in sent})])

    def bob(self, message, view):
        return self.protocol.bob(message.elements(), view.m1, view.m2, view.elements)


class CommWeightedWrapper(OneWayProtocol):
    """Per-class unfolded runs of a cardinality protocol, one message part per class.

    Both parties derive the class list from the declared weight range, so
    Alice sends a (possibly empty) part for every class.
    """

    def __init__(self, protocol: UnweightedProtocol, eps,
                 class_resolution: int = DEFAULT_CLASS_RESOLUTION, extraction: str = "auction",
                 budget: Optional[int] = None):
        self.protocol = protocol
        self.eps = check_epsilon(eps)
        self.resolution = class_resolution
        self.extraction = extraction
        self.budget = budget
        self.name = f"weighted[{protocol.name}]"
        self.alpha = protocol.alpha

    def _members(self, plan, weights, elements, key) -> list[int]:
        return [e for e in sorted(elements) if key in plan.classes_of(plan.rounded(weights[e]))]

    def alice(self, view):
        plan = ClassPlan(self.eps, view.weight_range, self.resolution)
        parts = []
        for key in plan.all_classes():
            members = self._members(plan, view.weights, view.elements, key)
            u = Unfolding(view.m1, view.m2, self.budget)
            for e in members:
                u.add(e, plan.class_weight(key, plan.rounded(view.weights[e])))
            sent = self.protocol.alice(u.m1, u.m2, range(u.size))
            sent = as_element_set(sent)
            if sent and (min(sent) < 0 or max(sent) >= u.size):
                raise ContractViolation(f"{self.protocol.name} (Alice) sent unknown copies")
            copies = sorted(u.owner[c] for c in sent)
            parts.append(ClassMessage(key, copies, {e: view.weights[e] for e, _ in copies}))
        return Message(parts)

    def bob(self, message, view):
        plan = ClassPlan(self.eps, view.weight_range, self.resolution)
        known = dict(view.weights)
        known.update(message.weights())
        rounded = {e: plan.rounded(w) for e, w in known.items()}
        rounded_inst = WeightedInstance(view.m1, view.m2, rounded)
        extracted = {}
        self.class_log = []
        for part in message.parts:
            key = part.key
            u = Unfolding(view.m1, view.m2, self.budget)
            for e in sorted({e for e, _ in part.copies}):
                u.add(e, plan.class_weight(key, rounded[e]))
            received = frozenset(u.copy_id(e, j) for e, j in part.copies)
            own = []
            for e in self._members(plan, view.weights, view.elements, key):
                if e not in u.copies:
                    own.extend(u.add(e, plan.class_weight(key, rounded[e])))
            chosen = self.protocol.bob(received, u.m1, u.m2, own)
            chosen = _check_common(u, chosen, f"{self.protocol.name} (Bob)")
            picked, _, _ = extract(rounded_inst, u.refold(chosen), self.eps, self.extraction)
            extracted[key] = picked
            self.class_log.append({"class": list(key), "message": len(part.copies),
                                   "copies": u.size, "extracted": sorted(picked)})
        selected, self.chosen_index, _ = merge_classes(view.m1, view.m2, rounded, known, extracted)
        self.bound = plan.bound(self.alpha)
        return selected

    def report(self) -> dict:
        return {"classes": self.class_log, "chosen_index": self.chosen_index,
                "bound": format_fraction(self.bound)}


def comm_weighted_wrapper(protocol: UnweightedProtocol, eps, **kwargs) -> CommWeightedWrapper:
    return CommWeightedWrapper(protocol, eps, **kwargs)


def parse_partition(spec, elements: list[int]) -> tuple[frozenset, frozenset]:
    """Alice's and Bob's parts from ``random:<seed>:<fraction>`` or Alice's explicit ids."""
    elements = list(elements)
    if isinstance(spec, str) and spec.startswith("random:"):
        try:
            _, seed, fraction = spec.split(":")
            rng = random.Random(int(seed))
            fraction = float(Fraction(fraction))
        except ValueError:
            raise InputError(f"partition must be random:<seed>:<fraction>, got {spec!r}") from None
        alice = frozenset(e for e in elements if rng.random() < fraction)
    else:
        if isinstance(spec, str):
            try:
                ids = [int(x) for x in spec.split(",") if x.strip()]
            except ValueError:
                raise InputError(f"bad partition id list {spec!r}") from None
        else:
            ids = list(spec)
        alice = frozenset(ids)
        if not alice <= set(elements):
            raise InputError("partition names elements outside the instance")
    return alice, frozenset(elements) - alice


def run_protocol(protocol, inst: WeightedInstance, partition, weight_range=None) -> RunReport:
    """Alice speaks once, Bob answers; Bob's oracles reject Alice-only ids not in the message."""
    if isinstance(protocol, UnweightedProtocol):
        protocol = UnweightedAsWeighted(protocol)
    if isinstance(partition, tuple):
        alice_part, bob_part = (frozenset(p) for p in partition)
    else:
        alice_part, bob_part = parse_partition(partition, inst.elements)
    if alice_part & bob_part or (alice_part | bob_part) != frozenset(inst.elements):
        raise InputError("partition must split the elements disjointly and completely")
    w_range = declared_range(inst, weight_range)
    alice_view = PartyView(
        GuardedMatroid(inst.m1, alice_part, "Alice"), GuardedMatroid(inst.m2, alice_part, "Alice"),
        alice_part, {e: inst.weights[e] for e in alice_part}, w_range,
    )
    message = protocol.alice(alice_view)
    sent = message.elements()
    if not sent <= alice_part:
        raise ProtocolViolation("Alice's message names elements she does not hold")
    visible = bob_part | sent
    bob_view = PartyView(
        GuardedMatroid(inst.m1, visible, "Bob"), GuardedMatroid(inst.m2, visible, "Bob"),
        bob_part, {e: inst.weights[e] for e in bob_part}, w_range,
    )
    selected = as_element_set(protocol.bob(message, bob_view))
    if not selected <= visible:
        raise ProtocolViolation("Bob output elements he never saw")
    if not inst.is_common_independent(selected):
        raise ContractViolation(f"protocol {protocol.name} output is not common independent")
    details = protocol.report() if hasattr(protocol, "report") else {}
    details["partition"] = {"alice": sorted(alice_part), "bob": sorted(bob_part)}
    details["guard_violations"] = bob_view.m1.violations + bob_view.m2.violations
    return RunReport(selected, inst.weight(selected), 1, 0, message.size, [], details)


def stream_algorithm(solver: str, eps, **kwargs) -> StreamingAlgorithm:
    if solver == "greedy":
        return one_pass_greedy_weighted(eps, **kwargs)
    if solver == "exact":
        return streaming_weighted_wrapper(BufferedExact, eps, **kwargs)
    raise InputError(f"no streaming algorithm for solver {solver!r}")


def comm_protocol(solver: str, eps, **kwargs) -> OneWayProtocol:
    if solver == "greedy":
        return comm_weighted_wrapper(GreedyProtocol(), eps, **kwargs)
    if solver == "exact":
        return comm_weighted_wrapper(SendAllProtocol(), eps, **kwargs)
    raise InputError(f"no protocol for solver {solver!r}")
