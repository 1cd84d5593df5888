"""Role-weighted extractive summarization as budgeted selection.

Each sentence gets a score

    score_i = scheme.weights[role_i] + lambda * content_density_i

where content_density_i is the fraction of the sentence's tokens that are
content words. A summary is the 0/1 selection maximizing the total score
subject to a token budget and per-role minimum quotas:

    max  sum x_i * score_i
    s.t. sum x_i * length_i <= budget
         sum_{i: role_i = r} x_i >= min(quota_r, count_r)   for each r

For n <= 30 items the optimum is found exactly by depth-first
branch-and-bound with a fractional-knapsack upper bound; larger inputs
use a density greedy with the classical best-of(fill, best single)
0.5-approximation guarantee.

Tie-breaking is fully specified so results are reproducible: among
optimal selections the solver returns the first in "include-first index
order" (at the lowest index where two selections differ, the one
containing that index wins). With non-negative scores this makes
"budget covers everything" select every sentence.

When even the cheapest quota-satisfying selection exceeds the budget, no
feasible selection exists; that minimal selection is returned with
``violated=True`` (the greedy solver seeds by score instead of length
and flags on the same condition).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import Document, DocumentView, RhetoricalRole, ROLE_ORDER
from .errors import ConfigError, DimensionMismatchError
from .roles import ROLE_INDEX
from .stopwords import is_content_word

EXACT_SOLVER_LIMIT = 30

DEFAULT_LAMBDA = 4.0

DEFAULT_BUDGET_FRACTION = 0.34

DEFAULT_QUOTAS: Mapping[RhetoricalRole, int] = {
    RhetoricalRole.RULING_PRESENT: 1,
    RhetoricalRole.ISSUE: 1,
    RhetoricalRole.FACT: 1,
}

_PRUNE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RoleWeightScheme:
    name: str
    weights: Mapping[RhetoricalRole, int]

    def __post_init__(self):
        for role, w in self.weights.items():
            if not isinstance(role, RhetoricalRole):
                raise ConfigError(f"scheme keys must be roles, got {role!r}")
            if not isinstance(w, int) or w < 0:
                raise ConfigError(f"weight for {role.value} must be a non-negative int")

    def weight(self, role: RhetoricalRole | None) -> int:
        if role is None:
            return 0
        return self.weights.get(role, 0)


VARIATION_1 = RoleWeightScheme(
    "variation1",
    {
        RhetoricalRole.RULING_PRESENT: 128,
        RhetoricalRole.ISSUE: 64,
        RhetoricalRole.FACT: 32,
        RhetoricalRole.STATUTE: 8,
        RhetoricalRole.RATIO: 8,
        RhetoricalRole.PRECEDENT: 8,
        RhetoricalRole.ARGUMENT: 2,
    },
)

VARIATION_2 = RoleWeightScheme(
    "variation2",
    {
        RhetoricalRole.RULING_PRESENT: 128,
        RhetoricalRole.RATIO: 64,
        RhetoricalRole.ARGUMENT: 32,
        RhetoricalRole.STATUTE: 8,
        RhetoricalRole.ISSUE: 8,
        RhetoricalRole.FACT: 8,
        RhetoricalRole.PRECEDENT: 2,
    },
)

BUILTIN_SCHEMES = {"variation1": VARIATION_1, "variation2": VARIATION_2}


@dataclass(frozen=True)
class SummarySpec:
    """Summary configuration.

    quotas are minimum sentence counts per role, clamped by availability
    at solve time. ``lam`` is the content-word bonus coefficient.
    """

    scheme: RoleWeightScheme
    budget_words: int
    quotas: Mapping[RhetoricalRole, int] = field(default_factory=lambda: dict(DEFAULT_QUOTAS))
    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        if not isinstance(self.budget_words, int) or self.budget_words < 1:
            raise ConfigError(f"budget_words must be a positive int, got {self.budget_words!r}")
        if self.lam < 0:
            raise ConfigError("lambda must be non-negative")
        for role, q in self.quotas.items():
            if not isinstance(role, RhetoricalRole) or not isinstance(q, int) or q < 0:
                raise ConfigError("quotas must map roles to non-negative ints")

    def to_json_dict(self) -> dict:
        scheme: str | dict
        if self.scheme.name in BUILTIN_SCHEMES and self.scheme == BUILTIN_SCHEMES[self.scheme.name]:
            scheme = self.scheme.name
        else:
            scheme = {r.value: w for r, w in self.scheme.weights.items()}
        return {
            "scheme": scheme,
            "budget_words": self.budget_words,
            "quotas": {r.value: q for r, q in self.quotas.items()},
            "lambda": self.lam,
        }


def scheme_from_value(value: str | Mapping[str, int]) -> RoleWeightScheme:
    if isinstance(value, str):
        if value not in BUILTIN_SCHEMES:
            raise ConfigError(
                f"unknown scheme {value!r}; expected one of {sorted(BUILTIN_SCHEMES)} or a map"
            )
        return BUILTIN_SCHEMES[value]
    if isinstance(value, Mapping):
        try:
            weights = {RhetoricalRole.from_string(k): v for k, v in value.items()}
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return RoleWeightScheme("custom", weights)
    raise ConfigError(f"scheme must be a name or a role->weight map, got {type(value).__name__}")


def spec_from_json(obj: Mapping) -> SummarySpec:
    """Parse a SummarySpec from its JSON object form.

    Keys: scheme ("variation1" | "variation2" | {role: weight}),
    budget_words (required positive int), quotas (optional; omitted means
    the built-in defaults, an explicit {} means no quotas), lambda
    (optional, default 4).
    """
    if not isinstance(obj, Mapping):
        raise ConfigError("summary spec must be a JSON object")
    if "scheme" not in obj:
        raise ConfigError("summary spec missing 'scheme'")
    scheme = scheme_from_value(obj["scheme"])
    budget = obj.get("budget_words")
    if not isinstance(budget, int) or isinstance(budget, bool) or budget < 1:
        raise ConfigError("summary spec needs a positive integer 'budget_words'")
    if "quotas" in obj:
        raw = obj["quotas"]
        if not isinstance(raw, Mapping):
            raise ConfigError("'quotas' must be an object")
        try:
            quotas = {RhetoricalRole.from_string(k): v for k, v in raw.items()}
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        quotas = dict(DEFAULT_QUOTAS)
    lam = obj.get("lambda", DEFAULT_LAMBDA)
    if isinstance(lam, bool) or not isinstance(lam, (int, float)):
        raise ConfigError("'lambda' must be a number")
    return SummarySpec(scheme=scheme, budget_words=budget, quotas=quotas, lam=float(lam))


def spec_from_json_text(payload: str) -> SummarySpec:
    try:
        obj = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid summary spec JSON: {exc.msg}") from exc
    return spec_from_json(obj)


@dataclass(frozen=True)
class Summary:
    """A selection of sentence indices with its objective value.

    violated means the quota-mandated sentences alone exceed the budget;
    the returned selection is then just those sentences.
    """

    selected: tuple[int, ...]
    objective: float
    solver: str
    violated: bool = False

    def __post_init__(self):
        if list(self.selected) != sorted(set(self.selected)):
            raise ValueError("selected indices must be strictly increasing")
        if self.solver not in ("exact", "greedy"):
            raise ValueError(f"unknown solver tag {self.solver!r}")


def default_budget(total_tokens: int, fraction: float = DEFAULT_BUDGET_FRACTION) -> int:
    """Default summary budget: floor(fraction * total), at least 1 token."""
    return max(1, int(total_tokens * fraction))


def sentence_scores(
    doc: Document, roles: Sequence[RhetoricalRole], spec: SummarySpec
) -> list[float]:
    """score_i = scheme weight of role_i + lambda * content-word density."""
    if len(roles) != len(doc.sentences):
        raise ValueError(
            f"roles cover {len(roles)} sentences, document has {len(doc.sentences)}"
        )
    scores = []
    for sent, role in zip(doc.sentences, roles):
        density = sum(1 for t in sent.tokens if is_content_word(t)) / len(sent.tokens)
        scores.append(spec.scheme.weight(role) + spec.lam * density)
    return scores


# --- solver ------------------------------------------------------------------

def _objective(scores: Sequence[float], chosen: Sequence[int]) -> float:
    # Always accumulate in ascending index order so equal selections
    # produce bitwise-equal objectives everywhere in this module.
    total = 0.0
    for i in sorted(chosen):
        total += scores[i]
    return total


def _canonical_precedes(a: Sequence[int], b: Sequence[int]) -> bool:
    """True if selection a comes before b in include-first index order."""
    sa, sb = set(a), set(b)
    diff = sorted(sa ^ sb)
    return bool(diff) and diff[0] in sa


def _clamped_needs(
    roles: Sequence[int], quotas: Mapping[RhetoricalRole, int], n_items: int
) -> list[int]:
    counts = [0] * len(ROLE_ORDER)
    for r in roles:
        counts[r] += 1
    needs = [0] * len(ROLE_ORDER)
    for role, q in quotas.items():
        needs[ROLE_INDEX[role]] = min(q, counts[ROLE_INDEX[role]])
    return needs


def _cheapest_seed(lengths: Sequence[int], roles: Sequence[int], needs: Sequence[int]) -> list[int]:
    seed: list[int] = []
    for r, q in enumerate(needs):
        if q == 0:
            continue
        members = sorted(
            (i for i in range(len(roles)) if roles[i] == r),
            key=lambda i: (lengths[i], i),
        )
        seed.extend(members[:q])
    return sorted(seed)


def _single_feasible(i: int, lengths: Sequence[int], roles: Sequence[int],
                     needs: Sequence[int], budget: int) -> bool:
    if lengths[i] > budget:
        return False
    for r, q in enumerate(needs):
        have = 1 if roles[i] == r else 0
        if have < q:
            return False
    return True


def _solve_greedy(
    lengths: Sequence[int],
    scores: Sequence[float],
    roles: Sequence[int],
    budget: int,
    needs: Sequence[int],
) -> Summary:
    n = len(lengths)
    chosen: set[int] = set()
    for r, q in enumerate(needs):
        if q == 0:
            continue
        members = sorted(
            (i for i in range(n) if roles[i] == r),
            key=lambda i: (-scores[i], i),
        )
        chosen.update(members[:q])
    total_len = sum(lengths[i] for i in chosen)
    if total_len > budget:
        picked = sorted(chosen)
        return Summary(tuple(picked), _objective(scores, picked), "greedy", violated=True)

    order = sorted(range(n), key=lambda i: (-(scores[i] / lengths[i]), i))
    for i in order:
        if i in chosen:
            continue
        if total_len + lengths[i] <= budget:
            chosen.add(i)
            total_len += lengths[i]
    fill = sorted(chosen)
    fill_obj = _objective(scores, fill)

    best_single = None
    for i in range(n):
        if _single_feasible(i, lengths, roles, needs, budget):
            if best_single is None or scores[i] > scores[best_single]:
                best_single = i
    if best_single is not None:
        single_obj = _objective(scores, [best_single])
        if single_obj > fill_obj or (
            single_obj == fill_obj and _canonical_precedes([best_single], fill)
        ):
            return Summary((best_single,), single_obj, "greedy")
    return Summary(tuple(fill), fill_obj, "greedy")


def _solve_exact(
    lengths: Sequence[int],
    scores: Sequence[float],
    roles: Sequence[int],
    budget: int,
    needs: Sequence[int],
) -> Summary:
    n = len(lengths)
    seed = _cheapest_seed(lengths, roles, needs)
    if sum(lengths[i] for i in seed) > budget:
        return Summary(tuple(seed), _objective(scores, seed), "exact", violated=True)

    density_order = sorted(range(n), key=lambda i: (-(scores[i] / lengths[i]), i))

    def min_completion(available: Sequence[int], need: Sequence[int]) -> int | None:
        """Cheapest extra length to satisfy `need` from `available` items."""
        extra = 0
        for r, q in enumerate(need):
            if q <= 0:
                continue
            ls = sorted(lengths[i] for i in available if roles[i] == r)
            if len(ls) < q:
                return None
            extra += sum(ls[:q])
        return extra

    def frac_bound(items_by_density: Sequence[int], capacity: int) -> float:
        total = 0.0
        for i in items_by_density:
            if lengths[i] <= capacity:
                capacity -= lengths[i]
                total += scores[i]
            else:
                total += scores[i] * (capacity / lengths[i])
                break
        return total

    # Phase 1: find the optimal objective value. Explore items in density
    # order, include-first, seeding the incumbent with the greedy solution.
    best_obj = _objective(scores, seed)
    best_set = tuple(seed)
    greedy = _solve_greedy(lengths, scores, roles, budget, needs)
    if not greedy.violated and greedy.objective > best_obj:
        best_obj = greedy.objective
        best_set = greedy.selected

    def phase1(pos: int, total_len: int, chosen: list[int], need: list[int], cur: float):
        nonlocal best_obj, best_set
        rest = density_order[pos:]
        mc = min_completion(rest, need)
        if mc is None or total_len + mc > budget:
            return
        if pos == n:
            obj = _objective(scores, chosen)
            if obj > best_obj:
                best_obj = obj
                best_set = tuple(sorted(chosen))
            return
        if cur + frac_bound(rest, budget - total_len) <= best_obj - _PRUNE_TOLERANCE:
            return
        i = density_order[pos]
        if total_len + lengths[i] <= budget:
            r = roles[i]
            dec = 1 if need[r] > 0 else 0
            need[r] -= dec
            chosen.append(i)
            phase1(pos + 1, total_len + lengths[i], chosen, need, cur + scores[i])
            chosen.pop()
            need[r] += dec
        phase1(pos + 1, total_len, chosen, need, cur)

    phase1(0, 0, [], list(needs), 0.0)

    # Phase 2: retrieve the first selection in include-first index order
    # whose objective equals the optimum exactly. Index-order DFS with the
    # same pruning; partial sums accumulate in index order, so the
    # phase-1 optimum is reachable bitwise.
    suffix_by_density = [
        sorted(range(pos, n), key=lambda i: (-(scores[i] / lengths[i]), i))
        for pos in range(n + 1)
    ]

    def phase2(i: int, total_len: int, chosen: list[int], need: list[int], cur: float):
        rest = range(i, n)
        mc = min_completion(rest, need)
        if mc is None or total_len + mc > budget:
            return None
        if i == n:
            return tuple(chosen) if cur == best_obj else None
        if cur + frac_bound(suffix_by_density[i], budget - total_len) < best_obj - _PRUNE_TOLERANCE:
            return None
        if total_len + lengths[i] <= budget:
            r = roles[i]
            dec = 1 if need[r] > 0 else 0
            need[r] -= dec
            chosen.append(i)
            found = phase2(i + 1, total_len + lengths[i], chosen, need, cur + scores[i])
            chosen.pop()
            need[r] += dec
            if found is not None:
                return found
        return phase2(i + 1, total_len, chosen, need, cur)

    selected = phase2(0, 0, [], list(needs), 0.0)
    if selected is None:
        # float-pathological instance: fall back to the phase-1 optimum
        selected = best_set
    return Summary(selected, _objective(scores, selected), "exact")


def solve_budgeted_selection(
    lengths: Sequence[int],
    scores: Sequence[float],
    role_of: Sequence[RhetoricalRole],
    budget: int,
    quotas: Mapping[RhetoricalRole, int] | None = None,
) -> Summary:
    """Maximize total score under a length budget and per-role quotas.

    Quotas are clamped by availability before solving, so they are always
    satisfiable; only the budget can force a violated result.
    """
    if not (len(lengths) == len(scores) == len(role_of)):
        raise DimensionMismatchError(
            f"lengths/scores/roles disagree: {len(lengths)}/{len(scores)}/{len(role_of)}"
        )
    if not isinstance(budget, int) or budget < 1:
        raise ConfigError(f"budget must be a positive int, got {budget!r}")
    for length in lengths:
        if not isinstance(length, int) or length < 1:
            raise ConfigError(f"lengths must be positive ints, got {length!r}")
    quotas = quotas or {}
    for role, q in quotas.items():
        if not isinstance(role, RhetoricalRole):
            raise ConfigError(f"quota keys must be roles, got {role!r}")
        if not isinstance(q, int) or q < 0:
            raise ConfigError(f"quota for {role.value} must be a non-negative int")

    n = len(lengths)
    if n == 0:
        return Summary((), 0.0, "exact")
    roles_idx = [ROLE_INDEX[r] for r in role_of]
    needs = _clamped_needs(roles_idx, quotas, n)
    if n <= EXACT_SOLVER_LIMIT:
        return _solve_exact(lengths, scores, roles_idx, budget, needs)
    return _solve_greedy(lengths, scores, roles_idx, budget, needs)


def summarize(
    doc: Document, roles: Sequence[RhetoricalRole], spec: SummarySpec
) -> Summary:
    """Score sentences under `spec` and solve the budgeted selection."""
    scores = sentence_scores(doc, roles, spec)
    lengths = [len(s.tokens) for s in doc.sentences]
    return solve_budgeted_selection(lengths, scores, roles, spec.budget_words, spec.quotas)


def summary_view(doc: Document, summary: Summary) -> DocumentView:
    return DocumentView(doc, summary.selected)


# --- input selectors ----------------------------------------------------------

def select_facts(doc: Document, roles: Sequence[RhetoricalRole]) -> DocumentView:
    """Sentences tagged Fact, original order. May be empty."""
    if len(roles) != len(doc.sentences):
        raise ValueError("roles must cover every sentence")
    kept = tuple(i for i, r in enumerate(roles) if r is RhetoricalRole.FACT)
    return DocumentView(doc, kept)


def select_facts_rlc(doc: Document, roles: Sequence[RhetoricalRole]) -> DocumentView:
    """Sentences tagged Fact or RulingByLowerCourt, original order."""
    if len(roles) != len(doc.sentences):
        raise ValueError("roles must cover every sentence")
    wanted = (RhetoricalRole.FACT, RhetoricalRole.RULING_LOWER)
    kept = tuple(i for i, r in enumerate(roles) if r in wanted)
    return DocumentView(doc, kept)
