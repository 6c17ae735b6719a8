"""Exhaustive exact solvers: the ground truth every specialized algorithm
is validated against.

Deliberately the dumbest correct thing: enumerate candidate witnesses in
size-then-lexicographic order and let check_witness decide each one.  The
only cleverness allowed is cutting provably irrelevant degrees of freedom
(canonical bribery rewrites for column-local rules, a fixed pivot for the
symmetric partition question).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from . import profiles
from .errors import (
    InstanceTooLarge,
    NoRExtension,
    PreconditionViolated,
    WrongKind,
)
from .instances import (
    NO_VERDICT,
    AttackInstance,
    Solution,
    Verdict,
    check_witness,
)
from .profiles import Profile, SocialRule


@dataclass(frozen=True)
class SearchBudget:
    max_subset_size: int | None = None
    node_limit: int | None = None


DEFAULT_SEARCH = SearchBudget()


class _NodeCounter:
    def __init__(self, limit):
        self.limit = limit
        self.count = 0

    def tick(self):
        self.count += 1
        if self.limit is not None and self.count > self.limit:
            raise InstanceTooLarge("candidate count exceeded node limit %d" % self.limit)


def _subset_cap(search: SearchBudget, natural: int) -> int:
    if search.max_subset_size is None:
        return natural
    return min(natural, search.max_subset_size)


def solve_control_brute(instance: AttackInstance, search: SearchBudget = DEFAULT_SEARCH) -> Verdict:
    """Exact group-control solver by subset enumeration."""
    family = instance.family
    if family not in ("GCAI", "GCDI", "GCPI"):
        raise PreconditionViolated("control oracle handles GCAI/GCDI/GCPI, got %s" % family)
    n = instance.profile.n
    counter = _NodeCounter(search.node_limit)
    if family == "GCPI":
        make = Solution.partition
        if n == 0:
            counter.tick()
            witness = make(())
            if check_witness(instance, witness):
                return Verdict("YES", witness=witness)
            return NO_VERDICT
        # the partition question is symmetric in U vs N-U, so pin individual 0
        rest = range(1, n)
        for size in range(0, n):
            for body in itertools.combinations(rest, size):
                counter.tick()
                witness = make((0,) + body)
                if check_witness(instance, witness):
                    return Verdict("YES", witness=witness)
        return NO_VERDICT
    if instance.budget is None:
        raise PreconditionViolated("%s instance needs a budget" % family)
    if family == "GCAI":
        if instance.pool is None:
            raise PreconditionViolated("GCAI instance needs a pool")
        domain = sorted(frozenset(range(n)) - instance.pool)
        make = Solution.added
    else:
        domain = sorted(frozenset(range(n)) - instance.targets())
        make = Solution.deleted
    cap = _subset_cap(search, min(instance.budget, len(domain)))
    for size in range(0, cap + 1):
        for members in itertools.combinations(domain, size):
            counter.tick()
            witness = make(members)
            if check_witness(instance, witness):
                return Verdict("YES", witness=witness)
    return NO_VERDICT


def _closure_against(profile: Profile, seeds: frozenset, bribed: frozenset) -> int:
    """Grow seeds backwards along +1 rows of unbribed individuals.

    Any unbribed individual pointing a +1 edge at the grown set would drag
    it into a sequential-rule result the moment they qualify, so they must
    stay out as well.
    """
    bad = profiles.mask_of(seeds)
    while True:
        grown = bad
        for z in range(profile.n):
            if z in bribed or grown & (1 << z):
                continue
            if profile.row_pos[z] & bad:
                grown |= 1 << z
        if grown == bad:
            return bad
        bad = grown


def _sequential_rewrite(instance: AttackInstance, members) -> dict:
    """Best possible rewrite for csr/lsr bribery of the given set."""
    p = instance.profile
    if instance.objective == "constructive":
        bad = 0
    else:
        bad = _closure_against(p, instance.aminus, frozenset(members))
    rows = {}
    for a in members:
        rows[a] = [-1 if bad & (1 << b) else 1 for b in range(p.n)]
    return rows


def _column_local_rewrites(instance: AttackInstance, members):
    """Candidate rewrites for consent/ternary bribery of the given set.

    Non-target columns cannot affect the objective, so only the target
    columns and each bribed target's own diagonal are degrees of freedom;
    the diagonal is branched exhaustively.
    """
    p = instance.profile
    targets_plus = instance.aplus
    targets_minus = instance.aminus
    if instance.objective == "constructive":
        targets_minus = frozenset()
    elif instance.objective == "destructive":
        targets_plus = frozenset()
    branch_members = [a for a in members if a in targets_plus or a in targets_minus]
    choices = []
    for a in branch_members:
        order = (1, -1) if a in targets_plus else (-1, 1)
        if p.kind == "ternary":
            order = order + (0,)
        choices.append(order)
    for picks in itertools.product(*choices):
        diag = dict(zip(branch_members, picks))
        rows = {}
        for a in members:
            row = []
            for b in range(p.n):
                if b == a:
                    row.append(diag.get(a, -1))
                elif b in targets_plus:
                    row.append(1)
                else:
                    row.append(-1)
            rows[a] = row
        yield rows


def solve_bribery_brute(instance: AttackInstance, search: SearchBudget = DEFAULT_SEARCH) -> Verdict:
    """Exact group-bribery solver: enumerate bribed sets, rewrite canonically."""
    if instance.family != "GB":
        raise PreconditionViolated("bribery oracle handles GB, got %s" % instance.family)
    if instance.budget is None:
        raise PreconditionViolated("GB instance needs a budget")
    n = instance.profile.n
    counter = _NodeCounter(search.node_limit)
    sequential = instance.rule.variant in ("csr", "lsr")
    cap = _subset_cap(search, min(instance.budget, n))
    for size in range(0, cap + 1):
        for members in itertools.combinations(range(n), size):
            if instance.cost_of_agents(members) > instance.budget:
                continue
            if sequential and members:
                counter.tick()
                witness = Solution.bribed(_sequential_rewrite(instance, members))
                if check_witness(instance, witness):
                    return Verdict("YES", witness=witness)
                continue
            for rows in _column_local_rewrites(instance, members):
                counter.tick()
                witness = Solution.bribed(rows)
                if check_witness(instance, witness):
                    return Verdict("YES", witness=witness)
    return NO_VERDICT


def _pair_domain(instance: AttackInstance) -> list:
    n = instance.profile.n
    if instance.rule.variant in ("csr", "lsr"):
        return [(a, b) for a in range(n) for b in range(n)]
    # column-local rules: only incoming entries of targets matter
    cols = sorted(instance.targets())
    return [(b, a) for b in range(n) for a in cols]


def solve_microbribery_brute(instance: AttackInstance, search: SearchBudget = DEFAULT_SEARCH) -> Verdict:
    """Exact microbribery solver: enumerate entry sets and their new values."""
    if instance.family != "GMB":
        raise PreconditionViolated("microbribery oracle handles GMB, got %s" % instance.family)
    if instance.budget is None:
        raise PreconditionViolated("GMB instance needs a budget")
    p = instance.profile
    counter = _NodeCounter(search.node_limit)
    domain = _pair_domain(instance)
    cap = _subset_cap(search, min(instance.budget, len(domain)))
    for size in range(0, cap + 1):
        for pairs in itertools.combinations(domain, size):
            if instance.cost_of_pairs(pairs) > instance.budget:
                continue
            value_choices = []
            for a, b in pairs:
                value_choices.append(tuple(v for v in (1, -1) if v != p.entry(a, b)))
            for values in itertools.product(*value_choices):
                counter.tick()
                witness = Solution.flipped(dict(zip(pairs, values)))
                if check_witness(instance, witness):
                    return Verdict("YES", witness=witness)
    return NO_VERDICT


def _r_extension_rows(profile: Profile, r: int):
    """Per-row choices of which unknown entries become +1 in an r-extension."""
    per_row = []
    for a in range(profile.n):
        known_plus = profile.row_pos[a].bit_count()
        unknown = [b for b in range(profile.n) if profile.entry(a, b) == 0]
        need = r - known_plus
        if need < 0 or need > len(unknown):
            raise NoRExtension(
                "row %s has %d fixed qualifications and %d unknowns, cannot reach r=%d"
                % (profile.names[a], known_plus, len(unknown), r)
            )
        per_row.append((unknown, need))
    return per_row


def _count_r_extensions(per_row) -> int:
    total = 1
    for unknown, need in per_row:
        total *= math.comb(len(unknown), need)
    return total


def pqi_nqi_brute(profile: Profile, subset, rule: SocialRule, r: int | None = None,
                  search: SearchBudget = DEFAULT_SEARCH) -> tuple[bool, bool]:
    """Possible/necessary qualification of a whole set by extension enumeration."""
    if profile.kind == "ternary":
        raise WrongKind("qualification queries work on partial (or binary) profiles")
    wanted = frozenset(subset)
    for i in wanted:
        profile._check_index(i)
    unknown_cells = profile.unknown_cells()
    if r is not None:
        per_row = _r_extension_rows(profile, r)
        total = _count_r_extensions(per_row)
        if search.node_limit is not None and total > search.node_limit:
            raise InstanceTooLarge("%d r-extensions exceed node limit %d" % (total, search.node_limit))
        row_options = [list(itertools.combinations(unknown, need)) for unknown, need in per_row]
        assignments = itertools.product(*row_options)

        def fill(choice):
            updates = {}
            for a, plus_cells in enumerate(choice):
                unknown, _need = per_row[a]
                for b in unknown:
                    updates[(a, b)] = 1 if b in plus_cells else -1
            return updates
    else:
        if search.node_limit is not None and 2 ** len(unknown_cells) > search.node_limit:
            raise InstanceTooLarge(
                "2^%d extensions exceed node limit %d" % (len(unknown_cells), search.node_limit)
            )
        assignments = itertools.product((1, -1), repeat=len(unknown_cells))

        def fill(choice):
            return dict(zip(unknown_cells, choice))

    possible = False
    necessary = True
    grid_template = profile.rows()
    names = profile.names
    for choice in assignments:
        rows = [list(row) for row in grid_template]
        for (a, b), v in fill(choice).items():
            rows[a][b] = v
        extension = profiles.make_profile(rows, kind="binary", names=names)
        ok = wanted <= profiles.eval(rule, None, extension)
        possible = possible or ok
        necessary = necessary and ok
        if possible and not necessary:
            break
    return possible, necessary
