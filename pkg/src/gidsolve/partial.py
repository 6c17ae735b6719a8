"""Qualification queries on profiles with unknown entries.

A partial profile fixes some opinions and leaves the rest open.  A set S
is possibly qualified when some completion of the unknown entries puts
every member of S into the socially qualified set, and necessarily
qualified when every completion does.  The r-restricted variants
quantify only over completions whose rows each hold exactly r positive
entries.

The unrestricted queries reduce to evaluating one canonical completion:

* Consent rules are column-local, so members never compete for a cell.
  Off-diagonal unknowns in an S-column are resolved to +1 (possible) or
  -1 (necessary) outright.  For an unknown diagonal the quota bound
  s + t <= n + 2 makes the same choice dominant: in the optimistic
  completion, if +1 leaves the approval count k+ + u + 1 below s, then
  the -1 option faces k- + 1 = n - k+ - u >= n + 2 - s >= t
  disqualifiers and fails as well.  The pessimistic direction is the
  mirror image.
* Ternary rules carry no quota bound, so neither diagonal choice
  dominates; the builders instead pick the winning (or spoiling)
  diagonal value per member, which column-locality keeps exact.
* The consensual and liberal sequential rules are monotone in the set
  of positive entries, so the all-+1 completion maximises and the
  all--1 completion minimises the outcome over all completions.

The r-restricted solvers run on flow feasibility over the unknown cells
(possible) and a forced/dodgeable cell analysis (necessary);
`answer_query` routes to the right specialised routine and falls back
to extension enumeration where none applies.
"""

from __future__ import annotations

import collections
import itertools
from dataclasses import dataclass

from .errors import (
    IndexOutOfRange,
    InstanceTooLarge,
    InvalidR,
    NoRExtension,
    ParseError,
    PreconditionViolated,
    QuotaConstraintViolated,
    WrongKind,
)
from .oracle import DEFAULT_SEARCH, SearchBudget, pqi_nqi_brute
from .profiles import UNKNOWN, Profile, SocialRule, eval, make_profile

PQI = "PQI"
NQI = "NQI"


@dataclass(frozen=True)
class PartialQuery:
    """A qualification query: member set, mode, optional row quota r."""

    subset: frozenset[int]
    mode: str
    r: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "subset", frozenset(self.subset))
        if not self.subset:
            raise PreconditionViolated("query set must be nonempty")
        if self.mode not in (PQI, NQI):
            raise ParseError("query mode must be PQI or NQI, got %r" % (self.mode,))
        if self.r is not None and (not isinstance(self.r, int) or self.r < 1):
            raise InvalidR("r must be a positive integer, got %r" % (self.r,))


@dataclass(frozen=True)
class FlowNetwork:
    """Directed network with integer capacities and designated endpoints."""

    num_vertices: int
    source: int
    sink: int
    arcs: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple((u, v, c) for (u, v, c) in self.arcs))
        n = self.num_vertices
        if not 0 <= self.source < n:
            raise IndexOutOfRange("source %d out of range for %d vertices" % (self.source, n))
        if not 0 <= self.sink < n:
            raise IndexOutOfRange("sink %d out of range for %d vertices" % (self.sink, n))
        if self.source == self.sink:
            raise PreconditionViolated("source and sink must differ")
        for u, v, c in self.arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise IndexOutOfRange("arc (%d, %d) out of range for %d vertices" % (u, v, n))
            if c < 0:
                raise PreconditionViolated("arc capacity must be non-negative, got %d" % c)
            if v == self.source:
                raise PreconditionViolated("no arc may enter the source")
            if u == self.sink:
                raise PreconditionViolated("no arc may leave the sink")


def max_flow(net: FlowNetwork) -> tuple[int, tuple[tuple[int, int, int], ...]]:
    """Shortest-augmenting-path maximum flow with a matching minimum cut.

    Returns (value, cut) where cut lists the original arcs that cross
    from the residual-reachable side to the rest, in input order; their
    capacities sum to the flow value.  Arc order is fixed by the input,
    so repeated runs produce identical flows and cuts.
    """
    residual: dict[tuple[int, int], int] = {}
    adjacency: list[list[int]] = [[] for _ in range(net.num_vertices)]
    for u, v, c in net.arcs:
        if u == v:
            continue
        if (u, v) not in residual:
            residual[(u, v)] = 0
            adjacency[u].append(v)
        if (v, u) not in residual:
            residual[(v, u)] = 0
            adjacency[v].append(u)
        residual[(u, v)] += c
    value = 0
    while True:
        parent: dict[int, int | None] = {net.source: None}
        queue = collections.deque([net.source])
        while queue:
            u = queue.popleft()
            if u == net.sink:
                break
            for v in adjacency[u]:
                if v not in parent and residual[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if net.sink not in parent:
            break
        path = []
        v = net.sink
        while parent[v] is not None:
            u = parent[v]
            path.append((u, v))
            v = u
        bottleneck = min(residual[arc] for arc in path)
        for arc in path:
            u, v = arc
            residual[arc] -= bottleneck
            residual[(v, u)] += bottleneck
        value += bottleneck
    reachable = {net.source}
    queue = collections.deque([net.source])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in reachable and residual[(u, v)] > 0:
                reachable.add(v)
                queue.append(v)
    cut = tuple(
        (u, v, c)
        for (u, v, c) in net.arcs
        if u in reachable and v not in reachable and c > 0
    )
    return value, cut


def _check_query(profile: Profile, subset, rule: SocialRule) -> list[int]:
    """Shared guards; returns the sorted member list."""
    if profile.kind == "ternary":
        raise WrongKind("qualification queries work on partial (or binary) profiles")
    members = sorted(set(subset))
    for a in members:
        if not 0 <= a < profile.n:
            raise IndexOutOfRange("individual index %d out of range for n=%d" % (a, profile.n))
    if not members:
        raise PreconditionViolated("query set must be nonempty")
    if rule.variant == "consent" and rule.s + rule.t > profile.n + 2:
        raise QuotaConstraintViolated(
            "consent quotas s=%d t=%d violate s + t <= n + 2 for n=%d"
            % (rule.s, rule.t, profile.n)
        )
    return members


def optimistic_extension(profile: Profile, subset, rule: SocialRule) -> Profile:
    """Completion resolving every unknown in favour of the queried set."""
    members = _check_query(profile, subset, rule)
    n = profile.n
    rows = profile.rows()
    if rule.variant in ("csr", "lsr"):
        for row in rows:
            for a in range(n):
                if row[a] == UNKNOWN:
                    row[a] = 1
        return make_profile(rows, kind="binary", names=profile.names)
    member_set = set(members)
    for b in range(n):
        for a in range(n):
            if rows[b][a] == UNKNOWN:
                rows[b][a] = 1 if a in member_set else -1
    if rule.variant == "ternary":
        # no quota bound, so pick the winning diagonal value per member
        for a in members:
            if profile.entry(a, a) != UNKNOWN:
                continue
            quals_off = sum(1 for b in range(n) if b != a and rows[b][a] == 1)
            if quals_off + 1 >= rule.s:
                rows[a][a] = 1
            elif (n - 1 - quals_off) + 1 <= rule.t - 1:
                rows[a][a] = -1
            else:
                rows[a][a] = 1
    return make_profile(rows, kind="binary", names=profile.names)


def pessimistic_extension(profile: Profile, subset, rule: SocialRule) -> Profile:
    """Completion resolving every unknown against the queried set."""
    members = _check_query(profile, subset, rule)
    n = profile.n
    rows = profile.rows()
    for row in rows:
        for a in range(n):
            if row[a] == UNKNOWN:
                row[a] = -1
    if rule.variant == "ternary":
        for a in members:
            if profile.entry(a, a) != UNKNOWN:
                continue
            quals_off = sum(1 for b in range(n) if b != a and rows[b][a] == 1)
            if (n - 1 - quals_off) + 1 >= rule.t:
                rows[a][a] = -1
            elif quals_off + 1 < rule.s:
                rows[a][a] = 1
            else:
                rows[a][a] = -1
    return make_profile(rows, kind="binary", names=profile.names)


def _plain_query_guards(profile: Profile, query: PartialQuery, mode: str):
    if query.mode != mode:
        raise PreconditionViolated("expected a %s query, got %s" % (mode, query.mode))
    if query.r is not None:
        raise PreconditionViolated("r-restricted queries use the r_* solvers")


def pqi(profile: Profile, query: PartialQuery, rule: SocialRule) -> bool:
    """Possible qualification: some completion qualifies all of S."""
    _plain_query_guards(profile, query, PQI)
    ext = optimistic_extension(profile, query.subset, rule)
    return query.subset <= eval(rule, None, ext)


def nqi(profile: Profile, query: PartialQuery, rule: SocialRule) -> bool:
    """Necessary qualification: every completion qualifies all of S."""
    _plain_query_guards(profile, query, NQI)
    ext = pessimistic_extension(profile, query.subset, rule)
    return query.subset <= eval(rule, None, ext)


def _row_needs(profile: Profile, r: int) -> list[int]:
    """Per-row count of unknowns that must turn +1 to reach exactly r."""
    if not isinstance(r, int) or r < 1:
        raise InvalidR("r must be a positive integer, got %r" % (r,))
    needs = []
    for a in range(profile.n):
        plus = profile.row_pos[a].bit_count()
        unknown = profile.n - profile.row_known[a].bit_count()
        need = r - plus
        if need < 0 or need > unknown:
            raise NoRExtension(
                "row %s cannot reach exactly %d positive entries" % (profile.names[a], r)
            )
        needs.append(need)
    return needs


def _unknown_counts(profile: Profile) -> list[int]:
    return [profile.n - profile.row_known[a].bit_count() for a in range(profile.n)]


def _star_flow_value(profile: Profile, members: list[int], needs: list[int],
                     demands: dict[int, int]) -> bool:
    """Feasibility of routing row surpluses onto unknown S-column cells.

    Rows supply at most their remaining need, each unknown off-diagonal
    cell in an S-column carries one unit, and each member's column must
    absorb its demand.  Member diagonals are resolved by the callers
    before the network is built, so only off-diagonal cells carry arcs.
    """
    n = profile.n
    source = 0
    row_base = 1
    col_index = {a: row_base + n + i for i, a in enumerate(members)}
    sink = row_base + n + len(members)
    arcs = []
    for b in range(n):
        if needs[b] > 0:
            arcs.append((source, row_base + b, needs[b]))
    for b in range(n):
        for a in members:
            if b != a and profile.entry(b, a) == UNKNOWN:
                arcs.append((row_base + b, col_index[a], 1))
    for a in members:
        arcs.append((col_index[a], sink, demands[a]))
    total = sum(demands.values())
    if total == 0:
        return True
    value, _cut = max_flow(FlowNetwork(sink + 1, source, sink, tuple(arcs)))
    return value == total


def r_pqi_consent_flow(profile: Profile, subset, r: int, rule: SocialRule) -> bool:
    """Possible qualification under exactly-r rows, consent with t = 1.

    With t = 1 a negative diagonal is hopeless and surplus +1 entries
    never hurt, so the question is pure supply and demand: route each
    row's mandatory +1 count onto unknown cells of S-columns until every
    member's approval quota s is met.  Unknown diagonals are forced to
    +1 and consume one unit of their own row's need up front.
    """
    if rule.variant != "consent" or rule.t != 1 or rule.s < 2:
        raise PreconditionViolated("flow solver handles consent rules with t = 1 and s >= 2")
    members = _check_query(profile, subset, rule)
    needs = _row_needs(profile, r)
    forced_diags = set()
    for a in members:
        diag = profile.entry(a, a)
        if diag == -1:
            return False
        if diag == UNKNOWN:
            needs[a] -= 1
            if needs[a] < 0:
                return False
            forced_diags.add(a)
    demands = {}
    for a in members:
        quals = profile.col_pos[a].bit_count() + (1 if a in forced_diags else 0)
        demands[a] = max(0, rule.s - quals)
    return _star_flow_value(profile, members, needs, demands)


def r_pqi_general(profile: Profile, subset, r: int, rule: SocialRule,
                  branch_cap: int = 4096) -> bool:
    """Possible qualification under exactly-r rows, any consent rule.

    Branches over the unknown diagonals of queried members; per branch a
    member kept positive demands s approvals while a member kept
    negative demands enough +1 resolutions in its column to push the
    disqualifier count below t.  Each branch is a flow feasibility
    check; extra +1 units only ever help, so feasibility is exact.
    """
    if rule.variant != "consent":
        raise PreconditionViolated("the general r solver handles consent rules only")
    members = _check_query(profile, subset, rule)
    base_needs = _row_needs(profile, r)
    star_diags = [a for a in members if profile.entry(a, a) == UNKNOWN]
    if 2 ** len(star_diags) > branch_cap:
        raise InstanceTooLarge(
            "%d diagonal branches exceed cap %d" % (2 ** len(star_diags), branch_cap)
        )
    for choice in itertools.product((1, -1), repeat=len(star_diags)):
        resolved = dict(zip(star_diags, choice))
        needs = list(base_needs)
        demands = {}
        feasible = True
        for a in members:
            diag = profile.entry(a, a)
            value = resolved[a] if diag == UNKNOWN else diag
            if value == 1:
                if diag == UNKNOWN:
                    needs[a] -= 1
                    if needs[a] < 0:
                        feasible = False
                        break
                quals = profile.col_pos[a].bit_count() + (1 if diag == UNKNOWN else 0)
                demands[a] = max(0, rule.s - quals)
            else:
                fixed_disq = (profile.col_known[a] & ~profile.col_pos[a]).bit_count()
                if diag == UNKNOWN:
                    fixed_disq += 1
                unknown_col = profile.n - profile.col_known[a].bit_count()
                off_diag_stars = unknown_col - (1 if diag == UNKNOWN else 0)
                demands[a] = max(0, fixed_disq + off_diag_stars - (rule.t - 1))
        if not feasible:
            continue
        if _star_flow_value(profile, members, needs, demands):
            return True
    return False


def r_nqi(profile: Profile, subset, r: int, rule: SocialRule) -> bool:
    """Necessary qualification under exactly-r rows.

    Handles consent rules for any quotas, and the sequential rules for
    r = 1, where each row's single +1 collapses them: the liberal rule
    returns exactly the self-approvers and the consensual rule returns
    the lone unanimous column or nothing.  A cell is forced +1 when its
    row must spend every unknown, and dodgeable when the row has slack
    to make it -1; rows dodge independently, so the per-member worst
    case is exact.
    """
    if rule.variant == "ternary":
        raise PreconditionViolated("the r solver handles consent, csr and lsr rules")
    if rule.variant in ("csr", "lsr") and r != 1:
        raise PreconditionViolated("sequential rules are only solved directly for r = 1")
    members = _check_query(profile, subset, rule)
    needs = _row_needs(profile, r)
    unknowns = _unknown_counts(profile)

    def forced_plus(b: int, a: int) -> bool:
        cell = profile.entry(b, a)
        return cell == 1 or (cell == UNKNOWN and needs[b] == unknowns[b])

    def can_minus(b: int, a: int) -> bool:
        cell = profile.entry(b, a)
        return cell == -1 or (cell == UNKNOWN and needs[b] <= unknowns[b] - 1)

    if rule.variant == "lsr":
        return all(forced_plus(a, a) for a in members)
    if rule.variant == "csr":
        if len(members) != 1:
            return False
        target = members[0]
        return all(forced_plus(b, target) for b in range(profile.n))
    for a in members:
        min_quals_off = sum(1 for b in range(profile.n) if b != a and forced_plus(b, a))
        max_disq_off = sum(1 for b in range(profile.n) if b != a and can_minus(b, a))
        diag = profile.entry(a, a)
        loses_as_plus = 1 + min_quals_off < rule.s
        loses_as_minus = 1 + max_disq_off >= rule.t
        if diag == 1:
            if loses_as_plus:
                return False
        elif diag == -1:
            if loses_as_minus:
                return False
        else:
            if needs[a] <= unknowns[a] - 1 and loses_as_minus:
                return False
            if needs[a] >= 1 and loses_as_plus:
                return False
    return True


def answer_query(profile: Profile, query: PartialQuery, rule: SocialRule,
                 search: SearchBudget = DEFAULT_SEARCH) -> tuple[bool, str]:
    """Answer a qualification query, naming the solver that produced it."""
    if query.r is None:
        if query.mode == PQI:
            return pqi(profile, query, rule), "pqi"
        return nqi(profile, query, rule), "nqi"
    if query.mode == PQI and rule.variant == "consent":
        if rule.t == 1 and rule.s >= 2:
            return r_pqi_consent_flow(profile, query.subset, query.r, rule), "r_pqi_consent_flow"
        return r_pqi_general(profile, query.subset, query.r, rule), "r_pqi_general"
    if query.mode == NQI and rule.variant == "consent":
        return r_nqi(profile, query.subset, query.r, rule), "r_nqi"
    if query.mode == NQI and rule.variant in ("csr", "lsr") and query.r == 1:
        return r_nqi(profile, query.subset, query.r, rule), "r_nqi"
    possible, necessary = pqi_nqi_brute(profile, query.subset, rule, r=query.r, search=search)
    return (possible if query.mode == PQI else necessary), "brute"
