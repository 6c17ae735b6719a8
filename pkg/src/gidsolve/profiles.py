"""Qualification profiles, social rules, and rule evaluation.

A profile stores who considers whom qualified.  Rows are evaluators and
columns are evaluated individuals: entry(a, b) is the opinion of a about b.
Three profile kinds share one representation: binary (+1/-1 everywhere),
ternary (+1/-1/star on any entry), and partial (+1/-1/unset).  Each row is
kept as a pair of bitmasks (positive mask, known mask); star and unset are
both "known bit clear", told apart by the profile kind.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    IndexOutOfRange,
    ParseError,
    PreconditionViolated,
    QuotaConstraintViolated,
    RuleNotApplicable,
)

PLUS = 1
MINUS = -1
UNKNOWN = 0

KINDS = ("binary", "ternary", "partial")

CELL_CHARS = {PLUS: "+", MINUS: "-"}


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(indices) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def bits(mask: int):
    """Yield set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def default_names(n: int) -> tuple[str, ...]:
    return tuple("a%d" % (i + 1) for i in range(n))


@dataclass(frozen=True)
class Profile:
    n: int
    kind: str
    names: tuple[str, ...]
    row_pos: tuple[int, ...]
    row_known: tuple[int, ...]
    # derived column/diagonal views, filled in by __post_init__
    col_pos: tuple[int, ...] = field(init=False, compare=False, repr=False)
    col_known: tuple[int, ...] = field(init=False, compare=False, repr=False)
    diag_pos: int = field(init=False, compare=False, repr=False)
    diag_known: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        n = self.n
        cpos = [0] * n
        cknown = [0] * n
        dpos = 0
        dknown = 0
        for a in range(n):
            rp = self.row_pos[a]
            rk = self.row_known[a]
            for b in bits(rp):
                cpos[b] |= 1 << a
            for b in bits(rk):
                cknown[b] |= 1 << a
            bit = 1 << a
            if rp & bit:
                dpos |= bit
            if rk & bit:
                dknown |= bit
        object.__setattr__(self, "col_pos", tuple(cpos))
        object.__setattr__(self, "col_known", tuple(cknown))
        object.__setattr__(self, "diag_pos", dpos)
        object.__setattr__(self, "diag_known", dknown)

    def entry(self, a: int, b: int) -> int:
        """Return phi(a, b): +1, -1, or 0 for star/unset."""
        self._check_index(a)
        self._check_index(b)
        bit = 1 << b
        if not self.row_known[a] & bit:
            return UNKNOWN
        return PLUS if self.row_pos[a] & bit else MINUS

    def row(self, a: int) -> list[int]:
        self._check_index(a)
        rp = self.row_pos[a]
        rk = self.row_known[a]
        out = []
        for b in range(self.n):
            bit = 1 << b
            if not rk & bit:
                out.append(UNKNOWN)
            else:
                out.append(PLUS if rp & bit else MINUS)
        return out

    def rows(self) -> list[list[int]]:
        return [self.row(a) for a in range(self.n)]

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ParseError("unknown individual name: %s" % name) from None

    def unknown_cells(self) -> list[tuple[int, int]]:
        """All (a, b) positions whose entry is star/unset, row-major order."""
        out = []
        for a in range(self.n):
            missing = full_mask(self.n) & ~self.row_known[a]
            for b in bits(missing):
                out.append((a, b))
        return out

    def replace_rows(self, new_rows: dict[int, list[int]]) -> "Profile":
        """Return a copy with whole rows rewritten; kind is unchanged."""
        rows = self.rows()
        for a, values in new_rows.items():
            self._check_index(a)
            if len(values) != self.n:
                raise IndexOutOfRange("replacement row has %d cells, want %d" % (len(values), self.n))
            rows[a] = list(values)
        return make_profile(rows, kind=self.kind, names=self.names)

    def with_entries(self, updates: dict[tuple[int, int], int]) -> "Profile":
        """Return a copy with individual cells rewritten; kind is unchanged."""
        rows = self.rows()
        for (a, b), value in updates.items():
            self._check_index(a)
            self._check_index(b)
            rows[a][b] = value
        return make_profile(rows, kind=self.kind, names=self.names)

    def _check_index(self, i: int):
        if not 0 <= i < self.n:
            raise IndexOutOfRange("individual index %d out of range for n=%d" % (i, self.n))


def make_profile(rows, kind: str = "binary", names=None) -> Profile:
    """Build a Profile from a square grid of +1/-1/0 cell values."""
    if kind not in KINDS:
        raise ParseError("unknown profile kind: %s" % kind)
    rows = [list(r) for r in rows]
    n = len(rows)
    if names is None:
        names = default_names(n)
    names = tuple(names)
    if len(names) != n:
        raise ParseError("profile has %d rows but %d names" % (n, len(names)))
    if len(set(names)) != n:
        raise ParseError("duplicate individual names")
    row_pos = []
    row_known = []
    for a, r in enumerate(rows):
        if len(r) != n:
            raise ParseError("row %d has %d cells, want %d" % (a, len(r), n))
        rp = 0
        rk = 0
        for b, v in enumerate(r):
            if v == PLUS:
                rp |= 1 << b
                rk |= 1 << b
            elif v == MINUS:
                rk |= 1 << b
            elif v == UNKNOWN:
                if kind == "binary":
                    raise ParseError("binary profile cannot hold a star/unset cell")
            else:
                raise ParseError("bad cell value %r at (%d, %d)" % (v, a, b))
        row_pos.append(rp)
        row_known.append(rk)
    return Profile(n=n, kind=kind, names=names, row_pos=tuple(row_pos), row_known=tuple(row_known))


@dataclass(frozen=True)
class SocialRule:
    """Rule selector: consent(s,t), csr, lsr, or ternary(s,s',t).

    For the ternary variant s_prime=None selects the majority quota
    ceil((n+1)/2), resolved against the profile size at evaluation time.
    """

    variant: str
    s: int | None = None
    t: int | None = None
    s_prime: int | None = None

    @staticmethod
    def consent(s: int, t: int) -> "SocialRule":
        _check_quota("s", s)
        _check_quota("t", t)
        return SocialRule("consent", s=s, t=t)

    @staticmethod
    def csr() -> "SocialRule":
        return SocialRule("csr")

    @staticmethod
    def lsr() -> "SocialRule":
        return SocialRule("lsr")

    @staticmethod
    def ternary(s: int, s_prime: int | None, t: int) -> "SocialRule":
        _check_quota("s", s)
        _check_quota("t", t)
        if s_prime is not None:
            _check_quota("s'", s_prime)
        return SocialRule("ternary", s=s, t=t, s_prime=s_prime)

    def majority_quota(self, n: int) -> int:
        # ceil((n + 1) / 2)
        return (n + 2) // 2

    def effective_s_prime(self, n: int) -> int:
        if self.s_prime is None:
            return self.majority_quota(n)
        return self.s_prime

    def describe(self) -> str:
        if self.variant == "consent":
            return "consent %d %d" % (self.s, self.t)
        if self.variant == "ternary":
            mid = "*" if self.s_prime is None else str(self.s_prime)
            return "ternary %d %s %d" % (self.s, mid, self.t)
        return self.variant


def _check_quota(label: str, value):
    if not isinstance(value, int) or value < 1:
        raise ParseError("quota %s must be a positive integer, got %r" % (label, value))


def parse_rule_tokens(tokens: list[str]) -> SocialRule:
    """Parse a rule from tokens like ['consent','2','1'] or ['ternary','2','*','2']."""
    if not tokens:
        raise ParseError("empty rule")
    head = tokens[0]
    if head == "csr" or head == "lsr":
        if len(tokens) != 1:
            raise ParseError("rule %s takes no quotas" % head)
        return SocialRule.csr() if head == "csr" else SocialRule.lsr()
    if head == "consent":
        if len(tokens) != 3:
            raise ParseError("rule consent takes two quotas")
        return SocialRule.consent(_parse_int(tokens[1]), _parse_int(tokens[2]))
    if head == "ternary":
        if len(tokens) != 4:
            raise ParseError("rule ternary takes three quotas")
        mid = None if tokens[2] == "*" else _parse_int(tokens[2])
        return SocialRule.ternary(_parse_int(tokens[1]), mid, _parse_int(tokens[3]))
    raise ParseError("unknown rule: %s" % head)


def _parse_int(token: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError("bad integer: %s" % token) from None


@dataclass(frozen=True)
class EvalTrace:
    """CSR/LSR round sets K0, K1, ..., K_final; the fixed point is stored once."""

    rounds: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class Digraph:
    n: int
    names: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]


def ensure_applicable(rule: SocialRule, profile: Profile):
    """Check rule/profile kind compatibility and the consent quota bound."""
    if rule.variant == "ternary":
        if profile.kind not in ("binary", "ternary"):
            raise RuleNotApplicable("ternary rule needs a binary or ternary profile, got %s" % profile.kind)
        return
    if profile.kind != "binary":
        raise RuleNotApplicable("%s rule needs a binary profile, got %s" % (rule.variant, profile.kind))
    if rule.variant == "consent" and rule.s + rule.t > profile.n + 2:
        raise QuotaConstraintViolated(
            "consent quotas s=%d t=%d violate s + t <= n + 2 for n=%d" % (rule.s, rule.t, profile.n)
        )


def subset_mask(subset, profile: Profile) -> int:
    """Convert an iterable of indices (or None meaning all of N) to a mask."""
    if subset is None:
        return full_mask(profile.n)
    mask = 0
    for i in subset:
        if not 0 <= i < profile.n:
            raise IndexOutOfRange("individual index %d out of range for n=%d" % (i, profile.n))
        mask |= 1 << i
    return mask


def eval_mask(rule: SocialRule, t_mask: int, profile: Profile) -> int:
    """Mask-level evaluation core; assumes rule applicability was checked."""
    if rule.variant == "consent":
        return _consent_mask(rule.s, rule.t, t_mask, profile)
    if rule.variant == "ternary":
        return _ternary_mask(rule, t_mask, profile)
    return _sequential_rounds(rule.variant, t_mask, profile)[-1]


def _consent_mask(s: int, t: int, t_mask: int, profile: Profile) -> int:
    result = 0
    for a in bits(t_mask):
        quals = (profile.col_pos[a] & t_mask).bit_count()
        if profile.diag_pos & (1 << a):
            if quals >= s:
                result |= 1 << a
        else:
            disq = ((profile.col_known[a] & ~profile.col_pos[a]) & t_mask).bit_count()
            if disq < t:
                result |= 1 << a
    return result


def _ternary_mask(rule: SocialRule, t_mask: int, profile: Profile) -> int:
    s_prime = rule.effective_s_prime(profile.n)
    result = 0
    for a in bits(t_mask):
        bit = 1 << a
        quals = (profile.col_pos[a] & t_mask).bit_count()
        if not profile.diag_known & bit:
            # indifferent about themselves: plain quota over qualifiers in T
            if quals >= s_prime:
                result |= bit
        elif profile.diag_pos & bit:
            if quals >= rule.s:
                result |= bit
        else:
            disq = ((profile.col_known[a] & ~profile.col_pos[a]) & t_mask).bit_count()
            if disq < rule.t:
                result |= bit
    return result


def _sequential_rounds(variant: str, t_mask: int, profile: Profile) -> list[int]:
    if variant == "csr":
        k = 0
        for a in bits(t_mask):
            if profile.col_pos[a] & t_mask == t_mask:
                k |= 1 << a
    else:
        k = t_mask & profile.diag_pos
    rounds = [k]
    while True:
        grown = k
        for a in bits(t_mask & ~k):
            if profile.col_pos[a] & k:
                grown |= 1 << a
        if grown == k:
            return rounds
        rounds.append(grown)
        k = grown


def eval(rule: SocialRule, subset, profile: Profile, want_trace: bool = False):
    """Evaluate a social rule on subset T of the profile.

    Returns the socially qualified set as a frozenset of indices; with
    want_trace=True (csr/lsr only) returns (set, EvalTrace).
    """
    ensure_applicable(rule, profile)
    t_mask = subset_mask(subset, profile)
    if rule.variant in ("csr", "lsr"):
        rounds = _sequential_rounds(rule.variant, t_mask, profile)
        result = frozenset(bits(rounds[-1]))
        if want_trace:
            return result, EvalTrace(tuple(frozenset(bits(m)) for m in rounds))
        return result
    if want_trace:
        raise PreconditionViolated("only csr and lsr produce an evaluation trace")
    return frozenset(bits(eval_mask(rule, t_mask, profile)))


def negate(profile: Profile) -> Profile:
    """Flip every entry sign; defined for binary profiles only."""
    if profile.kind != "binary":
        raise RuleNotApplicable("negate is defined for binary profiles only")
    flipped = tuple(known & ~pos for pos, known in zip(profile.row_pos, profile.row_known))
    return Profile(
        n=profile.n, kind="binary", names=profile.names, row_pos=flipped, row_known=profile.row_known
    )


def qualification_graph(profile: Profile) -> Digraph:
    """Directed graph with an edge (a, b) for every +1 entry; loops allowed."""
    if profile.kind != "binary":
        raise RuleNotApplicable("qualification graph is defined for binary profiles only")
    edges = []
    for a in range(profile.n):
        for b in bits(profile.row_pos[a]):
            edges.append((a, b))
    return Digraph(n=profile.n, names=profile.names, edges=tuple(edges))


CHAR_CELLS = {
    "+": PLUS,
    "-": MINUS,
}


def parse_profile(text: str) -> Profile:
    """Parse the line-based v1 profile format.

    Cell characters: '+' and '-' everywhere, '*' for star (ternary only),
    '?' for an unset cell (partial only).
    """
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines or lines[0] != "gid v1":
        raise ParseError("profile must start with 'gid v1'")
    if len(lines) < 3:
        raise ParseError("profile is missing kind/n headers")
    kind = _header(lines[1], "kind")
    if kind not in KINDS:
        raise ParseError("unknown profile kind: %s" % kind)
    n = _parse_int(_header(lines[2], "n"))
    if n < 0:
        raise ParseError("n must be non-negative")
    row_lines = lines[3:]
    if len(row_lines) != n:
        raise ParseError("expected %d row lines, got %d" % (n, len(row_lines)))
    names = []
    grid = []
    for line in row_lines:
        parts = line.split()
        if len(parts) != n + 2 or parts[0] != "row":
            raise ParseError("bad row line: %s" % line)
        names.append(parts[1])
        cells = []
        for ch in parts[2:]:
            if ch in CHAR_CELLS:
                cells.append(CHAR_CELLS[ch])
            elif ch == "*":
                if kind != "ternary":
                    raise ParseError("'*' cell is only valid in a ternary profile")
                cells.append(UNKNOWN)
            elif ch == "?":
                if kind != "partial":
                    raise ParseError("'?' cell is only valid in a partial profile")
                cells.append(UNKNOWN)
            else:
                raise ParseError("bad cell character: %s" % ch)
        grid.append(cells)
    return make_profile(grid, kind=kind, names=names)


def format_profile(profile: Profile) -> str:
    unknown_char = "*" if profile.kind == "ternary" else "?"
    out = ["gid v1", "kind %s" % profile.kind, "n %d" % profile.n]
    for a in range(profile.n):
        cells = []
        for v in profile.row(a):
            cells.append(CELL_CHARS[v] if v != UNKNOWN else unknown_char)
        out.append("row %s %s" % (profile.names[a], " ".join(cells)))
    return "\n".join(out) + "\n"


def _header(line: str, key: str) -> str:
    parts = line.split(None, 1)
    if len(parts) != 2 or parts[0] != key:
        raise ParseError("expected '%s <value>' header, got: %s" % (key, line))
    return parts[1].strip()


def names_of(profile: Profile, indices) -> list[str]:
    return [profile.names[i] for i in sorted(indices)]


def format_individual_set(profile: Profile, indices) -> str:
    members = names_of(profile, indices)
    return "{%s}" % ",".join(members)
