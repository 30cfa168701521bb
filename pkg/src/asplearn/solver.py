"""Stable-model search and weak-constraint optimization over ground programs.

The search assigns atoms in ascending id order, True branch first, with
constraint propagation (forced heads, choice bounds, support counts) used
purely for pruning.  Every total assignment that survives propagation is
verified with an explicit reduct-and-least-model stability check before it
is reported, so propagation only has to be sound, never complete.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Optional

from .grounder import GChoice, GConstraint, GNormal, GroundProgram, GWeak
from .syntax import Atom

UNKNOWN, TRUE, FALSE = 0, 1, 2


class Ordering(enum.Enum):
    LESS = "<"
    EQUAL = "="
    GREATER = ">"


@dataclass(frozen=True)
class CostVector:
    """Per-level sums of violated weak-constraint weights.

    Canonical form: (level, total) pairs sorted by level descending with
    zero totals dropped, so vector equality is cost equality.
    """

    entries: "tuple[tuple[int, int], ...]" = ()

    @staticmethod
    def from_dict(totals: "dict[int, int]") -> "CostVector":
        entries = tuple(
            (lvl, totals[lvl])
            for lvl in sorted(totals, reverse=True)
            if totals[lvl] != 0
        )
        return CostVector(entries)

    def as_dict(self) -> "dict[int, int]":
        return dict(self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        return " ".join("%d@%d" % (w, lvl) for lvl, w in self.entries)


def compare(a: CostVector, b: CostVector) -> Ordering:
    """Lexicographic comparison, most significant (highest) level first.
    LESS means `a` is preferred (costs less)."""
    da, db = a.as_dict(), b.as_dict()
    for lvl in sorted(set(da) | set(db), reverse=True):
        wa, wb = da.get(lvl, 0), db.get(lvl, 0)
        if wa < wb:
            return Ordering.LESS
        if wa > wb:
            return Ordering.GREATER
    return Ordering.EQUAL


def ordering_matches(verdict: Ordering, op: str) -> bool:
    if op == "<":
        return verdict is Ordering.LESS
    if op == ">":
        return verdict is Ordering.GREATER
    if op == "=":
        return verdict is Ordering.EQUAL
    if op == "!=":
        return verdict is not Ordering.EQUAL
    if op == "<=":
        return verdict is not Ordering.GREATER
    if op == ">=":
        return verdict is not Ordering.LESS
    raise ValueError("unknown ordering operator %r" % op)


# ---------------------------------------------------------------------------
# Stability check


def _body_satisfied(pos, neg, inside) -> bool:
    return all(p in inside for p in pos) and not any(n in inside for n in neg)


def _is_answer_set_ids(gp: GroundProgram, interp: "frozenset[int]") -> bool:
    definite: list = []  # (head, pos) rules of the reduct
    for rec in gp.rules:
        if isinstance(rec, GNormal):
            if _body_satisfied(rec.pos, rec.neg, interp) and rec.head not in interp:
                return False
            if not any(n in interp for n in rec.neg):
                definite.append((rec.head, rec.pos))
        elif isinstance(rec, GChoice):
            if _body_satisfied(rec.pos, rec.neg, interp):
                chosen = sum(1 for h in rec.heads if h in interp)
                if not (rec.lower <= chosen <= rec.upper):
                    return False
            if not any(n in interp for n in rec.neg):
                for h in rec.heads:
                    if h in interp:
                        definite.append((h, rec.pos))
        else:  # GConstraint
            if _body_satisfied(rec.pos, rec.neg, interp):
                return False
    return _least_model(definite, gp.atom_count) == interp


def _least_model(definite, n_atoms) -> "frozenset[int]":
    remaining = []
    waiting: dict[int, list[int]] = {}
    model = bytearray(n_atoms)
    queue = []
    for head, pos in definite:
        missing = len(pos)
        remaining.append(missing)
        if missing == 0:
            queue.append(head)
        else:
            idx = len(remaining) - 1
            for p in pos:
                waiting.setdefault(p, []).append(idx)
    heads = [h for h, _ in definite]
    qi = 0
    while qi < len(queue):
        a = queue[qi]
        qi += 1
        if model[a]:
            continue
        model[a] = 1
        for ridx in waiting.get(a, ()):
            remaining[ridx] -= 1
            if remaining[ridx] == 0:
                h = heads[ridx]
                if not model[h]:
                    queue.append(h)
    return frozenset(i for i in range(n_atoms) if model[i])


def is_answer_set(gp: GroundProgram, interp: "set[Atom]") -> bool:
    ids = set()
    for atom in interp:
        idx = gp.index.get(atom)
        if idx is None:
            return False  # an atom outside the program is never founded
        ids.add(idx)
    return _is_answer_set_ids(gp, frozenset(ids))


def cost_ids(gp: GroundProgram, interp: "frozenset[int]") -> CostVector:
    totals: dict[int, int] = {}
    for w in gp.weaks:
        if _body_satisfied(w.pos, w.neg, interp):
            totals[w.level] = totals.get(w.level, 0) + w.weight
    return CostVector.from_dict(totals)


def cost(gp: GroundProgram, interp: "set[Atom]") -> CostVector:
    ids = frozenset(gp.index[a] for a in interp if a in gp.index)
    return cost_ids(gp, ids)


# ---------------------------------------------------------------------------
# Search


class _Search:
    def __init__(self, gp: GroundProgram, assume_true=(), assume_false=()):
        self.gp = gp
        n = gp.atom_count
        self.n = n
        self.val = bytearray(n)
        self.trail: list[int] = []
        self.conflict = False

        rules = gp.rules
        self.kind: list[int] = []
        self.pos: list[tuple] = []
        self.neg: list[tuple] = []
        self.head: list[int] = []
        self.heads: list[tuple] = []
        self.lower: list[int] = []
        self.upper: list[int] = []
        self.ucount: list[int] = []
        self.fcount: list[int] = []
        self.h_true: list[int] = []
        self.h_unk: list[int] = []

        occ_pos: list[list[int]] = [[] for _ in range(n)]
        occ_neg: list[list[int]] = [[] for _ in range(n)]
        occ_nhead: list[list[int]] = [[] for _ in range(n)]
        occ_chead: list[list[int]] = [[] for _ in range(n)]
        supp = [0] * n

        for idx, rec in enumerate(rules):
            self.pos.append(rec.pos)
            self.neg.append(rec.neg)
            self.ucount.append(len(rec.pos) + len(rec.neg))
            self.fcount.append(0)
            for a in rec.pos:
                occ_pos[a].append(idx)
            for a in rec.neg:
                occ_neg[a].append(idx)
            if isinstance(rec, GNormal):
                self.kind.append(0)
                self.head.append(rec.head)
                self.heads.append(())
                self.lower.append(0)
                self.upper.append(0)
                self.h_true.append(0)
                self.h_unk.append(0)
                occ_nhead[rec.head].append(idx)
                supp[rec.head] += 1
            elif isinstance(rec, GChoice):
                self.kind.append(1)
                self.head.append(-1)
                self.heads.append(rec.heads)
                self.lower.append(rec.lower)
                self.upper.append(rec.upper)
                self.h_true.append(0)
                self.h_unk.append(len(rec.heads))
                for h in rec.heads:
                    occ_chead[h].append(idx)
                    supp[h] += 1
            else:
                self.kind.append(2)
                self.head.append(-1)
                self.heads.append(())
                self.lower.append(0)
                self.upper.append(0)
                self.h_true.append(0)
                self.h_unk.append(0)

        self.occ_pos = occ_pos
        self.occ_neg = occ_neg
        self.occ_nhead = occ_nhead
        self.occ_chead = occ_chead
        self.supp = supp

        # Weak-constraint bookkeeping for branch-and-bound.
        self.w_pos = [w.pos for w in gp.weaks]
        self.w_neg = [w.neg for w in gp.weaks]
        self.w_weight = [w.weight for w in gp.weaks]
        self.w_level = [w.level for w in gp.weaks]
        self.w_ucount = [len(w.pos) + len(w.neg) for w in gp.weaks]
        self.w_fcount = [0] * len(gp.weaks)
        self.w_occ_pos: list[list[int]] = [[] for _ in range(n)]
        self.w_occ_neg: list[list[int]] = [[] for _ in range(n)]
        for widx, w in enumerate(gp.weaks):
            for a in w.pos:
                self.w_occ_pos[a].append(widx)
            for a in w.neg:
                self.w_occ_neg[a].append(widx)
        self.levels = sorted({w.level for w in gp.weaks}, reverse=True)
        self.certain = {lvl: 0 for lvl in self.levels}
        self.pend_neg = {lvl: 0 for lvl in self.levels}
        for w in gp.weaks:
            if w.weight < 0:
                self.pend_neg[w.level] += w.weight
        self.incumbent: Optional[CostVector] = None

        self.assume_true = tuple(assume_true)
        self.assume_false = tuple(assume_false)

    # -- assignment and propagation -----------------------------------------

    def _assign(self, a: int, v: int, queue: list) -> bool:
        cur = self.val[a]
        if cur != UNKNOWN:
            return cur == v
        self.val[a] = v
        self.trail.append(a)
        # Every counter update below runs even after a conflict is found so
        # that _undo_to, which reverses all of them, stays symmetric.
        ok = True

        if v == TRUE:
            for r in self.occ_pos[a]:
                self.ucount[r] -= 1
                if self.ucount[r] == 0 and self.fcount[r] == 0:
                    ok = self._on_body_true(r, queue) and ok
            for r in self.occ_neg[a]:
                self.ucount[r] -= 1
                self.fcount[r] += 1
                if self.fcount[r] == 1:
                    self._on_body_falsified(r, queue)
            for w in self.w_occ_pos[a]:
                self.w_ucount[w] -= 1
                if self.w_ucount[w] == 0 and self.w_fcount[w] == 0:
                    self._on_weak_decided(w, violated=True)
            for w in self.w_occ_neg[a]:
                self.w_ucount[w] -= 1
                self.w_fcount[w] += 1
                if self.w_fcount[w] == 1:
                    self._on_weak_decided(w, violated=False)
            for r in self.occ_chead[a]:
                self.h_unk[r] -= 1
                self.h_true[r] += 1
                ok = self._check_choice(r, queue) and ok
        else:
            for r in self.occ_pos[a]:
                self.ucount[r] -= 1
                self.fcount[r] += 1
                if self.fcount[r] == 1:
                    self._on_body_falsified(r, queue)
            for r in self.occ_neg[a]:
                self.ucount[r] -= 1
                if self.ucount[r] == 0 and self.fcount[r] == 0:
                    ok = self._on_body_true(r, queue) and ok
            for w in self.w_occ_pos[a]:
                self.w_ucount[w] -= 1
                self.w_fcount[w] += 1
                if self.w_fcount[w] == 1:
                    self._on_weak_decided(w, violated=False)
            for w in self.w_occ_neg[a]:
                self.w_ucount[w] -= 1
                if self.w_ucount[w] == 0 and self.w_fcount[w] == 0:
                    self._on_weak_decided(w, violated=True)
            for r in self.occ_nhead[a]:
                if self.ucount[r] == 0 and self.fcount[r] == 0:
                    ok = False  # satisfied body forces a false head
            for r in self.occ_chead[a]:
                self.h_unk[r] -= 1
                ok = self._check_choice(r, queue) and ok
        return ok

    def _on_body_true(self, r: int, queue: list) -> bool:
        k = self.kind[r]
        if k == 0:
            queue.append((self.head[r], TRUE))
            return True
        if k == 2:
            return False
        return self._check_choice(r, queue)

    def _check_choice(self, r: int, queue: list) -> bool:
        if self.kind[r] != 1 or self.ucount[r] != 0 or self.fcount[r] != 0:
            return True
        t, u = self.h_true[r], self.h_unk[r]
        lo, hi = self.lower[r], self.upper[r]
        if t > hi or t + u < lo:
            return False
        if u and t == hi:
            for h in self.heads[r]:
                if self.val[h] == UNKNOWN:
                    queue.append((h, FALSE))
        elif u and t + u == lo:
            for h in self.heads[r]:
                if self.val[h] == UNKNOWN:
                    queue.append((h, TRUE))
        return True

    def _on_body_falsified(self, r: int, queue: list):
        k = self.kind[r]
        if k == 0:
            h = self.head[r]
            self.supp[h] -= 1
            if self.supp[h] == 0:
                queue.append((h, FALSE))
        elif k == 1:
            for h in self.heads[r]:
                self.supp[h] -= 1
                if self.supp[h] == 0:
                    queue.append((h, FALSE))

    def _on_weak_decided(self, w: int, violated: bool):
        wt = self.w_weight[w]
        lvl = self.w_level[w]
        if violated:
            self.certain[lvl] += wt
        if wt < 0:
            self.pend_neg[lvl] -= wt

    def _propagate(self, queue: list) -> bool:
        qi = 0
        while qi < len(queue):
            a, v = queue[qi]
            qi += 1
            if not self._assign(a, v, queue):
                return False
        return True

    def _undo_to(self, mark: int):
        while len(self.trail) > mark:
            a = self.trail.pop()
            v = self.val[a]
            self.val[a] = UNKNOWN
            if v == TRUE:
                for r in self.occ_pos[a]:
                    self.ucount[r] += 1
                for r in self.occ_neg[a]:
                    self.fcount[r] -= 1
                    self.ucount[r] += 1
                    if self.fcount[r] == 0:
                        self._undo_falsified(r)
                for w in self.w_occ_pos[a]:
                    if self.w_ucount[w] == 0 and self.w_fcount[w] == 0:
                        self._undo_weak(w, violated=True)
                    self.w_ucount[w] += 1
                for w in self.w_occ_neg[a]:
                    self.w_fcount[w] -= 1
                    self.w_ucount[w] += 1
                    if self.w_fcount[w] == 0:
                        self._undo_weak(w, violated=False)
                for r in self.occ_chead[a]:
                    self.h_unk[r] += 1
                    self.h_true[r] -= 1
            else:
                for r in self.occ_pos[a]:
                    self.fcount[r] -= 1
                    self.ucount[r] += 1
                    if self.fcount[r] == 0:
                        self._undo_falsified(r)
                for r in self.occ_neg[a]:
                    self.ucount[r] += 1
                for w in self.w_occ_pos[a]:
                    self.w_fcount[w] -= 1
                    self.w_ucount[w] += 1
                    if self.w_fcount[w] == 0:
                        self._undo_weak(w, violated=False)
                for w in self.w_occ_neg[a]:
                    if self.w_ucount[w] == 0 and self.w_fcount[w] == 0:
                        self._undo_weak(w, violated=True)
                    self.w_ucount[w] += 1
                for r in self.occ_chead[a]:
                    self.h_unk[r] += 1

    def _undo_falsified(self, r: int):
        k = self.kind[r]
        if k == 0:
            self.supp[self.head[r]] += 1
        elif k == 1:
            for h in self.heads[r]:
                self.supp[h] += 1

    def _undo_weak(self, w: int, violated: bool):
        wt = self.w_weight[w]
        lvl = self.w_level[w]
        if violated:
            self.certain[lvl] -= wt
        if wt < 0:
            self.pend_neg[lvl] += wt

    def _lower_bound(self) -> CostVector:
        return CostVector.from_dict(
            {lvl: self.certain[lvl] + self.pend_neg[lvl] for lvl in self.levels}
        )

    def _bound_exceeded(self) -> bool:
        if self.incumbent is None or not self.levels:
            return False
        return compare(self._lower_bound(), self.incumbent) is Ordering.GREATER

    # -- enumeration ---------------------------------------------------------

    def models(self) -> Iterator["frozenset[int]"]:
        queue: list = []
        for r in range(len(self.kind)):
            if self.ucount[r] == 0 and self.fcount[r] == 0:
                if not self._on_body_true(r, queue):
                    return
            if not self._check_choice(r, queue):
                return
        for a in range(self.n):
            if self.supp[a] == 0:
                queue.append((a, FALSE))
        for a in self.assume_true:
            queue.append((a, TRUE))
        for a in self.assume_false:
            queue.append((a, FALSE))
        for w in range(len(self.w_pos)):
            if self.w_ucount[w] == 0 and self.w_fcount[w] == 0:
                self._on_weak_decided(w, violated=True)
        if not self._propagate(queue):
            return

        decisions: list = []  # [atom, phase, trail_mark]
        cursor = 0

        def next_unknown(start: int) -> int:
            i = start
            val = self.val
            n = self.n
            while i < n and val[i] != UNKNOWN:
                i += 1
            return i

        while True:
            if not self._bound_exceeded():
                cursor = next_unknown(0 if not decisions else cursor)
                if cursor >= self.n:
                    interp = frozenset(i for i in range(self.n) if self.val[i] == TRUE)
                    if _is_answer_set_ids(self.gp, interp):
                        yield interp
                else:
                    mark = len(self.trail)
                    decisions.append([cursor, 0, mark])
                    if self._propagate([(cursor, TRUE)]):
                        continue
                    self._undo_to(mark)
                    decisions[-1][1] = 1
                    if self._propagate([(cursor, FALSE)]):
                        continue
                    self._undo_to(mark)
                    decisions.pop()
            # Backtrack to the most recent decision with an untried branch.
            progressed = False
            while decisions:
                atom, phase, mark = decisions[-1]
                self._undo_to(mark)
                if phase == 0:
                    decisions[-1][1] = 1
                    if self._propagate([(atom, FALSE)]):
                        cursor = atom
                        progressed = True
                        break
                    self._undo_to(mark)
                decisions.pop()
            if not progressed:
                return


def iter_answer_sets(
    gp: GroundProgram, assume_true=(), assume_false=()
) -> Iterator["frozenset[int]"]:
    """Yield answer sets (as frozensets of atom ids) in deterministic order."""
    yield from _Search(gp, assume_true, assume_false).models()


def answer_sets(gp: GroundProgram, limit: Optional[int] = None) -> "list[set[Atom]]":
    out = []
    for ids in iter_answer_sets(gp):
        out.append({gp.atoms[i] for i in ids})
        if limit is not None and len(out) >= limit:
            break
    return out


def optimal_answer_sets(gp: GroundProgram):
    """All answer sets of minimum cost, with that cost; ([], None) if there
    are no answer sets.  Search prunes branches whose cost lower bound
    already exceeds the best cost found."""
    search = _Search(gp)
    best: Optional[CostVector] = None
    models: list = []
    for ids in search.models():
        c = cost_ids(gp, ids)
        if best is None:
            best, models = c, [ids]
        else:
            verdict = compare(c, best)
            if verdict is Ordering.LESS:
                best, models = c, [ids]
            elif verdict is Ordering.EQUAL:
                models.append(ids)
        search.incumbent = best
    return [{gp.atoms[i] for i in ids} for ids in models], best


def model_to_text(interp: "set[Atom]") -> str:
    return " ".join(sorted(str(a) for a in interp))
