"""Pure-Python WalkSAT-SKC kernel.

Mirrors ``_core.pyx`` step for step, including the order of random draws,
so both backends return identical results for the same seed.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV53 = 1.0 / 9007199254740992.0


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def unit(self) -> float:
        return (self.next() >> 11) * _INV53

    def below(self, n: int) -> int:
        return int(self.unit() * n)


def run(lits, cstart, occ, ostart, num_vars, w, max_flips, seed,
        trace=None, check_every=0):
    """One WalkSAT-SKC run on a packed formula.

    Returns ``(flips, assignment)`` with ``flips = -1`` on failure.
    ``trace``, if a list, receives ``(clause, var)`` per flip;
    ``check_every > 0`` recomputes clause counts from scratch that often
    and raises ``AssertionError`` on drift.
    """
    rng = SplitMix64(seed)
    num_clauses = len(cstart) - 1
    assign = [rng.next() >> 63 for _ in range(num_vars)]

    def lit_true(lit):
        return assign[lit - 1] == 1 if lit > 0 else assign[-lit - 1] == 0

    numtrue = [0] * num_clauses
    unsat = []
    where = [-1] * num_clauses
    for c in range(num_clauses):
        t = 0
        for j in range(cstart[c], cstart[c + 1]):
            if lit_true(lits[j]):
                t += 1
        numtrue[c] = t
        if t == 0:
            where[c] = len(unsat)
            unsat.append(c)

    flips = 0
    breaks = []
    while True:
        if not unsat:
            return flips, assign
        if flips >= max_flips:
            return -1, assign
        ci = unsat[rng.below(len(unsat))]
        start, end = cstart[ci], cstart[ci + 1]
        breaks = []
        zero = []
        best = None
        for j in range(start, end):
            lit = lits[j]
            # every literal of an unsatisfied clause is false, so the
            # currently true literal of its variable is -lit
            li = 2 * (abs(lit) - 1) + (1 if lit > 0 else 0)
            b = 0
            for k in range(ostart[li], ostart[li + 1]):
                if numtrue[occ[k]] == 1:
                    b += 1
            breaks.append(b)
            if b == 0:
                zero.append(j)
            if best is None or b < best:
                best = b
        if zero:
            pick = zero[rng.below(len(zero))]
        elif rng.unit() < w:
            pick = start + rng.below(end - start)
        else:
            cands = [start + t for t, b in enumerate(breaks) if b == best]
            pick = cands[rng.below(len(cands))]

        var = abs(lits[pick])
        if trace is not None:
            trace.append((ci, var))
        assign[var - 1] ^= 1
        pos = 2 * (var - 1) + (0 if assign[var - 1] == 1 else 1)
        neg = pos ^ 1
        for k in range(ostart[pos], ostart[pos + 1]):
            c = occ[k]
            numtrue[c] += 1
            if numtrue[c] == 1:
                last = unsat.pop()
                if last != c:
                    slot = where[c]
                    unsat[slot] = last
                    where[last] = slot
                where[c] = -1
        for k in range(ostart[neg], ostart[neg + 1]):
            c = occ[k]
            numtrue[c] -= 1
            if numtrue[c] == 0:
                where[c] = len(unsat)
                unsat.append(c)
        flips += 1

        if check_every and flips % check_every == 0:
            for c in range(num_clauses):
                t = sum(1 for j in range(cstart[c], cstart[c + 1]) if lit_true(lits[j]))
                assert t == numtrue[c], f"clause {c}: cached {numtrue[c]} != recomputed {t}"
                assert (t == 0) == (where[c] >= 0), f"clause {c}: unsat list out of sync"
