"""Finite coverings (maps of finite sets) and their polynomial functors.

A covering is stored as its list of fibers; total-space elements are the
integers ``0 .. |T| - 1``. The Euler characteristic ``chi(p) = sum_b
x^{|fiber(b)|}`` turns sum, product, composition and derivative into the
corresponding operations on integer polynomials.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable, Sequence


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial; ``coeffs[i]`` is the coefficient of x^i."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, n: int, c: int = 1) -> "IntPolynomial":
        return cls((0,) * n + (c,))

    @classmethod
    def x(cls) -> "IntPolynomial":
        return cls.monomial(1)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def terms(self) -> dict[int, int]:
        return {i: c for i, c in enumerate(self.coeffs) if c}

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def compose(self, inner: "IntPolynomial") -> "IntPolynomial":
        """``self(inner(x))`` by Horner's rule."""
        acc = IntPolynomial()
        for c in reversed(self.coeffs):
            acc = acc * inner + IntPolynomial((c,))
        return acc

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def divided_derivative(self, k: int) -> "IntPolynomial":
        """``(1/k!) d^k/dx^k``, exact over the integers."""
        return IntPolynomial(tuple(comb(i, k) * c for i, c in enumerate(self.coeffs))[k:])

    def evaluate(self, value: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def mod2(self) -> "IntPolynomial":
        return IntPolynomial(tuple(c % 2 for c in self.coeffs))

    def format(self) -> str:
        parts = []
        for i, c in sorted(self.terms().items(), reverse=True):
            mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if c == 1 and i:
                parts.append(mono)
            elif i == 0:
                parts.append(str(c))
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def to_json(self) -> list[int]:
        return list(self.coeffs)


@dataclass(frozen=True)
class FiniteCovering:
    """A map ``p: T -> B`` given by its fibers; empty fibers are allowed."""

    fibers: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        fibers = tuple(tuple(f) for f in self.fibers)
        object.__setattr__(self, "fibers", fibers)
        seen = sorted(e for f in fibers for e in f)
        if seen != list(range(len(seen))):
            raise ValueError("fibers must partition 0 .. |T|-1")

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> "FiniteCovering":
        fibers, k = [], 0
        for n in sizes:
            fibers.append(tuple(range(k, k + n)))
            k += n
        return cls(tuple(fibers))

    @classmethod
    def trivial(cls, n: int) -> "FiniteCovering":
        """The n-fold covering of a point."""
        return cls.from_sizes([n])

    @classmethod
    def identity(cls, m: int = 1) -> "FiniteCovering":
        return cls.from_sizes([1] * m)

    @classmethod
    def empty(cls) -> "FiniteCovering":
        return cls(())

    @property
    def base_size(self) -> int:
        return len(self.fibers)

    @property
    def total_size(self) -> int:
        return sum(len(f) for f in self.fibers)

    def sizes(self) -> list[int]:
        return [len(f) for f in self.fibers]

    def projection(self) -> list[int]:
        out = [0] * self.total_size
        for b, f in enumerate(self.fibers):
            for e in f:
                out[e] = b
        return out

    def canonical(self) -> tuple[int, ...]:
        """Isomorphism invariant: the sorted fiber sizes. Two maps of finite
        sets are isomorphic exactly when these agree."""
        return tuple(sorted(self.sizes()))

    def isomorphic(self, other: "FiniteCovering") -> bool:
        return self.canonical() == other.canonical()

    def to_json(self) -> dict:
        return {"base_size": self.base_size, "fibers": [list(f) for f in self.fibers]}

    @classmethod
    def from_json(cls, data) -> "FiniteCovering":
        if isinstance(data, str):
            data = json.loads(data)
        fibers = tuple(tuple(f) for f in data["fibers"])
        if len(fibers) != data.get("base_size", len(fibers)):
            raise ValueError("base_size does not match the fiber list")
        return cls(fibers)


def cover_sum(p: FiniteCovering, q: FiniteCovering) -> FiniteCovering:
    n = p.total_size
    return FiniteCovering(p.fibers + tuple(tuple(e + n for e in f) for f in q.fibers))


def cover_product(p: FiniteCovering, q: FiniteCovering) -> FiniteCovering:
    """Base ``B_p x B_q``; the fiber over (b, b') is fiber(b) + fiber(b')."""
    return FiniteCovering.from_sizes(len(f) + len(g) for f in p.fibers for g in q.fibers)


def cover_compose(p: FiniteCovering, q: FiniteCovering) -> FiniteCovering:
    """Base: pairs (b, phi) with phi: fiber_p(b) -> B_q; fiber over (b, phi)
    is the set of (e, f) with e in fiber_p(b) and f in fiber_q(phi(e))."""
    qs = q.sizes()
    sizes = []
    for f in p.fibers:
        for phi in itertools.product(range(len(qs)), repeat=len(f)):
            sizes.append(sum(qs[c] for c in phi))
    return FiniteCovering.from_sizes(sizes)


def _derivative_labeled(p: FiniteCovering) -> tuple[FiniteCovering, list[tuple[int, int]]]:
    proj = p.projection()
    sizes, labels = [], []
    for t in range(p.total_size):
        rest = [e for e in p.fibers[proj[t]] if e != t]
        sizes.append(len(rest))
        labels.extend((t, e) for e in rest)
    return FiniteCovering.from_sizes(sizes), labels


def derivative(p: FiniteCovering) -> FiniteCovering:
    """Base T; the fiber over t is the fiber through t with t removed."""
    return _derivative_labeled(p)[0]


def divided_derivative(p: FiniteCovering, k: int) -> FiniteCovering:
    """Base: (b, S) with S a k-subset of fiber(b); fiber: fiber(b) minus S."""
    if k < 1:
        raise ValueError("k must be at least 1")
    sizes = []
    for f in p.fibers:
        for _ in itertools.combinations(f, k):
            sizes.append(len(f) - k)
    return FiniteCovering.from_sizes(sizes)


def euler_char(p: FiniteCovering) -> IntPolynomial:
    out = [0] * (max(p.sizes(), default=-1) + 1)
    for n in p.sizes():
        out[n] += 1
    return IntPolynomial(tuple(out))


def apply_to_set(p: FiniteCovering, X: Sequence) -> list[tuple[int, tuple]]:
    """``p(X)``: pairs (b, u) with u: fiber(b) -> X, u listed in fiber order."""
    out = []
    for b, f in enumerate(p.fibers):
        for u in itertools.product(X, repeat=len(f)):
            out.append((b, u))
    return out


def splitting_map(g: IntPolynomial) -> IntPolynomial:
    """``s(g) = sum_{k>=1} x^{k-1} (1/k!) g^{(k)}`` reduced mod 2."""
    acc = IntPolynomial()
    for k in range(1, g.degree + 1):
        acc = acc + IntPolynomial.monomial(k - 1) * g.divided_derivative(k)
    return acc.mod2()


def splitting_check(f: IntPolynomial) -> dict:
    """Whether ``s(x f) = f`` mod 2."""
    f2 = f.mod2()
    s = splitting_map(IntPolynomial.x() * f2)
    return {"f": f2.to_json(), "s(x*f)": s.to_json(), "passed": s == f2}


def sigma2_check(p: FiniteCovering) -> dict:
    """The second derivative's total space consists of ordered triples of
    distinct points of one fiber; the swap of the two marks acts freely and
    the quotient is the total space of the second divided derivative."""
    d1, lab1 = _derivative_labeled(p)
    d2, lab2 = _derivative_labeled(d1)
    triples = []
    for base, e in lab2:
        t, t1 = lab1[base]
        _, t2 = lab1[e]
        triples.append((t, t1, t2))
    distinct = all(len(set(x)) == 3 for x in triples)
    orbits = {(frozenset(x[:2]), x[2]) for x in triples}
    free = len(orbits) * 2 == len(triples)
    dd = divided_derivative(p, 2)
    return {
        "second_derivative_total": len(triples),
        "orbits": len(orbits),
        "divided_total": dd.total_size,
        "passed": distinct and free and len(orbits) == dd.total_size,
    }


# ---------------------------------------------------------------------------
# randomized law checks


@dataclass(frozen=True)
class SamplerConfig:
    max_base: int = 4
    max_fiber: int = 4


def random_covering(rng: random.Random, max_size: int, config: SamplerConfig = SamplerConfig()) -> FiniteCovering:
    """Random covering with |T| <= max_size."""
    sizes, total = [], 0
    for _ in range(rng.randint(0, config.max_base)):
        n = rng.randint(0, min(config.max_fiber, max_size - total))
        sizes.append(n)
        total += n
    return FiniteCovering.from_sizes(sizes)


@dataclass
class LawTally:
    passed: int = 0
    total: int = 0
    counterexample: dict | None = None

    def record(self, ok: bool, witness: Callable[[], dict]) -> None:
        self.total += 1
        if ok:
            self.passed += 1
        elif self.counterexample is None:
            self.counterexample = witness()


@dataclass(frozen=True)
class Operations:
    """The covering operations under test; swappable for mutation tests."""

    sum: Callable = cover_sum
    product: Callable = cover_product
    compose: Callable = cover_compose
    derivative: Callable = derivative
    divided: Callable = divided_derivative


@dataclass
class SelfTestReport:
    seed: int
    trials: int
    max_size: int
    laws: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(t.passed == t.total for t in self.laws.values())

    def format(self) -> str:
        lines = [f"cover selftest seed={self.seed} trials={self.trials} max_size={self.max_size}"]
        for name, t in self.laws.items():
            status = "PASS" if t.passed == t.total else "FAIL"
            lines.append(f"{name}: {status} {t.passed}/{t.total}")
            if t.counterexample is not None:
                lines.append(f"  counterexample: {json.dumps(t.counterexample, sort_keys=True)}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "max_size": self.max_size,
            "passed": self.passed,
            "laws": {
                n: {"passed": t.passed, "total": t.total, "counterexample": t.counterexample}
                for n, t in self.laws.items()
            },
        }


LAWS = (
    "sum",
    "product",
    "compose",
    "derivative",
    "leibniz",
    "chain",
    "functor",
    "functor_compose",
    "divided",
    "sigma2",
    "splitting",
)


def selftest(trials: int = 100, max_size: int = 12, seed: int = 0, ops: Operations = Operations(), split_degree: int = 20) -> SelfTestReport:
    """Check the chi-homomorphism laws on ``trials`` random pairs."""
    rng = random.Random(seed)
    report = SelfTestReport(seed, trials, max_size, {n: LawTally() for n in LAWS})
    L = report.laws
    small = SamplerConfig(max_base=3, max_fiber=2)
    for _ in range(trials):
        p = random_covering(rng, max_size)
        q = random_covering(rng, max_size)
        cp, cq = euler_char(p), euler_char(q)

        def wit(**extra):
            return lambda: {"p": p.to_json(), "q": q.to_json(), **extra}

        s = euler_char(ops.sum(p, q))
        L["sum"].record(s == cp + cq, wit(got=s.to_json(), expected=(cp + cq).to_json()))
        pr = euler_char(ops.product(p, q))
        L["product"].record(pr == cp * cq, wit(got=pr.to_json(), expected=(cp * cq).to_json()))
        pq = ops.compose(p, q)
        c = euler_char(pq)
        L["compose"].record(c == cp.compose(cq), wit(got=c.to_json(), expected=cp.compose(cq).to_json()))
        d = euler_char(ops.derivative(p))
        L["derivative"].record(d == cp.derivative(), wit(got=d.to_json(), expected=cp.derivative().to_json()))

        lhs = ops.derivative(ops.product(p, q))
        rhs = ops.sum(ops.product(ops.derivative(p), q), ops.product(p, ops.derivative(q)))
        L["leibniz"].record(lhs.isomorphic(rhs), wit(lhs=list(lhs.canonical()), rhs=list(rhs.canonical())))
        lhs = ops.derivative(pq)
        rhs = ops.product(ops.compose(ops.derivative(p), q), ops.derivative(q))
        L["chain"].record(lhs.isomorphic(rhs), wit(lhs=list(lhs.canonical()), rhs=list(rhs.canonical())))

        for k in range(5):
            n = len(apply_to_set(p, range(k)))
            L["functor"].record(n == cp.evaluate(k), wit(size=k, got=n, expected=cp.evaluate(k)))

        a = random_covering(rng, max_size, small)
        b = random_covering(rng, max_size, small)
        for k in range(3):
            inner = apply_to_set(b, range(k))
            n = len(apply_to_set(a, inner))
            m = len(apply_to_set(ops.compose(a, b), range(k)))
            L["functor_compose"].record(
                n == m, lambda: {"p": a.to_json(), "q": b.to_json(), "size": k, "nested": n, "composite": m}
            )

        k = rng.randint(1, 4)
        dd = euler_char(ops.divided(p, k))
        want = IntPolynomial()
        for f in p.fibers:
            if len(f) >= k:
                want = want + IntPolynomial.monomial(len(f) - k, comb(len(f), k))
        L["divided"].record(dd == want, wit(k=k, got=dd.to_json(), expected=want.to_json()))
        sig = sigma2_check(p)
        L["sigma2"].record(sig["passed"], wit(**sig))

    for n in range(split_degree + 1) if trials else ():
        r = splitting_check(IntPolynomial.monomial(n))
        L["splitting"].record(r["passed"], lambda: {"degree": n, **r})
    return report
