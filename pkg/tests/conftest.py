import itertools

from hypothesis import settings

from dlring.series import GF2, TruncatedSeries

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def ser(variables, N, terms, ring=GF2):
    """Series from ``{exponents: coefficient string or element}``."""
    out = {}
    for e, c in terms.items():
        out[tuple(e)] = ring.parse(c) if isinstance(c, str) else c
    return TruncatedSeries(ring, variables, N, out)


def poly(variables, N, monomials, ring=GF2):
    """GF(2) series with coefficient 1 on each listed exponent vector."""
    acc = {}
    for e in monomials:
        e = tuple(e)
        acc[e] = acc.get(e, 0) ^ 1
    return ser(variables, N, {e: "1" for e, c in acc.items() if c}, ring)


def brute_power_coeffs(a, n):
    """Coefficients of (1 + z)^a mod 2 for z^0..z^n, by repeated
    multiplication (a >= 0) or by solving (1+z)^|a| * s = 1 (a < 0)."""
    base = [1] + [0] * n
    for _ in range(abs(a)):
        base = [(base[i] + (base[i - 1] if i else 0)) % 2 for i in range(n + 1)]
    if a >= 0:
        return base
    inv = [0] * (n + 1)
    for i in range(n + 1):
        acc = 1 if i == 0 else 0
        for j in range(1, i + 1):
            acc ^= base[j] & inv[i - j]
        inv[i] = acc
    return inv


def exponent_vectors(weights, N):
    for e in itertools.product(*[range(N // w + 1) for w in weights]):
        if sum(a * w for a, w in zip(e, weights)) <= N:
            yield e


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[2])):
        terminalreporter.write_line(line)
