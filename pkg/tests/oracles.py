"""Independent brute-force oracles.

Polynomials over GF(2) are sets of exponent tuples (symmetric difference is
addition); nothing here uses the package's series or ring code.
"""

def padd(a, b):
    return a ^ b


def pmul(a, b, keep=lambda e: True):
    out = set()
    for x in a:
        for y in b:
            e = tuple(i + j for i, j in zip(x, y))
            if keep(e):
                out ^= {e}
    return out


def ppow(a, n, one, keep=lambda e: True):
    out = {one}
    for _ in range(n):
        out = pmul(out, a, keep)
    return out


def lazard_generators(D):
    return [(i, d + 1 - i) for d in range(1, D + 1) for i in range(1, d + 1)]


def lazard_relation_polys(D):
    """Coefficients (in the a_ij) of commutativity, associativity and
    F(x, x) for the generic law through x,y,z-degree D + 1."""
    gens = lazard_generators(D)
    k = len(gens)
    n = k + 3
    X, Y, Z = k, k + 1, k + 2
    one = (0,) * n

    def var(i):
        return tuple(1 if j == i else 0 for j in range(n))

    def keep(e):
        return e[X] + e[Y] + e[Z] <= D + 1

    def law(u, v):
        out = u ^ v
        for g, (i, j) in enumerate(gens):
            out ^= pmul({var(g)}, pmul(ppow(u, i, one, keep), ppow(v, j, one, keep), keep), keep)
        return out

    x, y, z = {var(X)}, {var(Y)}, {var(Z)}
    polys = [law(x, y) ^ law(y, x), law(law(x, y), z) ^ law(x, law(y, z)), law(x, x)]
    rels = []
    for p in polys:
        groups = {}
        for e in p:
            key = e[k:]
            groups.setdefault(key, set()).symmetric_difference_update({e[:k]})
        rels += [r for r in groups.values() if r]
    return gens, rels


def graded_dimensions(D):
    """Graded ranks of the quotient by brute-force row reduction."""
    gens, rels = lazard_relation_polys(D)
    degs = [i + j - 1 for i, j in gens]
    k = len(gens)

    def monomials(d):
        out = []

        def rec(g, rem, acc):
            if g == k:
                if rem == 0:
                    out.append(tuple(acc))
                return
            for e in range(rem // degs[g] + 1):
                rec(g + 1, rem - e * degs[g], acc + [e])

        rec(0, d, [])
        return out

    def degree(m):
        return sum(e * w for e, w in zip(m, degs))

    dims = {}
    for d in range(D + 1):
        basis = monomials(d)
        index = {m: i for i, m in enumerate(basis)}
        rows = []
        for r in rels:
            e = degree(next(iter(r)))
            if e > d:
                continue
            for m in monomials(d - e):
                v = 0
                for t in r:
                    v ^= 1 << index[tuple(a + b for a, b in zip(m, t))]
                rows.append(v)
        dims[d] = len(basis) - _rank(rows)
    return dims


def _rank(rows):
    pivots = {}
    for v in rows:
        while v:
            p = v.bit_length() - 1
            if p in pivots:
                v ^= pivots[p]
            else:
                pivots[p] = v
                break
    return len(pivots)


def polynomial_ring_counts(degrees, D):
    """Monomial counts per degree in a polynomial ring on generators of the
    given degrees."""
    counts = [1] + [0] * D
    for g in degrees:
        for d in range(g, D + 1):
            counts[d] += counts[d - g]
    return counts


def not_two_power_minus_one(D):
    return [d for d in range(1, D + 1) if (d + 1) & d]


def expand_product(factors, n):
    """Product of linear forms over GF(2) as a set of exponent tuples; each
    factor is a list of variable indices."""
    out = {(0,) * n}
    for f in factors:
        lin = {tuple(1 if j == i else 0 for j in range(n)) for i in f}
        out = pmul(out, lin)
    return out

