"""Fixture suite for transporting Cevian tables along lattice constructions."""

from cevian.finlat import (
    FinDistLattice,
    boolean_lattice,
    cevian_axiom_check,
    cevian_solve,
    chain_lattice,
    congruence_closure,
    ideal,
    is_lattice_hom,
    product,
    quotient,
    transport_ideal,
    transport_product,
    transport_quotient,
)
from cevian.posets import FinitePoset


def wedge() -> FinDistLattice:
    """Join-irreducibles s < r and t < r: completely normal, and not a product of chains."""
    return FinDistLattice(FinitePoset.from_relation("rst", [("s", "r"), ("t", "r")]), "wedge")


def _check(D, T):
    rep = cevian_axiom_check(D, T)
    return rep.ok


def _product_case(D, E):
    def run():
        TD, TE = cevian_solve(D), cevian_solve(E)
        P, pair = product(D, E)
        T = transport_product(D, E, TD, TE, P, pair)
        return _check(D, TD) and _check(E, TE) and _check(P, T) and len(P) == len(D) * len(E)

    return f"product {D.name} x {E.name}", run


def _ideal_case(D, pick):
    def run():
        T = cevian_solve(D)
        a = D.elements[pick(len(D))]
        I, incl = ideal(D, a)
        if is_lattice_hom(I, D, incl) is not None:
            return False
        return _check(I, transport_ideal(D, T, I, incl))

    return f"ideal of {D.name}", run


def _quotient_case(D, seeds):
    def run():
        T = cevian_solve(D)
        seed = [(D.elements[i], D.elements[j]) for i, j in seeds]
        cls = congruence_closure(D, seed)
        blocks = {}
        for e, r in cls.items():
            blocks.setdefault(r, []).append(e)
        Q, proj = quotient(D, [b for b in blocks.values() if len(b) > 1])
        if is_lattice_hom(D, Q, proj) is not None:
            return False
        return _check(Q, transport_quotient(D, T, Q, proj))

    return f"quotient of {D.name} by {seeds}", run


def transport_cases() -> list:
    c2, c3, c4, b2, b3 = chain_lattice(2), chain_lattice(3), chain_lattice(4), boolean_lattice(2), boolean_lattice(3)
    v = wedge()
    cases = [
        _product_case(c2, c2),
        _product_case(c2, c3),
        _product_case(c3, c3),
        _product_case(b2, c2),
        _product_case(v, c2),
        _product_case(c2, v),
        _ideal_case(c3, lambda n: 1),
        _ideal_case(c4, lambda n: 2),
        _ideal_case(b3, lambda n: 3),
        _ideal_case(b3, lambda n: 5),
        _ideal_case(v, lambda n: 2),
        _ideal_case(v, lambda n: n - 1),
        _ideal_case(b2, lambda n: 0),
        _quotient_case(b2, [(1, 3)]),
        _quotient_case(c3, [(1, 2)]),
        _quotient_case(c4, [(0, 1)]),
        _quotient_case(b3, [(0, 1)]),
        _quotient_case(b3, [(1, 4)]),
        _quotient_case(v, [(1, 2)]),
        _quotient_case(v, [(2, 4)]),
    ]
    return cases


def _height(X, x) -> int:
    below = [y for y in X.elements if y != x and X.leq(y, x)]
    return 0 if not below else 1 + max(_height(X, y) for y in below)


def norm_coverings(max_points: int = 5) -> list:
    """Norm-coverings of every poset with at most ``max_points`` points, three boundary maps each."""
    from cevian.posets import cube_poset, enumerate_posets
    from cevian.psbool import NormCovering

    P3 = cube_poset()
    out = []
    for n in range(1, max_points + 1):
        for X in enumerate_posets(n):
            choices = {
                "bottom": {x: frozenset() for x in X.elements},
                "top": {x: frozenset({1, 2, 3}) for x in X.elements},
                "height": {x: frozenset(range(1, min(_height(X, x) + 1, 3) + 1)) for x in X.elements},
            }
            for label, bd in choices.items():
                out.append((f"{n}pt#{len(out)}:{label}", NormCovering(X, bd, P3)))
    return out


def principal_ideal_vectors(X) -> list:
    return sorted(tuple(1 if X.leq(u, x) else 0 for u in X.elements) for x in X.elements)
