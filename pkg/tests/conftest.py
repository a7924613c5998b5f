"""Shared corpus for the acceptance suite.

Seventeen groups spanning the model (bounded and unbounded periodic,
divisible, critical, mixed, free of infinite rank, torsion-free), a
family of certified endomorphisms on each, and a designed case list
pairing endomorphisms with their expected verdicts for the oracle.
"""

from fractions import Fraction

from abinertia.endokit import (
    Endo,
    identity_endo,
    mini_endo,
    multiplication_endo,
    semi_multiplication,
    zero_endo,
)
from abinertia.exactnum import OMEGA, JElement
from abinertia.groupkit import Cyclic, Element, GroupDesc, Prufer, TorsionFree

F = Fraction


def _u(group: GroupDesc, name: str, idx: int = 0, value=1) -> Element:
    return Element.unit(group, name, idx=idx, value=value)


GROUPS: dict[str, GroupDesc] = {
    # periodic
    "elem2": GroupDesc([("B", Cyclic(2, 1, OMEGA))]),
    "crit2": GroupDesc([("B", Cyclic(2, 2, OMEGA)), ("D", Prufer(2, 1))]),
    "crit3": GroupDesc([("B", Cyclic(3, 2, OMEGA)), ("D", Prufer(3, 1))]),
    "divis5": GroupDesc([("D", Prufer(5, 2))]),
    "tower2": GroupDesc([("B", Cyclic(2, 1, OMEGA)), ("C", Cyclic(2, 2, OMEGA)),
                         ("D", Prufer(2, 1))]),
    "finite": GroupDesc([("B", Cyclic(2, 3, 5)), ("C", Cyclic(3, 1, 2))]),
    "battery": GroupDesc([("B", Cyclic(2, 1, OMEGA)), ("C", Cyclic(3, 1, OMEGA)),
                          ("E", Cyclic(5, 2, OMEGA))]),
    "homo7": GroupDesc([("B", Cyclic(7, 2, OMEGA))]),
    "wide2": GroupDesc([("D", Prufer(2, OMEGA)), ("B", Cyclic(2, 1, OMEGA))]),
    # mixed
    "ratline": GroupDesc([("B", Cyclic(5, 1, 1)), ("V", TorsionFree({5}, 1))]),
    "padline": GroupDesc([("V", TorsionFree({2}, 1)), ("D", Prufer(2, 1))]),
    "plane35": GroupDesc([("V", TorsionFree({3, 5}, 2)), ("C", Cyclic(3, 1, OMEGA))]),
    "anchor": GroupDesc([("B", Cyclic(2, 1, OMEGA)), ("C", Cyclic(3, 2, 1)),
                         ("W", TorsionFree(set(), 1))]),
    "worked": GroupDesc([("D", Prufer(2, 1)), ("V", TorsionFree({3}, 1))]),
    # torsion-free, one of infinite rank
    "stack": GroupDesc([("L", TorsionFree(set(), OMEGA)), ("V", TorsionFree({3}, 1)),
                        ("B", Cyclic(3, 1, OMEGA))]),
    "lattice0": GroupDesc([("V", TorsionFree(set(), 2))]),
    # everything at once
    "grand": GroupDesc([("V", TorsionFree({5}, 1)), ("B", Cyclic(2, 2, OMEGA)),
                        ("C", Cyclic(5, 1, OMEGA)), ("D", Prufer(5, 1)),
                        ("K", Cyclic(3, 1, 4))]),
}


def _certified_endos() -> dict[str, dict[str, Endo]]:
    g = GROUPS
    out: dict[str, dict[str, Endo]] = {}

    a = g["elem2"]
    out["elem2"] = {
        "one": identity_endo(a),
        "naught": zero_endo(a),
        "drop": Endo(a, fin={("c", "B", 0): _u(a, "B", 1)}),
    }

    a = g["crit2"]
    out["crit2"] = {
        "one": identity_endo(a),
        "double": multiplication_endo(a, 2),
        "bridge": Endo(a, div={2: 1}, cyc={"B": 3}),
        "mini": mini_endo(a, 1, {2}),
        "patch": Endo(a, fin={("c", "B", 0): _u(a, "D", 0, F(1, 4))}),
    }

    a = g["crit3"]
    out["crit3"] = {
        "one": identity_endo(a),
        "triple": multiplication_endo(a, 3),
        "bridge": Endo(a, div={3: 1}, cyc={"B": 4}),
        "mini": mini_endo(a, 1, {3}),
    }

    a = g["divis5"]
    out["divis5"] = {
        "one": identity_endo(a),
        "double": multiplication_endo(a, 2),
        "five": multiplication_endo(a, 5),
        "half": multiplication_endo(a, F(1, 2)),
    }

    a = g["tower2"]
    out["tower2"] = {
        "one": identity_endo(a),
        "double": multiplication_endo(a, 2),
        "mini": mini_endo(a, 1, {2}),
        "bridge": Endo(a, div={2: 1}, cyc={"B": 1, "C": 3}),
    }

    a = g["finite"]
    out["finite"] = {
        "one": identity_endo(a),
        "double": multiplication_endo(a, 2),
        "mix": Endo(a, cyc={"B": {(0, 1): 1, (2, 2): 3}, "C": {(0, 0): 1, (0, 1): 2}}),
        "hop": Endo(a, cyc={"B": 3}, fin={("c", "C", 0): _u(a, "C", 1)}),
    }

    a = g["battery"]
    out["battery"] = {
        "one": identity_endo(a),
        "thirty": multiplication_endo(a, 30),
        "jmix": multiplication_endo(a, JElement(1, {5: F(7)})),
        "mini": mini_endo(a, 1, {3}),
        "patch": Endo(a, fin={("c", "E", 0): _u(a, "E", 3, 5)}),
    }

    a = g["homo7"]
    out["homo7"] = {
        "one": identity_endo(a),
        "seven": multiplication_endo(a, 7),
        "eight": multiplication_endo(a, 8),
        "naught": zero_endo(a),
    }

    a = g["wide2"]
    out["wide2"] = {
        "one": identity_endo(a),
        "double": multiplication_endo(a, 2),
        "trip": multiplication_endo(a, 3),
        "patch": Endo(a, fin={("c", "B", 0): _u(a, "D", 3, F(1, 2))}),
    }

    a = g["ratline"]
    out["ratline"] = {
        "one": identity_endo(a),
        "double": multiplication_endo(a, 2),
        "fifth": Endo(a, tf=F(1, 5)),
        "quasi7": semi_multiplication(a, F(7, 5)),
        "patch": Endo(a, fin={("c", "B", 0): _u(a, "B", 0, 2)}),
    }

    a = g["padline"]
    out["padline"] = {
        "one": identity_endo(a),
        "double": multiplication_endo(a, 2),
        "triple": multiplication_endo(a, 3),
        "naught": zero_endo(a),
    }

    a = g["plane35"]
    out["plane35"] = {
        "one": identity_endo(a),
        "fifth": semi_multiplication(a, F(1, 5)),
        "seventh": semi_multiplication(a, F(7, 5)),
        "triple": multiplication_endo(a, 3),
        "patch": Endo(a, fin={("c", "C", 0): _u(a, "C", 1)}),
    }

    a = g["anchor"]
    out["anchor"] = {
        "one": identity_endo(a),
        "six": multiplication_endo(a, 6),
        "double": multiplication_endo(a, 2),
        "patch": Endo(a, fin={("t", ("W", 0), 2): _u(a, "B", 0)}),
    }

    a = g["worked"]
    out["worked"] = {
        "one": identity_endo(a),
        "third": semi_multiplication(a, F(1, 3)),
        "triple": multiplication_endo(a, 3),
        "double": multiplication_endo(a, 2),
    }

    a = g["stack"]
    out["stack"] = {
        "one": identity_endo(a),
        "double": multiplication_endo(a, 2),
        "naught": zero_endo(a),
        "patch": Endo(a, fin={("c", "B", 0): _u(a, "B", 1)}),
    }

    a = g["lattice0"]
    out["lattice0"] = {
        "one": identity_endo(a),
        "double": multiplication_endo(a, 2),
        "triple": multiplication_endo(a, 3),
        "naught": zero_endo(a),
    }

    a = g["grand"]
    out["grand"] = {
        "one": identity_endo(a),
        "ten": multiplication_endo(a, 10),
        "mini5": mini_endo(a, 1, {5}),
        "bridge5": Endo(a, tf=1, div={5: 1}, cyc={"B": 1, "C": 2, "K": 1}),
        "patch": Endo(a, fin={("c", "K", 0): _u(a, "K", 3)}),
    }

    return out


INERTIAL: dict[str, dict[str, Endo]] = _certified_endos()


def _designed_cases() -> tuple[tuple[str, str, Endo, str], ...]:
    g = GROUPS
    e = INERTIAL
    good = [
        ("elem2 drop", "elem2", e["elem2"]["drop"]),
        ("crit2 bridge", "crit2", e["crit2"]["bridge"]),
        ("crit2 mini", "crit2", e["crit2"]["mini"]),
        ("crit3 triple", "crit3", e["crit3"]["triple"]),
        ("crit3 bridge", "crit3", e["crit3"]["bridge"]),
        ("divis5 half", "divis5", e["divis5"]["half"]),
        ("tower2 bridge", "tower2", e["tower2"]["bridge"]),
        ("tower2 mini", "tower2", e["tower2"]["mini"]),
        ("finite mix", "finite", e["finite"]["mix"]),
        ("finite hop", "finite", e["finite"]["hop"]),
        ("battery jmix", "battery", e["battery"]["jmix"]),
        ("homo7 seven", "homo7", e["homo7"]["seven"]),
        ("wide2 trip", "wide2", e["wide2"]["trip"]),
        ("ratline fifth", "ratline", e["ratline"]["fifth"]),
        ("padline triple", "padline", e["padline"]["triple"]),
        ("plane35 fifth", "plane35", e["plane35"]["fifth"]),
        ("anchor patch", "anchor", e["anchor"]["patch"]),
        ("worked third", "worked", e["worked"]["third"]),
        ("stack double", "stack", e["stack"]["double"]),
        ("lattice0 double", "lattice0", e["lattice0"]["double"]),
        ("grand bridge5", "grand", e["grand"]["bridge5"]),
    ]
    bad = [
        # distinct scalars on two divisible copies
        ("prufer diag", "divis5",
         Endo(g["divis5"], div={5: {(("D", 0), ("D", 0)): 1,
                                    (("D", 1), ("D", 1)): 2}})),
        # nilpotent twist between divisible copies
        ("prufer twist", "divis5",
         Endo(g["divis5"], div={5: {(("D", 0), ("D", 1)): 1}})),
        # distinct scalars on a free pair
        ("tf diag", "lattice0",
         Endo(g["lattice0"], tf={(("V", 0), ("V", 0)): 1,
                                 (("V", 1), ("V", 1)): 2})),
        # residues 0 mod 2 and 1 mod 4 cannot come from one scalar
        ("crt pair", "tower2",
         Endo(g["tower2"], div={2: 1}, cyc={"B": 0, "C": 1})),
        # twisted action from the torsion-free part into the divisible part
        ("tau case", "padline",
         Endo(g["padline"], tf=1, div={2: 1},
              tau={(("V", 0), ("D", 0)): 1})),
        # denominator prime carries a divisible block
        ("pi div", "padline", Endo(g["padline"], tf=F(1, 2), div={2: 1})),
        # divisible scalar disagrees with the global rational
        ("div vs r", "worked", Endo(g["worked"], tf=F(1, 3), div={2: 5})),
        ("grand gap", "grand",
         Endo(g["grand"], tf=1, div={5: 2}, cyc={"B": 1, "C": 1, "K": 1})),
        # infinite free rank forces one integer scalar
        ("not ftfr", "stack", Endo(g["stack"], free_scalar=2, tf=F(1, 3))),
        # free scalar 2 against residue 1 mod 3
        ("crt free", "stack",
         Endo(g["stack"], free_scalar=2, tf=2, cyc={"B": 1})),
        # scalar on infinitely many divisible copies vs residue 1
        ("omega div", "wide2", Endo(g["wide2"], cyc={"B": 1})),
        # off-diagonal rational entry on a torsion-free pair
        ("tf skew", "plane35",
         Endo(g["plane35"], tf={(("V", 0), ("V", 0)): F(1, 5),
                                (("V", 1), ("V", 1)): F(1, 5),
                                (("V", 0), ("V", 1)): 1})),
    ]
    cases = [(label, key, phi, "inertial") for label, key, phi in good]
    cases += [(label, key, phi, "non-inertial") for label, key, phi in bad]
    return tuple(cases)


ORACLE_CASES: tuple[tuple[str, str, Endo, str], ...] = _designed_cases()
