from fractions import Fraction

import abinertia as ab

# ### A critical group
#
# An unbounded stack of Z/4 copies next to a divisible 2-block.  The
# prime 2 is critical: endomorphisms may treat the reduced part and the
# divisible part with different multipliers, and commutator arguments
# that work elsewhere break down here.

group = ab.GroupDesc([
    ("B", ab.Cyclic(2, 2, ab.OMEGA)),
    ("D", ab.Prufer(2, 1)),
])
print("critical primes:", sorted(ab.invariants(group).critical_primes))

# ### Building an endomorphism
#
# The slots mirror the block structure: `cyc` holds integer multipliers
# (or matrices) on cyclic blocks, `div` rational multipliers on
# divisible blocks, `fin` finitely supported corrections.  `validate`
# returns a list of semantic defects; empty means the data really is an
# endomorphism.

bridge = ab.Endo(group, div={2: 1}, cyc={"B": 3})
print("defects:", ab.validate(bridge))

# ### The verdict
#
# `is_inertial` returns a certificate and no violations, or no
# certificate and a nonempty list of violations.  The certificate
# records the per-prime residues that every inertial endomorphism must
# carry: a joint residue on the unbounded cyclic part, a scalar on the
# divisible part, and a flag when the two disagree.

cert, violations = ab.is_inertial(bridge)
print("inertial:", cert is not None, "violations:", len(violations))
for facts in cert.per_prime:
    print(f"p = {facts.prime}: cyclic residue {facts.alpha_cyc},"
          f" divisible scalar {facts.alpha_div}, bridged {facts.bridged}")

# ### A rejection, with a reason
#
# Stretching a rank-2 divisible block by different scalars on the two
# coordinates is never inertial.  The violation names the broken rule
# and the site, and `witness_search` turns it into a concrete subgroup
# family whose index under the map grows without bound.

wide = ab.GroupDesc([("D", ab.Prufer(5, 2))])
skew = ab.Endo(wide, div={5: {(("D", 0), ("D", 0)): Fraction(1),
                             (("D", 1), ("D", 1)): Fraction(2)}})
cert, violations = ab.is_inertial(skew)
print("inertial:", cert is not None)
for v in violations:
    print(f"violation: kind {v.kind!r} at {v.site} (p = {v.prime})")
    print("hint:", v.hint)

family = ab.witness_search(wide, skew, violations[0], budget=5)
print("witness family:", family.description)
print("depths:", family.depths)
print("indices:", family.indices)

# ### Invalid data never reaches the verdict
#
# A correction must send a generator to an element of compatible order.
# `is_inertial` refuses malformed input outright; `validate` gives the
# defect list without raising.

broken = ab.Endo(group, fin={("c", "B", 0): ab.Element.unit(group, "D", 0, value=Fraction(1, 8))})
print("defects:", ab.validate(broken))
try:
    ab.is_inertial(broken)
except ab.UsageError as exc:
    print("refused:", exc)
