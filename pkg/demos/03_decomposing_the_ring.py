from fractions import Fraction

import abinertia as ab

# ### A mixed group with one of everything
#
# Torsion-free rank one divisible at 5, an unbounded Z/4 stack, an
# unbounded Z/5 stack, a divisible 5-block, and a finite lump of Z/3
# copies.  Enough variety that a single endomorphism can carry a
# rational scalar, several residues, and a bridge all at once.

group = ab.GroupDesc([
    ("V", ab.TorsionFree({5}, 1)),
    ("B", ab.Cyclic(2, 2, ab.OMEGA)),
    ("C", ab.Cyclic(5, 1, ab.OMEGA)),
    ("D", ab.Prufer(5, 1)),
    ("K", ab.Cyclic(3, 1, 4)),
])

phi = ab.Endo(group, tf=Fraction(1), div={5: 1},
              cyc={"B": 3, "C": 2, "K": 1})
cert, _ = ab.is_inertial(phi)
print("inertial with scalar r =", cert.r)

# ### The canonical three-way split
#
# Every inertial endomorphism is a semi-multiplication plus a uniform
# part plus a bridging prime-part action.  `decompose` produces the
# three addends; the residual field repeats phi minus the
# semi-multiplication for inspection.

dec = ab.decompose(phi)
total = ab.add(ab.add(dec.sm, dec.ui), dec.nm)
print("sm + ui + nm == phi:", ab.equal(total, phi))
print("sm is a semi-multiplication:", ab.classify(dec.sm).semi is not None)
print("ui is uniform with scalar:", ab.is_uniform(dec.ui))
print("nm is a prime-part action:", ab.classify(dec.nm).mini is not None)

# ### Multiplications and the finitary ideal
#
# On a periodic group the uniform lump splits further: its canonical
# scalar defines a multiplication, and what remains is finitary.  The
# finitary maps form the ideal that all the ring statements are taken
# modulo.

per = ab.GroupDesc([
    ("B", ab.Cyclic(2, 1, ab.OMEGA)),
    ("C", ab.Cyclic(3, 1, ab.OMEGA)),
    ("E", ab.Cyclic(5, 2, ab.OMEGA)),
])
psi = ab.Endo(per, cyc={"B": 1, "C": 2, "E": 7},
              fin={("c", "E", 0): ab.Element.unit(per, "E", 3, 5)})
d = ab.decompose(psi)
lump = ab.add(d.sm, d.ui)
beta = ab.is_uniform(lump)
print("canonical scalar:", beta)
mu = ab.multiplication_endo(per, beta)
f = ab.sub(lump, mu)
print("multiplication part:", ab.is_multiplication(mu))
print("finitary remainder:", ab.is_finitary(f))
print("mu + f + nm == psi:", ab.equal(ab.add(ab.add(mu, f), d.nm), psi))

# ### Classes modulo small scalars
#
# The quotient of the uniform maps by the finitary ones is a concrete
# residue ring read off the group's descriptor.  Two uniform maps land
# in the same class exactly when they differ by a finitary map, and the
# class of psi is zero exactly when psi is finitary.

print("descriptor:", ab.h_descriptor(per))
cls = ab.ui_class_in_H(lump)
print("class of the lump:", cls)
zero = ab.h_zero(ab.h_descriptor(per))
print("lump finitary:", ab.h_equal(cls, zero))
shift = ab.add(lump, ab.Endo(per, fin={("c", "B", 0): ab.Element.unit(per, "B", 2)}))
print("finitary shift keeps the class:", ab.h_equal(cls, ab.ui_class_in_H(shift)))
