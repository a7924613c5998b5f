import abinertia as ab

# ### The linear-algebra shadow
#
# Socle slices of a group are vector spaces over a prime field, and an
# endomorphism acts on them as a plain matrix.  Subgroup index growth
# becomes dimension growth: for a subspace H, how much bigger is
# H + HM than H?  Everything here is exact, either over F_p or over Q.

M = ab.ExactMatrix(5, [
    [2, 0, 0, 0],
    [0, 2, 0, 0],
    [0, 0, 2, 1],
    [0, 0, 0, 3],
])
print("field F_5, n =", M.n)

# ### The scalar defect
#
# The nearest scalar matrix controls growth: write M = lam*I + F with
# rank(F) as small as the field allows.  Over F_p all p scalars are
# scanned; the rank of the remainder is the defect.

res = ab.scalar_defect(M)
print("closest scalar:", res.lam, "defect:", res.defect)

# ### Growth is capped by the defect
#
# For any subspace H, the step H + HM = H + H(M - lam*I) can add at
# most rank(M - lam*I) dimensions.  Exhausting all subspaces of F_5^4
# finds the true maximum growth, which may fall short of the cap.

mic = ab.max_inert_codim(M, budget=5 ** 4)
print("max growth over all subspaces:", mic)

# ### The cap is not always attained
#
# It is tempting to guess that some subspace always achieves the full
# defect.  A 2 x 2 companion matrix over F_2 refutes that: its defect
# is 2 (no scalar comes close), yet no subspace grows by more than 1,
# because a 1-dimensional H can only ever gain 1 and the other
# dimensions are trivial or everything.

C = ab.ExactMatrix(2, [
    [0, 1],
    [1, 1],
])
rc = ab.scalar_defect(C)
mc = ab.max_inert_codim(C)
print("companion defect:", rc.defect, "but max growth:", mc)
print("n // 2 cap explains it:", mc == min(rc.defect, C.n // 2))

# ### Randomized confirmation
#
# `growth_bound_check` samples random subspaces and asserts none grows
# past the defect; the report carries the worst growth seen.  Over the
# rationals the same machinery runs with exact fraction arithmetic.

rep = ab.growth_bound_check(M, trials=200, seed=3)
print(f"F_5 check: {rep.trials} trials, worst growth {rep.max_growth},"
      f" bound {rep.bound}, lam {rep.lam}")

Q = ab.ExactMatrix("Q", [
    [3, 0, 0],
    [0, 3, 0],
    [1, 0, 3],
])
rq = ab.scalar_defect(Q)
rep = ab.growth_bound_check(Q, trials=200, seed=3)
print(f"Q check: defect {rq.defect}, worst growth {rep.max_growth},"
      f" bound {rep.bound}, lam {rep.lam}")
