import abinertia as ab

# ### Trust, then verify
#
# The verdicts so far came from decision rules on the block data.  The
# oracle side of the library recomputes the defining quantity directly:
# the index |H + phi(H) : H| over concrete finitely generated
# subgroups.  Inertial means those indices stay bounded over all H.
#
# Two maps on the same pair of unbounded stacks.  `patch` is the
# identity plus one finite correction, as harmless as an endomorphism
# gets.  `crt` fixes one stack and kills the other; no single residue
# mod 4 does both, and that clash is exactly what the rules reject.

group = ab.GroupDesc([
    ("B", ab.Cyclic(2, 1, ab.OMEGA)),
    ("C", ab.Cyclic(2, 2, ab.OMEGA)),
])
patch = ab.Endo(group, cyc={"B": 1, "C": 1},
                fin={("c", "C", 0): ab.Element.unit(group, "C", 1, 2)})
crt = ab.Endo(group, cyc={"B": 0, "C": 1})
print("patch inertial:", ab.is_inertial(patch)[0] is not None)
print("crt inertial:", ab.is_inertial(crt)[0] is not None)

# ### Exact indices on chosen subgroups
#
# `index_in_sum` presents H and H + phi(H) as integer lattices and
# reads the index off the Smith invariants.  Diagonal subgroups across
# the two stacks separate the maps: `crt` tears every diagonal
# generator into its components, one new Z/2 per generator, while the
# patch costs a single Z/2 once.

for n in (1, 2, 3, 4, 5):
    diag = ab.FGSubgroup(group, tuple(
        ab.Element.unit(group, "B", i) + ab.Element.unit(group, "C", i)
        for i in range(n)
    ), label=f"diag {n}")
    print(f"{n} generators: patch index {ab.index_in_sum(diag, patch)},"
          f" crt index {ab.index_in_sum(diag, crt)}")

# ### Profiles over growing shadows
#
# `inertness_profile` sweeps structured and random subgroup families
# through finite shadows of increasing level and records the worst
# index seen.  A stable top pair is evidence for inertiality; steady
# growth is evidence against.  The hint summarizes which happened.

prof = ab.inertness_profile(group, patch, levels=(2, 3, 4, 5), samples=60, seed=11)
print("patch per level:", prof.per_level, "->", prof.verdict_hint)
prof = ab.inertness_profile(group, crt, levels=(2, 3, 4, 5), samples=60, seed=11)
print("crt per level:", prof.per_level, "->", prof.verdict_hint)

# ### The invariant-subgroup gap
#
# For periodic groups there is a second, independent measurement: for
# each subgroup X of a shadow, compare the closure of X under phi with
# the largest phi-invariant subgroup inside X.  Inertial maps leave a
# bounded gap; the residue clash tears the two apart as the shadow
# grows.

print("patch fs profile:", ab.fs_profile(group, patch, levels=(2, 3, 4, 5)))
print("crt fs profile:", ab.fs_profile(group, crt, levels=(2, 3, 4, 5)))

# ### A certified witness family
#
# The violation object feeds `witness_search`, which instantiates the
# matching subgroup template and reports the measured indices, so a
# rejection always comes with evidence you can recompute.

cert, violations = ab.is_inertial(crt)
print("violation:", violations[0].kind, "at", violations[0].site)
family = ab.witness_search(group, crt, violations[0], budget=6)
print("witness:", family.description)
print("indices:", family.indices)

# ### Exhaustion on small shadows
#
# Shallow shadows can be checked subgroup by subgroup; the worst index
# over the whole lattice is then known, not sampled.  The patch's worst
# case is pinned at the order of its correction, the clash already
# doubles between the two smallest shadows.

for level in (1, 2):
    shadow = ab.truncate(group, level)
    subs = ab.enumerate_subgroups(shadow)
    tp = ab.truncate_endo(patch, shadow)
    tc = ab.truncate_endo(crt, shadow)
    worst_p = max(ab.index_in_sum(h, tp) for h in subs)
    worst_c = max(ab.index_in_sum(h, tc) for h in subs)
    print(f"level {level}: {len(subs)} subgroups,"
          f" worst patch index {worst_p}, worst crt index {worst_c}")
