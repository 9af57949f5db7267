"""
Enumerating elementary subgroups
================================

Finite subgroups are enumerated as sets of canonical byte encodings. The
relative elementary subgroup is built along two independent routes which
have to agree.
"""

# %%
import random

from chevlab.chevrep import unipotent
from chevlab.grouplab import (
    CongruenceLevel,
    elementary_subgroup,
    make_ambient,
    mixed_commutator,
    relative_elementary,
)
from chevlab.rings import FiniteRing, ideal_from_generators

amb = make_ambient("A2", FiniteRing((4,)))
R = amb.ring

# %% E(A2, Z/4) is all of SL(3, Z/4): 168 * 2^8 elements
whole = elementary_subgroup(amb, R.whole())
print(len(whole), whole.fingerprint()[:16])

# %% Level (2): E((2)) against its normal closure E(R, (2))
I = ideal_from_generators(R, [2])
E2 = elementary_subgroup(amb, I)
rel = relative_elementary(amb, I)
print("E((2))   ", len(E2))
print("E(R,(2)) ", len(rel.by_normal_closure), "normal closure")
print("         ", len(rel.by_z_generators), "from z-generators")
print("E((2)) is normal:", E2.same_set(rel.group))

# %% Everything here lies in the level-(2) congruence kernel
print(rel.group.all_in_kernel(CongruenceLevel.of(I)))

# %% x_alpha(1) is not of level (2), x_alpha(2) is
r = amb.rep.system.roots[0]
print(unipotent(amb.rep, r, R(1), R) in E2, unipotent(amb.rep, r, R(2), R) in E2)

# %% Mixed commutators over Z/8, where AB = (4) is nonzero
amb8 = make_ambient("A2", FiniteRing((8,)))
I8 = ideal_from_generators(amb8.ring, [2])
E = elementary_subgroup(amb8, I8)
ER = relative_elementary(amb8, I8).group
plain = mixed_commutator(E, E)
relative = mixed_commutator(ER, ER)
print(len(E), len(ER), len(plain), len(relative), plain.same_set(relative))

# %% A random element of [E(A), E(B)]
print(plain.random_element(random.Random(0)).matrix[0])
