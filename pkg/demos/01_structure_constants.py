"""
Structure constants from explicit matrices
==========================================

Every Chevalley commutator formula used by the package is read off from
matrices, not typed in. This walk-through builds the three rank-2
representations, prints the positive-pair formulas and checks them against
the reference tables.
"""

# %%
from chevlab.chevrep import build_rep, commutator, commutator_formula, reference_mismatches, unipotent
from chevlab.polynomials import variables

a, b = variables("a", "b")

# %% The representations: SL3, Sp4 in its 4-dim module, G2 in its 7-dim module
for label in ("A2", "C2", "G2"):
    rep = build_rep(label)
    print(label, "dimension", rep.dimension, "roots", len(rep.system.roots))

# %% C2 with alpha long and beta short
C2 = build_rep("C2")
al, be = C2.system.names["alpha"], C2.system.names["beta"]
print(commutator_formula(C2, al, be))

# %% The same commutator as a matrix over Z[a, b]
g = commutator(unipotent(C2, al, a), unipotent(C2, be, b))
print(g.to_sympy())

# %% G2: alpha short, beta long
G2 = build_rep("G2")
S = G2.system
for x, y in [("alpha", "beta"), ("alpha", "2*alpha + beta"), ("alpha + beta", "2*alpha + beta")]:
    print(commutator_formula(G2, S.parse_root(x), S.parse_root(y)))

# %% Empty list means the extracted tables match the reference ones
print("C2 mismatches:", reference_mismatches(C2))
print("G2 mismatches:", reference_mismatches(G2))
