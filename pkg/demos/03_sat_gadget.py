# %% [markdown]
# # Satisfiability as a conformance question
#
# `phi` writes every boolean variable and is guarded by a formula. A trace
# holding just `phi` fits with cost 0 exactly when the formula has a model.
# Otherwise the cheapest option skips `phi` with a log move and fires the
# data-free `top` branch as a model move, at cost 2.

# %%
import random

from dpnalign import conformance, standard_profile
from dpnalign.samples import cnf_formula, random_cnf, sat_gadget, sat_gadget_trace

rng = random.Random(7)
names = ("v0", "v1", "v2")
for _ in range(6):
    cnf = random_cnf(rng, names)
    net = sat_gadget(cnf_formula(cnf), names)
    res = conformance(net, sat_gadget_trace(), standard_profile())
    verdict = "satisfiable" if res.cost == 0 else "unsatisfiable"
    witness = res.run[0].writes if res.cost == 0 else {}
    print(f"{len(cnf):2d} clauses  cost {res.cost}  {verdict}  {witness}")
