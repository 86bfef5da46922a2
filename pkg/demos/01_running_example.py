# %% [markdown]
# # Aligning two traces against a small data-aware net
#
# The net writes `x` in `a`, then either writes `y` in `b` and closes with a
# silent step, or closes silently right away. Both silent steps need
# `x <= 3` and `y < 4`.

# %%
from dpnalign import conformance, standard_profile, trace
from dpnalign.samples import running_example
from dpnalign.cost import render_alignment

net = running_example()
pf = standard_profile()
print(net)

# %% a trace the net can replay exactly
fit = trace(("a", {"x": 2}), ("b", {"y": 1}), id="fit")
res = conformance(net, fit, pf)
print(f"cost {res.cost} at bound {res.bound} after {res.checks} solver checks")
print(render_alignment(res.alignment))

# %% x = 4 blocks both silent steps, so one written value has to change
off = trace(("a", {"x": 4}), ("b", {"y": 1}), id="off")
res = conformance(net, off, pf)
print(f"cost {res.cost}")
print(render_alignment(res.alignment))

# %% the label-only profile ignores data but charges for the silent step
from dpnalign import levenshtein_profile

print("levenshtein:", conformance(net, off, levenshtein_profile()).cost)

# %% the same problem as a standalone SMT-LIB script
from dpnalign.encoder import encode

script = encode(net, off, res.bound, pf).to_smtlib()
print(script.count("\n"), "lines; first few:")
print("\n".join(script.splitlines()[:6]))
