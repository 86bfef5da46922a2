# %% [markdown]
# # Solving one trace per cluster
#
# `x` is only ever compared against constants, so its exact value matters only
# through which comparisons it satisfies. `y` also appears in `y' = y + 1`,
# so it has to match exactly.

# %%
from dpnalign import conformance, standard_profile
from dpnalign.align import transfer_alignment
from dpnalign.cluster import cluster_log, extract_atoms, signature
from dpnalign.cost import alignment_cost, render_alignment
from dpnalign.samples import clustering_traces, running_example

net = running_example()
atoms = extract_atoms(net)
print("restricted:", sorted(atoms.restricted))
print("atoms on x:", sorted(str(a) for a in atoms.ats["x"]))

# %%
traces = clustering_traces()
for t in traces:
    print(t.id, t, signature(t, atoms))

clusters = cluster_log(traces, atoms)
print([c.member_ids for c in clusters])

# %% solve the representative, then move its alignment to the other member
pf = standard_profile()
first = clusters.clusters[0]
rep, other = first.members
res = conformance(net, rep, pf)
moved = transfer_alignment(res.alignment, rep, other, net, atoms)
print(render_alignment(moved))
print("transferred cost", alignment_cost(moved, pf), "== solved cost", conformance(net, other, pf).cost)
