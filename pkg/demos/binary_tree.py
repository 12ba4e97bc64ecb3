"""
A reversible walk on binary words
=================================

The walk appends 0 or 1 with probabilities p0, p1 and deletes the last letter
with probability p_minus.  It is reversible, so it defines conductances on the
binary tree.  The least energy of the truncated solution of
(Laplacian + I)u = 0 with u(root) = 1 is tracked as the depth grows.
"""

from energynet.models import BinaryTreeModel, binary_tree_network, tree_energy_trend

model = BinaryTreeModel(0.4, 0.4, 0.2, depth=8)
build = binary_tree_network(model)
print(f"depth 8: {len(build.network)} words, reversibility defect {build.reversibility_defect:.1e}")

for p in ((0.45, 0.45, 0.1), (0.425, 0.425, 0.15), (0.4, 0.4, 0.2), (0.25, 0.25, 0.5)):
    trend = tree_energy_trend(BinaryTreeModel(*p, depth=5))
    energies = ", ".join(f"{e:.4g}" for e in trend.energies)
    print(f"p={p}: energies at depths {trend.depths} = [{energies}] -> {trend.classification}")

# with p0 = p1 = p the level-k energy terms scale like (2 p_minus / p)^k, so the
# increments stop shrinking once p_minus reaches 1/5, which is where (0.4, 0.4, 0.2) sits
