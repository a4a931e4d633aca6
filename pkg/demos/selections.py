"""
Three cadlag selections of one interval mapping
===============================================

``cadlag_interval`` is ``[g, f]`` where the lower bound jumps up at 0.4 and
the upper bound jumps up at 0.7. Only 0.7 is a time where the value leaves
the left limit, so a continuous-off-d1 selection may jump only there.
"""

import numpy as np

from cadselect import fixtures
from cadselect.mappings import TimeGrid
from cadselect.regularity import check_regularity
from cadselect.selection import (
    contraction_gaps,
    epsilon_selection,
    membership_gap,
    michael_selection,
    projection_selection,
    refinement_schedule,
)

m = fixtures.cadlag_interval()
grid = TimeGrid.for_mapping(m, 1000)
report = check_regularity(m, grid)
print("d1 =", report.d1, " d2 =", report.d2)

# all three start from x = 0.1, which the lower bound overtakes at 0.4
x = np.array([0.1])
show = (0.39, 0.4, 0.45, 0.69, 0.7)

# an eps-selection: within eps of the values, jumps only in d1
y = epsilon_selection(m, 0.1, report.d1, grid, start=x)
print("\nepsilon selection (eps=0.1)")
print("  max distance to values:", round(membership_gap(m, grid, y), 4))
print("  jump times:", grid.times[y.jump_nodes(1e-12)].tolist())
print("  values:", [round(float(y(t)[0]), 4) for t in show])

# successive refinement: each iterate stays in a tube around the previous one
y, its = michael_selection(m, 1e-6, report, grid, return_iterates=True, start=x)
eps = refinement_schedule(1e-6)
print("\nsuccessive refinement")
for i, gap in enumerate(contraction_gaps(its), start=1):
    print(f"  round {i}: max step {gap:.2e}  (allowed {2 * eps[i]:.2e})")
print("  final distance to values:", f"{membership_gap(m, grid, y):.1e}")
print("  jump times:", grid.times[y.jump_nodes(1e-9)].tolist())
print("  values:", [round(float(y(t)[0]), 4) for t in show])

# nearest point to x: jumps with the lower bound at 0.4, outside d1
y = projection_selection(m, x, grid)
print("\nnearest-point selection")
print("  jump times:", grid.times[y.jump_nodes(1e-9)].tolist())
print("  values:", [round(float(y(t)[0]), 4) for t in show])
