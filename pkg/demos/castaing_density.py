"""
A countable dense family of selections
======================================

Builds the target-driven family on the step mapping for growing lattice
levels and reports how far the values stick out of the family.
"""

from cadselect import fixtures
from cadselect.mappings import TimeGrid
from cadselect.regularity import check_regularity
from cadselect.selection import castaing_family, castaing_targets, family_excess, family_values

m = fixtures.step_mapping()
grid = TimeGrid.for_mapping(m, 1000)
report = check_regularity(m, grid)

print("level  members  max excess  bound 2^(1-K)")
for K in range(1, 7):
    fam = castaing_family(m, castaing_targets(m, grid, K, d1=report.d1), 1e-6, report, grid)
    excess = family_excess(m, grid, family_values(fam)).max()
    print(f"{K:5d}  {len(fam):7d}  {excess:10.4f}  {2 * 2.0**-K:13.4f}")
