"""
Which mappings admit a cadlag representation?
=============================================

Runs the three regularity checks on the fixture battery and on the
oscillating singleton, and prints the left-jump sets.
"""

import warnings

from cadselect import fixtures
from cadselect.mappings import TimeGrid
from cadselect.regularity import check_regularity

warnings.simplefilter("ignore")

# the battery: every mapping here should pass all three checks
for name, m in fixtures.characterization_battery().items():
    grid = TimeGrid.for_mapping(m, 1000)
    r = check_regularity(m, grid)
    print(f"{name:20s} isc={r.isc.status:5s} vec={r.vec_domain.status:5s} "
          f"assumption1={r.assumption1.status:15s} d1={r.d1} d2={r.d2}")

# the oscillator is right inner semicontinuous, yet it has no left limit at pi
m = fixtures.oscillating_singleton()
r = check_regularity(m, TimeGrid.for_mapping(m, 1000))
print()
print("oscillating_singleton")
print("  isc         ", r.isc.status)
print("  vec domain  ", r.vec_domain.status, [w["t"] for w in r.vec_domain.witnesses])
print("  assumption1 ", r.assumption1.status, "first witness:", r.assumption1.witnesses[0])

# the left-continuous step fails right inner semicontinuity; the witness
# records the point of the value at 0.5 that the values just after miss
m = fixtures.left_continuous_step()
r = check_regularity(m, TimeGrid.for_mapping(m, 1000))
w = r.isc.witnesses[0]
print()
print("left_continuous_step isc:", r.isc.status, f"t={w['t']} y={w['y']} distance={w['distance']:.3f}")
