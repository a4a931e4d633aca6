"""
Right inner semicontinuity survives intersections
=================================================

Intersects pairs of fixtures with a fattened copy of the second one and
re-runs the right inner semicontinuity check on the result.
"""

from cadselect import fixtures
from cadselect.mappings import IntersectedMapping, TimeGrid
from cadselect.regularity import check_right_isc

pairs = [("step_mapping", "moving_box", 0.5), ("bounded_interval", "cadlag_interval", 0.5),
         ("moving_ball", "constant_ball", 0.1), ("cadlag_interval", "sliding_interval", 0.2)]

for first, second, eps in pairs:
    M = IntersectedMapping(getattr(fixtures, first)(), getattr(fixtures, second)(), eps)
    v = check_right_isc(M, TimeGrid.for_mapping(M, 1000))
    print(f"{first} & ({second} + {eps}B): {v.status}, {v.notes['probe_points']} probe points")
