# billiard_prop/utils/constants.py

"""Common constants used across the billiard-prop package."""

# Significant digits for every floating value written to disk.
FLOAT_DIGITS = 17

# Prefix used for log messages that denote actions within a main step
SUBSTEP_INDENT = "    "

# Boundary classification tolerance, in units of the box length d.
DEFAULT_BOUNDARY_TOL_REL = 1e-12

DEFAULT_EPSILON = 1e-3
DEFAULT_THETA_N_MAX = 4000
DEFAULT_THETA_TOL = 1e-17
DEFAULT_QUAD_ORDER = 64
DEFAULT_QUAD_TOL = 1e-10

# Lattice points per axis, product shapes and rhombus/triangle
DEFAULT_GRID_POINTS = 65
DEFAULT_ROTATED_GRID_POINTS = 97
