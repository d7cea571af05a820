import os
from pathlib import Path

DEFAULT_RESULTS_PATH = Path(os.getenv("FOLIATION_FORGE_RESULTS", "./results"))
DEFAULT_THREADS = int(os.getenv("FOLIATION_FORGE_THREADS", "1") or 1)
DEFAULT_SEED = 20170101
SUMMARY_SCHEMA = 1

# Relative tolerances
RANK_TOLERANCE = 1e-9
GRADIENT_CHECK_TOLERANCE = 1e-6
FINITE_DIFFERENCE_STEP = 1e-5
LIFT_TOLERANCE = 1e-10
FRAME_TOLERANCE = 1e-10
JACOBI_TOLERANCE = 1e-9
SYMMETRY_TOLERANCE = 1e-9
SINGULAR_DISTANCE_GUARD = 1e-12

# Sample sizes
NONVANISHING_NODES_PER_AXIS = 21
SMOOTH_SAMPLE_POINTS = 1000
INVOLUTION_WITNESS_NODES = 5

# Flows
DEFAULT_STEP = 1e-3
DEFAULT_MIN_STEP = 1e-9
NORM_GROWTH_LIMIT = 10.0

DEFAULT_RADII = [1e-1, 10 ** -1.5, 1e-2, 10 ** -2.5, 1e-3]
DEFAULT_RADII_POINTS = 5

# Half-widths of the model chart boxes; grids default to [-1, 1] on every non-periodic axis
LEFSCHETZ_RADIUS = 1
FOLD_RADIUS = 2
UNIT_BOX = (-1, 1)
