"""Tunable limits and thresholds shared across modules."""

# dense matrices / in-repo eigensolver
DENSE_LIMIT = 2000
# exact max-flow connectivity; larger graphs report None
CONNECTIVITY_LIMIT = 2000
# largest hierarchical network build_hsw will materialise
VERTEX_BUDGET = 200_000

# eigenvalues closer than this are merged into one multiplicity
CLUSTER_GAP = 1e-6

# relative |h1(2, g) - h1(3, g)| allowed for g >= R_EFFECT_MIN_G
R_EFFECT_THRESHOLD = 0.25
R_EFFECT_MIN_G = 6
# max/min allowed for the rescaled coherence over the scaling window
SCALING_DRIFT_FACTOR = 2.0

# simulation
CONVERGENCE_TOL = 1e-8
DIVERGENCE_FACTOR = 1e6
MIN_DELAY_SLOTS = 20
MAX_TRIALS = 100_000
