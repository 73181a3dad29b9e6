"""
Configuration
Numerical tolerances, sampling budgets and run defaults for the lab.
Edit the values here; command-line flags override the run defaults.
"""

TOOL_NAME = "schatten-lab"
TOOL_VERSION = "0.3.0"

# Linear algebra tolerances
RANK_TOL = 1e-9             # numerical rank: sigma_j > RANK_TOL * sigma_1
SVD_RECON_TOL = 1e-9        # relative Frobenius reconstruction error
SVD_ORTHO_TOL = 1e-10       # ||U^T U - I|| for SVD factors
STIEFEL_ORTHO_TOL = 1e-12
PROJECTION_TOL = 1e-10
BALL_TOL = 1e-10            # slack on ||A||_p <= 1 preconditions

# Sampling budgets
REJECTION_BUDGET = 10**7    # proposals before rejection sampling gives up
REJECTION_MAX_DIM = 6       # matrix side cap for rejection sampling
BATCH_SIZE = 4096           # Monte Carlo batch size (fixed partition)

# Net construction
GREEDY_BUDGET = 2000        # consecutive rejections before declaring saturation
GREEDY_PROPOSAL_CAP = 200_000
GRID_CAPACITY = 10**8       # largest grid cardinality lq_ball_net accepts
GRID_MATERIALIZE_CAP = 2_000_000
DEFAULT_C_Q = 1.0
DEFAULT_ALPHA = 1.0

# Volumes
MIN_GRASSMANN_HITS = 100    # fewer hits than this flags a widened CI

# Entropy bounds
PACKING_SEPARATION_C = 0.25
GRASSMANN_PACKING_PROPOSALS = 1000  # greedy packings stop here; separation is what counts
SANDWICH_MC_MAX_DIM = 4     # volume ratios by Monte Carlo up to this N, inclusion bound above
SANDWICH_VOLUME_SAMPLES = 200_000
SANDWICH_AUDIT_SAMPLES = 100
GREEDY_UPPER_MAX_DIM = 2    # greedy S_q nets of B_p^N for q <= p only up to this N

# Recovery
IHT_ITERS = 300
IHT_STEP = 1.0
IHT_DIVERGENCE_WINDOW = 10
IHT_MAX_HALVINGS = 8
RECOVERY_POOL_RANKS = (1, 2, 4)

# Runs
DEFAULT_SEED = 0
THREADS_ENV = "SCHATTEN_LAB_THREADS"
RUNS_DB = "runs.db"
