"""Frozen constants for the synthetic CPT corpus generator.

These values are part of the package's reproducibility contract: a given
(n_sites, seed) pair must yield the identical corpus in any environment, so
changing anything here is a breaking change (bump CORPUS_VERSION).
"""

CORPUS_VERSION = 1

# Layered stratigraphy.
MIN_LAYERS = 2
MAX_LAYERS = 5
MIN_LAYER_THICKNESS_M = 0.8
IC_LAYER_LOW = 1.3
IC_LAYER_HIGH = 3.6

# Soil-behavior index maps to resistance through a decreasing logistic
# (clayey soils resist less), with per-layer scatter.
QC_LOGISTIC_SCALE = 230.0
QC_LOGISTIC_OFFSET = 20.0
QC_LOGISTIC_RATE = 2.2
QC_LOGISTIC_CENTER = 2.3
QC_LAYER_NOISE_STD = 15.0
QC_LAYER_LOW = 20.0
QC_LAYER_HIGH = 250.0

# Depth-correlated measurement noise: stationary AR(1), unit marginal
# variance, scaled per channel.
AR1_RHO = 0.9
IC_NOISE_STD = 0.06
QC_NOISE_STD = 5.0
IC_CLIP_LOW = 1.05
IC_CLIP_HIGH = 3.95
QC_CLIP_LOW = 5.0
QC_CLIP_HIGH = 300.0

# Site attribute ranges (uniform draws).
PGA_LOW, PGA_HIGH = 0.1, 0.6
GWD_LOW, GWD_HIGH = 0.5, 4.0
L_LOW, L_HIGH = 10.0, 500.0
SLOPE_LOW, SLOPE_HIGH = 0.0, 5.0
ELEV_LOW, ELEV_HIGH = 0.5, 10.0

# Deterministic label rule: spreading occurs when
#   W_IC*(IC_CENTER - mean ic over 1-3 m) + W_PGA*(pga - PGA_CENTER)
#   + W_GWD*(GWD_CENTER - gwd) + W_L*ln(L_CENTER / l)  >  0.
# Soft soil near the surface (low ic), strong shaking, shallow water, and a
# close river channel all push toward spreading. The ic term carries roughly
# two thirds of the score variance, so the profile shape is genuinely
# informative beyond the site attributes.
W_IC = 2.0
IC_CENTER = 2.45
W_PGA = 3.0
PGA_CENTER = 0.35
W_GWD = 0.45
GWD_CENTER = 2.25
W_L = 0.35
L_CENTER = 200.0
LABEL_WINDOW_TOP_M = 1.0
LABEL_WINDOW_BOTTOM_M = 3.0
