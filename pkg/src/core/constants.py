"""
Constants for file formats, run defaults and plot styling.
"""


class ClareDefaults:
    """Defaults of the evaluation run."""

    LATENT_DIM_FROM = 1
    LATENT_DIM_TO = 400
    LATENT_DIM_BY = 20

    ATTAINMENT_RATE = 0.95
    TOLERANCE_LEVEL = 0.05
    CVQLINES = 0.9

    FOLDS = 5
    SEED = 1

    # Autoencoder
    AE_HIDDEN = 600
    AE_EPOCHS = 100
    AE_BATCH = 16
    AE_LEARNING_RATE = 1e-3
    AE_BETA1 = 0.9
    AE_BETA2 = 0.999
    AE_EPSILON = 1e-8

    # Wavelet decomposition depth cap
    DWT_MAX_DEFAULT_LEVELS = 4


class FileFormatConstants:
    """Binary container layouts (all little-endian)."""

    # Matrix container: magic, version u32, N u64, T u64, kind u8, rows u64, cols u64
    CLRE_MAGIC = b"CLRE"
    CLRE_VERSION = 1
    CLRE_HEADER_FORMAT = "<4sIQQBQQ"
    CLRE_HEADER_SIZE = 41

    GRID_KIND_ONE_D = 1
    GRID_KIND_TWO_D = 2

    # Codec container: magic, version u32, method u8, section count u32
    CLRC_MAGIC = b"CLRC"
    CLRC_VERSION = 1
    CLRC_HEADER_FORMAT = "<4sIBI"

    DTYPE_FLOAT64 = 1
    DTYPE_INT64 = 2

    # CSV floats are written with this many significant digits (round trip)
    FLOAT_FORMAT = ".17g"


class PlotColors:
    """Series colours of the summary plot legend."""

    MEAN_CV = "#f2c500"          # yellow
    MEAN_TRAIN = "#2ca02c"       # green
    MIN_CV = "#1f77b4"           # blue
    MAX_CV = "#d62728"           # red
    USER_QUANTILE = "#9467bd"    # purple
    ATTAINMENT_QUANTILE = "#c8c8c8"  # light gray

    EPSILON_GUIDE = "#808080"
    QD_MARKER = "#404040"
    AXIS = "#000000"
    BACKGROUND = "#ffffff"
