"""dhlab configuration constants."""

# Input/report document schema
SCHEMA_VERSION = "1"
SCENARIO_KINDS = ("form", "counterexample", "dh_profile", "wallcross_spec", "hl_data")

# Exit codes
EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_INCONSISTENT = 3

# Six-manifold wall crossing
SIX_MANIFOLD_DIMENSION = 6
QUOTIENT_DIMENSION = 4

# Epsilon search (1/m for m = 1..bound)
DEFAULT_EPSILON_BOUND = 1000

# Plot emission
PLOT_SIGNIFICANT_DIGITS = 12
PLOT_DECIMAL_PRECISION = 40
DEFAULT_PLOT_RESOLUTION = 100

# CLI defaults
DHLAB_CONFIG = {
    "jobs": 1,
    "strict_taxonomy": True,
    "resolution": DEFAULT_PLOT_RESOLUTION,
    "log_format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    "report_suffix": ".report.json",
}
