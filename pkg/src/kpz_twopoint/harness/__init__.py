from .config import RunManifest, load_config, parse_value
from .verify import SUITES, mc_vs_exact_cdf, run_verify, step_vs_finite_F
