"""Cech-Deligne cocycles for tame symbols, metrized line bundles and their
hermitian and Hodge-Tate companions, with exact integer slots and sampled
checks for the form slots."""

from .errors import *  # noqa: F401,F403
from .exact_algebra import (
    GaussianRational, RationalFunction, parse_rational, rf_valuation, tame_symbol_value,
)
from .cover_nerve import SectorCover, branch_for, sample_points, winding_loop
from .form_calculus import Form, d, evaluate, parse_expr, pi_p
from .cech_engine import (
    CechCochain, cone_cup_alpha, deligne_cup, hermitian_cup, hermitian_homotopy, is_cocycle,
    total_D, untwist,
)
from .bundle_data import (
    HermitianMetricData, LineBundleData, canonical_connection, load_bundle, z_power_family,
)
from .symbols import (
    compatibility_obstruction, function_class, hermitian_symbol_fL, hermitian_symbol_LL,
    hermitian_tame_symbol, symbol_fL, symbol_LL, tame_symbol,
)
from .heisenberg_model import HeisLatticeElem, HeisPoint, lattice_act, log_rho, omega_form
from .holonomy import holonomy, tame_holonomy
from .hodge_tate import (
    PeriodData, TensorQQ, big_period, extension_class, half_log_B, mult_map, project_kahler,
    project_R1, unique_lift,
)

__version__ = "0.1.0"
