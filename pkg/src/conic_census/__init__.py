"""Exact point counts, local densities and Peyre constants for conic bundles over Q."""

__version__ = "0.1.0"

from .errors import EngineError, InvalidInputError, ToleranceNotMet
from .projective import ProjPoint, canonicalize, enumerate_base, height
from .polynomials import MultiPoly
from .bundle import (
    ConicBundleSurface,
    FibreClass,
    SurfaceError,
    discriminant,
    fibre_class,
    import_cubic_with_line,
    validate,
)
from .heights import ExactHeight, HeightModel, base_bound, fibre_box, standard_height
from .conics import (
    ConicParam,
    TernaryForm,
    bsj_diagnostic,
    count_box_points,
    count_fibre,
    find_point,
    hilbert_symbol,
    insoluble_places,
    is_soluble,
    local_solubility,
    parametrize,
)
from .localdata import (
    FibreReport,
    count_points_mod,
    fibre_report,
    peyre_constant,
    sigma_inf,
    sigma_inf_weights,
    sigma_p,
    tamagawa,
)
from .census import (
    BtReport,
    CensusReport,
    CountSlice,
    NorthcottReport,
    PeyreSum,
    asymptotic_probe,
    bt_probe,
    count_total,
    northcott_probe,
    peyre_sum,
    surface_digest,
)

__all__ = [
    "__version__",
    "EngineError",
    "InvalidInputError",
    "ToleranceNotMet",
    "ProjPoint",
    "canonicalize",
    "enumerate_base",
    "height",
    "MultiPoly",
    "ConicBundleSurface",
    "FibreClass",
    "SurfaceError",
    "discriminant",
    "fibre_class",
    "import_cubic_with_line",
    "validate",
    "ExactHeight",
    "HeightModel",
    "base_bound",
    "fibre_box",
    "standard_height",
    "ConicParam",
    "TernaryForm",
    "bsj_diagnostic",
    "count_box_points",
    "count_fibre",
    "find_point",
    "hilbert_symbol",
    "insoluble_places",
    "is_soluble",
    "local_solubility",
    "parametrize",
    "FibreReport",
    "count_points_mod",
    "fibre_report",
    "peyre_constant",
    "sigma_inf",
    "sigma_inf_weights",
    "sigma_p",
    "tamagawa",
    "BtReport",
    "CensusReport",
    "CountSlice",
    "NorthcottReport",
    "PeyreSum",
    "asymptotic_probe",
    "bt_probe",
    "count_total",
    "northcott_probe",
    "peyre_sum",
    "surface_digest",
]
