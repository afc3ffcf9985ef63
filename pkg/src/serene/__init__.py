"""Alternating n-quasigroups, their simplicial complexes, and the free and
finite completions that realize oriented triangulations."""
from .qcore import OperationTable, PreconditionError, StructureError, divide, inp, nct, out, validate
from .constructions import builtin, builtin_names
from .complex import OrientedComplex, SimpComplex, natural_orientation, orient, simplicize
from .topology import serenation_report, surface_genus, z2_homology
from .ncgraph import graph_report, johnson_embedding, nc_graph
from .geometry import chart_input, chart_output, reflection_oracle
from .freecomplete import seed, step, verify_serene
from .latincomplete import PartialCube, check_partial, complete, quasifinite_probe

__version__ = "0.1.0"

__all__ = [
    "OperationTable",
    "PreconditionError",
    "StructureError",
    "divide",
    "inp",
    "nct",
    "out",
    "validate",
    "builtin",
    "builtin_names",
    "OrientedComplex",
    "SimpComplex",
    "natural_orientation",
    "orient",
    "simplicize",
    "serenation_report",
    "surface_genus",
    "z2_homology",
    "graph_report",
    "johnson_embedding",
    "nc_graph",
    "chart_input",
    "chart_output",
    "reflection_oracle",
    "seed",
    "step",
    "verify_serene",
    "PartialCube",
    "check_partial",
    "complete",
    "quasifinite_probe",
]
