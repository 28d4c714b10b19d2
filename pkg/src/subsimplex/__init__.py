"""Principal subsimplex analysis for compositional data.

Backwards dimension reduction on the unit simplex (PSA-S) and on the
unit nonnegative orthant of the sphere (PSA-O), together with benchmark
PCA variants (raw, power-transformed and log-ratio), seeded synthetic
datasets and a reporting CLI.
"""

from . import benchmarks, psa_o, psa_s, synthdata
from .benchmarks import PcaResult, TransformSpec, ZeroReplacement, pca, zero_replace
from .dataset import Dataset, ingest_csv, write_dataset
from .errors import SubsimplexError
from .geometry import (
    Composition,
    OrthantVertexSet,
    SimplexVertexSet,
    SphericalPoint,
    barycentric_coordinates,
    geodesic_distance,
    orthant_to_simplex,
    simplex_to_orthant,
)
from .psa_o import PsaODecomposition
from .psa_s import PsaSDecomposition
from .synthdata import generate_example1, generate_example2

__all__ = [
    "Composition",
    "Dataset",
    "OrthantVertexSet",
    "PcaResult",
    "PsaODecomposition",
    "PsaSDecomposition",
    "SimplexVertexSet",
    "SphericalPoint",
    "SubsimplexError",
    "TransformSpec",
    "ZeroReplacement",
    "barycentric_coordinates",
    "benchmarks",
    "generate_example1",
    "generate_example2",
    "geodesic_distance",
    "ingest_csv",
    "orthant_to_simplex",
    "pca",
    "psa_o",
    "psa_s",
    "simplex_to_orthant",
    "synthdata",
    "write_dataset",
    "zero_replace",
]

__version__ = "0.1.0"
