"""Newton diagrams of multivariate polynomials and numerical checks of the
weak-type (1,1) bound for the associated multi-parameter maximal operators."""

from newton_maximal.config import ExperimentConfig, load_experiment_config
from newton_maximal.diagram import NewtonDiagram, VertexData, build_diagram, decompose_index
from newton_maximal.errors import (
    ConfigError,
    DiagramError,
    GridError,
    NewtonMaximalError,
    PolynomialSyntaxError,
    QuadratureError,
    ResolutionError,
)
from newton_maximal.grid import EtaWindow, GridFunction, GridSpec
from newton_maximal.polynomial import Polynomial, parse_polynomial
from newton_maximal.report import VerificationReport, Violation

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DiagramError",
    "EtaWindow",
    "ExperimentConfig",
    "GridError",
    "GridFunction",
    "GridSpec",
    "NewtonDiagram",
    "NewtonMaximalError",
    "Polynomial",
    "PolynomialSyntaxError",
    "QuadratureError",
    "ResolutionError",
    "VerificationReport",
    "VertexData",
    "Violation",
    "build_diagram",
    "decompose_index",
    "load_experiment_config",
    "parse_polynomial",
]
