"""Doubly nonlinear p-Laplacian models of groundwater flow.

d/dt b(u) - c Delta_p u = f with zero Dirichlet data: an implicit solver,
self-similar solutions, maximum/comparison principle counterexamples and
flow-law fits for fracture networks.
"""

__version__ = "0.1.0"

from .barenblatt import SelfSimilarSolution, front_radius, make_solution, shifted_solution  # noqa: E402
from .constitutive import AquiferHead, ConstitutiveLaw, HeadTransform, Identity, PowerRoot  # noqa: E402
from .domains import Interval, Radial, Rectangle  # noqa: E402
from .lawfit import fit_darcy, fit_power, load_dataset  # noqa: E402
from .solver import NumericsConfig, ProblemSpec, solve  # noqa: E402

__all__ = [
    "__version__",
    "AquiferHead",
    "ConstitutiveLaw",
    "HeadTransform",
    "Identity",
    "PowerRoot",
    "Interval",
    "Radial",
    "Rectangle",
    "NumericsConfig",
    "ProblemSpec",
    "solve",
    "SelfSimilarSolution",
    "make_solution",
    "front_radius",
    "shifted_solution",
    "fit_darcy",
    "fit_power",
    "load_dataset",
]
