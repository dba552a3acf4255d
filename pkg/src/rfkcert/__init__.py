"""Numerical certificates for reverse Faber-Krahn inequalities.

Mixed p-Laplacian eigenvalues on multiply connected domains are compared
against their concentric-annulus references through measure-preserving
transplantation, with independent radial, 1D finite-difference, and planar
finite-element oracles backing every reported number.
"""

from .checks import check_isoperimetric, check_nagy
from .domains import (
    Ball,
    ConcentricAnnulus,
    EccentricAnnulus,
    InfeasibleReferenceError,
    PolygonWithHoles,
    reference_annulus,
    reference_annulus_from_measures,
)
from .fd1d import fd1d_eigenvalue, fd1d_eigenvalues
from .fem2d import Eigenpair2D, p2_eig, plap_eig_descent, richardson
from .mesh import Mesh2D, annulus_mesh, disk_mesh, rectangle_mesh
from .nodal import MU2, NU2, TAU2, nodal_counterexample, nodal_radial_candidate
from .params import ProblemParams, Side
from .polygon import parallel_profile_polygon
from .profiles import ParallelProfile, parallel_profile_exact, parallel_profile_mc
from .radial import (
    BoundaryCondition,
    RadialEigenpair,
    RadialProblem,
    rayleigh_radial,
    shoot,
    solve_first_radial,
    solve_second_radial,
)
from .report import VerificationReport
from .transplant import (
    ParamMaps,
    TransplantReport,
    build_maps,
    check_map_lemmas,
    verify_rfk,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BoundaryCondition",
    "ConcentricAnnulus",
    "EccentricAnnulus",
    "Eigenpair2D",
    "InfeasibleReferenceError",
    "MU2",
    "Mesh2D",
    "NU2",
    "ParallelProfile",
    "ParamMaps",
    "PolygonWithHoles",
    "ProblemParams",
    "RadialEigenpair",
    "RadialProblem",
    "Side",
    "TAU2",
    "TransplantReport",
    "VerificationReport",
    "annulus_mesh",
    "build_maps",
    "check_isoperimetric",
    "check_map_lemmas",
    "check_nagy",
    "disk_mesh",
    "fd1d_eigenvalue",
    "fd1d_eigenvalues",
    "nodal_counterexample",
    "nodal_radial_candidate",
    "p2_eig",
    "parallel_profile_exact",
    "parallel_profile_mc",
    "parallel_profile_polygon",
    "plap_eig_descent",
    "rayleigh_radial",
    "rectangle_mesh",
    "reference_annulus",
    "reference_annulus_from_measures",
    "richardson",
    "shoot",
    "solve_first_radial",
    "solve_second_radial",
    "verify_rfk",
]
