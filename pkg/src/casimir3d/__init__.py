"""Boundary-element Casimir interactions between perfect conductors.

Surface currents are expanded in edge basis functions on closed triangle
meshes; interaction energies follow from log-determinant ratios of the
resulting weak-form matrices integrated over imaginary wavenumber, and
forces from the matching trace form.
"""

from .assembly import (
    AssemblyError, InteractionMatrix, MatrixDerivative,
    assemble, assemble_dz, assemble_inf,
)
from .backend import COMPILED, backend_name
from .geometry import (
    Configuration, GeometryFileError, ObjectInstance, OverlapError,
    RigidTransform, compose, parse_geometry, tetrahedron_pivot,
)
from .mesh import (
    MeshFormatError, MeshValidationError, RwgBasisSet, TriangleMesh,
    build_rwg_basis, generate_capsule, generate_sphere, generate_tetrahedron,
    parse_msh,
)
from .quadrature import QuadratureSpec
from .spectral import (
    FactorizationError, force_eigs, force_trace, integrand_sample,
    logdet_ratio, logdet_ratio_eig,
)
from .xi import SweepResult, integrate_energy, integrate_force, kappa_nodes

__version__ = "0.1.0"

__all__ = [
    "AssemblyError", "COMPILED", "Configuration", "FactorizationError",
    "GeometryFileError", "InteractionMatrix", "MatrixDerivative",
    "MeshFormatError", "MeshValidationError", "ObjectInstance",
    "OverlapError", "QuadratureSpec", "RigidTransform", "RwgBasisSet",
    "SweepResult", "TriangleMesh", "assemble", "assemble_dz", "assemble_inf",
    "backend_name", "build_rwg_basis", "compose", "force_eigs", "force_trace",
    "generate_capsule", "generate_sphere", "generate_tetrahedron",
    "integrand_sample", "integrate_energy", "integrate_force", "kappa_nodes",
    "logdet_ratio", "logdet_ratio_eig", "parse_geometry", "parse_msh",
    "tetrahedron_pivot",
]
