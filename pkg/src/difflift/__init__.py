"""Differential liftings of stressed frameworks and polytopal complexes."""
from .core import DEFAULT_TOL, MForm, Tolerances, covector, gram_volume, hodge_star, signed_det, wedge
from .errors import *  # noqa: F401,F403
from .framework import (Framework, Stress, equilibrium_matrix, equilibrium_residuals,
                        is_self_stress, self_stress_basis, subdivide_crossings)
from .arrangement import ChamberComplex, build_chamber_complex, locate_chamber
from .lifting2d import (DifferentialLifting2D, PolyhedralLifting, differential_lifting_2d,
                        integrate_polyhedral_lifting, recover_stress, reciprocal_diagram)
from .homotopy import (CrossingWord, PolygonalLoop, cone_crossings, elementary_lifting_form,
                       gauss_linking_integral, lifting_of_loop, lifting_of_word, linking_number,
                       recover_stress_nd, vertex_monodromy)
from .polytopal import (Flat, ForceLoad, MFramework, PolytopalComplex, associated_mframework,
                        convert_stress_forceload, face_form, facet_monodromy, forceload_basis,
                        forceload_residuals, lifting_of_word_m, parallel_prism_complex)
from .grassmann import (AffineFlat, CrossingEvent, GrassmannPath, flat_distance, grassmann_lifting,
                        path_crossings, trivalent_monodromy_identity)

__version__ = "0.1.0"
