"""Two-mirror periscope synthesis with ray-trace and Frobenius verification.

The heavy lifting lives in the compiled `_periscope` extension; this package
re-exports its surface.
"""

from ._periscope import (  # noqa: F401
    GnomonicChart,
    PeriscopeError,
    ReversedSpec,
    ReversedSynthesis,
    ScalarField,
    SphericalSpec,
    SphericalSynthesis,
    VectorField3,
    contact_field,
    demo_names,
    dual_one_form,
    fd_gradient,
    frobenius_defect,
    frobenius_report,
    geodesic_direction,
    periscope_field_pullback,
    reflect_direction,
    reversed_displacement_field,
    run_demo,
    run_scenario_file,
    sphere_exp,
    tangential_gradient,
    vector_field,
)

__all__ = [
    "GnomonicChart",
    "PeriscopeError",
    "ReversedSpec",
    "ReversedSynthesis",
    "ScalarField",
    "SphericalSpec",
    "SphericalSynthesis",
    "VectorField3",
    "contact_field",
    "demo_names",
    "dual_one_form",
    "fd_gradient",
    "frobenius_defect",
    "frobenius_report",
    "geodesic_direction",
    "periscope_field_pullback",
    "reflect_direction",
    "reversed_displacement_field",
    "run_demo",
    "run_scenario_file",
    "sphere_exp",
    "tangential_gradient",
    "vector_field",
]
