//! Explicit cohomology models: truncated power-series models with the
//! derivative operator, the torus and two-sphere extensions with their ring
//! automorphisms, bar-construction group cohomology, finite simplicial sets
//! with circle integration, and circle local systems.

pub mod bar;
pub mod circle;
pub mod poly;
pub mod simplicial;

pub use bar::{bar_cohomology, BarComplex};
pub use circle::{circle_local_cohomology, CircleLocalSystem};
pub use poly::{
    build_s2_model, build_tduality_base, build_z_model, compose_d, d_dz, fiber_integrate_t2,
    phi_star, phi_star_inverse, s2_phi_action, torus_extend, ExtGen, GradedOperator, Monomial,
    PolyModel,
};
pub use simplicial::{
    c_map, circle, classifying_space, point, product, simplicial_integration,
    FiniteSimplicialSet, SimplicialMap,
};
