//! Tropical bases of Looijenga pairs, spines and tropical cylinders, the
//! spine extension algorithm and focus-focus wall-crossing counts.
//!
//! All arithmetic is exact (arbitrary precision integers and rationals).

pub mod count;
pub mod error;
pub mod extension;
pub mod family;
pub mod io;
pub mod lattice;
pub mod num;
pub mod series;
pub mod spine;

pub use count::{binomial_oracle, count, count_spine, count_table, symmetry_check, virtual_dim, CountQuery};
pub use error::{Error, Result};
pub use extension::{
    cylinder_in_b, extend, extend_ordered, extend_step, lift_to_tilde, ray_trace, End, Extension, ExtensionOrder,
    ExtensionResult, ExtensionStep, RayHit, DEFAULT_MAX_STEPS,
};
pub use family::{del_pezzo_base, spine_family, trace_image, tropical_trace};
pub use lattice::{
    build_base, fan_closure, intersection_matrix, is_positive, wedge_lattice_length, BasePoint, ChartImage,
    ChartInput, Crossing, CurveClass, IntMatrix2, LooijengaPair, TangentVector, TropicalBase,
};
pub use num::{Int, Q};
pub use series::{focus_focus_apply, focus_focus_inverse, SparseLaurentSeries};
pub use spine::{
    a_value, canonical_image, images_equal, is_balanced, validate_spine, CanonicalImage, CylinderB, CylinderBTilde,
    Edge, EdgeLength, EmbeddedTree, ExtendedSpine, Piece, Spine, SpineCondition, Violation, ZAffineTree,
};
