//! Scaling constants, down-right lattice paths, limit shapes and hypothesis
//! validators.

mod constants;
mod hyp;
mod path;
mod shape;

pub use constants::ScalingParams;
pub use hyp::{
    validate_boundary, validate_paths, BoundaryCheck, HypVariant, HypothesisParams, NReport,
    ValidationReport,
};
pub use path::{
    path_from_heights, path_from_profile, sawtooth_l0, sawtooth_path, DownRightPath, HeightPathMeta, ProfilePath,
    ProfileVariant,
};
pub use shape::{
    distance_to_scaled_shape, in_region_d, limit_shape_point, limit_shape_radius, on_limit_shape, rate, ShapeVariant,
};
