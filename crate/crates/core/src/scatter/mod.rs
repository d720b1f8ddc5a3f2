//! Fiber scattering: single-fiber lobes, dual scattering, and the aggregated
//! model for thick hairs.

mod aggregate;
mod dual;
mod gaussian;
mod marschner;
mod params;
mod profile;
mod single;
mod tables;

pub use aggregate::{
    backward_attenuation, estimate_density_and_n, eval_aggregated, eval_aggregated_lobes,
    eval_aggregated_prior, eval_aggregated_prior_lobes, shadowing_masking, shadowing_masking_with, AggregateContext,
    AggregateOptions, AggregatedLobes, C_M, D_1PLUS, RHO_MIN,
};
pub use dual::{backward_series, backward_variance, dual_lobes, eval_dual_scattering, BackwardAttenuation, DualLobes};
pub use gaussian::gaussian;
pub use marschner::{eval_marschner_lobe, eval_single_marschner, fresnel, marschner_attenuation, MarschnerLobe};
pub use params::{FiberBsdfParams, MarschnerParams, PRESET_NAMES};
pub use profile::{scattering_profile, BsdfSelector, ProfileSample, Profiles};
pub use single::{eval_single, eval_single_angles};
pub use tables::{
    build_tables, lobe_stats, AttenuationTables, LobeStats, TableSample, DEFAULT_TABLE_SIZE, D_BACKWARD,
    D_FORWARD, UNIFORM_HALF_CIRCLE_VAR,
};
