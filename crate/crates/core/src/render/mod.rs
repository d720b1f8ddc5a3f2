//! Ray-facing ribbon geometry, the ray-shooting renderer, the path-tracing
//! reference and the averaged fiber-bundle reference.

mod bundle;
mod bvh;
mod camera;
mod image;
mod ribbon;
mod scene;
mod shade;
mod trace;

pub use bundle::{
    bundle_instance, bundle_scene, instance_seeds, render_bundle_oracle, render_bundle_oracle_seeds, render_bundle_thick,
    thick_bundle, BundleParams, Lighting,
};
pub use bvh::Bvh;
pub use camera::{Camera, CameraFrame, Ray};
pub use image::Image;
pub use ribbon::{intersect_ribbon, Hit, Segment, ThickPayload};
pub use scene::{shadow_transmittance, DirLight, Scene, SceneHit, Sphere};
pub use shade::{shade_hair, shade_head, shade_ray, Shading, ThickModel};
pub use trace::{render_path_trace, render_ray_shoot, RenderMode, DEFAULT_MAX_BOUNCES, TILE};
