//! Level-of-detail strand hair: thick-hair hierarchies, aggregated fiber
//! scattering and CPU validation renderers.

pub mod error;
pub mod io;
pub mod lod;
pub mod render;
pub mod runtime;
pub mod math;
pub mod scatter;
pub mod strand;

pub use error::{Error, Result};
pub use math::{Rgb, Vec3};
