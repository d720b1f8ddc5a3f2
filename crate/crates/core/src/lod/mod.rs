//! Guide selection, thick-hair level hierarchy and its file format.

mod cross_section;
mod guides;
mod hierarchy;
mod io;
mod kmeans;
mod skin;

pub use cross_section::{fit_cross_section, CrossSection, SectionFit, EXTENT_SIGMAS};
pub use guides::{cluster_medoids, select_guides_and_triples, GuideSet};
pub use hierarchy::{build_hierarchy, build_lod, BuildParams, Level, LodHierarchy, ThickHair};
pub use io::{read_hierarchy, read_hierarchy_file, write_hierarchy, write_hierarchy_file};
pub use kmeans::{balanced_split, flatten_splines, kmeans, kmeans_strands, Clustering, Points};
pub use skin::{apply_skin, compute_skin_weights, SkinWeight};
