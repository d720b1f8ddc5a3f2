//! Per-frame width measurement, LoD selection, skinning and sequences.

mod assemble;
mod sequence;
mod state;
mod width;

pub use assemble::{
    assemble_strands, check_poses, init_lod_levels, skin_and_assemble, AssembleOptions, Assembly, SegmentRecord,
};
pub use sequence::{dolly_for_bounds, dolly_path, simulate_sequence, sway_poses, Environment, FrameOutput, FrameStats, SequenceOptions};
pub use state::{update_lod, LodState, DEFAULT_EPS_W};
pub use width::{fiber_width, screen_extent, section_width, segment_width, SectionWidth};
