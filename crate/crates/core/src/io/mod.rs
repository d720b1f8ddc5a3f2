//! Image files, metrics, CSV export and JSON configuration.

mod config;
mod csv;
mod image;
mod metrics;

pub use self::csv::{
    fmt_sig, profile_rows, read_profile_csv, read_stats_csv, stats_header, write_csv, write_csv_file,
    write_profile_csv, write_stats_csv, CsvValue, StatsTable, PROFILE_HEADER,
};
pub use config::{default_light, read_camera, read_camera_path, write_json, HeadConfig, LightConfig, RunConfig};
pub use image::{
    read_image, read_pfm, read_png, srgb_decode, srgb_encode, write_image, write_pfm, write_png, ImageFormat,
};
pub use metrics::{compare_images, mae, psnr, Metric, PSNR_CAP};
