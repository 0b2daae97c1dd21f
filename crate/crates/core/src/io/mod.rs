//! File formats, observation masks and report emission.

pub mod mask;
pub mod netpbm;
pub mod report;
pub mod t3b;

pub use mask::{cloud_mask, cloud_preset_mask, random_mask, CloudPreset, ObservationMask, Region};
pub use netpbm::{export_image_stack, import_image_stack, NetpbmImage, NormalizationRecord};
pub use report::{write_report_csv, write_report_csv_to, ReportEntry, ReportWriter};
pub use t3b::{read_t3b, read_t3b_mask, read_t3b_tensor, write_t3b_mask, write_t3b_tensor, T3b};
