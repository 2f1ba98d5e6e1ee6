//! The generate, execute and filter loop over an increasing budget `k`.

mod config;
mod detect;
mod pathset;
mod report;
mod run;
mod sample;
mod shapes;

pub use config::{CampaignConfig, ConfigError, MaxSize, ShapeMode, StopRule};
pub use detect::{detect_k_longest, detect_k_saturation};
pub use pathset::{insert_path, PathRecord, PathSet};
pub use report::{rows_from_csv, rows_to_csv, CampaignReport, CampaignRow, StopReason, CSV_HEADER};
pub use run::{run_campaign, run_campaign_with, CampaignError, RunOptions};
pub use sample::{sample_input, SampleError};
pub use shapes::{shape_for_budget, Scheduler, ShapeInfo, ShapeSpace, MAX_SHAPES};
