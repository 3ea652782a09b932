//! Configuration files, observation loading and job runners.

mod config;
mod data;
mod job;

pub use config::{
    load_config, DataSection, FilterSection, IfAlgorithm, IffitSection, JobConfig, JobKind, ModelSection,
    OnlineAlgorithm, OptimizeSection, ScheduleSection, SpaceSection, Transform,
};
pub use data::{load_observations, parse_observations, Observations};
pub use job::{
    execute, metadata_path, parse_record_csv, record_csv, run_job, write_artifact, ArtifactBody, RunArtifact, VERSION,
};
