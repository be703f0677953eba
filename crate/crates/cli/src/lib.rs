//! Command-line front end: JSON job documents in, reports out.

mod context;
pub mod error;
pub mod expr;
mod report;
pub mod reproduce;
pub mod schema;
mod tasks;

pub use context::{load_model, model_from_doc};
pub use error::CliError;
pub use report::Report;
pub use tasks::Task;

use schema::JobConfig;

/// Parses a job document, reporting the JSON path of the first bad field.
pub fn parse_config(text: &str) -> Result<JobConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::usage(format!("config: {}: {}", e.path(), e.inner())))
}

pub fn run_job(task: Task, model: &str, config: &JobConfig, bound: i64) -> Result<Report, CliError> {
    if bound < 0 {
        return Err(CliError::usage("--bound must be non-negative"));
    }
    let ctx = context::Context::new(load_model(model)?, &config.parameters)?;
    tasks::run_task(task, &ctx, config, bound)
}
