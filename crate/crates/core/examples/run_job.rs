//! Run a job description in-process and print the canonical JSON report.

use magdirac::report::{run_job, JobConfig};

fn main() -> magdirac::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/jobs/geometry.json").into());
    let cfg = JobConfig::from_path(path.as_ref())?;
    let report = run_job(&cfg)?;
    print!("{}", report.to_canonical_json()?);
    Ok(())
}
