//! Parallel evaluation of probes. Samples are independent and tallies merge
//! order-independently, so the report does not depend on the pool size.

use std::time::Instant;

use crown_core::report::{finish_report, Probe, Tally, VerificationReport};
use rayon::prelude::*;

pub const THREADS_VAR: &str = "CROWN_THREADS";

/// Worker cap from `CROWN_THREADS`; `None` lets rayon decide.
pub fn thread_cap() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("{THREADS_VAR}: {e}")),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "{THREADS_VAR} must be a positive integer, got `{v}`"
            )),
        },
    }
}

pub fn run_parallel(probe: &dyn Probe, threads: Option<usize>) -> VerificationReport {
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let tally = match builder.build() {
        Ok(pool) => pool.install(|| tally_parallel(probe)),
        Err(_) => crown_core::report::tally_range(probe, 0..probe.samples()),
    };
    let mut report = finish_report(probe, tally);
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    report
}

fn tally_parallel(probe: &dyn Probe) -> Tally {
    (0..probe.samples())
        .into_par_iter()
        .fold(Tally::default, |mut t, i| {
            t.push(probe.sample(i));
            t
        })
        .reduce(Tally::default, |mut a, b| {
            a.merge(b);
            a
        })
}
