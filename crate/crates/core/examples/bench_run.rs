//! Small σ-recovery suite through the bench runner, summarized per signal.
//!
//! Set `EVIDENTSEL_SEED` to change the master seed.

use evidentsel::harness::bench::{env_seed, write_records_csv};
use evidentsel::harness::{run_bench, BenchConfig, SignalKind};

fn main() -> evidentsel::Result<()> {
    let mut cfg: BenchConfig =
        "n = 256\ntrials = 20\noperator = denoise\nmethod = spectral\nupre = true\nl1 = true".parse()?;
    if let Some(seed) = env_seed()? {
        cfg.seed = seed;
    }
    let recs = run_bench(&cfg)?;
    println!("kind                 median |dsigma|/sigma   median err l2   median err l1");
    for kind in SignalKind::ALL {
        let rows: Vec<_> = recs.iter().filter(|r| r.kind == kind.name()).collect();
        let med = |mut v: Vec<f64>| {
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        };
        let ds = med(rows
            .iter()
            .map(|r| (r.recovered_sigma - r.true_sigma).abs() / r.true_sigma)
            .collect());
        let e2 = med(rows.iter().map(|r| r.err_l2).collect());
        let e1 = med(rows.iter().filter_map(|r| r.err_l1).collect());
        println!("{:20} {ds:20.4} {e2:15.4} {e1:15.4}", kind.name());
    }
    let path = std::path::Path::new("target/bench_run.csv");
    write_records_csv(&recs, std::fs::File::create(path)?)?;
    println!("records in {}", path.display());
    Ok(())
}
