//! Seeded Monte Carlo runs over the 1D test signals.

use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{upre_select, GeneralUpre, SpectralUpre, UPREGrid};
use crate::error::{invalid, Error, Result};
use crate::l1::{map_to_l1, solve_l1_admm, solve_l1_admm_spectral, ADMMConfig};
use crate::me_select::{me_iterate_general, LinearProblem, MEConfig, ProbeSet, SpectralSelector};
use crate::operators::{make_gaussian_psf, DenseMatrix, FiniteDifference, GridShape, Identity, Operator};
use crate::spectral::{spectral_solve, SpectralModel};
use crate::tikhonov::CGConfig;

use super::{add_noise, gen_signal, relative_error, NoiseConvention, SignalKind};

pub const ENV_SEED: &str = "EVIDENTSEL_SEED";

/// Master seed from `EVIDENTSEL_SEED`, if set.
pub fn env_seed() -> Result<Option<u64>> {
    match std::env::var(ENV_SEED) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{ENV_SEED} must be an unsigned integer, got '{s}'"))),
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorChoice {
    /// Square Gaussian matrix with `N(0, 1/n)` entries, redrawn per trial.
    Dense,
    Denoise,
    /// Periodic Gaussian blur of the given width in samples.
    Blur(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    General,
    Spectral,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub kinds: Vec<SignalKind>,
    pub n: usize,
    /// Trials per signal kind.
    pub trials: usize,
    pub snr_min: f64,
    pub snr_max: f64,
    pub seed: u64,
    pub operator: OperatorChoice,
    pub method: Method,
    /// `None` picks a per-signal default, see [`default_order`].
    pub order: Option<u32>,
    pub probes: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub lambda0: f64,
    pub upre: bool,
    pub l1: bool,
    /// Record per-trial wall time (makes output non-reproducible).
    pub timing: bool,
    /// Run 500 trials per kind regardless of `trials`.
    pub full_scale: bool,
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            kinds: SignalKind::ALL.to_vec(),
            n: 256,
            trials: 20,
            snr_min: 2.0,
            snr_max: 20.0,
            seed: 0,
            operator: OperatorChoice::Dense,
            method: Method::General,
            order: None,
            probes: 32,
            max_iter: 30,
            tol: 1e-4,
            lambda0: 1.0,
            upre: false,
            l1: false,
            timing: false,
            full_scale: false,
            threads: None,
        }
    }
}

/// Regularizer order used for each test signal unless overridden.
pub fn default_order(kind: SignalKind) -> u32 {
    match kind {
        SignalKind::Boxcar | SignalKind::PiecewiseQuadratic => 1,
        SignalKind::Hat | SignalKind::Sine => 2,
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true/false, got '{v}'"))),
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

impl FromStr for BenchConfig {
    type Err = Error;

    /// Flat `key = value` lines; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = BenchConfig::default();
        let mut psf_width = None;
        let mut operator = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, v) = (key.trim(), value.trim());
            match key {
                "kinds" => cfg.kinds = v.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?,
                "n" => cfg.n = parse_num(key, v)?,
                "trials" => cfg.trials = parse_num(key, v)?,
                "snr_min" => cfg.snr_min = parse_num(key, v)?,
                "snr_max" => cfg.snr_max = parse_num(key, v)?,
                "seed" => cfg.seed = parse_num(key, v)?,
                "operator" => operator = Some(v.to_string()),
                "psf_width" => psf_width = Some(parse_num::<f64>(key, v)?),
                "method" => {
                    cfg.method = match v {
                        "general" => Method::General,
                        "spectral" => Method::Spectral,
                        _ => return Err(Error::Config(format!("method: unknown '{v}'"))),
                    }
                }
                "order" => cfg.order = if v == "auto" { None } else { Some(parse_num(key, v)?) },
                "probes" => cfg.probes = parse_num(key, v)?,
                "max_iter" => cfg.max_iter = parse_num(key, v)?,
                "tol" => cfg.tol = parse_num(key, v)?,
                "lambda0" => cfg.lambda0 = parse_num(key, v)?,
                "upre" => cfg.upre = parse_bool(key, v)?,
                "l1" => cfg.l1 = parse_bool(key, v)?,
                "timing" => cfg.timing = parse_bool(key, v)?,
                "full_scale" => cfg.full_scale = parse_bool(key, v)?,
                "threads" => cfg.threads = Some(parse_num(key, v)?),
                _ => return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1))),
            }
        }
        cfg.operator = match operator.as_deref() {
            None | Some("dense") => OperatorChoice::Dense,
            Some("denoise") => OperatorChoice::Denoise,
            Some("blur") => OperatorChoice::Blur(psf_width.unwrap_or(1.5)),
            Some(other) => return Err(Error::Config(format!("operator: unknown '{other}'"))),
        };
        if psf_width.is_some() && !matches!(cfg.operator, OperatorChoice::Blur(_)) {
            return Err(Error::Config("psf_width requires operator = blur".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl BenchConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let mut cfg: BenchConfig = std::fs::read_to_string(path)?.parse()?;
        if let Some(seed) = env_seed()? {
            cfg.seed = seed;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::Config("no signal kinds".into()));
        }
        if self.n < 16 {
            return Err(Error::Config(format!("n must be at least 16, got {}", self.n)));
        }
        if !(self.snr_min > 0.0 && self.snr_min <= self.snr_max) {
            return Err(Error::Config("need 0 < snr_min <= snr_max".into()));
        }
        if self.method == Method::Spectral && self.operator == OperatorChoice::Dense {
            return Err(Error::Config("spectral method needs operator = denoise or blur".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(())
    }

    pub fn trials_per_kind(&self) -> usize {
        if self.full_scale {
            500
        } else {
            self.trials
        }
    }

    fn me_config(&self, seed: u64) -> MEConfig {
        MEConfig {
            lambda0: self.lambda0,
            max_iter: self.max_iter,
            tol: self.tol,
            probes: self.probes,
            seed,
            ..MEConfig::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub kind: String,
    pub n: usize,
    pub seed: u64,
    pub snr: f64,
    pub true_sigma: f64,
    pub recovered_sigma: f64,
    pub lambda_me: f64,
    pub lambda_upre: Option<f64>,
    pub err_l2: f64,
    pub err_upre: Option<f64>,
    pub err_l1: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub noise_convention: &'static str,
    pub status: String,
    pub wall_time: Option<f64>,
}

/// Write records with a header row.
pub fn write_records_csv<W: Write>(records: &[TrialRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Run every trial; results are ordered by kind, then trial index.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let per = cfg.trials_per_kind();
    let jobs: Vec<(usize, SignalKind)> = cfg
        .kinds
        .iter()
        .enumerate()
        .flat_map(|(ki, &k)| (0..per).map(move |t| (ki * per + t, k)))
        .collect();
    let run = || {
        jobs.par_iter()
            .map(|&(idx, kind)| run_trial_guarded(cfg, idx, kind))
            .collect()
    };
    match cfg.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

fn run_trial_guarded(cfg: &BenchConfig, idx: usize, kind: SignalKind) -> TrialRecord {
    let start = Instant::now();
    let mut rec = TrialRecord {
        trial: idx,
        kind: kind.name().to_string(),
        n: cfg.n,
        seed: cfg.seed,
        snr: f64::NAN,
        true_sigma: f64::NAN,
        recovered_sigma: f64::NAN,
        lambda_me: f64::NAN,
        lambda_upre: None,
        err_l2: f64::NAN,
        err_upre: None,
        err_l1: None,
        iterations: 0,
        converged: false,
        noise_convention: NoiseConvention::StdDev.name(),
        status: String::new(),
        wall_time: None,
    };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run_trial(cfg, idx, kind, &mut rec)));
    rec.status = match outcome {
        Ok(Ok(status)) => status,
        Ok(Err(e)) => format!("error: {e}"),
        Err(_) => "error: panic".to_string(),
    };
    if cfg.timing {
        rec.wall_time = Some(start.elapsed().as_secs_f64());
    }
    rec
}

fn run_trial(cfg: &BenchConfig, idx: usize, kind: SignalKind, rec: &mut TrialRecord) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(idx as u64);
    let n = cfg.n;
    let order = cfg.order.unwrap_or_else(|| default_order(kind));
    let snr = if cfg.snr_min == cfg.snr_max {
        cfg.snr_min
    } else {
        rng.random_range(cfg.snr_min..=cfg.snr_max)
    };
    rec.snr = snr;
    let truth = gen_signal(kind, n)?;
    let shape = GridShape::D1(n);

    let (a, model): (Operator, Option<SpectralModel>) = match cfg.operator {
        OperatorChoice::Dense => (
            Arc::new(DenseMatrix::gaussian(n, n, 1.0 / (n as f64).sqrt(), &mut rng)),
            None,
        ),
        OperatorChoice::Denoise => (Arc::new(Identity(n)), Some(SpectralModel::denoise(shape, order)?)),
        OperatorChoice::Blur(w) => {
            let psf = make_gaussian_psf(n, w)?;
            let model = SpectralModel::deconvolve(&psf, order)?;
            (Arc::new(psf.into_operator()), Some(model))
        }
    };
    let t: Operator = Arc::new(FiniteDifference::new(order, shape)?);
    let clean_b = a.apply(&truth)?;
    let sample = add_noise(&clean_b, snr, NoiseConvention::StdDev, rng.random())?;
    rec.true_sigma = sample.true_sigma;
    let probe_seed: u64 = rng.random();
    let me_cfg = cfg.me_config(probe_seed);
    let problem = LinearProblem::new(a.clone(), t.clone(), sample.noisy_b.clone())?;

    let (traj, u, b_hat) = match cfg.method {
        Method::General => {
            let res = me_iterate_general(&problem, &me_cfg)?;
            (res.trajectory, res.u, None)
        }
        Method::Spectral => {
            let model = model
                .as_ref()
                .ok_or_else(|| invalid("spectral method without spectral model"))?;
            let sel = SpectralSelector::from_signal(model, &sample.noisy_b)?;
            let res = sel.iterate(&me_cfg)?;
            let u = res.solution()?;
            (res.trajectory, u, Some(sel.b_hat().to_vec()))
        }
    };
    rec.iterations = traj.iterations();
    rec.converged = traj.converged;
    rec.lambda_me = traj.final_lambda();
    let final_state = traj.final_state().copied();
    if let Some(s) = final_state {
        rec.recovered_sigma = s.sigma_sq.sqrt();
    }
    rec.err_l2 = relative_error(&u, &truth)?;

    if cfg.upre {
        let sigma_sq = sample.true_sigma * sample.true_sigma;
        let sel = match (&model, &b_hat) {
            (Some(m), Some(bh)) => upre_select(&mut SpectralUpre::new(m, bh.clone())?, sigma_sq, &UPREGrid::default())?,
            _ => {
                let probes = ProbeSet::gaussian(n, cfg.probes.min(n), probe_seed)?;
                let mut eval = GeneralUpre::new(&problem, &probes, CGConfig::default())?;
                upre_select(&mut eval, sigma_sq, &UPREGrid::default())?
            }
        };
        rec.lambda_upre = Some(sel.lambda);
        let u_upre = match (&model, &b_hat) {
            (Some(m), Some(bh)) => m.dft().inverse_real(&spectral_solve(m, bh, sel.lambda)?)?,
            _ => problem.solve(sel.lambda, &CGConfig::default())?.u,
        };
        rec.err_upre = Some(relative_error(&u_upre, &truth)?);
    }

    if cfg.l1 {
        if let Some(s) = final_state.filter(|s| s.sigma_sq > 0.0 && s.eta_sq > 0.0) {
            let lambda1 = map_to_l1(s.sigma_sq, s.eta_sq.sqrt())?;
            let admm = ADMMConfig {
                warm_start: Some(u.clone()),
                ..ADMMConfig::default()
            };
            let res = match (&model, &b_hat) {
                (Some(m), Some(bh)) => solve_l1_admm_spectral(m, bh, lambda1, &admm)?,
                _ => solve_l1_admm(a.as_ref(), t.as_ref(), &sample.noisy_b, lambda1, &admm)?,
            };
            rec.err_l1 = Some(relative_error(&res.u, &truth)?);
        }
    }

    Ok(match traj.degeneracy {
        Some(d) => format!("flagged: {d:?}"),
        None => "ok".to_string(),
    })
}
