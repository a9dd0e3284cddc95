use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use evidentsel::analysis::{scan_fixed_points, ScanConfig};
use evidentsel::baselines::{upre_select, GeneralUpre, SpectralUpre, UPREGrid, UpreEvaluator};
use evidentsel::harness::io::{read_evf, read_pgm, read_vector_csv, write_evf, write_pgm, write_vector_csv, Image};
use evidentsel::harness::{add_noise, gen_signal, run_bench, shepp_logan, BenchConfig, NoiseConvention, SignalKind};
use evidentsel::l1::{map_to_l1, solve_l1_admm, solve_l1_admm_spectral, ADMMConfig};
use evidentsel::me_select::{me_iterate_general, LinearProblem, MEConfig, METrajectory, ProbeSet, SpectralSelector};
use evidentsel::operators::{
    make_gaussian_psf, make_gaussian_psf_2d, CirculantSpec, DenseMatrix, FiniteDifference, GridShape, Identity,
    LinearOperator, Operator,
};
use evidentsel::spectral::{spectral_solve, SpectralModel};
use evidentsel::tikhonov::{solve_cg, CGConfig};
use evidentsel::{Error, Result};

#[derive(Parser)]
#[command(
    name = "evidentsel",
    version,
    about = "Maximum-evidence regularization parameter selection"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a test problem: truth and noisy data.
    Gen(GenArgs),
    /// Select λ by maximum evidence.
    Select(SelectArgs),
    /// Reconstruct with ℓ2 or ℓ1 regularization.
    Solve(SolveArgs),
    /// Select λ by UPRE with a known noise level.
    Upre(UpreArgs),
    /// Scan the fixed-point map of a denoising problem.
    Fixpoint(FixpointArgs),
    /// Run a benchmark suite from a key = value config file.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Boxcar,
    Hat,
    Sine,
    PiecewiseQuadratic,
    Phantom,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Stddev,
    Mean,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Signal length, or image side for the phantom.
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 5.0)]
    snr: f64,
    /// Blur the truth with a periodic Gaussian PSF of this width before adding noise.
    #[arg(long)]
    psf_width: Option<f64>,
    /// Defaults to stddev for signals and mean for the phantom.
    #[arg(long, value_enum)]
    convention: Option<Convention>,
    #[arg(long, env = "EVIDENTSEL_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    General,
    Spectral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OperatorArg {
    Identity,
    Blur,
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// Data file: .csv (1D), .pgm or .evf.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "identity")]
    operator: OperatorArg,
    #[arg(long, default_value_t = 1.5)]
    psf_width: f64,
    /// Dense forward matrix as a rank-2 .evf file; forces the general path.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Finite-difference order of the regularizer.
    #[arg(long, default_value_t = 1)]
    order: u32,
    #[arg(long, value_enum, default_value = "spectral")]
    mode: Mode,
}

#[derive(Args, Clone)]
struct MEArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda0: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 30)]
    max_iter: usize,
    #[arg(long, default_value_t = 32)]
    probes: usize,
    #[arg(long, env = "EVIDENTSEL_SEED", default_value_t = 0)]
    seed: u64,
}

impl MEArgs {
    fn config(&self) -> MEConfig {
        MEConfig {
            lambda0: self.lambda0,
            tol: self.tol,
            max_iter: self.max_iter,
            probes: self.probes,
            seed: self.seed,
            ..MEConfig::default()
        }
    }
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    me: MEArgs,
    /// Write the (σ², η², λ) trajectory as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Reg {
    L2,
    L1,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "l2")]
    reg: Reg,
    /// Fixed parameter (λ for l2, λ₁ for l1).
    #[arg(long, conflicts_with = "auto", required_unless_present = "auto")]
    lambda: Option<f64>,
    /// Pick the parameter by maximum evidence (mapped to λ₁ for l1).
    #[arg(long)]
    auto: bool,
    #[command(flatten)]
    me: MEArgs,
    /// Output file: .csv, .pgm or .evf.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct UpreArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Known noise standard deviation.
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 32)]
    probes: usize,
    #[arg(long, env = "EVIDENTSEL_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FixpointArgs {
    /// Noisy signal or image (.csv, .pgm, .evf).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 1)]
    order: u32,
    #[arg(long, default_value_t = 400)]
    points: usize,
    #[arg(long, default_value_t = 1e-6)]
    lambda_min: f64,
    #[arg(long)]
    lambda_max: Option<f64>,
    /// Write the sampled map (lambda, f) as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    /// Records CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Select(a) => select(a),
        Cmd::Solve(a) => solve(a),
        Cmd::Upre(a) => upre(a),
        Cmd::Fixpoint(a) => fixpoint(a),
        Cmd::Bench(a) => bench(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn ext(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

fn read_data(path: &Path) -> Result<(GridShape, Vec<f64>)> {
    match ext(path).as_str() {
        "csv" => {
            let v = read_vector_csv(path)?;
            Ok((GridShape::D1(v.len()), v))
        }
        "pgm" => {
            let img = read_pgm(path)?;
            Ok((
                GridShape::D2 {
                    rows: img.rows,
                    cols: img.cols,
                },
                img.data,
            ))
        }
        "evf" => {
            let (dims, data) = read_evf(path)?;
            match dims[..] {
                [n] => Ok((GridShape::D1(n), data)),
                [rows, cols] => Ok((GridShape::D2 { rows, cols }, data)),
                _ => Err(Error::InvalidArgument(format!("unsupported rank {}", dims.len()))),
            }
        }
        e => Err(Error::InvalidArgument(format!("unknown data format '{e}'"))),
    }
}

fn write_data(path: &Path, shape: GridShape, data: &[f64]) -> Result<()> {
    match (ext(path).as_str(), shape) {
        ("csv", _) => write_vector_csv(path, data),
        ("pgm", GridShape::D2 { rows, cols }) => write_pgm(
            path,
            &Image {
                rows,
                cols,
                data: data.to_vec(),
            },
        ),
        ("evf", GridShape::D1(n)) => write_evf(path, &[n], data),
        ("evf", GridShape::D2 { rows, cols }) => write_evf(path, &[rows, cols], data),
        (e, _) => Err(Error::InvalidArgument(format!("cannot write '{e}' for this shape"))),
    }
}

fn psf_for(shape: GridShape, width: f64) -> Result<CirculantSpec> {
    match shape {
        GridShape::D1(n) => make_gaussian_psf(n, width),
        GridShape::D2 { rows, cols } => make_gaussian_psf_2d(rows, cols, width),
    }
}

fn gen(a: GenArgs) -> Result<()> {
    let (shape, truth, default_conv) = match a.kind {
        GenKind::Phantom => (GridShape::square(a.n), shepp_logan(a.n), NoiseConvention::Mean),
        k => {
            let kind = match k {
                GenKind::Boxcar => SignalKind::Boxcar,
                GenKind::Hat => SignalKind::Hat,
                GenKind::Sine => SignalKind::Sine,
                _ => SignalKind::PiecewiseQuadratic,
            };
            (GridShape::D1(a.n), gen_signal(kind, a.n)?, NoiseConvention::StdDev)
        }
    };
    let conv = match a.convention {
        Some(Convention::Stddev) => NoiseConvention::StdDev,
        Some(Convention::Mean) => NoiseConvention::Mean,
        None => default_conv,
    };
    let clean = match a.psf_width {
        Some(w) => psf_for(shape, w)?.into_operator().apply(&truth)?,
        None => truth.clone(),
    };
    let sample = add_noise(&clean, a.snr, conv, a.seed)?;
    std::fs::create_dir_all(&a.out)?;
    let e = if shape.ndim() == 1 { "csv" } else { "pgm" };
    write_data(&a.out.join(format!("truth.{e}")), shape, &truth)?;
    write_data(&a.out.join(format!("data.{e}")), shape, &sample.noisy_b)?;
    write_data(&a.out.join("data.evf"), shape, &sample.noisy_b)?;
    println!(
        "wrote {} (n = {}, true sigma = {:.6e}, snr = {}, convention = {}, seed = {})",
        a.out.display(),
        shape.len(),
        sample.true_sigma,
        a.snr,
        conv.name(),
        a.seed
    );
    Ok(())
}

/// Loaded problem, with the spectral model when the operators allow one.
struct Loaded {
    shape: GridShape,
    b: Vec<f64>,
    a: Operator,
    t: Operator,
    model: Option<SpectralModel>,
}

fn load(p: &ProblemArgs) -> Result<Loaded> {
    let (shape, b) = read_data(&p.data)?;
    let t: Operator = Arc::new(FiniteDifference::new(p.order, shape)?);
    if let Some(path) = &p.matrix {
        let (dims, data) = read_evf(path)?;
        let [rows, cols] = dims[..] else {
            return Err(Error::InvalidArgument("matrix file must have rank 2".into()));
        };
        if rows != b.len() {
            return Err(Error::InvalidArgument(format!(
                "matrix has {rows} rows but data has {}",
                b.len()
            )));
        }
        let t: Operator = Arc::new(FiniteDifference::new(p.order, GridShape::D1(cols))?);
        let a: Operator = Arc::new(DenseMatrix::from_row_major(rows, cols, data)?);
        return Ok(Loaded {
            shape: GridShape::D1(cols),
            b,
            a,
            t,
            model: None,
        });
    }
    let (a, model): (Operator, SpectralModel) = match p.operator {
        OperatorArg::Identity => (Arc::new(Identity(shape.len())), SpectralModel::denoise(shape, p.order)?),
        OperatorArg::Blur => {
            let psf = psf_for(shape, p.psf_width)?;
            let model = SpectralModel::deconvolve(&psf, p.order)?;
            (Arc::new(psf.into_operator()), model)
        }
    };
    Ok(Loaded {
        shape,
        b,
        a,
        t,
        model: Some(model),
    })
}

fn use_spectral(p: &ProblemArgs, l: &Loaded) -> bool {
    p.mode == Mode::Spectral && l.model.is_some()
}

struct Selection {
    trajectory: METrajectory,
    u: Vec<f64>,
}

fn run_select(p: &ProblemArgs, l: &Loaded, cfg: &MEConfig) -> Result<Selection> {
    if use_spectral(p, l) {
        let model = l.model.as_ref().unwrap();
        let res = SpectralSelector::from_signal(model, &l.b)?.iterate(cfg)?;
        let u = res.solution()?;
        Ok(Selection {
            trajectory: res.trajectory,
            u,
        })
    } else {
        let problem = LinearProblem::new(l.a.clone(), l.t.clone(), l.b.clone())?;
        let res = me_iterate_general(&problem, cfg)?;
        Ok(Selection {
            trajectory: res.trajectory,
            u: res.u,
        })
    }
}

fn report(tr: &METrajectory) {
    println!("lambda = {:.6e}", tr.final_lambda());
    if let Some(s) = tr.final_state() {
        println!("sigma = {:.6e}", s.sigma_sq.sqrt());
        println!("eta = {:.6e}", s.eta_sq.sqrt());
    }
    println!("iterations = {}", tr.iterations());
    println!("converged = {}", tr.converged);
    println!("stop = {:?}", tr.stop_reason);
    if let Some(d) = tr.degeneracy {
        println!("degeneracy = {d:?}");
    }
}

fn select(a: SelectArgs) -> Result<()> {
    let l = load(&a.problem)?;
    let sel = run_select(&a.problem, &l, &a.me.config())?;
    report(&sel.trajectory);
    if let Some(path) = a.trajectory {
        sel.trajectory.write_csv(std::fs::File::create(path)?)?;
    }
    Ok(())
}

fn solve(a: SolveArgs) -> Result<()> {
    let l = load(&a.problem)?;
    let spectral = use_spectral(&a.problem, &l);
    let auto = if a.auto {
        Some(run_select(&a.problem, &l, &a.me.config())?)
    } else {
        None
    };
    let u = match a.reg {
        Reg::L2 => match (&auto, a.lambda) {
            (Some(sel), _) => {
                println!("lambda = {:.6e}", sel.trajectory.final_lambda());
                sel.u.clone()
            }
            (None, Some(lambda)) if spectral => {
                let model = l.model.as_ref().unwrap();
                let dft = model.dft();
                dft.inverse_real(&spectral_solve(model, &dft.forward(&l.b)?, lambda)?)?
            }
            (None, Some(lambda)) => solve_cg(l.a.as_ref(), l.t.as_ref(), &l.b, lambda, &CGConfig::default())?.u,
            (None, None) => unreachable!("clap requires --lambda or --auto"),
        },
        Reg::L1 => {
            let (lambda1, warm) = match (&auto, a.lambda) {
                (Some(sel), _) => {
                    let s = sel
                        .trajectory
                        .final_state()
                        .ok_or_else(|| Error::InvalidArgument("selection produced no iterate".into()))?;
                    (map_to_l1(s.sigma_sq, s.eta_sq.sqrt())?, Some(sel.u.clone()))
                }
                (None, Some(l1)) => (l1, None),
                (None, None) => unreachable!("clap requires --lambda or --auto"),
            };
            println!("lambda1 = {lambda1:.6e}");
            let cfg = ADMMConfig {
                warm_start: warm,
                ..ADMMConfig::default()
            };
            let res = if spectral {
                let model = l.model.as_ref().unwrap();
                solve_l1_admm_spectral(model, &model.dft().forward(&l.b)?, lambda1, &cfg)?
            } else {
                solve_l1_admm(l.a.as_ref(), l.t.as_ref(), &l.b, lambda1, &cfg)?
            };
            println!("admm iterations = {} (converged = {})", res.iterations, res.converged);
            res.u
        }
    };
    write_data(&a.out, l.shape, &u)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn upre(a: UpreArgs) -> Result<()> {
    let l = load(&a.problem)?;
    let sigma_sq = a.sigma * a.sigma;
    let grid = UPREGrid::default();
    let sel = if use_spectral(&a.problem, &l) {
        let mut eval = SpectralUpre::from_signal(l.model.as_ref().unwrap(), &l.b)?;
        upre_select(&mut eval as &mut dyn UpreEvaluator, sigma_sq, &grid)?
    } else {
        let problem = LinearProblem::new(l.a.clone(), l.t.clone(), l.b.clone())?;
        let probes = ProbeSet::gaussian(problem.n(), a.probes.min(problem.n()), a.seed)?;
        let mut eval = GeneralUpre::new(&problem, &probes, CGConfig::default())?;
        upre_select(&mut eval, sigma_sq, &grid)?
    };
    println!("lambda = {:.6e}", sel.lambda);
    println!("objective = {:.6e}", sel.objective);
    println!("boundary = {}", sel.boundary);
    Ok(())
}

fn fixpoint(a: FixpointArgs) -> Result<()> {
    let (shape, b) = read_data(&a.data)?;
    let model = SpectralModel::denoise(shape, a.order)?;
    let sel = SpectralSelector::from_signal(&model, &b)?;
    let cfg = ScanConfig {
        lambda_min: a.lambda_min,
        lambda_max: a.lambda_max,
        points: a.points,
    };
    let rep = scan_fixed_points(&model, sel.b_hat(), &cfg)?;
    println!("slope at zero = {:.6}", rep.slope_at_zero);
    if let Some(k) = rep.kappa {
        println!(
            "kappa_inf = {:.6e} (bounds {:.6e} .. {:.6e})",
            k.kappa, k.lower, k.upper
        );
    }
    for fp in &rep.fixed_points {
        println!(
            "fixed point lambda = {:.6e} {:?} (slope {:.4})",
            fp.lambda, fp.stability, fp.slope
        );
    }
    if let Some(path) = a.out {
        rep.write_csv(std::fs::File::create(path)?)?;
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let mut cfg = BenchConfig::from_file(&a.config)?;
    if a.threads.is_some() {
        cfg.threads = a.threads;
    }
    let recs = run_bench(&cfg)?;
    match a.out {
        Some(path) => evidentsel::harness::bench::write_records_csv(&recs, std::fs::File::create(&path)?)?,
        None => evidentsel::harness::bench::write_records_csv(&recs, std::io::stdout().lock())?,
    }
    Ok(())
}
