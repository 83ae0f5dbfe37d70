//! Command-line front end. Exit codes: 0 success, 1 argument or
//! parameter error, 2 numerical or I/O failure.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{
    best_upper_bound, c1_corollary_bound, c1_cos_bound, c1_sqrt_bound, c2_asymptotic, c2_new_bound, c2_sota_bound,
    layered_overshoot_bound, nyquist_overshoot_bound, BoundResult, RationalRate, MAX_RATE_N,
};
use crate::error::Error;
use crate::kernels::{nyquist_isi_defect, KernelSpec, LayeredFilter};
use crate::l1norm::{kernel_l1, l1_lower_floor, QuadratureSpec};
use crate::opnorm::{operator_norm, GridSpec};
use crate::search::MaxSearch;
use crate::verify::{lp_c1_trig, monte_carlo_lower_bound};

#[derive(Parser, Debug)]
#[command(name = "overshoot", version, about = "Peak-regrowth bounds for oversampled band-limited signals")]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a single bound and print it as JSON
    Bound(BoundArgs),
    /// Write a CSV table of bounds over a range of oversampling factors
    Sweep(SweepArgs),
    /// Numerical operator norm of a kernel
    Opnorm(OpnormArgs),
    /// Monte-Carlo and LP lower bounds for trigonometric polynomials
    Verify(VerifyArgs),
    /// L1 norm of a kernel
    L1(L1Args),
    /// Report on a layered filter read from JSON
    Design(DesignArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    C1Cos,
    C1Sqrt,
    C2Sota,
    C2Asymptotic,
    C2New,
    C1Corollary,
    Nyquist,
    Best,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKind,
    /// Oversampling factor
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    /// 1/2 or a positive integer
    #[arg(long, value_parser = parse_m)]
    pub m: Option<f64>,
    /// Bandwidth expansion factor
    #[arg(long)]
    pub leps: Option<f64>,
    /// Initial grid step of the maximization
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub l_min: f64,
    #[arg(long)]
    pub l_max: f64,
    #[arg(long)]
    pub step: f64,
    /// Output file (standard output when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Add the numerical operator norm of the trapezoid with Leps = 2L - 1
    #[arg(long)]
    pub with_opnorm: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Sinc,
    Triangle,
    Trapezoid,
    Layered,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[arg(long, value_enum)]
    pub kernel: KernelKind,
    /// Reference bandwidth B in rad/s
    #[arg(long, default_value_t = PI)]
    pub bandwidth: f64,
    /// Expansion factor of the trapezoid
    #[arg(long)]
    pub leps: Option<f64>,
    /// Layered filter JSON file
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OpnormArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long = "L")]
    pub l: f64,
    /// Initial grid points per sampling period
    #[arg(long, default_value_t = 1024)]
    pub points: usize,
    /// Kernel shifts per side (chosen automatically when absent)
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub target_tail: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Polynomial degree
    #[arg(long = "N")]
    pub n: usize,
    /// Number of equispaced samples
    #[arg(long = "N1")]
    pub n1: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial angle grid of the LP search
    #[arg(long, default_value_t = 512)]
    pub t_grid: usize,
    /// Skip the LP
    #[arg(long)]
    pub no_lp: bool,
}

#[derive(Args, Debug)]
pub struct L1Args {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub abs_tol: f64,
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    /// Layered filter JSON file
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long = "L")]
    pub l: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub abs_tol: f64,
}

fn parse_m(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
            a / b
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    if v == 0.5 || (v >= 1.0 && v.fract() == 0.0) {
        Ok(v)
    } else {
        Err(format!("m must be 1/2 or a positive integer, got {s}"))
    }
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type CmdResult = std::result::Result<String, Failure>;

fn need<T>(v: Option<T>, flag: &str, kind: &str) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--kind {kind} requires --{flag}")))
}

fn search_with(step: Option<f64>) -> std::result::Result<MaxSearch, Failure> {
    match step {
        None => Ok(MaxSearch::default()),
        Some(s) if s > 0.0 && s.is_finite() => Ok(MaxSearch {
            step: s,
            ..MaxSearch::default()
        }),
        Some(s) => Err(Failure::Usage(format!("--step must be positive, got {s}"))),
    }
}

fn to_json<T: Serialize>(v: &T) -> CmdResult {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Numerical(e.to_string()))
}

fn cmd_bound(a: &BoundArgs) -> CmdResult {
    let search = search_with(a.step)?;
    let name = a.kind.to_possible_value().unwrap().get_name().to_string();
    let rate = || -> std::result::Result<RationalRate, Failure> {
        Ok(RationalRate::new(need(a.n, "n", &name)?, need(a.m, "m", &name)?)?)
    };
    let r: BoundResult = match a.kind {
        BoundKind::C1Cos => c1_cos_bound(need(a.l, "L", &name)?)?,
        BoundKind::C1Sqrt => c1_sqrt_bound(need(a.l, "L", &name)?)?,
        BoundKind::C2Sota => c2_sota_bound(need(a.leps, "leps", &name)?)?,
        BoundKind::C2Asymptotic => c2_asymptotic(need(a.leps, "leps", &name)?)?,
        BoundKind::C2New => c2_new_bound(&rate()?, &search),
        BoundKind::C1Corollary => c1_corollary_bound(need(a.n, "n", &name)?, &search)?,
        BoundKind::Nyquist => nyquist_overshoot_bound(&rate()?, &search).result,
        BoundKind::Best => best_upper_bound(need(a.l, "L", &name)?, &search)?,
    };
    to_json(&r)
}

/// Fixed 12-significant-digit rendering; scientific outside `[1e-4, 1e12)`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs();
    if !(1e-4..1e12).contains(&mag) {
        return format!("{x:.11e}");
    }
    let exp = mag.log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit
    let carried = s.parse::<f64>().map_or(false, |r| r.abs() >= 10f64.powi(exp + 1));
    if carried && decimals > 0 {
        let d = decimals - 1;
        format!("{x:.d$}")
    } else {
        s
    }
}

/// CSV rows for the bound sweep; deterministic for fixed arguments.
pub fn sweep_csv(l_min: f64, l_max: f64, step: f64, with_opnorm: bool) -> crate::Result<String> {
    if !(l_min > 1.0 && l_max > l_min && step > 0.0 && l_max.is_finite()) {
        return Err(Error::param(format!(
            "sweep needs 1 < l_min < l_max and step > 0, got l_min = {l_min}, l_max = {l_max}, step = {step}"
        )));
    }
    let count = ((l_max - l_min) / step + 1e-9).floor() as usize + 1;
    let search = MaxSearch::default();
    let mut out = String::from("L,c1_cos,c1_sqrt,c2_sota_pushed,c2_new,opnorm_numeric,cert_error\n");
    for i in 0..count {
        let l = l_min + i as f64 * step;
        let cos = c1_cos_bound(l)?.value;
        let sqrt = c1_sqrt_bound(l)?.value;
        let sota = c2_sota_bound(2.0 * l - 1.0)?.value;
        let mut cert = 0.0f64;
        let c2 = RationalRate::from_oversampling(l, MAX_RATE_N).map(|r| {
            let b = c2_new_bound(&r, &search);
            cert = cert.max(b.cert_error);
            b.value
        });
        let op = if with_opnorm {
            let k = KernelSpec::trapezoid(PI, 2.0 * l - 1.0)?;
            let r = operator_norm(&k, l, &GridSpec::default())?;
            cert = cert.max(r.result.cert_error);
            Some(r.result.value)
        } else {
            None
        };
        let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_sig(l),
            format_sig(cos),
            format_sig(sqrt),
            format_sig(sota),
            opt(c2),
            opt(op),
            format_sig(cert)
        ));
    }
    Ok(out)
}

fn cmd_sweep(a: &SweepArgs) -> CmdResult {
    let csv = sweep_csv(a.l_min, a.l_max, a.step, a.with_opnorm)?;
    match &a.out {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| Failure::Numerical(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn read_layered(path: &PathBuf) -> std::result::Result<LayeredFilter, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let f: LayeredFilter =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid filter JSON {}: {e}", path.display())))?;
    f.validate()?;
    Ok(f)
}

fn build_kernel(a: &KernelArgs) -> std::result::Result<KernelSpec, Failure> {
    Ok(match a.kernel {
        KernelKind::Sinc => KernelSpec::sinc(a.bandwidth)?,
        KernelKind::Triangle => KernelSpec::triangle(a.bandwidth)?,
        KernelKind::Trapezoid => {
            let le = a
                .leps
                .ok_or_else(|| Failure::Usage("--kernel trapezoid requires --leps".into()))?;
            KernelSpec::trapezoid(a.bandwidth, le)?
        }
        KernelKind::Layered => {
            let path = a
                .spec
                .as_ref()
                .ok_or_else(|| Failure::Usage("--kernel layered requires --spec".into()))?;
            KernelSpec::Layered(read_layered(path)?)
        }
    })
}

fn cmd_opnorm(a: &OpnormArgs) -> CmdResult {
    let k = build_kernel(&a.kernel)?;
    let grid = GridSpec {
        points: a.points,
        truncation: a.truncation,
        target_tail: a.target_tail,
    };
    let r = operator_norm(&k, a.l, &grid)?;
    to_json(&json!({
        "method": r.result.method,
        "value": r.result.value,
        "t_star": r.result.t_star,
        "cert_error": r.result.cert_error,
        "truncation": r.truncation,
        "tail_bound": r.tail_bound,
        "exact_tail": r.exact_tail,
    }))
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let mc = monte_carlo_lower_bound(a.n, a.n1, a.trials, a.seed)?;
    let lp = if a.no_lp {
        None
    } else {
        Some(lp_c1_trig(a.n, a.n1, a.t_grid)?)
    };
    let upper = if a.n >= 1 {
        Some(best_upper_bound(a.n1 as f64 / (2 * a.n) as f64, &MaxSearch::default())?)
    } else {
        None
    };
    to_json(&json!({
        "N": a.n,
        "N1": a.n1,
        "oversampling": if a.n >= 1 { Some(a.n1 as f64 / (2 * a.n) as f64) } else { None },
        "monte_carlo": mc,
        "lp": lp,
        "upper_bound": upper,
    }))
}

fn cmd_l1(a: &L1Args) -> CmdResult {
    let k = build_kernel(&a.kernel)?;
    let quad = QuadratureSpec {
        abs_tol: a.abs_tol,
        ..QuadratureSpec::default()
    };
    let floor = l1_lower_floor(&k, &quad)?;
    let norm = kernel_l1(&k, &quad)?;
    to_json(&json!({
        "value": norm.value,
        "cert_error": norm.cert_error,
        "core_halfwidth": norm.core_halfwidth,
        "periodic_tail": norm.periodic_tail,
        "floor": floor.floor,
        "above_floor": floor.holds,
    }))
}

fn cmd_design(a: &DesignArgs) -> CmdResult {
    let filter = read_layered(&a.spec)?;
    let bound = layered_overshoot_bound(&filter, a.l, &MaxSearch::default())?;
    let kernel = KernelSpec::Layered(filter);
    let nyquist = 0.5 * (kernel.flat_edge() + kernel.support());
    let isi = nyquist_isi_defect(&kernel, nyquist)?;
    let quad = QuadratureSpec {
        abs_tol: a.abs_tol,
        ..QuadratureSpec::default()
    };
    let l1 = kernel_l1(&kernel, &quad)?;
    to_json(&json!({
        "L": a.l,
        "bound": bound.result,
        "layers": bound.layers,
        "isi": { "nyquist_rad": nyquist, "c_n": isi.c_n, "defect": isi.defect },
        "l1": l1,
    }))
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Opnorm(a) => cmd_opnorm(a),
        Command::Verify(a) => cmd_verify(a),
        Command::L1(a) => cmd_l1(a),
        Command::Design(a) => cmd_design(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 1;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Failure::Numerical(e.to_string())),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(text) => {
            if !text.is_empty() {
                let _ = if text.ends_with('\n') {
                    write!(out, "{text}")
                } else {
                    writeln!(out, "{text}")
                };
            }
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            1
        }
        Err(Failure::Numerical(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
