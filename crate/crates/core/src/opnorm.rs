//! Numerical interpolation-operator norms and kernel-based reconstruction
//! from samples at `t_l = pi l / (L B)`.
//!
//! Everything runs in normalized time (`B = pi`), where the sample spacing
//! is `1/L` and the norm objective is
//! `phi(tau) = (1/L) sum_l |g(tau - l/L)|`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{BoundResult, Method};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::numeric::{gcd, rational_approx, trigamma};
use crate::search::{maximize, MaxSearch, Regularity};

/// Largest lattice period for which the tail is summed in closed form.
const MAX_TAIL_PERIOD: u64 = 512;
/// Largest automatically chosen truncation when only an envelope bound on
/// the tail is available.
const MAX_TRUNCATION: usize = 1 << 16;
/// Window used when the tail is exact; any value works.
const EXACT_TAIL_WINDOW: usize = 16;

/// Sampling instants `pi l / (L B)` for `l` in `range`.
pub fn sample_instants(l: f64, bandwidth: f64, range: RangeInclusive<i64>) -> Result<Vec<f64>> {
    if !(l >= 1.0 && l.is_finite()) {
        return Err(Error::param(format!("oversampling factor must be at least 1, got {l}")));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::param(format!("bandwidth must be positive, got {bandwidth}")));
    }
    Ok(range.map(|k| PI * k as f64 / (l * bandwidth)).collect())
}

/// Evaluation grid and truncation for [`operator_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Initial samples per period of the objective.
    pub points: usize,
    /// Kernel shifts kept on each side; `None` picks the smallest window
    /// meeting `target_tail`.
    pub truncation: Option<usize>,
    /// Largest acceptable bound on the discarded shifts.
    pub target_tail: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 1024,
            truncation: None,
            target_tail: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
enum Tail {
    /// `cos(w_j l / L)` is periodic in `l` with this period, so the tail is
    /// a finite combination of trigamma values.
    Exact { period: usize },
    /// Only `|g(t)| <= c / t^2` is used.
    Envelope { c: f64 },
}

/// The objective `tau -> (1/L) sum_l |g(tau - l/L)|` of a kernel in
/// normalized time, with either an exact or a bounded tail.
#[derive(Debug, Clone)]
pub struct OperatorSum {
    kernel: KernelSpec,
    delta: f64,
    terms: Vec<(f64, f64)>,
    tail: Tail,
    window: usize,
}

impl OperatorSum {
    /// Fails for kernels without a `1/t^2` envelope (the sinc), and when
    /// no truncation meets the requested tail bound.
    pub fn new(kernel: &KernelSpec, l: f64, grid: &GridSpec) -> Result<Self> {
        kernel.validate()?;
        if !(l >= 1.0 && l.is_finite()) {
            return Err(Error::param(format!("oversampling factor must be at least 1, got {l}")));
        }
        let (kernel, _) = kernel.normalized();
        let terms = kernel.cosine_expansion().ok_or_else(|| Error::param("kernel has no summable envelope"))?;
        let delta = 1.0 / l;

        let mut period = 1u64;
        for &(w, _) in &terms {
            match rational_approx(w * delta / (2.0 * PI), MAX_TAIL_PERIOD, 1e-12) {
                Some((_, q)) => period = period / gcd(period, q) * q,
                None => {
                    period = u64::MAX;
                    break;
                }
            }
        }
        if period <= MAX_TAIL_PERIOD {
            return Ok(OperatorSum {
                kernel,
                delta,
                terms,
                tail: Tail::Exact {
                    period: period as usize,
                },
                window: grid.truncation.unwrap_or(EXACT_TAIL_WINDOW),
            });
        }

        let c = terms.iter().map(|(_, c)| c.abs()).sum::<f64>() / PI;
        let bound = |m: usize| c / delta * (trigamma(m as f64) + trigamma(m as f64 + 2.0));
        let window = match grid.truncation {
            Some(m) => m.max(1),
            None => {
                let mut m = 16usize;
                while bound(m) > grid.target_tail && m < MAX_TRUNCATION {
                    m *= 2;
                }
                m
            }
        };
        let achieved = bound(window);
        if achieved > grid.target_tail {
            return Err(Error::Tolerance {
                requested: grid.target_tail,
                achieved,
                context: format!("operator-norm tail with {window} shifts per side"),
            });
        }
        Ok(OperatorSum {
            kernel,
            delta,
            terms,
            tail: Tail::Envelope { c },
            window,
        })
    }

    /// Sample spacing `1/L`, the period of the objective.
    pub fn period(&self) -> f64 {
        self.delta
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// True when the tail is summed exactly.
    pub fn exact_tail(&self) -> bool {
        matches!(self.tail, Tail::Exact { .. })
    }

    /// Bound on the part of the sum not included by [`Self::eval`] for
    /// `tau` in `[0, 1/L]` (zero for an exact tail).
    pub fn tail_bound(&self) -> f64 {
        match self.tail {
            Tail::Exact { .. } => 0.0,
            Tail::Envelope { c } => {
                let m = self.window as f64;
                c / self.delta * (trigamma(m) + trigamma(m + 2.0))
            }
        }
    }

    fn numerator(&self, u: f64) -> f64 {
        self.terms.iter().map(|&(w, c)| c * (w * u).cos()).sum()
    }

    /// The objective at `tau`; a lower bound within [`Self::tail_bound`]
    /// when the tail is not exact.
    pub fn eval(&self, tau: f64) -> f64 {
        let d = self.delta;
        let m = self.window as i64;
        let shift = (tau / d).floor() as i64;
        let x = tau / d - shift as f64;
        let local = x * d;
        let mut sum: f64 = (-m..=m).map(|l| self.kernel.time(local - l as f64 * d).abs()).sum();
        if let Tail::Exact { period } = self.tail {
            let p = period as f64;
            let scale = 1.0 / (PI * d * d * p * p);
            for r in 0..period {
                let k0 = (m + 1 + r as i64) as f64;
                let pos = self.numerator(local - k0 * d).abs();
                let neg = self.numerator(local + k0 * d).abs();
                sum += scale * (pos * trigamma((k0 - x) / p) + neg * trigamma((k0 + x) / p));
            }
        }
        d * sum
    }
}

/// Result of [`operator_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorNorm {
    /// `value` is a certified lower bound, `value + cert_error` an upper
    /// bound; `t_star` is in normalized time.
    pub result: BoundResult,
    pub truncation: usize,
    pub tail_bound: f64,
    pub exact_tail: bool,
}

/// Partial sums `(1/L) sum_{|l| <= M} |g(tau - l/L)|` at the midpoint of a
/// sampling period for doubling `M`, used to exhibit divergence.
fn divergence_estimates(kernel: &KernelSpec, l: f64) -> Vec<f64> {
    let (k, _) = kernel.normalized();
    let d = 1.0 / l;
    let tau = 0.5 * d;
    let mut out = Vec::new();
    let mut sum = k.time(tau).abs();
    let mut done = 0i64;
    for e in 4..=16 {
        let m = 1i64 << e;
        for j in done + 1..=m {
            sum += k.time(tau - j as f64 * d).abs() + k.time(tau + j as f64 * d).abs();
        }
        done = m;
        out.push(d * sum);
    }
    out
}

/// `sup_t (pi/(LB)) sum_l |g(t - t_l)|`, the norm of the interpolation
/// operator on bounded sample sequences.
///
/// The sinc has no summable tail; its partial sums grow like `log M` and
/// the call reports [`Error::NonConvergent`] with the estimates.
pub fn operator_norm(kernel: &KernelSpec, l: f64, grid: &GridSpec) -> Result<OperatorNorm> {
    if grid.points < 2 {
        return Err(Error::param("grid needs at least two points per period"));
    }
    kernel.validate()?;
    if let KernelSpec::Sinc { .. } = kernel {
        if !(l >= 1.0 && l.is_finite()) {
            return Err(Error::param(format!("oversampling factor must be at least 1, got {l}")));
        }
        return Err(Error::NonConvergent {
            what: "interpolation sum of the sinc kernel".into(),
            estimates: divergence_estimates(kernel, l),
        });
    }
    let sum = OperatorSum::new(kernel, l, grid)?;
    let (k, _) = kernel.normalized();
    let search = MaxSearch {
        step: sum.period() / grid.points as f64,
        ..MaxSearch::default()
    };
    let best = maximize(
        |t| sum.eval(t),
        0.0,
        sum.period(),
        Regularity::Bandlimited { omega: k.support() },
        &search,
    );
    let tail = sum.tail_bound();
    Ok(OperatorNorm {
        result: BoundResult {
            method: Method::Opnorm,
            value: best.value,
            t_star: Some(best.arg),
            cert_error: best.cert_error + tail,
        },
        truncation: sum.window(),
        tail_bound: tail,
        exact_tail: sum.exact_tail(),
    })
}

/// Options for [`reconstruct`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructOptions {
    /// Samples used on each side of the nearest instant.
    pub truncation: usize,
    /// Skip the reproduction check, for faster-than-Nyquist experiments.
    pub allow_ftn: bool,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            truncation: 100_000,
            allow_ftn: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reconstruction {
    pub value: f64,
    /// Bound on the discarded terms given `|samples| <= sample_bound`;
    /// infinite for kernels without a `1/t^2` envelope.
    pub tail_bound: f64,
    pub terms: usize,
}

/// Terms per parallel chunk; sums are combined in chunk order.
const CHUNK: i64 = 4096;

fn ordered_sum<F: Fn(i64) -> f64 + Sync>(lo: i64, hi: i64, f: F) -> f64 {
    if hi < lo {
        return 0.0;
    }
    let chunks = (hi - lo) / CHUNK + 1;
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let a = lo + c * CHUNK;
            let b = (a + CHUNK - 1).min(hi);
            (a..=b).map(&f).sum()
        })
        .collect();
    partial.iter().sum()
}

/// `(pi/(LB)) sum_l x_l g(t - t_l)` over the `2M + 1` instants nearest to
/// `t`, where `samples(l)` returns `x_l`.
///
/// Exact for signals band-limited to `B` when `L >= (Leps + 1)/2`; that
/// condition is enforced unless `allow_ftn` is set. Kernels without a flat
/// in-band region never reproduce and also need `allow_ftn`.
pub fn reconstruct<S>(
    samples: S,
    sample_bound: f64,
    kernel: &KernelSpec,
    l: f64,
    t: f64,
    options: &ReconstructOptions,
) -> Result<Reconstruction>
where
    S: Fn(i64) -> f64 + Sync,
{
    kernel.validate()?;
    if !(l >= 1.0 && l.is_finite()) {
        return Err(Error::param(format!("oversampling factor must be at least 1, got {l}")));
    }
    if !options.allow_ftn {
        if kernel.flat_edge() == 0.0 {
            return Err(Error::Precondition("kernel has no flat in-band region and cannot reproduce".into()));
        }
        let leps = kernel.support() / kernel.flat_edge();
        if l < 0.5 * (leps + 1.0) * (1.0 - 1e-12) {
            return Err(Error::Precondition(format!(
                "reproduction needs L >= (Leps + 1)/2 = {}, got L = {l}",
                0.5 * (leps + 1.0)
            )));
        }
    }
    let spacing = PI / (l * kernel.bandwidth());
    let center = (t / spacing).round() as i64;
    let m = options.truncation as i64;
    let sum = ordered_sum(center - m, center + m, |k| {
        samples(k) * kernel.time(t - k as f64 * spacing)
    });
    let tail_bound = match kernel.envelope_constant() {
        Some(c) => {
            let u = t / spacing - center as f64;
            let mf = m as f64;
            sample_bound.abs() * c / spacing * (trigamma(mf + 1.0 - u) + trigamma(mf + 1.0 + u))
        }
        None => f64::INFINITY,
    };
    Ok(Reconstruction {
        value: spacing * sum,
        tail_bound,
        terms: (2 * m + 1) as usize,
    })
}

/// Truncated Shannon series
/// `sum_{|l - l0| <= M} x_l sin(B(t - t_l)) / (B(t - t_l))` at the Nyquist
/// instants `t_l = pi l / B`. The sinc decays only like `1/t`, so no tail
/// certificate is given; the number of terms is reported instead.
pub fn shannon_reconstruct<S>(samples: S, bandwidth: f64, t: f64, truncation: usize) -> Result<Reconstruction>
where
    S: Fn(i64) -> f64 + Sync,
{
    let sinc = KernelSpec::sinc(bandwidth)?;
    let spacing = PI / bandwidth;
    let center = (t / spacing).round() as i64;
    let m = truncation as i64;
    let sum = ordered_sum(center - m, center + m, |k| samples(k) * sinc.time(t - k as f64 * spacing));
    Ok(Reconstruction {
        value: spacing * sum,
        tail_bound: f64::INFINITY,
        terms: (2 * m + 1) as usize,
    })
}
