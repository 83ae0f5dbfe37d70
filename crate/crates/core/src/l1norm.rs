//! `L1` norms of kernels and their relation to interpolation-operator
//! norms.
//!
//! For `t != 0` the piecewise-linear spectra give
//! `g(t) = N(t) / (pi t^2)` with a trigonometric sum `N`. The core
//! `[-T, T]` is integrated panel by panel between sign changes of `g`;
//! beyond `T`, when `N` is periodic with period `P` and mean absolute
//! value `A`, the tail equals `2A/(pi T)` up to `4AP/(pi T^2)`
//! (integration by parts against the bounded primitive of `|N| - A`).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::numeric::commensurate_fundamental;
use crate::opnorm::{operator_norm, GridSpec};
use crate::quadrature::{integrate, sign_changes};

/// Core half-widths beyond this are refused.
const MAX_CORE: f64 = 1e6;
/// Largest denominator accepted when looking for a common period.
const MAX_PERIOD_DEN: u64 = 1000;

/// Integration controls for [`kernel_l1`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Half-width of the adaptively integrated core in normalized time
    /// (`B = pi`); `None` chooses it from `abs_tol`.
    pub core_halfwidth: Option<f64>,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            core_halfwidth: None,
            abs_tol: 1e-9,
            max_subdivisions: 4_000_000,
        }
    }
}

/// Result of [`kernel_l1`]; the norm lies within `cert_error` of `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L1Norm {
    pub value: f64,
    pub cert_error: f64,
    pub core_halfwidth: f64,
    /// True when the tail used the periodic mean rather than the envelope.
    pub periodic_tail: bool,
}

fn numerator(terms: &[(f64, f64)], t: f64) -> f64 {
    terms.iter().map(|&(w, c)| c * (w * t).cos()).sum()
}

/// `int |f|` over consecutive `breaks`, which should contain the sign
/// changes of `f`. Returns (value, error, panels).
fn integrate_abs<F>(f: &F, breaks: Vec<f64>, tol: f64, max_panels: usize) -> (f64, f64, usize)
where
    F: Fn(f64) -> f64 + Sync,
{
    let (a, b) = (breaks[0], *breaks.last().unwrap());
    let width = b - a;
    let per_piece = (max_panels / breaks.len().max(1)).max(8);
    let parts: Vec<_> = breaks
        .par_windows(2)
        .map(|w| integrate(&|x| f(x).abs(), w[0], w[1], tol * (w[1] - w[0]) / width, per_piece))
        .collect();
    parts
        .iter()
        .fold((0.0, 0.0, 0), |(v, e, p), r| (v + r.value, e + r.error, p + r.panels))
}

fn merged_breaks(a: f64, b: f64, piece: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let n = ((b - a) / piece).ceil().max(1.0) as usize;
    let mut v: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    v.extend(extra.into_iter().filter(|&x| x > a && x < b));
    v.sort_by(f64::total_cmp);
    v.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * y.abs().max(1.0));
    v
}

/// `int_{-T}^{T} |sinc|` for doubling `T`, exhibiting logarithmic growth.
fn sinc_estimates() -> Vec<f64> {
    let f = |t: f64| KernelSpec::Sinc { bandwidth: PI }.time(t);
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut done = 0usize;
    for e in 2..=12 {
        let top = 1usize << e;
        for k in done..top {
            acc += integrate(&|x| f(x).abs(), k as f64, k as f64 + 1.0, 1e-13, 64).value;
        }
        done = top;
        out.push(2.0 * acc);
    }
    out
}

/// `int |g(t)| dt`, independent of the bandwidth.
///
/// The sinc is not integrable and yields [`Error::NonConvergent`].
pub fn kernel_l1(kernel: &KernelSpec, quad: &QuadratureSpec) -> Result<L1Norm> {
    kernel.validate()?;
    if !(quad.abs_tol > 0.0) {
        return Err(Error::param("absolute tolerance must be positive"));
    }
    let (k, _) = kernel.normalized();
    let Some(terms) = k.cosine_expansion() else {
        return Err(Error::NonConvergent {
            what: "L1 norm of the sinc kernel".into(),
            estimates: sinc_estimates(),
        });
    };
    let w_max = terms.iter().map(|t| t.0).fold(0.0, f64::max);
    let envelope = terms.iter().map(|t| t.1.abs()).sum::<f64>() / PI;
    let freqs: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let periodic = commensurate_fundamental(&freqs, MAX_PERIOD_DEN).map(|(w0, _)| {
        let p = 2.0 * PI / w0;
        let n = |t: f64| numerator(&terms, t);
        let roots = sign_changes(&n, 0.0, p, PI / (16.0 * w_max));
        let breaks = merged_breaks(0.0, p, PI / w_max, roots);
        let (total, _, _) = integrate_abs(&n, breaks, 1e-15 * envelope * p, 1 << 16);
        (p, total / p)
    });

    let half_tol = 0.5 * quad.abs_tol;
    let t_core = match (quad.core_halfwidth, periodic) {
        (Some(t), _) => t,
        (None, Some((p, mean))) => (8.0 * mean * p / (PI * quad.abs_tol)).sqrt().max(8.0 * p),
        (None, None) => 2.0 * envelope / quad.abs_tol,
    };
    if !(t_core > 0.0 && t_core <= MAX_CORE) {
        return Err(Error::Tolerance {
            requested: quad.abs_tol,
            achieved: 2.0 * envelope / MAX_CORE,
            context: format!("L1 tail would need a core half-width of {t_core:e}"),
        });
    }
    let (tail, tail_err) = match periodic {
        Some((p, mean)) => (2.0 * mean / (PI * t_core), 4.0 * mean * p / (PI * t_core * t_core)),
        // |g| <= C/t^2 puts both tails in [0, 2C/T]
        None => (envelope / t_core, envelope / t_core),
    };

    let g = |t: f64| k.time(t);
    let zeros: Vec<f64> = match k.zero_lattices() {
        Some(spacings) => spacings
            .iter()
            .flat_map(|&s| (1..=(t_core / s) as usize).map(move |j| j as f64 * s))
            .collect(),
        None => sign_changes(&g, 0.0, t_core, PI / (8.0 * w_max)),
    };
    let breaks = merged_breaks(0.0, t_core, PI / w_max, zeros);
    let (core, core_err, panels) = integrate_abs(&g, breaks, 0.5 * half_tol, quad.max_subdivisions);
    let cert = 2.0 * core_err + tail_err;
    if panels > quad.max_subdivisions || cert > quad.abs_tol {
        return Err(Error::Tolerance {
            requested: quad.abs_tol,
            achieved: cert,
            context: format!("L1 quadrature with {panels} panels"),
        });
    }
    Ok(L1Norm {
        value: 2.0 * core + tail,
        cert_error: cert,
        core_halfwidth: t_core,
        periodic_tail: periodic.is_some(),
    })
}

/// One kernel in [`l1_vs_c2_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L1Entry {
    pub expansion: f64,
    pub l1: f64,
    pub l1_cert: f64,
    pub opnorm: f64,
    pub opnorm_cert: f64,
    /// `l1 <= opnorm` within the certificates.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1OperatorReport {
    pub oversampling: f64,
    pub entries: Vec<L1Entry>,
    pub min_l1: f64,
    pub min_opnorm: f64,
    /// Smallest `L1` norm of the family does not exceed its smallest
    /// operator norm.
    pub holds: bool,
}

/// Compares `L1` norms of trapezoids with the given expansions against
/// their operator norms at oversampling `L`. Each operator norm is a
/// maximum of Riemann sums whose average over a period is the `L1` norm,
/// so `||g||_1 <= ||T_g||` kernel by kernel.
pub fn l1_vs_c2_check(expansions: &[f64], l: f64, quad: &QuadratureSpec, grid: &GridSpec) -> Result<L1OperatorReport> {
    if expansions.is_empty() {
        return Err(Error::param("need at least one expansion factor"));
    }
    let mut entries = Vec::with_capacity(expansions.len());
    for &le in expansions {
        let k = KernelSpec::trapezoid(PI, le)?;
        let n1 = kernel_l1(&k, quad)?;
        let op = operator_norm(&k, l, grid)?;
        let slack = n1.cert_error + op.result.cert_error;
        entries.push(L1Entry {
            expansion: le,
            l1: n1.value,
            l1_cert: n1.cert_error,
            opnorm: op.result.value,
            opnorm_cert: op.result.cert_error,
            holds: n1.value <= op.result.value + slack,
        });
    }
    let best_l1 = entries.iter().min_by(|a, b| a.l1.total_cmp(&b.l1)).unwrap();
    let best_op = entries.iter().min_by(|a, b| a.opnorm.total_cmp(&b.opnorm)).unwrap();
    let holds = best_l1.l1 <= best_op.opnorm + best_l1.l1_cert + best_op.opnorm_cert;
    Ok(L1OperatorReport {
        oversampling: l,
        min_l1: best_l1.l1,
        min_opnorm: best_op.opnorm,
        holds,
        entries,
    })
}

/// Result of [`l1_lower_floor`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloorCheck {
    pub l1: f64,
    pub cert_error: f64,
    /// `|int g| = |ghat(0)|`.
    pub floor: f64,
    /// `l1 - floor`.
    pub margin: f64,
    pub holds: bool,
}

/// Checks `int |g| >= |int g|`, the floor set by the spectral origin.
pub fn l1_lower_floor(kernel: &KernelSpec, quad: &QuadratureSpec) -> Result<FloorCheck> {
    let n = kernel_l1(kernel, quad)?;
    let floor = kernel.dc_gain().abs();
    Ok(FloorCheck {
        l1: n.value,
        cert_error: n.cert_error,
        floor,
        margin: n.value - floor,
        holds: n.value >= floor - n.cert_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::LayeredFilter;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    /// Brute-force oracle: midpoint rule on a fine grid plus the envelope
    /// tail bracket, no zero isolation or periodic tail.
    fn brute_l1(k: &KernelSpec, t: f64, h: f64) -> (f64, f64) {
        let n = (t / h) as usize;
        let core: f64 = (0..n).map(|i| k.time((i as f64 + 0.5) * h).abs()).sum::<f64>() * h * 2.0;
        let tail = 2.0 * k.envelope_constant().unwrap() / t;
        (core, tail)
    }

    #[test]
    fn triangle_is_unity() {
        for b in [0.1, 1.0, PI, 10.0, 100.0] {
            let r = kernel_l1(&KernelSpec::triangle(b).unwrap(), &q()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-9, "B={b}: {r:?}");
            assert!(r.periodic_tail);
        }
    }

    #[test]
    fn trapezoid_against_brute_force() {
        let k = KernelSpec::trapezoid(PI, 3.0).unwrap();
        let r = kernel_l1(&k, &q()).unwrap();
        assert!(r.value > 1.0 && r.value < 1.5, "{r:?}");
        let (core, tail) = brute_l1(&k, 20_000.0, 2e-3);
        assert!(r.value >= core - 1e-6 && r.value <= core + tail + 1e-6, "{r:?} vs {core} + [0, {tail}]");
    }

    #[test]
    fn sinc_diverges() {
        match kernel_l1(&KernelSpec::sinc(PI).unwrap(), &q()) {
            Err(Error::NonConvergent { estimates, .. }) => {
                let d: Vec<f64> = estimates.windows(2).map(|w| w[1] - w[0]).collect();
                // each doubling adds about (4/pi^2) ln 2
                assert!((d.last().unwrap() - 4.0 / (PI * PI) * 2f64.ln()).abs() < 1e-3, "{d:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonincreasing_in_expansion() {
        let vals: Vec<f64> = (0..8)
            .map(|i| 1.1 + 0.4 * i as f64)
            .map(|le| kernel_l1(&KernelSpec::trapezoid(PI, le).unwrap(), &q()).unwrap().value)
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{vals:?}");
        }
    }

    #[test]
    fn layered_triangle_inequality() {
        let f = LayeredFilter::new(vec![PI, 1.5 * PI, 3.0 * PI], vec![1.0, 0.4, 0.0], vec![2.0, 3.0]).unwrap();
        let r = kernel_l1(&KernelSpec::Layered(f.clone()), &q()).unwrap();
        let mut bound = 0.0;
        for (w, le) in f.layers() {
            let part = kernel_l1(&KernelSpec::trapezoid(PI, le).unwrap(), &q()).unwrap();
            bound += w * (part.value + part.cert_error);
        }
        assert!(r.value <= bound + r.cert_error);
        assert!(l1_lower_floor(&KernelSpec::Layered(f), &q()).unwrap().holds);
    }

    #[test]
    fn floors() {
        let tri = l1_lower_floor(&KernelSpec::triangle(PI).unwrap(), &q()).unwrap();
        assert!(tri.holds && tri.margin.abs() < 1e-9);
        let trap = l1_lower_floor(&KernelSpec::trapezoid(PI, 3.0).unwrap(), &q()).unwrap();
        assert!(trap.holds && trap.margin > 10.0 * trap.cert_error);
    }

    #[test]
    fn operator_norm_dominates() {
        let r = l1_vs_c2_check(&[2.0, 2.5, 3.0], 2.0, &q(), &GridSpec::default()).unwrap();
        assert!(r.holds && r.entries.iter().all(|e| e.holds));
        assert!(r.min_l1 <= 2f64.sqrt());
        let r = l1_vs_c2_check(&[1.5], 1.5, &q(), &GridSpec::default()).unwrap();
        assert!(r.holds && r.min_l1 <= 5f64.sqrt());
    }

    #[test]
    fn irrational_layers_use_envelope() {
        let f = LayeredFilter::new(vec![PI, 2.0 * PI, 3.0 * PI], vec![1.0, 0.5, 0.0], vec![2f64.sqrt(), 3.0]).unwrap();
        let quad = QuadratureSpec {
            abs_tol: 1e-5,
            ..q()
        };
        let r = kernel_l1(&KernelSpec::Layered(f), &quad).unwrap();
        assert!(!r.periodic_tail && r.cert_error <= 1e-5 && r.value > 1.0);
    }
}
