//! Interpolation kernels with piecewise-linear (or ideal) spectra.
//!
//! Every kernel is real and even, normalized so its frequency response is
//! one on the flat in-band region. Time-domain values use the inverse
//! transform `g(t) = (1/2pi) * int ghat(w) e^{jwt} dw`, so `g(0)` equals the
//! spectral area divided by `2 pi`.
//!
//! Apart from the ideal low-pass (sinc), every kernel here has a continuous
//! piecewise-linear spectrum and can therefore be written as
//! `g(t) = (1 / (pi t^2)) * sum_j c_j cos(w_j t)` away from the origin. That
//! cosine expansion drives the `1/t^2` tail certificates used elsewhere.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::inverse_square_tail;

/// Relative slack used when comparing user-supplied frequencies.
const EDGE_EPS: f64 = 1e-12;

/// A reproducing or interpolation kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// Ideal low-pass with flat response on `[-B, B]`.
    Sinc { bandwidth: f64 },
    /// Triangular (hat) spectrum of unit height and half-width `B`.
    Triangle { bandwidth: f64 },
    /// Flat on `[-B, B]`, linear decay to zero at `Leps * B`.
    Trapezoid { bandwidth: f64, expansion: f64 },
    /// Stack of trapezoids sharing the flat edge, see [`LayeredFilter`].
    Layered(LayeredFilter),
}

/// Layer-wise trapezoidal filter.
///
/// Layer `k` is a trapezoid with flat edge `breakpoints[0]` and expansion
/// factor `extension_factors[k]`, weighted by
/// `amplitudes[k] - amplitudes[k + 1]`. The final breakpoint is the outer
/// support edge; every layer must end inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredFilter {
    #[serde(rename = "breakpoints_rad")]
    pub breakpoints: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub extension_factors: Vec<f64>,
}

impl LayeredFilter {
    pub fn new(breakpoints: Vec<f64>, amplitudes: Vec<f64>, extension_factors: Vec<f64>) -> Result<Self> {
        let f = LayeredFilter {
            breakpoints,
            amplitudes,
            extension_factors,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.extension_factors.len();
        if n == 0 {
            return Err(Error::param("layered filter needs at least one layer"));
        }
        if self.breakpoints.len() != n + 1 || self.amplitudes.len() != n + 1 {
            return Err(Error::param(format!(
                "layered filter with {n} layers needs {} breakpoints and amplitudes (got {} and {})",
                n + 1,
                self.breakpoints.len(),
                self.amplitudes.len()
            )));
        }
        if !self.breakpoints.iter().all(|w| w.is_finite()) || self.breakpoints[0] <= 0.0 {
            return Err(Error::param("breakpoints must be finite and positive"));
        }
        if self.breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("breakpoints must be strictly increasing"));
        }
        if !self.amplitudes.iter().all(|x| x.is_finite()) {
            return Err(Error::param("amplitudes must be finite"));
        }
        if self.amplitudes.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::param("amplitudes must be nonincreasing"));
        }
        if self.amplitudes[n] != 0.0 {
            return Err(Error::param("final amplitude must be exactly zero"));
        }
        if self.amplitudes[n - 1] <= 0.0 {
            return Err(Error::param("last layer must have positive height"));
        }
        let edge = self.breakpoints[n];
        for (k, &le) in self.extension_factors.iter().enumerate() {
            if !(le.is_finite() && le > 1.0) {
                return Err(Error::param(format!("extension factor {k} must exceed 1, got {le}")));
            }
            if self.breakpoints[0] * le > edge * (1.0 + EDGE_EPS) {
                return Err(Error::param(format!(
                    "layer {k} reaches {} beyond the outer breakpoint {edge}",
                    self.breakpoints[0] * le
                )));
            }
        }
        Ok(())
    }

    /// `(weight, expansion)` per layer.
    pub fn layers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.amplitudes
            .windows(2)
            .zip(&self.extension_factors)
            .map(|(x, &le)| (x[0] - x[1], le))
    }

    fn flat_edge(&self) -> f64 {
        self.breakpoints[0]
    }

    fn support(&self) -> f64 {
        self.flat_edge() * self.extension_factors.iter().copied().fold(1.0, f64::max)
    }
}

impl KernelSpec {
    pub fn sinc(bandwidth: f64) -> Result<Self> {
        let k = KernelSpec::Sinc { bandwidth };
        k.validate()?;
        Ok(k)
    }

    pub fn trapezoid(bandwidth: f64, expansion: f64) -> Result<Self> {
        let k = KernelSpec::Trapezoid { bandwidth, expansion };
        k.validate()?;
        Ok(k)
    }

    pub fn triangle(bandwidth: f64) -> Result<Self> {
        let k = KernelSpec::Triangle { bandwidth };
        k.validate()?;
        Ok(k)
    }

    /// The triangle kernel `K_n(t) = 2n sin^2(pi t / 2n) / (pi^2 t^2)`,
    /// whose spectrum is a unit hat on `[-pi/n, pi/n]`.
    pub fn triangle_n(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::param("triangle kernel index n must be at least 1"));
        }
        Ok(KernelSpec::Triangle {
            bandwidth: PI / n as f64,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, b: f64| {
            if b.is_finite() && b > 0.0 {
                Ok(())
            } else {
                Err(Error::param(format!("{name} must be finite and positive, got {b}")))
            }
        };
        match self {
            KernelSpec::Sinc { bandwidth } | KernelSpec::Triangle { bandwidth } => positive("bandwidth", *bandwidth),
            KernelSpec::Trapezoid { bandwidth, expansion } => {
                positive("bandwidth", *bandwidth)?;
                if !(expansion.is_finite() && *expansion > 1.0) {
                    return Err(Error::param(format!(
                        "trapezoid expansion factor must exceed 1, got {expansion}"
                    )));
                }
                Ok(())
            }
            KernelSpec::Layered(f) => f.validate(),
        }
    }

    /// Reference bandwidth `B` that fixes the sampling instants
    /// `t_l = pi l / (L B)`. For the triangle this is its half-width.
    pub fn bandwidth(&self) -> f64 {
        match self {
            KernelSpec::Sinc { bandwidth } | KernelSpec::Triangle { bandwidth } => *bandwidth,
            KernelSpec::Trapezoid { bandwidth, .. } => *bandwidth,
            KernelSpec::Layered(f) => f.flat_edge(),
        }
    }

    /// Edge of the flat unit-response region (zero for the triangle).
    pub fn flat_edge(&self) -> f64 {
        match self {
            KernelSpec::Triangle { .. } => 0.0,
            other => other.bandwidth(),
        }
    }

    /// Largest frequency with nonzero response.
    pub fn support(&self) -> f64 {
        match self {
            KernelSpec::Sinc { bandwidth } | KernelSpec::Triangle { bandwidth } => *bandwidth,
            KernelSpec::Trapezoid { bandwidth, expansion } => bandwidth * expansion,
            KernelSpec::Layered(f) => f.support(),
        }
    }

    /// Bandwidth expansion factor `support / B`.
    pub fn expansion(&self) -> f64 {
        self.support() / self.bandwidth()
    }

    /// Response at the spectral origin.
    pub fn dc_gain(&self) -> f64 {
        match self {
            KernelSpec::Layered(f) => f.amplitudes[0],
            _ => 1.0,
        }
    }

    /// The same shape dilated so that the reference bandwidth is `pi`.
    ///
    /// With `s = B / pi` the original kernel satisfies
    /// `g(t) = s * g_normalized(s * t)`.
    pub fn normalized(&self) -> (KernelSpec, f64) {
        let s = self.bandwidth() / PI;
        let k = match self {
            KernelSpec::Sinc { .. } => KernelSpec::Sinc { bandwidth: PI },
            KernelSpec::Triangle { .. } => KernelSpec::Triangle { bandwidth: PI },
            KernelSpec::Trapezoid { expansion, .. } => KernelSpec::Trapezoid {
                bandwidth: PI,
                expansion: *expansion,
            },
            KernelSpec::Layered(f) => KernelSpec::Layered(LayeredFilter {
                breakpoints: f.breakpoints.iter().map(|w| w / s).collect(),
                amplitudes: f.amplitudes.clone(),
                extension_factors: f.extension_factors.clone(),
            }),
        };
        (k, s)
    }

    /// Time-domain value; the kernel is assumed valid.
    pub fn time(&self, t: f64) -> f64 {
        match self {
            KernelSpec::Sinc { bandwidth } => sinc_time(*bandwidth, t),
            KernelSpec::Triangle { bandwidth } => triangle_time(*bandwidth, t),
            KernelSpec::Trapezoid { bandwidth, expansion } => trapezoid_time(*bandwidth, *expansion, t),
            KernelSpec::Layered(f) => f
                .layers()
                .map(|(w, le)| if w == 0.0 { 0.0 } else { w * trapezoid_time(f.flat_edge(), le, t) })
                .sum(),
        }
    }

    /// Frequency response; the kernel is assumed valid.
    pub fn freq(&self, omega: f64) -> f64 {
        let w = omega.abs();
        match self {
            KernelSpec::Sinc { bandwidth } => {
                if w <= *bandwidth {
                    1.0
                } else {
                    0.0
                }
            }
            KernelSpec::Triangle { bandwidth } => (1.0 - w / bandwidth).max(0.0),
            KernelSpec::Trapezoid { bandwidth, expansion } => trapezoid_freq(*bandwidth, *expansion, w),
            KernelSpec::Layered(f) => f
                .layers()
                .map(|(h, le)| h * trapezoid_freq(f.flat_edge(), le, w))
                .sum(),
        }
    }

    /// Coefficients `(w_j, c_j)` with `g(t) = (1/(pi t^2)) sum_j c_j cos(w_j t)`
    /// for `t != 0`. `None` for the sinc, which decays only like `1/t`.
    pub fn cosine_expansion(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            KernelSpec::Sinc { .. } => None,
            KernelSpec::Triangle { bandwidth } => Some(vec![(0.0, 1.0 / bandwidth), (*bandwidth, -1.0 / bandwidth)]),
            KernelSpec::Trapezoid { bandwidth, expansion } => {
                let c = 1.0 / ((expansion - 1.0) * bandwidth);
                Some(vec![(*bandwidth, c), (bandwidth * expansion, -c)])
            }
            KernelSpec::Layered(f) => {
                let b = f.flat_edge();
                let mut out: Vec<(f64, f64)> = Vec::new();
                for (h, le) in f.layers() {
                    if h == 0.0 {
                        continue;
                    }
                    let c = h / ((le - 1.0) * b);
                    for (w, coef) in [(b, c), (b * le, -c)] {
                        match out.iter_mut().find(|(w0, _)| (*w0 - w).abs() <= EDGE_EPS * w) {
                            Some(entry) => entry.1 += coef,
                            None => out.push((w, coef)),
                        }
                    }
                }
                Some(out)
            }
        }
    }

    /// Constant `C` with `|g(t)| <= C / t^2`.
    pub fn envelope_constant(&self) -> Option<f64> {
        self.cosine_expansion()
            .map(|terms| terms.iter().map(|(_, c)| c.abs()).sum::<f64>() / PI)
    }

    /// Spacings of the known lattices of sign changes of `g`, if any.
    /// `None` means the zeros must be located numerically.
    pub fn zero_lattices(&self) -> Option<Vec<f64>> {
        match self {
            KernelSpec::Sinc { bandwidth } => Some(vec![PI / bandwidth]),
            // sin^2 never changes sign
            KernelSpec::Triangle { .. } => Some(Vec::new()),
            KernelSpec::Trapezoid { bandwidth, expansion } => {
                let mid = 0.5 * (expansion + 1.0) * bandwidth;
                let half = 0.5 * (expansion - 1.0) * bandwidth;
                Some(vec![PI / mid, PI / half])
            }
            KernelSpec::Layered(f) => {
                let positive: Vec<f64> = f.layers().filter(|(h, _)| *h > 0.0).map(|(_, le)| le).collect();
                if positive.windows(2).all(|w| w[0] == w[1]) {
                    KernelSpec::Trapezoid {
                        bandwidth: f.flat_edge(),
                        expansion: positive[0],
                    }
                    .zero_lattices()
                } else {
                    None
                }
            }
        }
    }
}

fn sinc_time(b: f64, t: f64) -> f64 {
    let x = b * t;
    if x.abs() < 1e-6 {
        b / PI * (1.0 - x * x / 6.0)
    } else {
        (x).sin() / (PI * t)
    }
}

fn triangle_time(b: f64, t: f64) -> f64 {
    let x = b * t;
    if x.abs() < 1e-6 {
        // g(0) = B/(2 pi), second moment B^3/12
        b / (2.0 * PI) * (1.0 - x * x / 12.0)
    } else {
        let s = (0.5 * x).sin();
        2.0 * s * s / (PI * b * t * t)
    }
}

fn trapezoid_time(b: f64, le: f64, t: f64) -> f64 {
    let x = b * t;
    if x.abs() < 1e-6 {
        // (1/pi) (M0 - t^2 M2 / 2) with M0, M2 the spectral moments on [0, inf)
        let a = le * b;
        let m0 = 0.5 * (a + b);
        let m2 = b * b * b / 3.0 + (a * (a * a * a - b * b * b) / 3.0 - (a.powi(4) - b.powi(4)) / 4.0) / (a - b);
        return (m0 - 0.5 * t * t * m2) / PI;
    }
    let mid = 0.5 * (le + 1.0) * b;
    let half = 0.5 * (le - 1.0) * b;
    2.0 * (mid * t).sin() * (half * t).sin() / (PI * (le - 1.0) * b * t * t)
}

fn trapezoid_freq(b: f64, le: f64, w: f64) -> f64 {
    if w <= b {
        1.0
    } else if w >= le * b {
        0.0
    } else {
        (le * b - w) / ((le - 1.0) * b)
    }
}

/// `g(t)` after validating the kernel.
pub fn eval_time(kernel: &KernelSpec, t: f64) -> Result<f64> {
    kernel.validate()?;
    Ok(kernel.time(t))
}

/// `ghat(omega)` after validating the kernel.
pub fn eval_freq(kernel: &KernelSpec, omega: f64) -> Result<f64> {
    kernel.validate()?;
    Ok(kernel.freq(omega))
}

/// Result of [`membership_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub in_set: bool,
    pub max_violation: f64,
}

/// Checks the spectral conditions of the reproducing kernel set with
/// parameters `(B, Leps)`: unit response on `[0, B]`, zero beyond
/// `Leps B`, values in `[0, 1]` and nonincreasing in between. Only the
/// spectrum is examined; integrability is not.
pub fn membership_check(kernel: &KernelSpec, bandwidth: f64, expansion: f64) -> Result<Membership> {
    kernel.validate()?;
    if !(bandwidth > 0.0 && expansion >= 1.0) {
        return Err(Error::param("membership check needs B > 0 and Leps >= 1"));
    }
    let edge = bandwidth * expansion;
    let top = 1.25 * edge.max(kernel.support());
    const POINTS: usize = 20_000;
    let mut grid: Vec<f64> = (0..=POINTS).map(|i| top * i as f64 / POINTS as f64).collect();
    grid.extend([bandwidth, edge, kernel.flat_edge(), kernel.support()]);
    if let KernelSpec::Layered(f) = kernel {
        grid.extend(f.breakpoints.iter().copied());
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut worst = 0.0f64;
    let mut prev: Option<f64> = None;
    for &w in &grid {
        let g = kernel.freq(w);
        worst = worst.max(-g).max(g - 1.0);
        if w <= bandwidth {
            worst = worst.max((g - 1.0).abs());
        } else if w > edge || (expansion > 1.0 && w == edge) {
            worst = worst.max(g.abs());
        } else if let Some(p) = prev {
            worst = worst.max(g - p);
        }
        prev = Some(g);
    }
    Ok(Membership {
        in_set: worst <= 1e-12,
        max_violation: worst,
    })
}

/// Result of [`nyquist_isi_defect`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsiDefect {
    /// Mean of the aliased spectrum over one period.
    pub c_n: f64,
    /// Largest deviation of the aliased spectrum from `c_n`.
    pub defect: f64,
}

/// Measures how far the aliased spectrum `sum_k ghat(w - 2k LB)` is from
/// constant. A defect of zero identifies a Nyquist filter with Nyquist
/// angular frequency `LB`.
pub fn nyquist_isi_defect(kernel: &KernelSpec, nyquist: f64) -> Result<IsiDefect> {
    kernel.validate()?;
    let (flat, support) = (kernel.flat_edge(), kernel.support());
    let lo = 0.5 * (flat + support);
    if !(nyquist >= lo * (1.0 - EDGE_EPS) && nyquist <= support * (1.0 + EDGE_EPS)) {
        return Err(Error::param(format!(
            "Nyquist frequency {nyquist} outside the admissible interval [{lo}, {support}]"
        )));
    }
    let period = 2.0 * nyquist;
    const POINTS: usize = 8192;
    let sums: Vec<f64> = (0..POINTS)
        .map(|i| {
            // cell midpoints avoid the jump of an ideal low-pass at its edge
            let w = period * (i as f64 + 0.5) / POINTS as f64;
            let k_lo = ((w - support) / period).floor() as i64;
            let k_hi = ((w + support) / period).ceil() as i64;
            (k_lo..=k_hi).map(|k| kernel.freq(w - k as f64 * period)).sum()
        })
        .collect();
    let c_n = sums.iter().sum::<f64>() / POINTS as f64;
    let defect = sums.iter().map(|s| (s - c_n).abs()).fold(0.0, f64::max);
    Ok(IsiDefect { c_n, defect })
}

/// Truncated lattice sum of the triangle kernel together with a bound on
/// the discarded terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSum {
    pub value: f64,
    pub tail_bound: f64,
}

/// `sum_l K_n(t - l a n)` over the `2M + 1` lattice points nearest to `t`.
///
/// For `0 < a <= 2` the full sum is the constant `1/(a n)`: the spectral
/// replicas of `K_n` fall on its zeros. The tail is bounded through the
/// envelope `K_n(s) <= 2n / (pi^2 s^2)`.
pub fn lemma1_sum(n: u32, a: f64, t: f64, m: usize) -> Result<LatticeSum> {
    if n < 1 {
        return Err(Error::param("n must be at least 1"));
    }
    if !(a > 0.0 && a <= 2.0) {
        return Err(Error::param(format!(
            "lattice factor a must lie in (0, 2], got {a}; larger spacings alias the spectrum"
        )));
    }
    if m < 1 {
        return Err(Error::param("truncation M must be at least 1"));
    }
    let kernel = KernelSpec::triangle_n(n)?;
    let spacing = a * n as f64;
    let center = (t / spacing).round() as i64;
    let m = m as i64;
    let value: f64 = (center - m..=center + m)
        .map(|l| kernel.time(t - l as f64 * spacing))
        .sum();
    let u = t / spacing - center as f64; // in [-1/2, 1/2]
    let c = kernel.envelope_constant().expect("triangle has a 1/t^2 envelope");
    // sum over j > M of 1/((j - u) d)^2 and 1/((j + u) d)^2
    let tail_bound = c / (spacing * spacing) * (inverse_square_tail(u - m as f64) + inverse_square_tail(-u - m as f64));
    Ok(LatticeSum { value, tail_bound })
}

/// `|S(t) - sum_{k=-n}^{n} K_n(t) e^{jk pi t/n}|` where `S` is the
/// trapezoid with `B = pi`, `Leps = (n+1)/n`. The two sides are computed
/// independently: closed form on the left, modulated triangles on the right.
pub fn trapezoid_decomposition_check(n: u32, t: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::param("n must be at least 1"));
    }
    let nf = n as f64;
    let lhs = KernelSpec::trapezoid(PI, (nf + 1.0) / nf)?.time(t);
    let kn = KernelSpec::triangle_n(n)?.time(t);
    let rhs: Complex64 = (-(n as i64)..=n as i64)
        .map(|k| Complex64::from_polar(kn, k as f64 * PI * t / nf))
        .sum();
    Ok((Complex64::new(lhs, 0.0) - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trap(le: f64) -> KernelSpec {
        KernelSpec::trapezoid(PI, le).unwrap()
    }

    /// Closed form evaluated with the Taylor branch disabled.
    fn trapezoid_closed(le: f64, t: f64) -> f64 {
        let (mid, half) = (0.5 * (le + 1.0) * PI, 0.5 * (le - 1.0) * PI);
        2.0 * (mid * t).sin() * (half * t).sin() / (PI * (le - 1.0) * PI * t * t)
    }

    #[test]
    fn trapezoid_origin_value() {
        assert!((eval_time(&trap(3.0), 0.0).unwrap() - 2.0).abs() < 1e-15);
        let near = trapezoid_closed(3.0, 1e-8);
        assert!((near - 2.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_origin_and_zeros() {
        let k1 = KernelSpec::triangle_n(1).unwrap();
        assert!((k1.time(0.0) - 0.5).abs() < 1e-15);
        let k2 = KernelSpec::triangle_n(2).unwrap();
        for k in [-3i32, -1, 1, 2, 5] {
            assert!(k2.time(8.0 * k as f64).abs() < 1e-15);
        }
        // matches K_n(t) = 2n sin^2(pi t / 2n) / (pi^2 t^2)
        for &t in &[0.3, -1.7, 4.4] {
            let n = 3.0;
            let direct = 2.0 * n * (PI * t / (2.0 * n)).sin().powi(2) / (PI * PI * t * t);
            assert!((KernelSpec::triangle_n(3).unwrap().time(t) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn taylor_branch_is_continuous() {
        for k in [trap(3.0), trap(1.01), KernelSpec::triangle_n(4).unwrap(), KernelSpec::sinc(2.0).unwrap()] {
            let b = k.bandwidth();
            let inside = k.time(0.999e-6 / b);
            let outside = k.time(1.001e-6 / b);
            assert!((inside - outside).abs() < 1e-12 * k.time(0.0).abs().max(1.0), "{k:?}");
        }
    }

    #[test]
    fn trapezoid_spectrum_points() {
        let k = trap(3.0);
        assert_eq!(eval_freq(&k, PI).unwrap(), 1.0);
        assert_eq!(eval_freq(&k, 3.0 * PI).unwrap(), 0.0);
        assert!((eval_freq(&k, 2.0 * PI).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(k.freq(-2.0 * PI), k.freq(2.0 * PI));
    }

    #[test]
    fn invalid_parameters() {
        assert!(KernelSpec::trapezoid(PI, 1.0).is_err());
        assert!(KernelSpec::trapezoid(-1.0, 2.0).is_err());
        assert!(KernelSpec::triangle_n(0).is_err());
        assert!(eval_time(&KernelSpec::Trapezoid { bandwidth: PI, expansion: 0.5 }, 1.0).is_err());
    }

    #[test]
    fn membership_examples() {
        let m = membership_check(&trap(3.0), PI, 3.0).unwrap();
        assert!(m.in_set && m.max_violation == 0.0);
        assert!(membership_check(&KernelSpec::sinc(PI).unwrap(), PI, 1.0).unwrap().in_set);
        let m = membership_check(&trap(2.0), PI, 1.5).unwrap();
        assert!(!m.in_set && m.max_violation > 0.1);
    }

    #[test]
    fn isi_examples() {
        let r = nyquist_isi_defect(&trap(3.0), 2.0 * PI).unwrap();
        assert!(r.defect < 1e-12, "{r:?}");
        assert!((r.c_n - 1.0).abs() < 1e-12);
        let r = nyquist_isi_defect(&KernelSpec::sinc(PI).unwrap(), PI).unwrap();
        assert!(r.defect < 1e-12 && (r.c_n - 1.0).abs() < 1e-12);
        assert!(nyquist_isi_defect(&trap(3.0), 3.5 * PI).is_err());
        assert!(nyquist_isi_defect(&trap(3.0), 3.0 * PI).is_ok());
        // off-centre Nyquist frequency is not complementary
        assert!(nyquist_isi_defect(&trap(3.0), 2.5 * PI).unwrap().defect > 0.1);
    }

    #[test]
    fn lemma1_examples() {
        for (n, a, t, expect) in [(1, 2.0, 0.3, 0.5), (2, 1.0, 0.0, 0.5), (3, 1.5, -1.7, 1.0 / 4.5)] {
            let s = lemma1_sum(n, a, t, 2000).unwrap();
            assert!((s.value - expect).abs() <= s.tail_bound + 1e-12, "{n} {a} {t}: {s:?}");
            assert!(s.value <= expect + 1e-12);
        }
        assert!(lemma1_sum(1, 2.5, 0.0, 10).is_err());
        assert!(lemma1_sum(1, 0.0, 0.0, 10).is_err());
    }

    #[test]
    fn lemma1_brute_force_oracle() {
        // direct summation to M = 10^6, no envelope bound involved
        let (n, a, t) = (3.0, 1.5, -1.7);
        let k = |s: f64| 2.0 * n * (PI * s / (2.0 * n)).sin().powi(2) / (PI * PI * s * s);
        let brute: f64 = (-1_000_000i64..=1_000_000).map(|l| k(t - l as f64 * a * n)).sum();
        assert!((brute - 1.0 / 4.5).abs() < 1e-7, "{brute}");
    }

    #[test]
    fn decomposition_examples() {
        assert!(trapezoid_decomposition_check(1, 0.37).unwrap() < 1e-12);
        assert!(trapezoid_decomposition_check(4, 0.0).unwrap() < 1e-12);
        assert!(trapezoid_decomposition_check(2, 8.0).unwrap() < 1e-12);
        for i in 0..50 {
            let t = -6.0 + 0.2467 * i as f64;
            for n in 1..6 {
                assert!(trapezoid_decomposition_check(n, t).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn cosine_expansion_matches_closed_form() {
        let layered = KernelSpec::Layered(
            LayeredFilter::new(vec![PI, 1.5 * PI, 2.0 * PI], vec![1.0, 0.4, 0.0], vec![2.0, 1.5]).unwrap(),
        );
        for k in [trap(1.7), KernelSpec::triangle(2.5).unwrap(), layered] {
            let terms = k.cosine_expansion().unwrap();
            for &t in &[0.3, 1.9, -7.25, 40.1] {
                let via: f64 = terms.iter().map(|(w, c)| c * (w * t).cos()).sum::<f64>() / (PI * t * t);
                assert!((via - k.time(t)).abs() < 1e-12, "{k:?} t={t}");
                assert!(k.time(t).abs() <= k.envelope_constant().unwrap() / (t * t) + 1e-15);
            }
        }
    }

    #[test]
    fn layered_validation() {
        assert!(LayeredFilter::new(vec![PI, 2.0 * PI], vec![1.0, 0.0], vec![2.0]).is_ok());
        assert!(LayeredFilter::new(vec![PI, 2.0 * PI], vec![1.0, 0.1], vec![2.0]).is_err());
        assert!(LayeredFilter::new(vec![PI, 2.0 * PI, 3.0 * PI], vec![0.5, 1.0, 0.0], vec![2.0, 2.0]).is_err());
        assert!(LayeredFilter::new(vec![PI, 2.0 * PI], vec![1.0, 0.0], vec![2.5]).is_err());
        assert!(LayeredFilter::new(vec![2.0 * PI, PI], vec![1.0, 0.0], vec![1.2]).is_err());
        let f = LayeredFilter::new(vec![PI, 1.5 * PI, 2.0 * PI], vec![1.0, 0.5, 0.0], vec![2.0, 1.5]).unwrap();
        let k = KernelSpec::Layered(f);
        assert!(membership_check(&k, PI, 2.0).unwrap().in_set);
        assert!((k.freq(1.25 * PI) - (0.5 * 0.75 + 0.5 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn dilation_relation() {
        for &b in &[0.5, 1.0, 10.0] {
            let k = KernelSpec::trapezoid(b, 1.8).unwrap();
            let (kn, s) = k.normalized();
            for &t in &[0.0, 0.4, -3.3, 17.0] {
                let lhs = k.time(t);
                let rhs = s * kn.time(s * t);
                assert!((lhs - rhs).abs() < 1e-13 * lhs.abs().max(1e-3), "b={b} t={t}");
            }
        }
    }
}
