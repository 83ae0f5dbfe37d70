//! Upper bounds on the peak-value constant `C1(L)` and the interpolation
//! operator constant `C2(L, Leps)`.
//!
//! The closed-form bounds are cheap; the Dirichlet-sum bounds are maxima of
//! averaged shifted Dirichlet kernels and are computed with the certified
//! maximizer in [`crate::search`].

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::LayeredFilter;
use crate::numeric::dirichlet_pi;
use crate::search::{maximize, MaxSearch, Regularity};

/// Largest `n` tried when recognising a rational oversampling factor.
pub const MAX_RATE_N: u32 = 64;

/// Oversampling `L = (n + m)/n` with kernel expansion `Leps = (n + 1)/n`,
/// where `m` is a positive integer or one half.
///
/// `m` is stored doubled so that the term count `2(n + m)` is an exact
/// integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RationalRate {
    n: u32,
    twice_m: u32,
}

impl RationalRate {
    /// `m` must be a positive integer or exactly `0.5`.
    pub fn new(n: u32, m: f64) -> Result<Self> {
        let twice = 2.0 * m;
        if !(twice.fract() == 0.0 && twice >= 1.0 && twice < u32::MAX as f64) {
            return Err(Error::param(format!("m must be 1/2 or a positive integer, got {m}")));
        }
        Self::from_twice_m(n, twice as u32)
    }

    pub fn from_twice_m(n: u32, twice_m: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::param("n must be a positive integer"));
        }
        if twice_m == 0 || (twice_m > 1 && twice_m % 2 == 1) {
            return Err(Error::param(format!(
                "m must be 1/2 or a positive integer, got {}/2",
                twice_m
            )));
        }
        Ok(RationalRate { n, twice_m })
    }

    /// Smallest-`n` representation of `L` with `n <= max_n`, if any.
    pub fn from_oversampling(l: f64, max_n: u32) -> Option<Self> {
        if !(l > 1.0) || !l.is_finite() {
            return None;
        }
        (1..=max_n).find_map(|n| {
            let twice = 2.0 * n as f64 * (l - 1.0);
            let r = twice.round();
            if (twice - r).abs() <= 1e-9 * twice.max(1.0) && r >= 1.0 {
                RationalRate::from_twice_m(n, r as u32).ok()
            } else {
                None
            }
        })
    }

    /// Representation with a given expansion `Leps = (n+1)/n` and
    /// oversampling `L`, if both fit the pattern.
    pub fn from_expansion(leps: f64, l: f64) -> Option<Self> {
        if !(leps > 1.0) {
            return None;
        }
        let nf = 1.0 / (leps - 1.0);
        let n = nf.round();
        if n < 1.0 || n > u32::MAX as f64 || (nf - n).abs() > 1e-9 * nf {
            return None;
        }
        let twice = 2.0 * n * (l - 1.0);
        let r = twice.round();
        if (twice - r).abs() > 1e-9 * twice.abs().max(1.0) {
            return None;
        }
        if r < 1.0 {
            return None;
        }
        RationalRate::from_twice_m(n as u32, r as u32).ok()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> f64 {
        self.twice_m as f64 / 2.0
    }

    /// `2(n + m)`, the number of Dirichlet terms.
    pub fn term_count(&self) -> u32 {
        2 * self.n + self.twice_m
    }

    pub fn oversampling(&self) -> f64 {
        self.term_count() as f64 / (2 * self.n) as f64
    }

    pub fn expansion(&self) -> f64 {
        (self.n + 1) as f64 / self.n as f64
    }
}

impl fmt::Display for RationalRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_m == 1 {
            write!(f, "(n={}, m=1/2)", self.n)
        } else {
            write!(f, "(n={}, m={})", self.n, self.twice_m / 2)
        }
    }
}

/// Which bound produced a [`BoundResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    C1Cos,
    C1Sqrt,
    C2Sota,
    C2New,
    C1Corollary,
    Nyquist,
    Layered,
    Asymptotic,
    /// Direct numerical operator norm of a concrete kernel.
    Opnorm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::C1Cos => "c1_cos",
            Method::C1Sqrt => "c1_sqrt",
            Method::C2Sota => "c2_sota",
            Method::C2New => "c2_new",
            Method::C1Corollary => "c1_corollary",
            Method::Nyquist => "nyquist",
            Method::Layered => "layered",
            Method::Asymptotic => "asymptotic",
            Method::Opnorm => "opnorm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A bound value with its provenance. For numerically maximized bounds the
/// exact quantity lies in `[value, value + cert_error]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub method: Method,
    pub value: f64,
    /// Maximizer in normalized time (`B = pi`), when meaningful.
    pub t_star: Option<f64>,
    pub cert_error: f64,
}

impl BoundResult {
    fn closed(method: Method, value: f64) -> Self {
        BoundResult {
            method,
            value,
            t_star: None,
            cert_error: 0.0,
        }
    }

    /// `value + cert_error`: the certified upper end.
    pub fn upper(&self) -> f64 {
        self.value + self.cert_error
    }
}

fn require_above_one(name: &str, x: f64) -> Result<()> {
    if x > 1.0 && x.is_finite() {
        Ok(())
    } else if x == 1.0 {
        Err(Error::domain(format!("{name} must exceed 1; the constant is infinite at {name} = 1")))
    } else {
        Err(Error::domain(format!("{name} must exceed 1, got {x}")))
    }
}

/// `1 / cos(pi / 2L)`; exact for integer `L`, where the extremal signal
/// peaks at `t = 1/(2L)`.
pub fn c1_cos_bound(l: f64) -> Result<BoundResult> {
    require_above_one("L", l)?;
    let mut r = BoundResult::closed(Method::C1Cos, 1.0 / (PI / (2.0 * l)).cos());
    if l.fract() == 0.0 {
        r.t_star = Some(1.0 / (2.0 * l));
    }
    Ok(r)
}

/// `sqrt(L / (L - 1))`, the expansion-pushed form of [`c2_sota_bound`] at
/// `Leps = 2L - 1`.
pub fn c1_sqrt_bound(l: f64) -> Result<BoundResult> {
    require_above_one("L", l)?;
    Ok(BoundResult::closed(Method::C1Sqrt, (l / (l - 1.0)).sqrt()))
}

/// `sqrt((Leps + 1) / (Leps - 1))`.
pub fn c2_sota_bound(leps: f64) -> Result<BoundResult> {
    require_above_one("Leps", leps)?;
    Ok(BoundResult::closed(Method::C2Sota, ((leps + 1.0) / (leps - 1.0)).sqrt()))
}

/// Leading term `(2/pi) log(2 Leps / (Leps - 1))` of the small-expansion
/// asymptotics. Carries an unknown additive `O(1)`, so it is a diagnostic
/// and never enters a minimum over bounds.
pub fn c2_asymptotic(leps: f64) -> Result<BoundResult> {
    require_above_one("Leps", leps)?;
    Ok(BoundResult::closed(
        Method::Asymptotic,
        2.0 / PI * (2.0 * leps / (leps - 1.0)).ln(),
    ))
}

/// Averaged shifted Dirichlet sum
/// `phi(t) = (1/T) sum_{l<T} |D_n(pi t/n - l pi/(n+m))|`, `T = 2(n+m)`.
///
/// This equals `(1/L) sum_l |g(t - l/L)|` for the trapezoid with
/// `Leps = (n+1)/n` at `B = pi`, and is periodic in `t` with period `1/L`.
pub fn dirichlet_objective(rate: &RationalRate, t: f64) -> f64 {
    let terms = rate.term_count();
    let (n, tf) = (rate.n as f64, terms as f64);
    let base = t / n;
    let sum: f64 = (0..terms)
        .map(|l| dirichlet_pi(rate.n, base - 2.0 * l as f64 / tf).abs())
        .sum();
    sum / tf
}

/// Lipschitz and curvature bounds for an average of `|D_k(c t + shift)|`.
fn dirichlet_regularity(k: u32, chain: f64) -> Regularity {
    let kf = k as f64;
    Regularity::Fixed {
        lipschitz: chain * kf * (kf + 1.0),
        curvature: chain * chain * kf * (kf + 1.0) * (2.0 * kf + 1.0) / 3.0,
    }
}

/// Maximum of [`dirichlet_objective`] over `|t| <= half_width`.
pub fn c2_new_bound_on_window(rate: &RationalRate, half_width: f64, search: &MaxSearch) -> BoundResult {
    let reg = dirichlet_regularity(rate.n, PI / rate.n as f64);
    let best = maximize(|t| dirichlet_objective(rate, t), 0.0, half_width, reg, search);
    BoundResult {
        method: Method::C2New,
        value: best.value,
        t_star: Some(best.arg),
        cert_error: best.cert_error,
    }
}

/// Dirichlet-sum bound on `C2((n+m)/n, (n+1)/n)`.
///
/// The objective is even and periodic with period `1/L = n/(n+m)`, and the
/// window `|t| <= max(n/(2(n+1)), n/(2(n+m)))` covers a full period for
/// every admissible `m`. For `m = 1/2` the narrower window
/// `|t| <= n/(2(n+1))` alone misses the peak, see
/// [`c2_new_bound_on_window`].
pub fn c2_new_bound(rate: &RationalRate, search: &MaxSearch) -> BoundResult {
    let n = rate.n as f64;
    let half = (n / (2.0 * (n + 1.0))).max(n / rate.term_count() as f64);
    c2_new_bound_on_window(rate, half, search)
}

/// Objective of the even-`n` corollary:
/// `(1/(n+1)) sum_{l=0}^{n} |D_{n/2}(2 pi t/n - 2 l pi/(n+1))|`.
pub fn corollary_objective(n: u32, t: f64) -> f64 {
    let k = n / 2;
    let (nf, terms) = (n as f64, (n + 1) as f64);
    let sum: f64 = (0..=n)
        .map(|l| dirichlet_pi(k, 2.0 * t / nf - 2.0 * l as f64 / terms).abs())
        .sum();
    sum / terms
}

/// Upper bound on `C1((n+1)/n)` for even `n`, maximized over
/// `|t| <= n/(2(n+1))`, which is exactly one period of the objective.
pub fn c1_corollary_bound(n: u32, search: &MaxSearch) -> Result<BoundResult> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::param(format!("corollary bound needs an even n >= 2, got {n}")));
    }
    let nf = n as f64;
    let reg = dirichlet_regularity(n / 2, 2.0 * PI / nf);
    let best = maximize(|t| corollary_objective(n, t), 0.0, nf / (2.0 * (nf + 1.0)), reg, search);
    Ok(BoundResult {
        method: Method::C1Corollary,
        value: best.value,
        t_star: Some(best.arg),
        cert_error: best.cert_error,
    })
}

/// Which branch of the Nyquist overshoot bound was smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NyquistBranch {
    Sqrt,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NyquistBound {
    pub result: BoundResult,
    pub branch: NyquistBranch,
    pub sqrt_branch: f64,
    pub dirichlet_branch: BoundResult,
}

/// Overshoot of a trapezoidal Nyquist filter with `Leps = (n+1)/n` sampled
/// at `L = (n+m)/n`: `min(sqrt(2n+1), c2_new)`.
pub fn nyquist_overshoot_bound(rate: &RationalRate, search: &MaxSearch) -> NyquistBound {
    let sqrt_branch = (2.0 * rate.n as f64 + 1.0).sqrt();
    let dirichlet = c2_new_bound(rate, search);
    let (branch, result) = if dirichlet.value <= sqrt_branch {
        (
            NyquistBranch::Dirichlet,
            BoundResult {
                method: Method::Nyquist,
                ..dirichlet
            },
        )
    } else {
        (NyquistBranch::Sqrt, BoundResult::closed(Method::Nyquist, sqrt_branch))
    };
    NyquistBound {
        result,
        branch,
        sqrt_branch,
        dirichlet_branch: dirichlet,
    }
}

/// Contribution of one trapezoidal layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerBound {
    pub weight: f64,
    pub expansion: f64,
    /// Rate used when the layer fits `Leps = (n+1)/n`, `L = (n+m)/n`.
    pub rate: Option<RationalRate>,
    pub bound: BoundResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayeredBound {
    pub result: BoundResult,
    pub layers: Vec<LayerBound>,
}

/// Weighted sum of per-layer trapezoid overshoot bounds at oversampling
/// `L`. Each layer uses the Nyquist bound when its expansion and `L` form a
/// [`RationalRate`], and the closed-form `sqrt((Leps+1)/(Leps-1))`
/// otherwise. With unit in-band gain the weights sum to one.
pub fn layered_overshoot_bound(filter: &LayeredFilter, l: f64, search: &MaxSearch) -> Result<LayeredBound> {
    filter.validate()?;
    require_above_one("L", l)?;
    let mut layers = Vec::with_capacity(filter.extension_factors.len());
    let (mut value, mut cert) = (0.0, 0.0);
    for (weight, leps) in filter.layers() {
        let rate = RationalRate::from_expansion(leps, l);
        let bound = match &rate {
            Some(r) => nyquist_overshoot_bound(r, search).result,
            None => c2_sota_bound(leps)?,
        };
        value += weight * bound.value;
        cert += weight * bound.cert_error;
        layers.push(LayerBound {
            weight,
            expansion: leps,
            rate,
            bound,
        });
    }
    Ok(LayeredBound {
        result: BoundResult {
            method: Method::Layered,
            value,
            t_star: None,
            cert_error: cert,
        },
        layers,
    })
}

/// Smallest applicable upper bound on `C1(L)`.
///
/// Always considers the cosine and square-root laws. When `L` has a
/// rational representation the Dirichlet-sum bound joins (its implied
/// expansion `(n+1)/n` always satisfies `L >= (Leps+1)/2`), and for
/// `L = (n+1)/n` with even `n` so does the corollary bound. Candidates are
/// ranked by their certified upper end.
pub fn best_upper_bound(l: f64, search: &MaxSearch) -> Result<BoundResult> {
    let mut candidates = vec![c1_cos_bound(l)?, c1_sqrt_bound(l)?];
    let inv = 1.0 / (l - 1.0);
    let n = inv.round();
    if n >= 2.0 && n <= MAX_RATE_N as f64 && (inv - n).abs() <= 1e-9 * inv && (n as u32) % 2 == 0 {
        candidates.push(c1_corollary_bound(n as u32, search)?);
    }
    if let Some(rate) = RationalRate::from_oversampling(l, MAX_RATE_N) {
        if rate.expansion() <= 2.0 * l - 1.0 + 1e-12 {
            candidates.push(c2_new_bound(&rate, search));
        }
    }
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if c.upper() < best.upper() {
            best = *c;
        }
    }
    Ok(best)
}
