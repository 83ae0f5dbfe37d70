//! Lower-bound oracles for the peak value problem on trigonometric
//! polynomials sampled at `N1` equispaced points.

mod simplex;

pub use simplex::{maximize_free, maximize_nonneg, LpSolution};

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::sin_cos_turns;
use crate::search::{maximize, MaxSearch, Regularity};

/// `f(theta) = a_0/2 + sum_{k=1}^{N} a_k cos(k theta) + b_k sin(k theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    #[serde(rename = "N")]
    degree: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TrigPoly {
    /// `a` holds `a_0..a_N`, `b` holds `b_1..b_N`.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() + 1 {
            return Err(Error::param(format!(
                "need N+1 cosine and N sine coefficients, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        if !a.iter().chain(&b).all(|v| v.is_finite()) {
            return Err(Error::param("coefficients must be finite"));
        }
        Ok(TrigPoly { degree: b.len(), a, b })
    }

    pub fn constant(value: f64) -> Self {
        TrigPoly {
            degree: 0,
            a: vec![2.0 * value],
            b: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut s = 0.5 * self.a[0];
        for k in 1..=self.degree {
            let (sn, cs) = (k as f64 * theta).sin_cos();
            s += self.a[k] * cs + self.b[k - 1] * sn;
        }
        s
    }

    /// Value at `2 pi j / n` with the angle reduced exactly.
    fn eval_lattice(&self, j: usize, n: usize) -> f64 {
        let mut s = 0.5 * self.a[0];
        for k in 1..=self.degree {
            let (sn, cs) = sin_cos_turns((k * j) as u64, n as u64);
            s += self.a[k] * cs + self.b[k - 1] * sn;
        }
        s
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        TrigPoly {
            degree: self.degree,
            a: self.a.iter().map(|v| alpha * v).collect(),
            b: self.b.iter().map(|v| alpha * v).collect(),
        }
    }

    fn coefficient_sum(&self) -> f64 {
        0.5 * self.a[0].abs() + self.a[1..].iter().chain(&self.b).map(|v| v.abs()).sum::<f64>()
    }
}

/// The true sup-norm lies in `[value, value + cert_error]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNorm {
    pub value: f64,
    pub cert_error: f64,
    pub arg: f64,
}

/// `sup |f|` over a period, certified through Bernstein's inequality.
/// `step` is the initial grid spacing in radians.
pub fn sup_norm_certified(f: &TrigPoly, step: f64) -> Result<SupNorm> {
    if !(step > 0.0) {
        return Err(Error::param("grid step must be positive"));
    }
    if f.degree == 0 {
        return Ok(SupNorm {
            value: (0.5 * f.a[0]).abs(),
            cert_error: 0.0,
            arg: 0.0,
        });
    }
    let scale = f.coefficient_sum();
    let search = MaxSearch {
        step,
        tol: 1e-14 * scale,
        max_evals: 2_000_000,
    };
    let m = maximize(
        |x| f.eval(x).abs(),
        0.0,
        TAU,
        Regularity::Bandlimited { omega: f.degree as f64 },
        &search,
    );
    Ok(SupNorm {
        value: m.value,
        cert_error: m.cert_error,
        arg: m.arg,
    })
}

/// `max_l |f(2 pi l / N1)|`.
pub fn sampled_sup(f: &TrigPoly, n1: usize) -> Result<f64> {
    if n1 < 1 {
        return Err(Error::param("need at least one sample"));
    }
    Ok((0..n1).map(|l| f.eval_lattice(l, n1).abs()).fold(0.0, f64::max))
}

fn default_step(degree: usize) -> f64 {
    TAU / (64.0 * degree.max(1) as f64)
}

/// Result of [`monte_carlo_lower_bound`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarlo {
    /// Largest `sup|f| / max_l |f(2 pi l/N1)|` observed.
    pub ratio: f64,
    /// Certificate of the winning sup-norm, relative to its samples.
    pub cert_error: f64,
    pub witness: TrigPoly,
    pub trials: usize,
    /// Trials discarded because every sample vanished.
    pub discarded: usize,
}

/// Random search for polynomials with a large sup-to-sampled ratio.
///
/// Trial `k` draws i.i.d. standard normal coefficients from a ChaCha8
/// stream keyed by `(seed, k)`, so the outcome does not depend on how the
/// trials are scheduled.
pub fn monte_carlo_lower_bound(n: usize, n1: usize, trials: usize, seed: u64) -> Result<MonteCarlo> {
    if n1 <= 2 * n {
        return Err(Error::param(format!(
            "need N1 > 2N, got N = {n} and N1 = {n1}; the ratio is unbounded otherwise"
        )));
    }
    if trials < 1 {
        return Err(Error::param("need at least one trial"));
    }
    let step = default_step(n);
    let outcomes: Vec<Result<Option<(f64, f64, TrigPoly)>>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
            let a: Vec<f64> = (0..=n).map(|_| draw()).collect();
            let b: Vec<f64> = (0..n).map(|_| draw()).collect();
            let f = TrigPoly::new(a, b)?;
            let sampled = sampled_sup(&f, n1)?;
            if sampled == 0.0 {
                return Ok(None);
            }
            let sup = sup_norm_certified(&f, step)?;
            Ok(Some((sup.value / sampled, sup.cert_error / sampled, f)))
        })
        .collect();

    let mut best: Option<(f64, f64, TrigPoly)> = None;
    let mut discarded = 0;
    for o in outcomes {
        match o? {
            None => discarded += 1,
            Some(c) => {
                if best.as_ref().is_none_or(|b| c.0 > b.0) {
                    best = Some(c);
                }
            }
        }
    }
    let (ratio, cert_error, witness) =
        best.ok_or_else(|| Error::Internal("every Monte-Carlo trial vanished on the lattice".into()))?;
    Ok(MonteCarlo {
        ratio,
        cert_error,
        witness,
        trials,
        discarded,
    })
}

/// Largest `f(t)` over degree-`n` polynomials bounded by one at the `n1`
/// lattice points; exact up to simplex rounding.
pub fn lp_value_at(n: usize, n1: usize, t: f64) -> Result<LpSolution> {
    if n1 < 1 {
        return Err(Error::param("need at least one sample"));
    }
    let row = |theta: f64| -> Vec<f64> {
        let mut r = Vec::with_capacity(2 * n + 1);
        r.push(0.5);
        r.extend((1..=n).map(|k| (k as f64 * theta).cos()));
        r.extend((1..=n).map(|k| (k as f64 * theta).sin()));
        r
    };
    let mut a = Vec::with_capacity(2 * n1);
    for l in 0..n1 {
        let mut r = Vec::with_capacity(2 * n + 1);
        r.push(0.5);
        r.extend((1..=n).map(|k| sin_cos_turns((k * l) as u64, n1 as u64).1));
        r.extend((1..=n).map(|k| sin_cos_turns((k * l) as u64, n1 as u64).0));
        a.push(r.iter().map(|v| -v).collect());
        a.push(r);
    }
    let b = vec![1.0; 2 * n1];
    maximize_free(&row(t), &a, &b)
}

/// Result of [`lp_c1_trig`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpBound {
    /// Certified lower bound on the restricted constant.
    pub value: f64,
    /// `value + cert_error` bounds the maximum over all angles.
    pub cert_error: f64,
    pub t_star: f64,
    /// Optimal polynomial at `t_star`, normalized to unit sampled sup.
    pub witness: TrigPoly,
}

/// `sup_t max { f(t) : |f(2 pi l/N1)| <= 1 }` over degree-`n` polynomials.
///
/// The constraint set is invariant under lattice rotations and
/// reflection, so `t` ranges over `[0, pi/N1]`, starting from `t_grid`
/// points. The value function is a supremum of degree-`n` polynomials
/// bounded by its own maximum, which certifies the refinement.
pub fn lp_c1_trig(n: usize, n1: usize, t_grid: usize) -> Result<LpBound> {
    if n1 < 1 || t_grid < 2 {
        return Err(Error::param("need N1 >= 1 and at least two grid points"));
    }
    let hi = PI / n1 as f64;
    // solve once up front so unboundedness surfaces as an error
    lp_value_at(n, n1, 0.5 * hi)?;
    let failure = std::sync::Mutex::new(None);
    let objective = |t: f64| match lp_value_at(n, n1, t) {
        Ok(s) => s.value,
        Err(e) => {
            failure.lock().unwrap().get_or_insert(e);
            f64::NAN
        }
    };
    let search = MaxSearch {
        step: hi / (t_grid - 1) as f64,
        tol: 1e-12,
        max_evals: 200_000,
    };
    let best = if n == 0 {
        // constants: the value is one everywhere
        let v = objective(0.0);
        crate::search::Maximum {
            value: v,
            arg: 0.0,
            cert_error: 0.0,
            evaluations: 1,
        }
    } else {
        maximize(objective, 0.0, hi, Regularity::Bandlimited { omega: n as f64 }, &search)
    };
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let sol = lp_value_at(n, n1, best.arg)?;
    let raw = TrigPoly::new(sol.x[..=n].to_vec(), sol.x[n + 1..].to_vec())?;
    let sampled = sampled_sup(&raw, n1)?;
    let witness = if sampled > 0.0 { raw.scaled(1.0 / sampled) } else { raw };
    Ok(LpBound {
        value: best.value,
        cert_error: best.cert_error,
        t_star: best.arg,
        witness,
    })
}

/// Result of [`extremal_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalReport {
    pub sampled: f64,
    pub sup: f64,
    pub ratio: f64,
    pub cert_error: f64,
}

/// Sup-to-sampled ratio of `cos(pi(t - 1/(2L))) / cos(pi/(2L))` on the
/// rate-`L` lattice `t_l = l/L`. In the angle `theta = pi t` it is the
/// degree-one polynomial `cos(theta) + tan(pi/(2L)) sin(theta)` sampled
/// at `N1 = 2L` points.
pub fn extremal_check(l: u32) -> Result<ExtremalReport> {
    if l < 2 {
        return Err(Error::param(format!("extremal check needs an integer L >= 2, got {l}")));
    }
    let c = PI / (2.0 * l as f64);
    let f = TrigPoly::new(vec![0.0, 1.0], vec![c.tan()])?;
    let sampled = sampled_sup(&f, 2 * l as usize)?;
    let sup = sup_norm_certified(&f, default_step(1))?;
    Ok(ExtremalReport {
        sampled,
        sup: sup.value,
        ratio: sup.value / sampled,
        cert_error: sup.cert_error / sampled,
    })
}
