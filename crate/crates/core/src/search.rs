//! Certified global maximization of a scalar function on an interval.
//!
//! A uniform grid is refined by interval bisection. Each cell `[a, b]`
//! carries an upper bound on the function from two sources: a Lipschitz
//! bound `(f(a)+f(b))/2 + K1 h/2` and a curvature bound
//! `max(f(a), f(b)) + K2 h^2/8`. The curvature bound stays valid for
//! functions that are pointwise maxima of a family of smooth functions
//! whose second derivatives share the bound `K2`, which covers sums of
//! absolute values such as the interpolation-operator objectives here.
//! Cells whose bound cannot beat the incumbent by more than `tol` are
//! dropped. All decisions are made in index order, so the result does not
//! depend on the number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

/// Regularity information used to bound the objective between samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularity {
    /// Explicit global bounds on `|f'|` and `|f''|`.
    Fixed { lipschitz: f64, curvature: f64 },
    /// `f` is a supremum of signals band-limited to angular frequency
    /// `omega` whose sup-norms do not exceed `max f`; Bernstein's
    /// inequality then gives `|f'| <= omega * max f` and
    /// `|f''| <= omega^2 * max f`. Requires `f >= 0`.
    Bandlimited { omega: f64 },
}

/// Grid and stopping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxSearch {
    /// Initial uniform grid spacing.
    pub step: f64,
    /// Target certified gap between the reported value and the true max.
    pub tol: f64,
    /// Hard cap on function evaluations.
    pub max_evals: usize,
}

impl Default for MaxSearch {
    fn default() -> Self {
        MaxSearch {
            step: 1e-3,
            tol: 1e-11,
            max_evals: 4_000_000,
        }
    }
}

/// Outcome of [`maximize`]: the true maximum lies in
/// `[value, value + cert_error]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Maximum {
    pub value: f64,
    pub arg: f64,
    pub cert_error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Cell {
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
}

fn evaluate<F>(f: &F, xs: &[f64]) -> Vec<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    if xs.len() < 64 {
        xs.iter().map(|&x| f(x)).collect()
    } else {
        xs.par_iter().map(|&x| f(x)).collect()
    }
}

/// Certified maximum of `f` on `[lo, hi]`.
pub fn maximize<F>(f: F, lo: f64, hi: f64, regularity: Regularity, search: &MaxSearch) -> Maximum
where
    F: Fn(f64) -> f64 + Sync,
{
    assert!(hi >= lo, "empty search interval [{lo}, {hi}]");
    assert!(search.step > 0.0 && search.tol >= 0.0);
    let width = hi - lo;
    if width == 0.0 {
        let v = f(lo);
        return Maximum {
            value: v,
            arg: lo,
            cert_error: 0.0,
            evaluations: 1,
        };
    }

    let mut cells_n = (width / search.step).ceil().max(1.0) as usize;
    if let Regularity::Bandlimited { omega } = regularity {
        // keep omega * h <= 1 so the a-priori bound on max f is finite
        cells_n = cells_n.max((omega * width).ceil() as usize);
    }
    let xs: Vec<f64> = (0..=cells_n)
        .map(|i| lo + width * (i as f64 / cells_n as f64))
        .collect();
    let ys = evaluate(&f, &xs);
    let mut evaluations = ys.len();

    let (mut best, mut arg) = (ys[0], xs[0]);
    for (&x, &y) in xs.iter().zip(&ys) {
        if y > best {
            best = y;
            arg = x;
        }
    }

    let h0 = width / cells_n as f64;
    let mut upper = match regularity {
        Regularity::Fixed { lipschitz, .. } => best + lipschitz * h0 / 2.0,
        Regularity::Bandlimited { omega } => best.max(0.0) / (1.0 - omega * h0 / 2.0),
    };

    let constants = |upper: f64| match regularity {
        Regularity::Fixed {
            lipschitz,
            curvature,
        } => (lipschitz, curvature),
        Regularity::Bandlimited { omega } => (omega * upper, omega * omega * upper),
    };

    let mut cells: Vec<Cell> = (0..cells_n)
        .map(|i| Cell {
            a: xs[i],
            b: xs[i + 1],
            fa: ys[i],
            fb: ys[i + 1],
        })
        .collect();
    let mut dropped_upper = f64::NEG_INFINITY;

    loop {
        let (k1, k2) = constants(upper);
        let bounds: Vec<f64> = cells
            .iter()
            .map(|c| {
                let h = c.b - c.a;
                let lip = 0.5 * (c.fa + c.fb) + 0.5 * k1 * h;
                let curv = c.fa.max(c.fb) + k2 * h * h / 8.0;
                lip.min(curv)
            })
            .collect();
        let live_upper = bounds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        upper = upper.min(live_upper.max(dropped_upper).max(best));

        let mut keep = Vec::new();
        for (c, &ub) in cells.iter().zip(&bounds) {
            if ub > best + search.tol {
                keep.push(*c);
            } else {
                dropped_upper = dropped_upper.max(ub);
            }
        }
        if keep.is_empty() || evaluations + keep.len() > search.max_evals {
            let cert = live_upper.max(dropped_upper) - best;
            return Maximum {
                value: best,
                arg,
                cert_error: cert.max(0.0),
                evaluations,
            };
        }

        let mids: Vec<f64> = keep.iter().map(|c| 0.5 * (c.a + c.b)).collect();
        let fm = evaluate(&f, &mids);
        evaluations += fm.len();
        let mut next = Vec::with_capacity(2 * keep.len());
        for ((c, &m), &ym) in keep.iter().zip(&mids).zip(&fm) {
            if ym > best {
                best = ym;
                arg = m;
            }
            next.push(Cell {
                a: c.a,
                b: m,
                fa: c.fa,
                fb: ym,
            });
            next.push(Cell {
                a: m,
                b: c.b,
                fa: ym,
                fb: c.fb,
            });
        }
        cells = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_peak_is_certified() {
        let f = |x: f64| 2.0 - (x - 0.3141).powi(2);
        let m = maximize(
            f,
            -1.0,
            1.0,
            Regularity::Fixed {
                lipschitz: 3.0,
                curvature: 2.0,
            },
            &MaxSearch {
                step: 0.1,
                tol: 1e-12,
                max_evals: 100_000,
            },
        );
        assert!(m.value <= 2.0 && 2.0 <= m.value + m.cert_error + 1e-15);
        assert!(m.cert_error <= 1e-12);
        assert!((m.arg - 0.3141).abs() < 1e-5);
    }

    #[test]
    fn kinked_peak_is_certified() {
        let f = |x: f64| 1.0 - (x - 0.123_456_789).abs();
        let m = maximize(
            f,
            0.0,
            1.0,
            Regularity::Fixed {
                lipschitz: 1.0,
                curvature: f64::INFINITY,
            },
            &MaxSearch {
                step: 0.01,
                tol: 1e-12,
                max_evals: 100_000,
            },
        );
        assert!(1.0 - m.value <= m.cert_error + 1e-15);
        assert!(m.cert_error <= 1e-12);
    }

    #[test]
    fn bandlimited_mode_bounds_cosine_sums() {
        let f = |x: f64| (x.cos() + 0.5 * (2.0 * x + 0.3).cos()).abs();
        let m = maximize(
            f,
            0.0,
            std::f64::consts::TAU,
            Regularity::Bandlimited { omega: 2.0 },
            &MaxSearch::default(),
        );
        let brute = (0..2_000_000)
            .map(|i| f(std::f64::consts::TAU * i as f64 / 2e6))
            .fold(0.0, f64::max);
        assert!(m.value >= brute - 1e-11);
        assert!(m.value + m.cert_error >= brute);
        assert!(m.cert_error < 1e-10);
    }

    #[test]
    fn degenerate_interval() {
        let m = maximize(|x| x, 2.0, 2.0, Regularity::Bandlimited { omega: 1.0 }, &MaxSearch::default());
        assert_eq!(m.value, 2.0);
        assert_eq!(m.cert_error, 0.0);
    }
}
