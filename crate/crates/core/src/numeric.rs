//! Small numerical helpers shared by the kernel, bound and norm modules.

use std::f64::consts::PI;

/// Trigamma function `psi_1(x) = sum_{k>=0} 1/(x+k)^2` for `x > 0`.
///
/// Shifts the argument above 20 with the recurrence, then applies the
/// asymptotic Bernoulli expansion; relative error is below `1e-15`.
pub fn trigamma(x: f64) -> f64 {
    assert!(x > 0.0, "trigamma requires a positive argument, got {x}");
    let mut x = x;
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/x + 1/(2x^2) + B2/x^3 + B4/x^5 + ...
    let series = inv
        * (1.0
            + inv
                * (0.5
                    + inv
                        * (1.0 / 6.0
                            + inv2
                                * (-1.0 / 30.0
                                    + inv2 * (1.0 / 42.0 + inv2 * (-1.0 / 30.0 + inv2 * (5.0 / 66.0)))))));
    acc + series
}

/// `sum_{k >= 1} 1/(k - u)^2` for `u < 1`, i.e. `psi_1(1 - u)`.
pub fn inverse_square_tail(u: f64) -> f64 {
    trigamma(1.0 - u)
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

/// Best rational approximation `p/q` of `x` with `q <= max_den`, accepted
/// only when `|x - p/q| <= tol * max(1, |x|)`.
pub fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let scale = x.abs().max(1.0);
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > max_den as i128 {
            break;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol * scale {
            return Some((p2 as i64, q2 as u64));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    None
}

/// Largest angular frequency of which every entry of `freqs` is an
/// integer multiple, if the set is commensurate with denominators bounded
/// by `max_den`. Zero frequencies are ignored; `None` when all are zero.
///
/// Returns the fundamental together with the integer multiples.
pub fn commensurate_fundamental(freqs: &[f64], max_den: u64) -> Option<(f64, Vec<u64>)> {
    let reference = freqs.iter().copied().filter(|w| *w > 0.0).fold(f64::NAN, f64::min);
    if reference.is_nan() {
        return None;
    }
    let mut ratios = Vec::with_capacity(freqs.len());
    let mut common = 1u64;
    for &w in freqs {
        if w == 0.0 {
            ratios.push((0i64, 1u64));
            continue;
        }
        let (p, q) = rational_approx(w / reference, max_den, 1e-12)?;
        common = lcm(common, q)?;
        if common > max_den {
            return None;
        }
        ratios.push((p, q));
    }
    let multiples: Vec<u64> = ratios
        .iter()
        .map(|&(p, q)| p.unsigned_abs() * (common / q))
        .collect();
    let g = multiples.iter().copied().filter(|&k| k > 0).fold(0, gcd);
    let fundamental = reference * g as f64 / common as f64;
    Some((fundamental, multiples.iter().map(|k| k / g).collect()))
}

/// `(sin, cos)` of `2 pi p / q`, reduced to the nearest quarter turn in
/// integer arithmetic so that quarter-turn angles give exact zeros.
pub fn sin_cos_turns(p: u64, q: u64) -> (f64, f64) {
    assert!(q > 0);
    let p = p % q;
    // 4p = k q + r with |r| <= q/2
    let k = (4 * p + q / 2) / q;
    let r = 4 * p as i128 - (k * q) as i128;
    let (s, c) = (std::f64::consts::FRAC_PI_2 * r as f64 / q as f64).sin_cos();
    match k % 4 {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// Real Dirichlet kernel `D_n(theta) = sum_{k=-n}^{n} e^{jk theta}`,
/// evaluated from `x = theta / pi` so that exact rational arguments stay
/// exact through the reduction modulo `2 pi`.
pub fn dirichlet_pi(n: u32, x: f64) -> f64 {
    let x = x - 2.0 * (x / 2.0).round();
    let nf = n as f64;
    if x.abs() < 1e-7 {
        let theta = PI * x;
        let second = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 6.0;
        return (2.0 * nf + 1.0) - theta * theta * second;
    }
    (PI * (nf + 0.5) * x).sin() / (PI * 0.5 * x).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trigamma_known_values() {
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-13);
        // psi_1(x) - psi_1(x+1) = 1/x^2
        for &x in &[0.1, 0.7, 3.3, 25.0] {
            let d = trigamma(x) - trigamma(x + 1.0) - 1.0 / (x * x);
            assert!(d.abs() < 1e-12 * trigamma(x), "x={x} d={d}");
        }
    }

    #[test]
    fn trigamma_matches_brute_force() {
        let x = 2.75;
        let brute: f64 = (0..2_000_000).map(|k| 1.0 / (x + k as f64).powi(2)).sum::<f64>()
            + 1.0 / (x + 2_000_000.0);
        assert!((trigamma(x) - brute).abs() < 1e-12);
    }

    #[test]
    fn rational_detection() {
        assert_eq!(rational_approx(0.75, 100, 1e-12), Some((3, 4)));
        assert_eq!(rational_approx(4.0 / 3.0, 100, 1e-12), Some((4, 3)));
        assert_eq!(rational_approx(PI, 1000, 1e-12), None);
        assert_eq!(rational_approx(-2.5, 10, 1e-12), Some((-5, 2)));
    }

    #[test]
    fn fundamental_of_trapezoid_edges() {
        let (f, k) = commensurate_fundamental(&[PI, 1.5 * PI], 1000).unwrap();
        assert!((f - 0.5 * PI).abs() < 1e-15);
        assert_eq!(k, vec![2, 3]);
        let (f, k) = commensurate_fundamental(&[0.0, 2.0], 1000).unwrap();
        assert_eq!(f, 2.0);
        assert_eq!(k, vec![0, 1]);
        assert!(commensurate_fundamental(&[1.0, 2f64.sqrt()], 1000).is_none());
    }

    #[test]
    fn lattice_angles() {
        assert_eq!(sin_cos_turns(1, 2), (0.0, -1.0));
        assert_eq!(sin_cos_turns(3, 4), (-1.0, 0.0));
        for q in 1..40u64 {
            for p in 0..2 * q {
                let (s, c) = sin_cos_turns(p, q);
                let (s0, c0) = (TAU_F * p as f64 / q as f64).sin_cos();
                assert!((s - s0).abs() < 1e-14 && (c - c0).abs() < 1e-14, "{p}/{q}");
            }
        }
    }

    const TAU_F: f64 = 2.0 * PI;

    #[test]
    fn dirichlet_closed_form_matches_sum() {
        for n in 0..6u32 {
            for i in 0..200 {
                let x = -3.0 + 0.0301 * i as f64;
                let direct: f64 = 1.0 + 2.0 * (1..=n).map(|k| (k as f64 * PI * x).cos()).sum::<f64>();
                assert!((dirichlet_pi(n, x) - direct).abs() < 1e-11, "n={n} x={x}");
            }
            assert_eq!(dirichlet_pi(n, 0.0), 2.0 * n as f64 + 1.0);
        }
    }
}
