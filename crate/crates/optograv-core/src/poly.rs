//! Real roots of low-degree real polynomials, coefficients in increasing
//! degree.
//!
//! Roots are isolated between the real roots of the derivative, found
//! recursively, so every monotone piece holds at most one root and plain
//! bisection finishes the job.

use alloc::vec::Vec;


pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

fn trimmed(coeffs: &[f64]) -> &[f64] {
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1] == 0.0 {
        n -= 1;
    }
    &coeffs[..n]
}

/// Cauchy bound on the magnitude of every root.
pub fn root_bound(coeffs: &[f64]) -> f64 {
    let c = trimmed(coeffs);
    match c.split_last() {
        None => 0.0,
        Some((lead, rest)) => 1.0 + rest.iter().fold(0.0, |m: f64, &x| m.max((x / lead).abs())),
    }
}

/// All real roots in `[lo, hi]`, ascending.
pub fn real_roots_in(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trimmed(coeffs);
    let mut out = Vec::new();
    match c.len() {
        0 | 1 => return out,
        2 => {
            let r = -c[0] / c[1];
            if r >= lo && r <= hi {
                out.push(r);
            }
            return out;
        }
        _ => {}
    }
    let mut knots = Vec::with_capacity(c.len() + 1);
    knots.push(lo);
    knots.extend(real_roots_in(&derivative(c), lo, hi));
    knots.push(hi);
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let fa = eval(c, a);
        let fb = eval(c, b);
        if fa == 0.0 {
            push_unique(&mut out, a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            push_unique(&mut out, bisect(c, a, b, fa));
        }
    }
    if eval(c, hi) == 0.0 {
        push_unique(&mut out, hi);
    }
    out
}

fn push_unique(out: &mut Vec<f64>, x: f64) {
    if out.last().is_none_or(|&l| l != x) {
        out.push(x);
    }
}

fn bisect(c: &[f64], mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = eval(c, m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn cubic_with_three_roots() {
        // (x-1)(x-2)(x-5)
        let c = [-10.0, 17.0, -8.0, 1.0];
        let r = real_roots_in(&c, -100.0, 100.0);
        assert_eq!(r.len(), 3);
        for (g, w) in r.iter().zip([1.0, 2.0, 5.0]) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn quintic_roots_spanning_scales() {
        // (x - 1e-3)(x - 1)(x - 1e3)(x^2 + 1)
        let mut c = vec![1.0];
        for r in [1e-3, 1.0, 1e3] {
            c = mul(&c, &[-r, 1.0]);
        }
        c = mul(&c, &[1.0, 0.0, 1.0]);
        let r = real_roots_in(&c, 0.0, root_bound(&c));
        assert_eq!(r.len(), 3);
        for (g, w) in r.iter().zip([1e-3, 1.0, 1e3]) {
            assert!(((g - w) / w).abs() < 1e-10, "{g} vs {w}");
        }
    }

    fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
}
