//! Gauss-Hermite quadrature over products of harmonic-oscillator
//! eigenfunctions `psi_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) e^{-x^2/2}`.

use std::f64::consts::PI;

/// Values `psi_0(x) ..= psi_{n_max}(x)` by the stable three-term recurrence.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let psi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * psi0);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Nodes and weights such that `sum_i w_i psi_m(x_i) psi_n(x_i) g(x_i)` equals
/// `int psi_m psi_n g dx` whenever `g` is a polynomial of degree at most
/// `2 n_nodes - 1 - (m + n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HermiteRule {
    /// Zeros of `psi_n` bracketed by sign changes on a grid finer than the
    /// smallest zero spacing, then polished by safeguarded Newton steps.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let nf = n as f64;
        let psi_at = |x: f64| {
            let psi = hermite_functions(n, x);
            (psi[n], psi[n - 1])
        };
        // positive zeros lie below sqrt(2n + 1); spacing there exceeds pi / sqrt(2n + 1)
        let top = (2.0 * nf + 1.0).sqrt() + 1.0;
        let h = PI / (2.0 * nf + 1.0).sqrt() / 8.0;
        let cells = (top / h).ceil() as usize;
        let mut positive = Vec::with_capacity(n / 2);
        // the zero at the origin of odd n is exact; start just past it
        let mut lo = if n % 2 == 1 { 0.5 * h } else { 0.0 };
        let mut f_lo = psi_at(lo).0;
        for i in 1..=cells {
            let hi = lo.max(h * i as f64);
            if hi <= lo {
                continue;
            }
            let f_hi = psi_at(hi).0;
            if f_lo.signum() != f_hi.signum() {
                positive.push(polish(&psi_at, lo, hi, f_lo, nf));
            }
            lo = hi;
            f_lo = f_hi;
        }
        debug_assert_eq!(positive.len(), n / 2);

        let mut nodes = Vec::with_capacity(n);
        nodes.extend(positive.iter().rev().map(|&x| -x));
        if n % 2 == 1 {
            nodes.push(0.0);
        }
        nodes.extend(positive.iter().copied());
        let weights = nodes
            .iter()
            .map(|&x| {
                let prev = psi_at(x).1;
                1.0 / (nf * prev * prev)
            })
            .collect();
        HermiteRule { nodes, weights }
    }

    /// `int psi_m(x) psi_n(x) g(x) dx` for every `m, n < dim`, as a dense
    /// row-major table.
    pub fn matrix(&self, dim: usize, g: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; dim * dim];
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let psi = hermite_functions(dim.saturating_sub(1), x);
            let gw = w * g(x);
            if gw == 0.0 {
                continue;
            }
            for m in 0..dim {
                let a = gw * psi[m];
                for n in 0..dim {
                    out[m * dim + n] += a * psi[n];
                }
            }
        }
        out
    }
}

/// Zero of `psi_n` in `[lo, hi]`, where it changes sign. Newton on
/// `psi_n' = sqrt(2n) psi_{n-1} - x psi_n`, falling back to bisection when a
/// step leaves the bracket.
fn polish(psi_at: &impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64, f_lo: f64, nf: f64) -> f64 {
    let s_lo = f_lo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let (p, prev) = psi_at(x);
        if p == 0.0 {
            return x;
        }
        if p.signum() == s_lo {
            lo = x;
        } else {
            hi = x;
        }
        let dx = p / ((2.0 * nf).sqrt() * prev - x * p);
        if dx.abs() <= 1e-15 * x.abs().max(1.0) {
            return x - dx;
        }
        x = if x - dx > lo && x - dx < hi { x - dx } else { 0.5 * (lo + hi) };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormality() {
        let rule = HermiteRule::new(60);
        let s = rule.matrix(50, |_| 1.0);
        for m in 0..50 {
            for n in 0..50 {
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((s[m * 50 + n] - expected).abs() < 1e-12, "({m},{n}) = {}", s[m * 50 + n]);
            }
        }
    }

    #[test]
    fn small_rules_match_tables() {
        let r = HermiteRule::new(2);
        assert!((r.nodes[1] - 0.5f64.sqrt()).abs() < 1e-14);
        assert_eq!(r.nodes[0], -r.nodes[1]);
        // weights include e^{x^2}: w = sqrt(pi)/2 * e^{1/2}
        assert!((r.weights[0] - PI.sqrt() / 2.0 * 0.5f64.exp()).abs() < 1e-13);
        let r = HermiteRule::new(3);
        assert_eq!(r.nodes[1], 0.0);
        assert!((r.nodes[2] - 1.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn large_rules_stay_orthonormal() {
        let rule = HermiteRule::new(242);
        assert!(rule.nodes.windows(2).all(|w| w[1] > w[0]));
        let s = rule.matrix(240, |_| 1.0);
        for m in 0..240 {
            for n in 0..240 {
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((s[m * 240 + n] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn second_moment() {
        // <n|x^2|n> = n + 1/2
        let rule = HermiteRule::new(40);
        let x2 = rule.matrix(30, |x| x * x);
        for n in 0..30 {
            assert!((x2[n * 30 + n] - (n as f64 + 0.5)).abs() < 1e-11);
        }
    }
}
