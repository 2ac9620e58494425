//! Small numerical helpers shared across the crate.

use std::sync::OnceLock;

use nalgebra::DMatrix;

const LN_FACT_LEN: usize = 4097;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; LN_FACT_LEN];
        for n in 2..LN_FACT_LEN {
            t[n] = t[n - 1] + (n as f64).ln();
        }
        t
    })
}

pub fn ln_factorial(n: usize) -> f64 {
    let table = ln_factorial_table();
    assert!(n < table.len(), "factorial table exceeded: {n}");
    table[n]
}

/// Log-space binomial coefficient, finite for all n up to the table limit.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    assert!(k <= n, "ln_choose: k={k} > n={n}");
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub fn choose(n: usize, k: usize) -> f64 {
    ln_choose(n, k).exp()
}

/// Compensated (Kahan) summation; the inclusion-exclusion expansions alternate
/// in sign and benefit from it.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Trapezoidal rule on a uniform grid.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mut acc = KahanSum::new();
    for w in values.windows(2) {
        acc.add(0.5 * (w[0] + w[1]));
    }
    acc.value() * step
}

/// Gauss-Hermite nodes and weights for weight exp(-x^2), via the Golub-Welsch
/// eigenvalue construction on the Jacobi matrix.
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = off;
        jacobi[(k, k - 1)] = off;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (node, std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Iterate over all index tuples with per-position bounds `0..=limits[i]`.
pub fn mixed_radix_tuples(limits: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; limits.len()];
    loop {
        out.push(idx.clone());
        let mut pos = limits.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < limits[pos] {
                idx[pos] += 1;
                for v in idx.iter_mut().skip(pos + 1) {
                    *v = 0;
                }
                break;
            }
        }
    }
}
