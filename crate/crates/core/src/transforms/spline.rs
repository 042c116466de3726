use std::f64::consts::PI;

/// Periodic cubic spline through equally spaced samples of an angular
/// function: `values[k]` sits at `start + k·2π/len`.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    start: f64,
    step: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl PeriodicSpline {
    pub fn new(values: Vec<f64>, start: f64) -> Self {
        let n = values.len();
        assert!(n > 0, "periodic spline needs at least one sample");
        let step = 2.0 * PI / n as f64;
        let second = second_derivatives(&values, step);
        Self {
            start,
            step,
            values,
            second,
        }
    }

    pub fn eval(&self, angle: f64) -> f64 {
        let n = self.values.len();
        if n == 1 {
            return self.values[0];
        }
        let x = ((angle - self.start) / self.step).rem_euclid(n as f64);
        let mut i = x.floor() as usize;
        let mut t = x - i as f64;
        if i >= n {
            i = n - 1;
            t = 1.0;
        }
        let j = (i + 1) % n;
        let (a, b) = (1.0 - t, t);
        let h2 = self.step * self.step;
        a * self.values[i]
            + b * self.values[j]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[j]) * h2 / 6.0
    }
}

/// Solves the cyclic system `M[k-1] + 4 M[k] + M[k+1] = 6 (y[k-1] − 2 y[k] + y[k+1]) / h²`.
fn second_derivatives(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let rhs: Vec<f64> = (0..n)
        .map(|k| {
            let prev = y[(k + n - 1) % n];
            let next = y[(k + 1) % n];
            6.0 * (prev - 2.0 * y[k] + next) / (h * h)
        })
        .collect();
    match n {
        1 => vec![0.0],
        2 => {
            // both neighbours of each node are the other node
            let m = [rhs[0], rhs[1]];
            // 4 m0 + 2 m1 = r0, 2 m0 + 4 m1 = r1
            let det = 12.0;
            vec![(4.0 * m[0] - 2.0 * m[1]) / det, (4.0 * m[1] - 2.0 * m[0]) / det]
        }
        _ => cyclic_tridiagonal(1.0, 4.0, 1.0, &rhs),
    }
}

/// Constant-coefficient cyclic tridiagonal solve (Sherman-Morrison).
fn cyclic_tridiagonal(a: f64, b: f64, c: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let gamma = -b;
    let mut diag = vec![b; n];
    diag[0] = b - gamma;
    diag[n - 1] = b - a * c / gamma;
    let x = thomas(a, &diag, c, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = c;
    let z = thomas(a, &diag, c, &u);
    let fact = (x[0] + a * x[n - 1] / gamma) / (1.0 + z[0] + a * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(a: f64, diag: &[f64], c: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c / diag[0];
    dp[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - a * cp[i - 1];
        cp[i] = c / m;
        dp[i] = (rhs[i] - a * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_samples_exactly() {
        let vals: Vec<f64> = (0..9).map(|k| (k as f64 * 0.7).sin() + 0.1 * k as f64).collect();
        let s = PeriodicSpline::new(vals.clone(), 0.3);
        for (k, v) in vals.iter().enumerate() {
            let x = 0.3 + k as f64 * 2.0 * PI / 9.0;
            assert!((s.eval(x) - v).abs() < 1e-12);
            assert!((s.eval(x + 2.0 * PI) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn reproduces_low_harmonics_accurately() {
        let n = 36;
        let vals: Vec<f64> = (0..n).map(|k| (2.0 * PI * k as f64 / n as f64 * 2.0).cos()).collect();
        let s = PeriodicSpline::new(vals, 0.0);
        for i in 0..200 {
            let x = i as f64 * 0.0371;
            assert!((s.eval(x) - (2.0 * x).cos()).abs() < 1e-3);
        }
    }

    #[test]
    fn small_sample_counts() {
        assert_eq!(PeriodicSpline::new(vec![2.0], 0.0).eval(1.3), 2.0);
        let s = PeriodicSpline::new(vec![1.0, -1.0], 0.0);
        assert!((s.eval(0.0) - 1.0).abs() < 1e-14);
        assert!((s.eval(PI) + 1.0).abs() < 1e-14);
        let c = PeriodicSpline::new(vec![3.0; 5], 0.0);
        assert!((c.eval(0.77) - 3.0).abs() < 1e-14);
    }
}
