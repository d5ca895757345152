//! Not-a-knot cubic spline (C² interpolant) used by tabulated motions.

use crate::tridiag::thomas_solve;

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Builds the spline through `(x[i], y[i])`. Needs at least four strictly
    /// increasing knots.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, String> {
        let n = x.len();
        if n != y.len() {
            return Err(format!("knot count {} does not match value count {}", n, y.len()));
        }
        if n < 4 {
            return Err("a not-a-knot spline needs at least 4 samples".into());
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err("sample times must be strictly increasing".into());
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err("samples must be finite".into());
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        // Unknowns M_1..M_{n-2}; M_0 and M_{n-1} follow from continuity of S'''.
        let k = n - 2;
        let mut sub = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for j in 0..k {
            let i = j + 1;
            sub[j] = h[i - 1];
            diag[j] = 2.0 * (h[i - 1] + h[i]);
            sup[j] = h[i];
            rhs[j] = 6.0 * (slope[i] - slope[i - 1]);
        }
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 * (h0 + h1) / h1;
        if k > 1 {
            sup[0] -= h0 * h0 / h1;
        }
        let (ha, hb) = (h[n - 3], h[n - 2]);
        diag[k - 1] += hb * (ha + hb) / ha;
        if k > 1 {
            sub[k - 1] -= hb * hb / ha;
        }
        let mut scratch = Vec::new();
        thomas_solve(&sub, &diag, &sup, &mut rhs, &mut scratch);
        let mut m = vec![0.0; n];
        m[1..n - 1].copy_from_slice(&rhs);
        m[0] = ((h0 + h1) * m[1] - h0 * m[2]) / h1;
        m[n - 1] = ((ha + hb) * m[n - 2] - hb * m[n - 3]) / ha;
        Ok(CubicSpline { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.x.len();
        let i = self.x.partition_point(|&v| v <= t);
        i.clamp(1, n - 1) - 1
    }

    /// Value and first three derivatives at `t` (extrapolates the end cubics).
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let s = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let ds = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let dds = a * m0 + b * m1;
        let ddds = (m1 - m0) / h;
        [s, ds, dds, ddds]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let x: Vec<f64> = (0..9).map(|i| 0.3 * i as f64 + 0.05 * (i as f64).sin()).collect();
        let p = |t: f64| 2.0 - t + 0.5 * t * t - 0.25 * t * t * t;
        let y: Vec<f64> = x.iter().map(|&t| p(t)).collect();
        let s = CubicSpline::new(x, y).unwrap();
        for i in 0..50 {
            let t = 0.05 * i as f64;
            let [v, d, dd, ddd] = s.eval(t);
            assert!((v - p(t)).abs() < 1e-12);
            assert!((d - (-1.0 + t - 0.75 * t * t)).abs() < 1e-11);
            assert!((dd - (1.0 - 1.5 * t)).abs() < 1e-10);
            assert!((ddd + 1.5).abs() < 1e-9);
        }
    }

    #[test]
    fn second_order_accurate_second_derivative() {
        let err = |n: usize| {
            let x: Vec<f64> = (0..=n).map(|i| i as f64 * 3.0 / n as f64).collect();
            let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
            let s = CubicSpline::new(x, y).unwrap();
            (0..300)
                .map(|i| {
                    let t = 0.01 * i as f64;
                    (s.eval(t)[2] + t.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let order = (err(40) / err(80)).log2();
        assert!(order > 1.8, "order {order}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CubicSpline::new(vec![0.0, 1.0, 2.0], vec![0.0; 3]).is_err());
        assert!(CubicSpline::new(vec![0.0, 1.0, 1.0, 2.0], vec![0.0; 4]).is_err());
        assert!(CubicSpline::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0; 5]).is_err());
    }
}
