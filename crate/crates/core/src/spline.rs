//! Natural cubic spline through strictly increasing knots.

pub(crate) struct NaturalSpline<'a> {
    knots: &'a [f64],
    values: &'a [f64],
    second: Vec<f64>,
}

impl<'a> NaturalSpline<'a> {
    /// `knots` must be strictly increasing and at least two long.
    pub(crate) fn new(knots: &'a [f64], values: &'a [f64]) -> Self {
        let n = knots.len();
        debug_assert!(n >= 2 && values.len() == n);
        let mut second = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior rows; M_0 = M_{n-1} = 0.
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for r in 0..m {
                let i = r + 1;
                let h0 = knots[i] - knots[i - 1];
                let h1 = knots[i + 1] - knots[i];
                diag[r] = 2.0 * (h0 + h1);
                upper[r] = h1;
                rhs[r] = 6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
            }
            for r in 1..m {
                let lower = knots[r + 1] - knots[r];
                let w = lower / diag[r - 1];
                diag[r] -= w * upper[r - 1];
                rhs[r] -= w * rhs[r - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for r in (0..m - 1).rev() {
                second[r + 1] = (rhs[r] - upper[r] * second[r + 2]) / diag[r];
            }
        }
        Self { knots, values, second }
    }

    /// Evaluates at the integer positions `0..len`, which must lie inside the knot span.
    pub(crate) fn sample_grid(&self, len: usize, out: &mut [f64]) {
        let mut seg = 0;
        let last = self.knots.len() - 2;
        for (t, slot) in out.iter_mut().enumerate().take(len) {
            let t = t as f64;
            while seg < last && t > self.knots[seg + 1] {
                seg += 1;
            }
            *slot = self.eval_segment(seg, t);
        }
    }

    #[cfg(test)]
    pub(crate) fn eval(&self, t: f64) -> f64 {
        let last = self.knots.len() - 2;
        let mut seg = 0;
        while seg < last && t > self.knots[seg + 1] {
            seg += 1;
        }
        self.eval_segment(seg, t)
    }

    fn eval_segment(&self, i: usize, t: f64) -> f64 {
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / 6.0
    }
}
