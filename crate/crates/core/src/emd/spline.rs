//! Natural cubic spline interpolation on sorted knots.

/// Interpolates through `(xs[i], ys[i])` with zero second derivative at both
/// ends and evaluates at the integer positions `0..n`.
///
/// `xs` must be strictly increasing with at least two knots. Positions outside
/// the knot span are extrapolated with the boundary cubic.
pub(crate) fn natural_spline_on_grid(xs: &[f64], ys: &[f64], n: usize) -> Vec<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    debug_assert!(xs.len() >= 2);
    let m = second_derivatives(xs, ys);
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    let last = xs.len() - 2;
    for t in 0..n {
        let t = t as f64;
        while seg < last && t > xs[seg + 1] {
            seg += 1;
        }
        out.push(eval_segment(xs, ys, &m, seg, t));
    }
    out
}

fn eval_segment(xs: &[f64], ys: &[f64], m: &[f64], i: usize, t: f64) -> f64 {
    let h = xs[i + 1] - xs[i];
    let a = (xs[i + 1] - t) / h;
    let b = (t - xs[i]) / h;
    a * ys[i] + b * ys[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0
}

/// Second derivatives at the knots; Thomas algorithm on the tridiagonal system.
fn second_derivatives(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let inner = n - 2;
    let mut diag = vec![0.0; inner];
    let mut upper = vec![0.0; inner];
    let mut rhs = vec![0.0; inner];
    for k in 0..inner {
        let i = k + 1;
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        diag[k] = 2.0 * (h0 + h1);
        upper[k] = h1;
        rhs[k] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
    }
    // forward sweep; the sub-diagonal entry of row k is h0 of knot k+1
    for k in 1..inner {
        let lower = xs[k + 1] - xs[k];
        let w = lower / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    m[inner] = rhs[inner - 1] / diag[inner - 1];
    for k in (0..inner - 1).rev() {
        m[k + 1] = (rhs[k] - upper[k] * m[k + 2]) / diag[k];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_knots_are_linear() {
        let v = natural_spline_on_grid(&[0.0, 4.0], &[1.0, 3.0], 5);
        assert_eq!(v, vec![1.0, 1.5, 2.0, 2.5, 3.0]);
    }

    #[test]
    fn passes_through_knots_and_reproduces_lines() {
        let xs = [-3.0, 0.0, 2.0, 5.0, 9.0, 12.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let v = natural_spline_on_grid(&xs, &ys, 12);
        for (t, y) in v.iter().enumerate() {
            assert!((y - (2.0 * t as f64 - 1.0)).abs() < 1e-12);
        }
        let ys = [1.0, -2.0, 0.5, 3.0, -1.0, 0.0];
        let v = natural_spline_on_grid(&xs, &ys, 13);
        for (x, y) in xs.iter().zip(ys) {
            if *x >= 0.0 {
                assert!((v[*x as usize] - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn natural_end_conditions() {
        let xs = [0.0, 1.0, 3.0, 4.0, 7.0];
        let ys = [0.0, 2.0, -1.0, 1.0, 0.5];
        let m = second_derivatives(&xs, &ys);
        assert_eq!(m[0], 0.0);
        assert_eq!(m[4], 0.0);
        // continuity of the first derivative at interior knots
        for i in 1..4 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let left = (ys[i] - ys[i - 1]) / h0 + h0 * (2.0 * m[i] + m[i - 1]) / 6.0;
            let right = (ys[i + 1] - ys[i]) / h1 - h1 * (2.0 * m[i] + m[i + 1]) / 6.0;
            assert!((left - right).abs() < 1e-12);
        }
    }
}
