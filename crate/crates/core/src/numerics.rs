//! Small numerical kernels: bracketed bisection, adaptive Simpson
//! quadrature and anchored polynomial least squares.

use crate::error::{Error, Result};

/// Bisection for a sign change of `f` on `[a, b]`.
///
/// Stops when the bracket is narrower than `tol` or `|f| == 0`, or after
/// `max_iter` halvings (the bracket cannot shrink below one ulp anyway).
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NotBracketed("bisection endpoints share a sign"));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&mut f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Quadrature { a, b });
    }
    if delta.abs() <= 15.0 * tol || (b - a).abs() < 1e-15 {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature { a, b });
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Least-squares fit `y = sum_{k=1..degree} c_k s^k` through the origin.
///
/// Returns `[c_1, ..., c_degree]`. Solved through the normal equations with
/// Gaussian elimination; intended for small degrees on well-scaled data.
pub fn anchored_polyfit(s: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    fit_powers(s, y, 1, degree)
}

/// Least-squares polynomial `y = sum_{k=0..degree} c_k s^k`; returns
/// `[c_0, ..., c_degree]`.
pub fn polyfit(s: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    fit_powers(s, y, 0, degree)
}

fn fit_powers(s: &[f64], y: &[f64], first: usize, degree: usize) -> Result<Vec<f64>> {
    let m = degree + 1 - first;
    if s.len() != y.len() || s.len() < m {
        return Err(Error::InsufficientData(format!(
            "polynomial fit with {m} coefficients needs at least {m} samples, got {}",
            s.len().min(y.len())
        )));
    }
    // column scaling keeps the normal matrix well conditioned for short windows
    let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut ata = vec![vec![0.0; m]; m];
    let mut aty = vec![0.0; m];
    for (&si, &yi) in s.iter().zip(y) {
        let u = si / scale;
        let powers: Vec<f64> = (first..=degree).map(|k| u.powi(k as i32)).collect();
        for r in 0..m {
            aty[r] += powers[r] * yi;
            for c in 0..m {
                ata[r][c] += powers[r] * powers[c];
            }
        }
    }
    let mut coef = solve_dense(ata, aty)?;
    for (k, c) in coef.iter_mut().enumerate() {
        *c /= scale.powi((k + first) as i32);
    }
    Ok(coef)
}

/// Ordinary least-squares line `y = a + b s`; returns `(a, b)`.
pub fn linear_fit(s: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = s.len().min(y.len());
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "linear fit needs 2 samples, got {n}"
        )));
    }
    let nf = n as f64;
    let ms = s[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (s[i] - ms) * (s[i] - ms);
        sxy += (s[i] - ms) * (y[i] - my);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "linear fit abscissae are all equal".into(),
        ));
    }
    let b = sxy / sxx;
    Ok((my - b * ms, b))
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[pivot][col] == 0.0 {
            return Err(Error::InsufficientData("singular normal equations".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}
