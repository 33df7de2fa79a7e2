//! Dense matrix exponential by scaling and squaring with Padé approximants
//! (Higham, "The scaling and squaring method for the matrix exponential
//! revisited", 2005).

use nalgebra::DMatrix;

use super::SparseMatrix;
use crate::error::{Error, Result};

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which each degree meets unit roundoff in double precision.
const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539398330063230e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068e0;
const THETA13: f64 = 5.371920351148152e0;

/// `exp(-L t)` for a square sparse `L` and `t >= 0`.
pub fn matrix_exponential(generator: &SparseMatrix, t: f64) -> Result<DMatrix<f64>> {
    if !generator.is_square() {
        return Err(Error::DimensionMismatch {
            expected: generator.n_rows(),
            found: generator.n_cols(),
        });
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NonFinite(format!("scale t = {t} must be finite and >= 0")));
    }
    expm(&(generator.to_dense() * (-t)))
}

/// `exp(A)` for a dense square matrix.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, m) = a.shape();
    if n != m {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m,
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix exponential input".into()));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let norm = one_norm(a);
    let identity = DMatrix::<f64>::identity(n, n);
    if norm == 0.0 {
        return Ok(identity);
    }

    for (theta, coeffs) in [
        (THETA3, &PADE3[..]),
        (THETA5, &PADE5[..]),
        (THETA7, &PADE7[..]),
        (THETA9, &PADE9[..]),
    ] {
        if norm <= theta {
            let (u, v) = pade_low(a, coeffs, &identity);
            return solve_pade(&u, &v);
        }
    }

    let squarings = (norm / THETA13).log2().ceil().max(0.0) as i32;
    let scaled = a / 2f64.powi(squarings);
    let (u, v) = pade13(&scaled, &identity);
    let mut result = solve_pade(&u, &v)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if result.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix exponential overflowed".into()));
    }
    Ok(result)
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Odd and even parts of a Padé numerator of degree <= 9.
fn pade_low(a: &DMatrix<f64>, b: &[f64], identity: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let a2 = a * a;
    let mut power = identity.clone();
    let mut odd = identity * b[1];
    let mut even = identity * b[0];
    for k in 1..b.len() / 2 {
        power = &power * &a2;
        odd += &power * b[2 * k + 1];
        even += &power * b[2 * k];
    }
    (a * odd, even)
}

fn pade13(a: &DMatrix<f64>, identity: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let b = &PADE13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + identity * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + identity * b[0];
    (u, v)
}

fn solve_pade(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let denominator = v - u;
    let numerator = v + u;
    denominator
        .lu()
        .solve(&numerator)
        .ok_or_else(|| Error::NonFinite("singular Padé denominator".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor(a: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
        let n = a.nrows();
        let mut term = DMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..=terms {
            term = &term * a / k as f64;
            sum += &term;
        }
        sum
    }

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    #[test]
    fn zero_scale_is_identity() {
        let l = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 1.0)])
            .unwrap();
        assert_eq!(matrix_exponential(&l, 0.0).unwrap(), DMatrix::identity(2, 2));
    }

    #[test]
    fn diagonal_case() {
        let l = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (1, 1, 2.0)]).unwrap();
        let e = matrix_exponential(&l, 1.0).unwrap();
        assert!((e[(0, 0)] - (-1f64).exp()).abs() < 1e-15);
        assert!((e[(1, 1)] - (-2f64).exp()).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn every_pade_degree_agrees_with_taylor() {
        let base = DMatrix::from_row_slice(3, 3, &[0.3, -0.1, 0.2, 0.05, -0.4, 0.1, -0.2, 0.15, 0.1]);
        // norms spanning all degree thresholds plus the scaled branch
        for scale in [0.01, 0.3, 1.0, 2.5, 4.0, 10.0] {
            let a = &base * scale;
            let exact = if scale > 4.0 {
                let half = taylor(&(&a / 16.0), 60);
                let mut r = half;
                for _ in 0..4 {
                    r = &r * &r;
                }
                r
            } else {
                taylor(&a, 80)
            };
            let got = expm(&a).unwrap();
            let rel = max_abs_diff(&got, &exact) / exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(rel < 1e-13, "scale {scale}: rel err {rel}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let l = SparseMatrix::from_triplets(2, 3, [(0, 0, 1.0)]).unwrap();
        assert!(matrix_exponential(&l, 1.0).is_err());
        let sq = SparseMatrix::identity(2);
        assert!(matrix_exponential(&sq, -1.0).is_err());
        assert!(matrix_exponential(&sq, f64::NAN).is_err());
        let mut d = DMatrix::identity(2, 2);
        d[(0, 1)] = f64::INFINITY;
        assert!(expm(&d).is_err());
    }
}
