use nalgebra::{DMatrix, DVector};

/// Systems with a 1-norm condition number above this are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Solve `m · x = rhs` by partial-pivot LU. On failure returns the
/// (possibly infinite) condition estimate instead.
pub(crate) fn solve_checked(m: DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>, f64> {
    let norm = norm1(&m);
    if !norm.is_finite() {
        return Err(f64::INFINITY);
    }
    let lu = m.lu();
    let inverse = lu.try_inverse().ok_or(f64::INFINITY)?;
    let condition = norm * norm1(&inverse);
    if !(condition <= CONDITION_LIMIT) {
        return Err(condition);
    }
    lu.solve(rhs).ok_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_well_conditioned() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let x = solve_checked(m, &DVector::from_vec(vec![3.0, 5.0])).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn rejects_singular_and_ill_conditioned() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(solve_checked(m, &DVector::from_vec(vec![1.0, 1.0])).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0 + 1e-14]);
        let cond = solve_checked(m, &DVector::from_vec(vec![1.0, 1.0])).unwrap_err();
        assert!(cond > CONDITION_LIMIT);
    }
}
