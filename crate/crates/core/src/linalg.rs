use nalgebra::DMatrix;
use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix in descending order.
pub(crate) fn hermitian_spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = if m.nrows() == 1 {
        vec![m[(0, 0)].re]
    } else if m.nrows() == 2 {
        // Closed form avoids the iterative solver for qubit blocks.
        let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        vec![mean + r, mean - r]
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

pub(crate) fn max_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    hermitian_spectrum(m)[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_y_spectrum() {
        let i = Complex64::i();
        let m = DMatrix::from_row_slice(2, 2, &[0.0.into(), -i, i, 0.0.into()]);
        assert_eq!(hermitian_spectrum(&m), vec![1.0, -1.0]);
    }

    #[test]
    fn three_by_three_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.2, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.3, 0.0),
        ]));
        let ev = hermitian_spectrum(&m);
        assert!((ev[0] - 0.5).abs() < 1e-14 && (ev[2] - 0.2).abs() < 1e-14);
    }
}
