//! Truncated-matrix reference for displacement matrix elements.
//!
//! The displacement exponential is evaluated directly on a finite Fock
//! space, independently of the Laguerre closed form. Used by tests and by
//! the `verify` command only.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Annihilation operator `a|n> = sqrt(n)|n-1>`.
    pub fn lowering(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for n in 1..dim {
            m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Self {
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling and squaring with a Taylor kernel.
    pub fn expm(&self) -> Self {
        let norm = self.norm1();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scaled = self.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));
        let mut result = Self::identity(self.dim);
        let mut term = Self::identity(self.dim);
        for k in 1..60 {
            term = term.mul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
            result = result.add(&term);
            if term.norm1() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.mul(&result);
        }
        result
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Smallest truncation considered safe for the element `(n_f, n_i)`.
pub fn required_dim(n_f: u32, n_i: u32, kappa: Complex64) -> usize {
    n_f as usize + n_i as usize + 8 * kappa.norm_sqr().ceil() as usize + 16
}

/// `exp[-i(kappa a + kappa^* a^dagger)]` on a `dim`-level Fock space.
pub fn displacement_matrix(kappa: Complex64, dim: usize) -> Matrix {
    let a = Matrix::lowering(dim);
    let minus_i = Complex64::new(0.0, -1.0);
    let generator = a.scale(minus_i * kappa).add(&a.adjoint().scale(minus_i * kappa.conj()));
    generator.expm()
}

pub fn oracle_displacement(n_f: u32, n_i: u32, kappa: Complex64, dim: usize) -> Result<Complex64> {
    let required = required_dim(n_f, n_i, kappa);
    if dim < required {
        return Err(Error::TruncationRisk { dim, required });
    }
    Ok(displacement_matrix(kappa, dim)[(n_f as usize, n_i as usize)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::form_factor;

    #[test]
    fn trivial_displacement() {
        let v = oracle_displacement(0, 0, Complex64::new(0.0, 0.0), 16).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn first_raising_element() {
        let k = Complex64::new(0.6, -0.9);
        let v = oracle_displacement(1, 0, k, 64).unwrap();
        let exact = Complex64::new(0.0, -1.0) * k.conj() * (-0.5 * k.norm_sqr()).exp();
        assert!((v - exact).norm() < 1e-10);
    }

    #[test]
    fn rejects_small_space() {
        let k = Complex64::new(1.5, 0.0);
        assert!(matches!(
            oracle_displacement(3, 2, k, 30),
            Err(Error::TruncationRisk { required: 45, .. })
        ));
    }

    #[test]
    fn columns_are_normalized() {
        for k in [
            Complex64::new(0.5, 0.5),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 1.3),
        ] {
            let dim = required_dim(0, 10, k) + 10;
            let d = displacement_matrix(k, dim);
            for i in 0..=10 {
                let s: f64 = (0..dim).map(|f| d[(f, i)].norm_sqr()).sum();
                assert!((s - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn matches_closed_form() {
        let k = Complex64::new(0.7, 0.1);
        let v = oracle_displacement(2, 5, k, 64).unwrap();
        assert!((v - form_factor(2, 5, k)).norm() < 1e-10);
    }
}
