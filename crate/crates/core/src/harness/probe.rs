//! Dependence of the generalized Schur complement on the chosen
//! {1}-inverse.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::block::BlockMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pinv::one_inverse_sample;
use crate::scalar::Scalar;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = ""))]
pub struct InvarianceProbe<T: Scalar> {
    pub invariant: bool,
    /// Largest pairwise Frobenius distance among the sampled complements.
    pub spread: f64,
    #[serde(skip)]
    pub weights: Vec<Matrix<T>>,
    /// `D - C X B` for each sampled {1}-inverse `X` of `A`.
    #[serde(skip)]
    pub values: Vec<Matrix<T>>,
}

/// Draws `samples` random `W`, forms `X = A† + W - A†AWAA†` and evaluates
/// `D - C X B`. Invariant iff the spread is at most `tol.eq` (zero for
/// exact backends).
pub fn invariance_probe<T: Scalar>(
    mb: &BlockMatrix<T>,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<InvarianceProbe<T>> {
    if samples < 2 {
        return Err(Error::Unsatisfiable("invariance probe needs at least two samples".into()));
    }
    let blocks = mb.blocks();
    let (m, n, _, _) = mb.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let w = Matrix::from_fn(n, m, |_, _| T::sample(&mut rng));
        let x = one_inverse_sample(&blocks.a, &w, tol)?;
        values.push(&blocks.d - &(&(&blocks.c * &x) * &blocks.b));
        weights.push(w);
    }
    let mut spread: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            spread = spread.max(values[i].distance(&values[j]));
        }
    }
    let invariant = if T::EXACT { spread == 0.0 } else { spread <= tol.eq };
    Ok(InvarianceProbe {
        invariant,
        spread,
        weights,
        values,
    })
}
