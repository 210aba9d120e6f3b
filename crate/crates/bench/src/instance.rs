//! Seeded Procrustes instances.
//!
//! ```text
//! A_ij ~ N(0, 4),  X ~ Haar(O_n),  E_ij ~ N(0, sigma^2)
//! B = A X + E,     D = -A^T B
//! min_{Y in O_n} Tr(D^T Y)  <=>  min_{Y in O_n} ||A Y - B||_F^2
//! ```
//!
//! With `-D = U S V^T`, the minimizer over `O_n` is `U V^T` with value
//! `-sum(S)`. Givens and exponential updates never leave the connected
//! component of the start, so runs start at `I` or at `diag(1, ..., 1, -1)`,
//! whichever shares the component of `U V^T`.

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};
use tsd_core::linalg::{haar_orthogonal, seeded_rng};
use tsd_core::objective::LinearTrace;
use tsd_core::{Error, Point, Result};

/// Standard deviation of the entries of `A`.
pub const A_STD: f64 = 2.0;
/// Default standard deviation of the noise entries.
pub const NOISE_STD: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ProcrustesInstance {
    pub n: usize,
    pub seed: u64,
    pub noise_std: f64,
    pub a: DMatrix<f64>,
    pub x_true: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

/// Instance with unit noise.
pub fn gen_instance(n: usize, seed: u64) -> Result<ProcrustesInstance> {
    gen_instance_with_noise(n, seed, NOISE_STD)
}

/// Instance with noise entries `N(0, noise_std^2)`; `noise_std = 0` gives
/// `B = A X` exactly.
pub fn gen_instance_with_noise(n: usize, seed: u64, noise_std: f64) -> Result<ProcrustesInstance> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("instance dimension must be >= 2, got {n}")));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise level {noise_std} must be finite and >= 0")));
    }
    let mut rng = seeded_rng(seed);
    let entry = Normal::new(0.0, A_STD).expect("valid normal");
    let a = DMatrix::from_fn(n, n, |_, _| entry.sample(&mut rng));
    let x_true = haar_orthogonal(n, &mut rng);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let noise = DMatrix::from_fn(n, n, |_, _| noise_std * unit.sample(&mut rng));
    let b = &a * &x_true + noise;
    let d = -(a.transpose() * &b);
    Ok(ProcrustesInstance {
        n,
        seed,
        noise_std,
        a,
        x_true,
        b,
        d,
    })
}

impl ProcrustesInstance {
    pub fn objective(&self) -> LinearTrace {
        LinearTrace::new(self.d.clone())
    }

    /// `Tr(D^T Y)`.
    pub fn value(&self, y: &DMatrix<f64>) -> f64 {
        self.d.dot(y)
    }

    /// `(U V^T, -sum(S))` from the SVD `-D = U S V^T`.
    pub fn closed_form_optimum(&self) -> (DMatrix<f64>, f64) {
        let svd = (-&self.d).svd(true, true);
        let u = svd.u.expect("requested U");
        let v_t = svd.v_t.expect("requested V^T");
        (u * v_t, -svd.singular_values.sum())
    }

    /// `I` or `diag(1, ..., 1, -1)`, in the component of the optimum.
    pub fn start(&self) -> Point {
        let (y_star, _) = self.closed_form_optimum();
        let mut y0 = DMatrix::identity(self.n, self.n);
        if y_star.determinant() < 0.0 {
            y0[(self.n - 1, self.n - 1)] = -1.0;
        }
        Point::Orthogonal(y0)
    }
}
