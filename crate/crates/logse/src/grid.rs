//! Periodic Fourier pseudo-spectral discretization on a 1-D interval.
//!
//! The interval [a, b) is sampled at N uniform nodes x_j = a + j h with
//! h = (b - a)/N, N even. A field u is stored by its physical samples u_j.
//!
//! Transform normalization (fixed here, used everywhere): the forward DFT is
//! unnormalized,
//!
//! ```text
//!     û_k = Σ_j u_j e^{-i ξ_k x_j},       ξ_k = 2πk/(b - a),
//! ```
//!
//! and the inverse carries the 1/N factor. Wavenumbers are stored in
//! transform-native (FFT) ordering k = 0, 1, …, N/2-1, -N/2, …, -1; the
//! Nyquist mode k = -N/2 is kept (its Laplacian multiplier -ξ² is real).
//! No dealiasing is applied; the pseudo-spectral nonlinearity is evaluated
//! pointwise in physical space.
//!
//! Quadrature, inner product and mass are the plain trapezoidal-on-periodic
//! rules, spectrally accurate for smooth periodic integrands:
//! ⟨u, v⟩ = h Σ_j u_j conj(v_j) (linear in the first slot), M(u) = ⟨u, u⟩.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::util::kahan_sum;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid needs b > a, got [{a}, {b})")]
    EmptyInterval { a: f64, b: f64 },
    #[error("grid size must be a positive even integer, got {0}")]
    BadSize(usize),
    #[error("grid endpoints must be finite, got [{a}, {b})")]
    NonFinite { a: f64, b: f64 },
    #[error("fields live on different grids: [{a0}, {b0}) n={n0} vs [{a1}, {b1}) n={n1}")]
    GridMismatch {
        a0: f64,
        b0: f64,
        n0: usize,
        a1: f64,
        b1: f64,
        n1: usize,
    },
    #[error("Helmholtz solve is singular: |1 + α ξ²| = {denom:e} at mode k = {mode}")]
    SingularHelmholtz { mode: i64, denom: f64 },
    #[error("sample count {got} does not match grid size {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

/// Uniform periodic grid on [a, b) with cached FFT plans and wavenumbers.
pub struct Grid1D {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
    nodes: Vec<f64>,
    /// ξ_k = 2π k̃ / (b - a) in FFT ordering (k̃ = j for j < N/2, j - N else).
    xi: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("n", &self.n)
            .field("h", &self.h)
            .finish()
    }
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Arc<Self>, GridError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(GridError::NonFinite { a, b });
        }
        if b <= a {
            return Err(GridError::EmptyInterval { a, b });
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(GridError::BadSize(n));
        }
        let h = (b - a) / n as f64;
        let nodes = (0..n).map(|j| a + j as f64 * h).collect();
        let two_pi_over_l = 2.0 * std::f64::consts::PI / (b - a);
        let xi = (0..n)
            .map(|j| {
                let k = if j < n / 2 {
                    j as i64
                } else {
                    j as i64 - n as i64
                };
                two_pi_over_l * k as f64
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Arc::new(Self {
            a,
            b,
            n,
            h,
            nodes,
            xi,
            fwd,
            inv,
        }))
    }

    pub fn left(&self) -> f64 {
        self.a
    }

    pub fn right(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Wavenumbers ξ_k in transform-native ordering.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.xi
    }

    /// Signed mode index k̃ for FFT slot j (k̃ = j for j < N/2, j - N else).
    pub fn mode_index(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    pub fn same_geometry(&self, other: &Grid1D) -> bool {
        self.a == other.a && self.b == other.b && self.n == other.n
    }

    /// Sample a function at the grid nodes.
    pub fn sample(self: &Arc<Self>, f: impl Fn(f64) -> Complex64) -> SpectralField {
        let values = self.nodes.iter().map(|&x| f(x)).collect();
        SpectralField {
            grid: Arc::clone(self),
            values,
        }
    }

    pub fn zeros(self: &Arc<Self>) -> SpectralField {
        SpectralField {
            grid: Arc::clone(self),
            values: vec![Complex64::new(0.0, 0.0); self.n],
        }
    }

    fn mismatch(&self, other: &Grid1D) -> GridError {
        GridError::GridMismatch {
            a0: self.a,
            b0: self.b,
            n0: self.n,
            a1: other.a,
            b1: other.b,
            n1: other.n,
        }
    }
}

/// A complex field on a [`Grid1D`], stored by physical samples.
#[derive(Clone)]
pub struct SpectralField {
    grid: Arc<Grid1D>,
    values: Vec<Complex64>,
}

impl fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralField")
            .field("grid", &self.grid)
            .field("norm", &self.norm_l2())
            .finish()
    }
}

impl SpectralField {
    pub fn from_values(grid: &Arc<Grid1D>, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                got: values.len(),
                expected: grid.len(),
            });
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Forward DFT (unnormalized); coefficients in transform-native ordering.
    pub fn to_spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        self.grid.fwd.process(&mut buf);
        buf
    }

    /// Inverse DFT of unnormalized coefficients; applies the 1/N factor.
    pub fn from_spectrum(
        grid: &Arc<Grid1D>,
        mut coeffs: Vec<Complex64>,
    ) -> Result<Self, GridError> {
        if coeffs.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                got: coeffs.len(),
                expected: grid.len(),
            });
        }
        grid.inv.process(&mut coeffs);
        let scale = 1.0 / grid.len() as f64;
        for v in &mut coeffs {
            *v *= scale;
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values: coeffs,
        })
    }

    /// Δu via the spectral multiplier -ξ_k².
    pub fn laplacian(&self) -> SpectralField {
        let mut spec = self.to_spectrum();
        for (c, &xi) in spec.iter_mut().zip(self.grid.xi.iter()) {
            *c *= -xi * xi;
        }
        Self::from_spectrum(&self.grid, spec).expect("spectrum length matches grid")
    }

    /// ∂_x u via the spectral multiplier i ξ_k.
    pub fn derivative(&self) -> SpectralField {
        let mut spec = self.to_spectrum();
        for (c, &xi) in spec.iter_mut().zip(self.grid.xi.iter()) {
            *c *= Complex64::new(0.0, xi);
        }
        Self::from_spectrum(&self.grid, spec).expect("spectrum length matches grid")
    }

    /// Solve (I - α Δ) u = rhs exactly by diagonal division: û_k = r̂_k / (1 + α ξ_k²).
    ///
    /// For the IMEX stages α = i τ a^I_{ii} is purely imaginary, so
    /// |1 + α ξ²| ≥ 1 and the solve is unconditionally well posed; a general
    /// complex α may hit a vanishing denominator, reported as an error.
    pub fn solve_helmholtz(&self, alpha: Complex64) -> Result<SpectralField, GridError> {
        let mut spec = self.to_spectrum();
        for (j, (c, &xi)) in spec.iter_mut().zip(self.grid.xi.iter()).enumerate() {
            let denom = Complex64::new(1.0, 0.0) + alpha * (xi * xi);
            if denom.norm() <= 1e-14 * (1.0 + (alpha * xi * xi).norm()) {
                return Err(GridError::SingularHelmholtz {
                    mode: self.grid.mode_index(j),
                    denom: denom.norm(),
                });
            }
            *c /= denom;
        }
        Self::from_spectrum(&self.grid, spec)
    }

    /// ⟨u, v⟩ = h Σ_j u_j conj(v_j), compensated.
    pub fn inner(&self, other: &SpectralField) -> Result<Complex64, GridError> {
        if !self.grid.same_geometry(&other.grid) {
            return Err(self.grid.mismatch(&other.grid));
        }
        let re = kahan_sum(
            self.values
                .iter()
                .zip(other.values.iter())
                .map(|(u, v)| u.re * v.re + u.im * v.im),
        );
        let im = kahan_sum(
            self.values
                .iter()
                .zip(other.values.iter())
                .map(|(u, v)| u.im * v.re - u.re * v.im),
        );
        Ok(Complex64::new(self.grid.h * re, self.grid.h * im))
    }

    /// Discrete mass M(u) = h Σ_j |u_j|².
    pub fn mass(&self) -> f64 {
        self.grid.h * kahan_sum(self.values.iter().map(|u| u.norm_sqr()))
    }

    /// Discrete L² norm √M(u).
    pub fn norm_l2(&self) -> f64 {
        self.mass().sqrt()
    }

    /// self += a·x with a real coefficient (tableau weights are real).
    pub fn axpy(&mut self, a: f64, x: &SpectralField) {
        debug_assert!(self.grid.same_geometry(&x.grid));
        for (s, v) in self.values.iter_mut().zip(x.values.iter()) {
            *s += a * v;
        }
    }

    pub fn scale(&mut self, a: Complex64) {
        for v in &mut self.values {
            *v *= a;
        }
    }

    /// ‖u - v‖₂, the discrete L² distance.
    pub fn distance_l2(&self, other: &SpectralField) -> Result<f64, GridError> {
        if !self.grid.same_geometry(&other.grid) {
            return Err(self.grid.mismatch(&other.grid));
        }
        let s = kahan_sum(
            self.values
                .iter()
                .zip(other.values.iter())
                .map(|(u, v)| (u - v).norm_sqr()),
        );
        Ok((self.grid.h * s).sqrt())
    }
}

/// Restrict a field on a fine grid to a coarser grid over the same interval by
/// spectral truncation: keep the coarse grid's wavenumber set (including its
/// Nyquist mode), rescale by N_c/N_f, inverse-transform on the coarse grid.
pub fn restrict_to(fine: &SpectralField, coarse: &Arc<Grid1D>) -> Result<SpectralField, GridError> {
    let gf = fine.grid();
    if gf.left() != coarse.left() || gf.right() != coarse.right() {
        return Err(GridError::GridMismatch {
            a0: gf.left(),
            b0: gf.right(),
            n0: gf.len(),
            a1: coarse.left(),
            b1: coarse.right(),
            n1: coarse.len(),
        });
    }
    let nf = gf.len();
    let nc = coarse.len();
    if nc > nf {
        return Err(GridError::LengthMismatch {
            got: nc,
            expected: nf,
        });
    }
    if nc == nf {
        return Ok(fine.clone());
    }
    let spec_f = fine.to_spectrum();
    let scale = nc as f64 / nf as f64;
    let mut spec_c = vec![Complex64::new(0.0, 0.0); nc];
    for (jc, sc) in spec_c.iter_mut().enumerate() {
        let k = if jc < nc / 2 {
            jc as i64
        } else {
            jc as i64 - nc as i64
        };
        let jf = if k >= 0 {
            k as usize
        } else {
            (k + nf as i64) as usize
        };
        *sc = spec_f[jf] * scale;
    }
    SpectralField::from_spectrum(coarse, spec_c)
}
