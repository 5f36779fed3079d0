//! Energy regularization of the logarithmic nonlinearity.
//!
//! The logarithmic Schrödinger energy density F(ρ) = ρ ln ρ - ρ has an
//! unbounded derivative f(ρ) = ln ρ as ρ = |u|² → 0. Below the cutoff
//! ρ = ε² we replace ln ρ by the polynomial
//!
//! ```text
//!     f_k^ε(ρ) = ln(ε²) - (k+1)/k · σ^k - Σ_{j=1}^{k-1} σ^j / j,
//!     σ = 1 - ρ/ε²  ∈ [0, 1],
//! ```
//!
//! which matches the truncated series of ln ρ = ln ε² + ln(1 - σ) through
//! order k-1; the modified σ^k coefficient makes the antiderivative vanish at
//! ρ = 0. The induced energy density F_k^ε (antiderivative of f_k^ε with
//! F_k^ε(0) = 0) is C^k across ρ = ε², and in factored, cancellation-free
//! form reads
//!
//! ```text
//!     F_k^ε(ρ) = ρ [ ln(ε²) - T_k(σ)/k - Σ_{j=1}^{k-1} T_j(σ)/(j(j+1)) ],
//!     T_j(σ) = 1 + σ + … + σ^j,
//! ```
//!
//! using 1 - σ^{j+1} = (ρ/ε²) T_j(σ). For ρ ≥ ε² both functions are the
//! exact F and ln.

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::SpectralField;
use crate::util::kahan_sum;

#[derive(Debug, Error)]
pub enum RegError {
    #[error("density must be nonnegative, got {0}")]
    NegativeDensity(f64),
    #[error("regularization cutoff must satisfy 0 < ε < 1 with ε² > 0, got {0}")]
    BadCutoff(f64),
    #[error("regularization order must be in 2..=16, got {0}")]
    BadOrder(u32),
    #[error("model parameter λ must be finite, got {0}")]
    BadLambda(f64),
}

/// Cutoff ε and smoothness order k of the regularization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationParams {
    eps: f64,
    order: u32,
    /// ε², the density cutoff; cached so both branches compare and log the
    /// same float.
    cutoff: f64,
    ln_cutoff: f64,
}

impl RegularizationParams {
    pub fn new(eps: f64, order: u32) -> Result<Self, RegError> {
        if !(eps > 0.0 && eps < 1.0) || !(eps * eps).is_normal() {
            return Err(RegError::BadCutoff(eps));
        }
        if !(2..=16).contains(&order) {
            return Err(RegError::BadOrder(order));
        }
        let cutoff = eps * eps;
        Ok(Self {
            eps,
            order,
            cutoff,
            ln_cutoff: cutoff.ln(),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn density_cutoff(&self) -> f64 {
        self.cutoff
    }
}

/// Physical parameters of the model i u_t + Δu = λ u f(|u|²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    lambda: f64,
}

impl ModelParams {
    /// λ < 0 gives self-trapping (Gausson) dynamics; λ = 0 reduces to the
    /// free Schrödinger equation and is kept as an exactly solvable test mode.
    pub fn new(lambda: f64) -> Result<Self, RegError> {
        if !lambda.is_finite() {
            return Err(RegError::BadLambda(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Unregularized energy density F(ρ) = ρ ln ρ - ρ, continued by F(0) = 0.
pub fn energy_density(rho: f64) -> Result<f64, RegError> {
    if rho < 0.0 || rho.is_nan() {
        return Err(RegError::NegativeDensity(rho));
    }
    Ok(energy_density_raw(rho))
}

fn energy_density_raw(rho: f64) -> f64 {
    if rho == 0.0 {
        0.0
    } else {
        rho * rho.ln() - rho
    }
}

/// Regularized logarithm f_k^ε(ρ): exactly ln ρ for ρ ≥ ε², the matching
/// polynomial below.
pub fn reg_log(rho: f64, reg: &RegularizationParams) -> Result<f64, RegError> {
    if rho < 0.0 || rho.is_nan() {
        return Err(RegError::NegativeDensity(rho));
    }
    Ok(reg_log_raw(rho, reg))
}

#[inline]
fn reg_log_raw(rho: f64, reg: &RegularizationParams) -> f64 {
    if rho >= reg.cutoff {
        rho.ln()
    } else {
        reg_log_inner(1.0 - rho / reg.cutoff, reg)
    }
}

/// Inner branch in terms of σ = 1 - ρ/ε², Horner-evaluated so the small-σ
/// regime near the junction accumulates no cancellation.
#[inline]
fn reg_log_inner(sigma: f64, reg: &RegularizationParams) -> f64 {
    let k = reg.order;
    // acc·σ = (k+1)/k σ^k + Σ_{j=1}^{k-1} σ^j / j
    let mut acc = (k as f64 + 1.0) / k as f64;
    for j in (1..k).rev() {
        acc = acc * sigma + 1.0 / j as f64;
    }
    reg.ln_cutoff - acc * sigma
}

/// Regularized energy density F_k^ε(ρ) in the factored form
/// ρ (ln ε² - G(σ)); exact F for ρ ≥ ε².
pub fn reg_energy_density(rho: f64, reg: &RegularizationParams) -> Result<f64, RegError> {
    if rho < 0.0 || rho.is_nan() {
        return Err(RegError::NegativeDensity(rho));
    }
    Ok(reg_energy_density_raw(rho, reg))
}

#[inline]
fn reg_energy_density_raw(rho: f64, reg: &RegularizationParams) -> f64 {
    if rho >= reg.cutoff {
        energy_density_raw(rho)
    } else {
        let sigma = 1.0 - rho / reg.cutoff;
        let k = reg.order;
        // G(σ) = T_k/k + Σ_{j=1}^{k-1} T_j/(j(j+1)),  T_j = 1 + σ + … + σ^j.
        // G(0) = 1/k + Σ 1/(j(j+1)) = 1 (telescoping), so F is continuous at
        // the junction; the ρ prefactor pins F(0) = 0 exactly.
        let mut sigma_pow = 1.0;
        let mut t = 1.0;
        let mut g = 0.0;
        for j in 1..k {
            sigma_pow *= sigma;
            t += sigma_pow;
            g += t / (j as f64 * (j as f64 + 1.0));
        }
        sigma_pow *= sigma;
        t += sigma_pow;
        g += t / k as f64;
        rho * (reg.ln_cutoff - g)
    }
}

/// Explicit part of the split right-hand side: solving
/// i u_t + Δu = λ u f_k^ε(|u|²) for u_t gives u_t = iΔu - iλ u f_k^ε(|u|²),
/// so the stiff implicit part is g^I(u) = iΔu and this function returns
///
/// ```text
///     g^E(u)_j = -i λ u_j f_k^ε(|u_j|²).
/// ```
pub fn explicit_rhs(
    u: &SpectralField,
    reg: &RegularizationParams,
    model: &ModelParams,
) -> SpectralField {
    let mut out = u.clone();
    let lambda = model.lambda;
    for v in out.values_mut() {
        let f = reg_log_raw(v.norm_sqr(), reg);
        // multiply by -iλf: (a+bi)(-iλf) = λf(b - ai)
        *v = Complex64::new(lambda * f * v.im, -lambda * f * v.re);
    }
    out
}

/// Unregularized energy E(u) = ∫ |∂_x u|² + λ ∫ F(|u|²), discrete quadrature.
pub fn energy(u: &SpectralField, model: &ModelParams) -> f64 {
    let h = u.grid().spacing();
    let kinetic = u.derivative().mass();
    let potential = h * kahan_sum(u.values().iter().map(|v| energy_density_raw(v.norm_sqr())));
    kinetic + model.lambda * potential
}

/// Regularized energy E_k^ε(u) = ∫ |∂_x u|² + λ ∫ F_k^ε(|u|²).
pub fn reg_energy(u: &SpectralField, reg: &RegularizationParams, model: &ModelParams) -> f64 {
    let h = u.grid().spacing();
    let kinetic = u.derivative().mass();
    let potential = h * kahan_sum(
        u.values()
            .iter()
            .map(|v| reg_energy_density_raw(v.norm_sqr(), reg)),
    );
    kinetic + model.lambda * potential
}
