//! Closed-form Gausson solutions of the logarithmic Schrödinger equation
//! and Gaussian-sum initial data for interaction experiments.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::grid::{Grid1D, SpectralField};
use crate::harness::HarnessError;

/// Parameters of a travelling Gausson
///
/// ```text
/// u(x, t) = b · exp( i(xζ − (a + ζ²)t) + (λ/2)(x − 2ζt)² ),
/// ```
///
/// which solves `i ∂_t u + ∂_xx u = λ u ln|u|²` for `λ < 0` when the
/// frequency is locked to `a = −λ(1 − ln b²)`. The amplitude `b` and the
/// velocity parameter `ζ` are free; `a` is always recomputed from `b` and
/// `λ`, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussonParams {
    b: f64,
    zeta: f64,
    lambda: f64,
}

impl GaussonParams {
    /// A Gausson with amplitude `b`, velocity parameter `zeta`, and
    /// nonlinearity strength `lambda` (must be strictly negative so the
    /// envelope decays).
    pub fn new(b: f64, zeta: f64, lambda: f64) -> Result<Self, HarnessError> {
        if !(b.is_finite() && b > 0.0) {
            return Err(HarnessError::BadParams(format!(
                "Gausson amplitude must be finite and positive, got {b}"
            )));
        }
        if !zeta.is_finite() {
            return Err(HarnessError::BadParams(format!(
                "Gausson velocity parameter must be finite, got {zeta}"
            )));
        }
        if !(lambda.is_finite() && lambda < 0.0) {
            return Err(HarnessError::BadParams(format!(
                "Gausson requires lambda < 0, got {lambda}"
            )));
        }
        Ok(GaussonParams { b, zeta, lambda })
    }

    /// The standard stationary Gausson `e^{−it} e^{−x²/2}` (b = 1, ζ = 0,
    /// λ = −1).
    pub fn standard() -> Self {
        GaussonParams {
            b: 1.0,
            zeta: 0.0,
            lambda: -1.0,
        }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The locked frequency `a = −λ(1 − ln b²)`.
    pub fn frequency(&self) -> f64 {
        -self.lambda * (1.0 - (self.b * self.b).ln())
    }

    /// Evaluates the Gausson at position `x` and time `t`.
    pub fn evaluate(&self, x: f64, t: f64) -> Complex64 {
        let a = self.frequency();
        let shifted = x - 2.0 * self.zeta * t;
        let envelope = 0.5 * self.lambda * shifted * shifted;
        let phase = x * self.zeta - (a + self.zeta * self.zeta) * t;
        self.b * Complex64::new(envelope, phase).exp()
    }

    /// Samples the Gausson at time `t` on `grid`.
    pub fn sample(&self, grid: &Arc<Grid1D>, t: f64) -> SpectralField {
        grid.sample(|x| self.evaluate(x, t))
    }

    /// The exact continuum mass `∫|u|² dx = b² √(π/(−λ))`.
    pub fn mass(&self) -> f64 {
        self.b * self.b * (PI / -self.lambda).sqrt()
    }
}

/// One Gaussian wave packet `b · exp(−(a/2)(x − x0)² + i v x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussonComponent {
    /// Amplitude.
    pub b: f64,
    /// Inverse-width parameter (must be positive).
    pub a: f64,
    /// Center position.
    pub x0: f64,
    /// Wavenumber of the phase ramp; the packet travels at group
    /// velocity `2v`.
    pub v: f64,
}

/// Initial data built as a plain sum of Gaussian wave packets.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGaussonInitialData {
    components: Vec<GaussonComponent>,
}

impl MultiGaussonInitialData {
    pub fn new(components: Vec<GaussonComponent>) -> Result<Self, HarnessError> {
        if components.is_empty() {
            return Err(HarnessError::BadParams(
                "initial data needs at least one component".into(),
            ));
        }
        for (k, c) in components.iter().enumerate() {
            if !(c.b.is_finite() && c.a.is_finite() && c.x0.is_finite() && c.v.is_finite()) {
                return Err(HarnessError::BadParams(format!(
                    "component {k} has a non-finite parameter"
                )));
            }
            if c.a <= 0.0 {
                return Err(HarnessError::BadParams(format!(
                    "component {k} needs a positive width parameter, got {}",
                    c.a
                )));
            }
        }
        Ok(MultiGaussonInitialData { components })
    }

    pub fn components(&self) -> &[GaussonComponent] {
        &self.components
    }

    /// Evaluates the sum of packets at position `x`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &self.components {
            let s = x - c.x0;
            acc += c.b * Complex64::new(-0.5 * c.a * s * s, c.v * x).exp();
        }
        acc
    }

    /// Samples the initial data on `grid`.
    pub fn sample(&self, grid: &Arc<Grid1D>) -> SpectralField {
        grid.sample(|x| self.evaluate(x))
    }
}

/// The head-on two-Gausson collision data: unit-amplitude, unit-width
/// packets centered at x = ∓30 with phase ramps e^{±2ix}, so they approach
/// each other at group speed 4 and collide near x = 0.
///
/// The grid must cover `[−40, 40]`; the packets are ~e^{−50} small at the
/// boundary there, so the periodic wrap-around is far below rounding.
pub fn two_gausson_initial(grid: &Arc<Grid1D>) -> Result<SpectralField, HarnessError> {
    let (need_left, need_right) = (-40.0, 40.0);
    if grid.left() > need_left + 1e-12 || grid.right() < need_right - 1e-12 {
        return Err(HarnessError::DomainTooSmall {
            left: grid.left(),
            right: grid.right(),
            need_left,
            need_right,
        });
    }
    let data = MultiGaussonInitialData::new(vec![
        GaussonComponent {
            b: 1.0,
            a: 1.0,
            x0: -30.0,
            v: 2.0,
        },
        GaussonComponent {
            b: 1.0,
            a: 1.0,
            x0: 30.0,
            v: -2.0,
        },
    ])?;
    Ok(data.sample(grid))
}
