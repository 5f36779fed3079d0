//! Small internal numerics helpers.

/// Neumaier-compensated summation. Keeps long accumulations (mass, inner
/// products, energies) accurate to a few ulps independent of length.
pub(crate) fn kahan_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Running compensated accumulator for the relaxed time variable
/// t̂_{n+1} = t̂_n + γ_n τ, where thousands of slightly-off-τ increments
/// must not erode the landing test at the final time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new(x: f64) -> Self {
        Self { sum: x, comp: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
