//! Compensated summation helpers used by the increment sums.

/// Kahan-compensated accumulator. Keeps long increment sums exact to a few ulps.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl From<f64> for KahanSum {
    fn from(x: f64) -> Self {
        Self { sum: x, comp: 0.0 }
    }
}
