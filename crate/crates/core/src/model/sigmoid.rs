/// Inputs are clamped to `[-SIGMOID_BOUND, SIGMOID_BOUND]`.
pub const SIGMOID_BOUND: f32 = 6.0;
pub const SIGMOID_RESOLUTION: usize = 1000;

pub trait Sigmoid {
    fn sigmoid(&self, x: f32) -> f32;
}

impl<S: Sigmoid + ?Sized> Sigmoid for &S {
    #[inline]
    fn sigmoid(&self, x: f32) -> f32 {
        (**self).sigmoid(x)
    }
}

/// Precomputed logistic function, sampled at `SIGMOID_RESOLUTION` evenly
/// spaced points from `-SIGMOID_BOUND` to `SIGMOID_BOUND` inclusive and
/// read back by nearest sample.
#[derive(Clone, Debug)]
pub struct SigmoidTable {
    values: Vec<f32>,
    scale: f32,
}

impl SigmoidTable {
    pub fn new() -> Self {
        let n = SIGMOID_RESOLUTION;
        let step = 2.0 * SIGMOID_BOUND as f64 / (n - 1) as f64;
        let values = (0..n)
            .map(|i| {
                let x = -(SIGMOID_BOUND as f64) + i as f64 * step;
                (1.0 / (1.0 + (-x).exp())) as f32
            })
            .collect();
        SigmoidTable {
            values,
            scale: (n - 1) as f32 / (2.0 * SIGMOID_BOUND),
        }
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }
}

impl Default for SigmoidTable {
    fn default() -> Self {
        Self::new()
    }
}

impl Sigmoid for SigmoidTable {
    #[inline]
    fn sigmoid(&self, x: f32) -> f32 {
        if x <= -SIGMOID_BOUND {
            return self.values[0];
        }
        if x >= SIGMOID_BOUND {
            return self.values[SIGMOID_RESOLUTION - 1];
        }
        // NaN falls through to index 0 via the saturating cast
        let i = ((x + SIGMOID_BOUND) * self.scale + 0.5) as usize;
        self.values[i.min(SIGMOID_RESOLUTION - 1)]
    }
}

/// `1 / (1 + e^-x)` without a table. Used by gradient checks.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactSigmoid;

impl Sigmoid for ExactSigmoid {
    #[inline]
    fn sigmoid(&self, x: f32) -> f32 {
        1.0 / (1.0 + (-x).exp())
    }
}
