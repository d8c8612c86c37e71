//! Streaming difference-equation state for per-sample loop simulation.

use super::DiscreteTransferFunction;

/// Direct-form II transposed realization of a transfer function, advanced one
/// sample at a time. Batch simulation uses the same kernel so streaming and
/// one-shot filtering are numerically identical.
#[derive(Debug, Clone)]
pub struct FilterState {
    b: Vec<f64>,
    a: Vec<f64>,
    state: Vec<f64>,
}

impl FilterState {
    pub fn new(sys: &DiscreteTransferFunction) -> Self {
        let n = sys.numerator().len().max(sys.denominator().len());
        let mut b = vec![0.0; n];
        let mut a = vec![0.0; n];
        b[..sys.numerator().len()].copy_from_slice(sys.numerator());
        a[..sys.denominator().len()].copy_from_slice(sys.denominator());
        Self {
            b,
            a,
            state: vec![0.0; n.saturating_sub(1)],
        }
    }

    /// Output this sample will produce before the input is known.
    /// Only meaningful for strictly proper systems (b0 = 0), where the output
    /// depends on past samples alone; this is what breaks the feedback cycle
    /// in the per-sample loop.
    pub fn peek(&self) -> f64 {
        debug_assert!(self.b[0] == 0.0, "peek requires a strictly proper system");
        self.state.first().copied().unwrap_or(0.0)
    }

    /// Advance one sample: push input `u`, return output `y`.
    pub fn step(&mut self, u: f64) -> f64 {
        let y = self.b[0] * u + self.state.first().copied().unwrap_or(0.0);
        let n = self.state.len();
        for i in 0..n {
            let next = if i + 1 < n { self.state[i + 1] } else { 0.0 };
            self.state[i] = self.b[i + 1] * u - self.a[i + 1] * y + next;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_recursion_matches_hand_iteration() {
        // y(k) = 0.5 y(k-1) + u(k)
        let sys = DiscreteTransferFunction::new(vec![1.0], vec![1.0, -0.5], 1.0).unwrap();
        let mut f = FilterState::new(&sys);
        let mut expected = Vec::new();
        let mut y_prev = 0.0;
        for k in 0..8 {
            let u = if k == 0 { 1.0 } else { 0.0 };
            let y = 0.5 * y_prev + u;
            expected.push(y);
            y_prev = y;
        }
        for (k, &e) in expected.iter().enumerate() {
            let u = if k == 0 { 1.0 } else { 0.0 };
            assert!((f.step(u) - e).abs() < 1e-15);
        }
    }

    #[test]
    fn peek_matches_step_for_strictly_proper() {
        let sys =
            DiscreteTransferFunction::new(vec![0.0, 0.3, 0.1], vec![1.0, -0.9, 0.2], 1.0).unwrap();
        let mut f = FilterState::new(&sys);
        let inputs = [1.0, -0.5, 2.0, 0.25, -1.5];
        for &u in &inputs {
            let ahead = f.peek();
            let y = f.step(u);
            assert!((ahead - y).abs() < 1e-15);
        }
    }
}
