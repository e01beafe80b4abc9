//! Truncation window for representation-level computations.
//!
//! Module bases are cut by lowering depth and by generator mode; spectral
//! series are cut by order. Action matrices are exact on the retained basis,
//! and checks that compose operators must restrict to columns whose images
//! stay inside the window.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    /// Series truncation order N: coefficients of u^k are tracked for k ≤ N.
    pub order: i64,
    /// Maximal number of lowering generators applied to the cyclic vector.
    pub depth: usize,
    /// Maximal generator mode kept in module bases.
    pub mode_cap: i64,
}

impl Window {
    pub fn new(order: i64, depth: usize) -> Self {
        assert!(order >= 1, "window order must be positive");
        Window { order, depth, mode_cap: order }
    }

    pub fn with_mode_cap(mut self, cap: i64) -> Self {
        self.mode_cap = cap;
        self
    }

    pub fn shrink_order(mut self, by: i64) -> Self {
        self.order = (self.order - by).max(1);
        self
    }

    pub fn shrink_depth(mut self, by: usize) -> Self {
        self.depth = self.depth.saturating_sub(by);
        self
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::new(8, 10)
    }
}
