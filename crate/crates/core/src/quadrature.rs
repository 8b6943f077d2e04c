//! Midpoint quadrature over the cell-centered grid with Neumaier summation.

use crate::grid::RadialGrid;

/// Running sum with a separate compensation term (Neumaier's variant of
/// Kahan summation, which also handles addends larger than the sum).
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
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

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierSum::new();
    acc.extend(values);
    acc.value()
}

/// `sum_i values[i] * h`, i.e. the midpoint rule on `[0, r_max]`.
pub fn quadrature(values: &[f64], grid: &RadialGrid) -> f64 {
    debug_assert_eq!(values.len(), grid.len());
    compensated_sum(values.iter().copied()) * grid.spacing()
}
