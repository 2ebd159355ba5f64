//! Compensated summation of complex sequences.

use num_complex::Complex64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Neumaier-style accumulator carrying the rounding error of each addition.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Complex64) {
        let (s, e) = two_sum(self.re.0, v.re);
        self.re = (s, self.re.1 + e);
        let (s, e) = two_sum(self.im.0, v.im);
        self.im = (s, self.im.1 + e);
    }

    pub fn sum(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Sums in order of decreasing magnitude with compensation.
pub fn sum_descending(terms: &[Complex64]) -> Complex64 {
    let mut idx: Vec<usize> = (0..terms.len()).collect();
    idx.sort_by(|&a, &b| terms[b].norm().total_cmp(&terms[a].norm()).then(a.cmp(&b)));
    let mut acc = NeumaierSum::new();
    for i in idx {
        acc.add(terms[i]);
    }
    acc.sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_addend() {
        let mut s = NeumaierSum::new();
        s.add(Complex64::new(1.0, -1e16));
        s.add(Complex64::new(1e-16, 1.0));
        s.add(Complex64::new(-1.0, 1e16));
        assert_eq!(s.sum(), Complex64::new(1e-16, 1.0));
    }

    #[test]
    fn descending_order_is_deterministic() {
        let t = vec![
            Complex64::new(1e-3, 0.0),
            Complex64::new(1e10, 0.0),
            Complex64::new(-1e10, 0.0),
            Complex64::new(1e-3, 0.0),
        ];
        assert_eq!(sum_descending(&t), Complex64::new(2e-3, 0.0));
    }
}
