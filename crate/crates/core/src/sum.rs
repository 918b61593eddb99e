//! Deterministic floating-point reductions.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
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

impl std::iter::FromIterator<f64> for Compensated {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut c = Compensated::new();
        for x in iter {
            c.add(x);
        }
        c
    }
}

/// Compensated sum of a slice in index order.
pub fn ksum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<Compensated>().value()
}

/// Pairwise sum in a fixed tree shape; the result depends only on the slice.
pub fn pairwise(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        return ksum(xs);
    }
    let mid = xs.len() / 2;
    pairwise(&xs[..mid]) + pairwise(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_recovers_small_terms() {
        let mut xs = vec![1.0e16];
        xs.extend(std::iter::repeat(1.0).take(1000));
        xs.push(-1.0e16);
        assert_eq!(ksum(&xs), 1000.0);
    }

    #[test]
    fn pairwise_is_order_fixed() {
        let xs: Vec<f64> = (1..10_000).map(|i| 1.0 / i as f64).collect();
        assert_eq!(pairwise(&xs), pairwise(&xs.clone()));
        assert!((pairwise(&xs) - ksum(&xs)).abs() < 1e-12);
    }
}
