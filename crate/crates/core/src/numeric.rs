//! Small floating-point helpers shared by the product and series code.

use std::ops::AddAssign;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for CompensatedSum {
    fn add_assign(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s += x;
        }
        s
    }
}

/// `p^(-e)`, flushing to zero once the result is certainly subnormal.
pub fn inv_pow(p: u64, e: u64) -> f64 {
    if e == 0 {
        return 1.0;
    }
    if e > 1100 {
        return 0.0;
    }
    (p as f64).powi(-(e as i32))
}

/// A value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Bounded {
    pub value: f64,
    pub error: f64,
}

impl Bounded {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error
    }

    /// `1/x`, assuming the bracket stays away from zero.
    pub fn recip(self) -> Self {
        let v = 1.0 / self.value;
        let worst = 1.0 / (self.value.abs() - self.error);
        Self {
            value: v,
            error: (worst - v.abs()).abs() + v.abs() * f64::EPSILON,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        let v = self.value * other.value;
        Self {
            value: v,
            error: self.value.abs() * other.error
                + other.value.abs() * self.error
                + self.error * other.error
                + v.abs() * f64::EPSILON,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            error: self.error * c.abs() + (self.value * c).abs() * f64::EPSILON,
        }
    }

    pub fn add(self, other: Self) -> Self {
        let v = self.value + other.value;
        Self {
            value: v,
            error: self.error + other.error + v.abs() * f64::EPSILON,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s += 1.0;
        for _ in 0..10_000 {
            s += 1e-17;
        }
        s += -1.0;
        assert!((s.value() - 1e-13).abs() < 1e-25);
    }

    #[test]
    fn inv_pow_edges() {
        assert_eq!(inv_pow(2, 0), 1.0);
        assert_eq!(inv_pow(2, 3), 0.125);
        assert_eq!(inv_pow(3, 5000), 0.0);
    }

    #[test]
    fn bounded_recip_covers_interval() {
        let b = Bounded { value: 2.0, error: 0.1 };
        let r = b.recip();
        assert!(r.lower() <= 1.0 / 2.1 && r.upper() >= 1.0 / 1.9);
    }
}
