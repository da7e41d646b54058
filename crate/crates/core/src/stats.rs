//! Exact counting helpers shared by the statistics modules.
//!
//! Ratios are kept as raw counts so reports can print both the counts and the
//! rate, and so comparisons against published fractions stay exact. Standard
//! deviations are population (divide-by-N) throughout.

use std::fmt;
use std::ops::AddAssign;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};

/// A count out of a total, e.g. cross-lingual references out of all references.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Proportion {
    pub part: u64,
    pub whole: u64,
}

impl Proportion {
    pub fn new(part: u64, whole: u64) -> Self {
        Proportion { part, whole }
    }

    /// `None` when the denominator is zero.
    pub fn value(&self) -> Option<f64> {
        (self.whole > 0).then(|| self.part as f64 / self.whole as f64)
    }

    pub fn value_or_zero(&self) -> f64 {
        self.value().unwrap_or(0.0)
    }

    pub fn percent(&self) -> Option<f64> {
        self.value().map(|v| v * 100.0)
    }

    pub fn ratio(&self) -> Option<Ratio<u64>> {
        (self.whole > 0).then(|| Ratio::new(self.part, self.whole))
    }

    /// Exact test of `part/whole < num/den`. Undefined proportions are never below.
    pub fn is_below(&self, num: u64, den: u64) -> bool {
        self.whole > 0 && (self.part as u128) * (den as u128) < (num as u128) * (self.whole as u128)
    }

    /// Exact test of `part/whole == num/den`.
    pub fn equals(&self, num: u64, den: u64) -> bool {
        self.whole > 0 && (self.part as u128) * (den as u128) == (num as u128) * (self.whole as u128)
    }

    /// The "one in N" reading of the proportion.
    pub fn one_in(&self) -> Option<f64> {
        (self.part > 0).then(|| self.whole as f64 / self.part as f64)
    }
}

impl AddAssign for Proportion {
    fn add_assign(&mut self, rhs: Self) {
        self.part += rhs.part;
        self.whole += rhs.whole;
    }
}

impl fmt::Display for Proportion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.part, self.whole)
    }
}

/// Running moments of integer samples. Mergeable, so parallel folds agree
/// with sequential ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IntMoments {
    pub n: u64,
    pub sum: i128,
    pub sum_sq: i128,
}

impl IntMoments {
    pub fn push(&mut self, x: i64) {
        self.n += 1;
        self.sum += x as i128;
        self.sum_sq += (x as i128) * (x as i128);
    }

    pub fn merge(&mut self, other: &IntMoments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean_exact(&self) -> Option<Ratio<i128>> {
        (self.n > 0).then(|| Ratio::new(self.sum, self.n as i128))
    }

    pub fn mean(&self) -> Option<f64> {
        self.mean_exact().and_then(|r| r.to_f64())
    }

    /// Population standard deviation: sqrt(n·Σx² − (Σx)²) / n.
    pub fn sd(&self) -> Option<f64> {
        if self.n == 0 {
            return None;
        }
        let n = self.n as i128;
        let numerator = n * self.sum_sq - self.sum * self.sum;
        Some((numerator as f64).sqrt() / self.n as f64)
    }
}

impl FromIterator<i64> for IntMoments {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        let mut m = IntMoments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Mean and population standard deviation of a set of rational samples,
/// computed exactly and rounded once at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub n: u64,
    pub mean_exact: BigRational,
    pub variance_exact: BigRational,
}

impl Summary {
    pub fn from_fractions<I>(samples: I) -> Option<Summary>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let values: Vec<BigRational> = samples
            .into_iter()
            .map(|(num, den)| BigRational::new(BigInt::from(num), BigInt::from(den)))
            .collect();
        if values.is_empty() {
            return None;
        }
        let n = BigRational::from_integer(BigInt::from(values.len()));
        let mean = values.iter().fold(BigRational::zero(), |acc, v| acc + v) / &n;
        let variance = values
            .iter()
            .map(|v| {
                let d = v - &mean;
                &d * &d
            })
            .fold(BigRational::zero(), |acc, v| acc + v)
            / &n;
        Some(Summary {
            n: values.len() as u64,
            mean_exact: mean,
            variance_exact: variance,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean_exact.to_f64().unwrap_or(f64::NAN)
    }

    pub fn sd(&self) -> f64 {
        self.variance_exact.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

/// Fixed decimal rendering used by every emitted table.
pub fn fmt_fixed(value: f64, decimals: usize) -> String {
    let s = format!("{value:.decimals$}");
    // "-0.000" is noise in a diff.
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn fmt_opt(value: Option<f64>, decimals: usize) -> String {
    value.map(|v| fmt_fixed(v, decimals)).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportion_exact_comparisons() {
        let p = Proportion::new(303, 23_922);
        assert!(p.is_below(2, 100));
        assert!(!Proportion::new(2, 100).is_below(2, 100));
        assert!(Proportion::new(1, 4).equals(25, 100));
        assert_eq!(Proportion::new(0, 0).value(), None);
        assert!(!Proportion::new(0, 0).is_below(1, 1));
    }

    #[test]
    fn int_moments_match_two_pass() {
        let xs = [-1i64, 0, 0, 1, 3, -2];
        let m: IntMoments = xs.iter().copied().collect();
        let mean = xs.iter().sum::<i64>() as f64 / xs.len() as f64;
        let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert_eq!(m.mean().unwrap(), mean);
        assert!((m.sd().unwrap() - var.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn summary_of_equal_values_has_zero_sd() {
        let s = Summary::from_fractions([(1, 10), (2, 20)]).unwrap();
        assert_eq!(s.mean(), 0.1);
        assert_eq!(s.sd(), 0.0);
        assert!(Summary::from_fractions(std::iter::empty()).is_none());
    }

    #[test]
    fn negative_zero_is_printed_plainly() {
        assert_eq!(fmt_fixed(-0.0000001, 3), "0.000");
        assert_eq!(fmt_fixed(-0.02, 2), "-0.02");
    }
}
