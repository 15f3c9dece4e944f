//! Closed-form reference functions, a brute-force range oracle and the
//! table reproduction harness.

mod oracle;
mod tables;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{BlackBoxModel, FeatureSpace, Instance, UtilityMapping};

pub use oracle::{oracle_ci, oracle_range, MIN_ORACLE_RESOLUTION};
pub use tables::{reproduce_table, Cell, CellStatus, RowReport, TableReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceFunction {
    /// `y = 0.3 x1 + 0.7 x2` on `[0,1]^2`.
    Linear,
    /// `y = x1 + x2` on boolean inputs.
    Sum,
    Or,
    Xor,
    /// Step/plateau stand-in for a rule-based model on `[0,1]^2`:
    ///
    /// | region                  | y   |
    /// |-------------------------|-----|
    /// | x1 >= 0.5 and x2 >= 0.5 | 1.0 |
    /// | x1 >= 0.5, x2 < 0.5     | 0.6 |
    /// | x1 < 0.5, x2 >= 0.5     | 0.4 |
    /// | otherwise               | 0.2 |
    Rules,
    /// `y = sin(r) / r`, `r = sqrt(x1^2 + x2^2)` on `[-10,10]^2`, 1 at the origin.
    Sombrero,
}

impl ReferenceFunction {
    pub const ALL: [ReferenceFunction; 6] = [
        ReferenceFunction::Linear,
        ReferenceFunction::Sum,
        ReferenceFunction::Or,
        ReferenceFunction::Xor,
        ReferenceFunction::Rules,
        ReferenceFunction::Sombrero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReferenceFunction::Linear => "linear",
            ReferenceFunction::Sum => "sum",
            ReferenceFunction::Or => "or",
            ReferenceFunction::Xor => "xor",
            ReferenceFunction::Rules => "rules",
            ReferenceFunction::Sombrero => "sombrero",
        }
    }

    pub fn is_boolean(self) -> bool {
        matches!(
            self,
            ReferenceFunction::Sum | ReferenceFunction::Or | ReferenceFunction::Xor
        )
    }

    pub fn space(self) -> FeatureSpace {
        match self {
            ReferenceFunction::Sum | ReferenceFunction::Or | ReferenceFunction::Xor => {
                FeatureSpace::binary(2)
            }
            ReferenceFunction::Linear | ReferenceFunction::Rules => {
                FeatureSpace::numeric(&[(0.0, 1.0), (0.0, 1.0)])
            }
            ReferenceFunction::Sombrero => FeatureSpace::numeric(&[(-10.0, 10.0), (-10.0, 10.0)]),
        }
        .expect("reference spaces are valid")
    }

    /// Exact output range over the whole input domain.
    pub fn output_range(self) -> (f64, f64) {
        match self {
            ReferenceFunction::Linear | ReferenceFunction::Or | ReferenceFunction::Xor => {
                (0.0, 1.0)
            }
            ReferenceFunction::Sum => (0.0, 2.0),
            ReferenceFunction::Rules => (0.2, 1.0),
            ReferenceFunction::Sombrero => (sombrero_minimum(), 1.0),
        }
    }

    /// Utility mapping for the output: identity when the output already
    /// lives in `[0, 1]`, otherwise the affine map of the output range.
    pub fn utility(self) -> UtilityMapping {
        let (lo, hi) = self.output_range();
        if lo >= 0.0 && hi <= 1.0 {
            UtilityMapping::Identity
        } else {
            UtilityMapping::from_range(lo, hi).expect("non-degenerate output range")
        }
    }

    /// Evaluates the closed form. Boolean inputs are 0/1.
    pub fn eval(self, x: &[f64]) -> f64 {
        let (a, b) = (x[0], x[1]);
        match self {
            ReferenceFunction::Linear => 0.3 * a + 0.7 * b,
            ReferenceFunction::Sum => a + b,
            ReferenceFunction::Or => f64::from(a != 0.0 || b != 0.0),
            ReferenceFunction::Xor => f64::from((a != 0.0) != (b != 0.0)),
            ReferenceFunction::Rules => match (a >= 0.5, b >= 0.5) {
                (true, true) => 1.0,
                (true, false) => 0.6,
                (false, true) => 0.4,
                (false, false) => 0.2,
            },
            ReferenceFunction::Sombrero => sinc((a * a + b * b).sqrt()),
        }
    }
}

impl fmt::Display for ReferenceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReferenceFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown builtin model `{s}` (expected one of linear, sum, or, xor, rules, sombrero)"
                ))
            })
    }
}

impl BlackBoxModel for ReferenceFunction {
    fn output_names(&self) -> Vec<String> {
        vec!["y".into()]
    }

    fn evaluate(&self, batch: &[Instance]) -> Result<Vec<Vec<f64>>> {
        Ok(batch
            .iter()
            .map(|x| vec![self.eval(&x.to_f64_vec())])
            .collect())
    }
}

pub(crate) fn sinc(r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        r.sin() / r
    }
}

/// Global minimum of `sin(r)/r`, attained at the first positive root of
/// `tan r = r`.
pub fn sombrero_minimum() -> f64 {
    // Newton on g(r) = r cos r - sin r, g'(r) = -r sin r
    let mut r: f64 = 4.49;
    for _ in 0..50 {
        let step = (r * r.cos() - r.sin()) / (-r * r.sin());
        r -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    sinc(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_tables() {
        let corners = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let or: Vec<f64> = corners
            .iter()
            .map(|c| ReferenceFunction::Or.eval(c))
            .collect();
        let xor: Vec<f64> = corners
            .iter()
            .map(|c| ReferenceFunction::Xor.eval(c))
            .collect();
        let sum: Vec<f64> = corners
            .iter()
            .map(|c| ReferenceFunction::Sum.eval(c))
            .collect();
        assert_eq!(or, vec![0.0, 1.0, 1.0, 1.0]);
        assert_eq!(xor, vec![0.0, 1.0, 1.0, 0.0]);
        assert_eq!(sum, vec![0.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn sombrero_values() {
        assert_eq!(ReferenceFunction::Sombrero.eval(&[0.0, 0.0]), 1.0);
        let y = ReferenceFunction::Sombrero.eval(&[-7.5, -1.5]);
        assert!((y - 0.128).abs() < 5e-4);
        let min = sombrero_minimum();
        assert!((min + 0.217234).abs() < 1e-6);
        // dense scan never goes below the analytic minimum
        let scan = (0..200_000)
            .map(|k| sinc(k as f64 * 1e-4))
            .fold(f64::INFINITY, f64::min);
        assert!(scan >= min - 1e-15 && scan - min < 1e-9);
    }

    #[test]
    fn parse_names() {
        for f in ReferenceFunction::ALL {
            assert_eq!(f.name().parse::<ReferenceFunction>().unwrap(), f);
        }
        assert!("nope".parse::<ReferenceFunction>().is_err());
    }

    #[test]
    fn utilities_cover_output_ranges() {
        for f in ReferenceFunction::ALL {
            let (lo, hi) = f.output_range();
            let u = f.utility();
            assert!(u.apply(lo).unwrap().abs() < 1e-12 || lo >= 0.0);
            assert!(u.apply(hi).is_ok());
        }
    }
}
