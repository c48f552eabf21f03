//! Exact utility arithmetic.
//!
//! External utilities are decimals. A database fixes a scale `10^d` (the
//! largest number of decimal places in its table) and every q-item utility
//! is stored as an integer multiple of `10^-d`, so all mining arithmetic is
//! integer arithmetic.

use std::fmt;

use rust_decimal::Decimal;

/// A utility value in scaled integer units of the owning database.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Utility(pub u128);

impl Utility {
    pub const ZERO: Utility = Utility(0);

    pub fn raw(self) -> u128 {
        self.0
    }

    /// Converts back to a decimal given the database's number of decimal places.
    pub fn to_decimal(self, decimals: u32) -> Option<Decimal> {
        let raw = i128::try_from(self.0).ok()?;
        Decimal::try_from_i128_with_scale(raw, decimals)
            .ok()
            .map(|d| d.normalize())
    }

    pub fn display(self, decimals: u32) -> UtilityDisplay {
        UtilityDisplay {
            value: self,
            decimals,
        }
    }
}

impl std::ops::Add for Utility {
    type Output = Utility;

    fn add(self, rhs: Utility) -> Utility {
        Utility(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for Utility {
    fn add_assign(&mut self, rhs: Utility) {
        self.0 += rhs.0;
    }
}

impl std::iter::Sum for Utility {
    fn sum<I: Iterator<Item = Utility>>(iter: I) -> Utility {
        iter.fold(Utility::ZERO, |a, b| a + b)
    }
}

/// Formats a utility as a plain decimal (`66`, `5.2`).
pub struct UtilityDisplay {
    value: Utility,
    decimals: u32,
}

impl fmt::Display for UtilityDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value.to_decimal(self.decimals) {
            Some(d) => write!(f, "{d}"),
            None if self.decimals == 0 => write!(f, "{}", self.value.0),
            None => write!(f, "{}e-{}", self.value.0, self.decimals),
        }
    }
}

/// A resolved low-utility threshold.
///
/// `cutoff` is `floor(value * 10^decimals)`; since utilities are integers in
/// the same units, `u <= value` iff `u <= cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Threshold {
    value: Decimal,
    cutoff: u128,
}

impl Threshold {
    pub fn new(value: Decimal, decimals: u32) -> Threshold {
        let cutoff = if value.is_sign_negative() {
            0
        } else {
            let scale = Decimal::from_i128_with_scale(10i128.pow(decimals), 0);
            match value.checked_mul(scale) {
                Some(scaled) => {
                    let floor = scaled.floor();
                    u128::try_from(floor.mantissa()).unwrap_or(u128::MAX)
                        / 10u128.pow(floor.scale())
                }
                None => u128::MAX,
            }
        };
        Threshold { value, cutoff }
    }

    /// A threshold directly in scaled units.
    pub fn from_raw(cutoff: u128) -> Threshold {
        Threshold {
            value: Decimal::from_i128_with_scale(i128::try_from(cutoff).unwrap_or(i128::MAX), 0),
            cutoff,
        }
    }

    pub fn value(&self) -> Decimal {
        self.value
    }

    pub fn cutoff(&self) -> Utility {
        Utility(self.cutoff)
    }

    /// `u <= minUtil`.
    pub fn within(&self, u: Utility) -> bool {
        u.0 <= self.cutoff
    }

    /// `0 < u <= minUtil`: the LUSP condition.
    pub fn admits(&self, u: Utility) -> bool {
        u.0 > 0 && u.0 <= self.cutoff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    #[test]
    fn cutoff_floors_fractional_thresholds() {
        let t = Threshold::new(Decimal::from_str("5.2").unwrap(), 0);
        assert_eq!(t.cutoff(), Utility(5));
        assert!(t.within(Utility(5)));
        assert!(!t.within(Utility(6)));

        let t = Threshold::new(Decimal::from_str("5.2").unwrap(), 1);
        assert_eq!(t.cutoff(), Utility(52));
    }

    #[test]
    fn admits_excludes_zero() {
        let t = Threshold::new(Decimal::from(3), 0);
        assert!(!t.admits(Utility(0)));
        assert!(t.admits(Utility(3)));
    }

    #[test]
    fn display_trims() {
        assert_eq!(Utility(66).display(0).to_string(), "66");
        assert_eq!(Utility(52).display(1).to_string(), "5.2");
        assert_eq!(Utility(500).display(2).to_string(), "5");
    }
}
