use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// A nonnegative multiple of one half, stored doubled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt(u32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_doubled(doubled: u32) -> HalfInt {
        HalfInt(doubled)
    }

    pub const fn from_int(n: u32) -> HalfInt {
        HalfInt(2 * n)
    }

    pub const fn doubled(self) -> u32 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn abs_diff(self, other: HalfInt) -> HalfInt {
        HalfInt(self.0.abs_diff(other.0))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;

    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}
