//! Smooth cutoff functions used to weight the projector series.
//!
//! Two admissible profiles are provided:
//!
//! * [`Cutoff::TypeA`] is a low-pass window: `1` on `[0, 1]`, a `C^∞` decay on
//!   `[1, 2]`, `0` beyond.
//! * [`Cutoff::TypeB`] is a band-pass window supported on `[1/2, 2]` and built
//!   from `sin`/`cos` of one symmetric transition, so that
//!   `â(t)² + â(2t)² = 1` on `[1/2, 1]` holds to rounding.
//!
//! [`Cutoff::Step`] is the indicator of `[0, 1]`. It is not admissible (not
//! smooth) and only exists so that the partial-sum kernel can be expressed
//! through the same machinery.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cutoff {
    #[serde(rename = "a")]
    TypeA,
    #[serde(rename = "b")]
    TypeB,
    Step,
}

/// `exp(-1/s)` for `s > 0`, else `0`. Underflows to exactly `0` for tiny `s`.
#[inline]
fn bump_edge(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth monotone transition from 0 (at `s <= 0`) to 1 (at `s >= 1`),
/// with `transition(s) + transition(1 - s) = 1`.
#[inline]
fn transition(s: f64) -> f64 {
    let a = bump_edge(s);
    let b = bump_edge(1.0 - s);
    a / (a + b)
}

pub fn make_type_a() -> Cutoff {
    Cutoff::TypeA
}

pub fn make_type_b() -> Cutoff {
    Cutoff::TypeB
}

impl Cutoff {
    /// Value of `â(t)`, `t >= 0`. Always in `[0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Cutoff::TypeA => {
                if t <= 1.0 {
                    1.0
                } else if t >= 2.0 {
                    0.0
                } else {
                    let up = bump_edge(2.0 - t);
                    up / (bump_edge(t - 1.0) + up)
                }
            }
            Cutoff::TypeB => {
                if t <= 0.5 || t >= 2.0 {
                    0.0
                } else if t <= 1.0 {
                    (FRAC_PI_2 * transition(2.0 * t - 1.0)).sin()
                } else {
                    (FRAC_PI_2 * transition(t - 1.0)).cos()
                }
            }
            Cutoff::Step => {
                if t <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Closed support `[lo, hi]` of the function.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Cutoff::TypeA => (0.0, 2.0),
            Cutoff::TypeB => (0.5, 2.0),
            Cutoff::Step => (0.0, 1.0),
        }
    }

    /// Whether the profile is one of the smooth admissible kinds.
    pub fn is_admissible(&self) -> bool {
        !matches!(self, Cutoff::Step)
    }

    pub fn value_at_zero(&self) -> f64 {
        self.eval(0.0)
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cutoff::TypeA => "a",
            Cutoff::TypeB => "b",
            Cutoff::Step => "step",
        })
    }
}

impl FromStr for Cutoff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "type-a" | "typea" => Ok(Cutoff::TypeA),
            "b" | "type-b" | "typeb" => Ok(Cutoff::TypeB),
            "step" => Ok(Cutoff::Step),
            other => Err(Error::InvalidParameter(format!("unknown cutoff kind '{other}'"))),
        }
    }
}
