//! Simpson-type quadrature error bounds for functions whose third derivative,
//! raised to a power, is m-convex, s-convex or a P-function.
//!
//! The crate is organised bottom-up:
//!
//! - [`expr`] parses one-variable function text and evaluates it, and
//!   [`jet`] carries truncated Taylor series so `f'''` and `f''''` come for free.
//! - [`quad`] is the reference integrator and computes the Simpson defect
//!   `∫ f − ((hi−lo)/6)[f(lo) + 4 f(mid) + f(hi)]`.
//! - [`kernel`] holds the piecewise cubic Peano kernel, its Beta-function
//!   moments and the numerical check of the kernel identity.
//! - [`convexity`] certifies the hypothesis classes on deterministic grids.
//! - [`bounds`] evaluates every right-hand side and packages it against the
//!   measured defect.

pub mod bounds;
pub mod convexity;
mod error;
pub mod expr;
pub mod gamma;
pub mod jet;
pub mod kernel;
pub mod quad;

pub use error::{Error, Result};
pub use expr::Expr;
pub use jet::Jet4;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Which interior node the three-point rule on `[a, m·b]` samples.
///
/// `Printed` uses `(a + b)/2` and `Corrected` uses `(a + m·b)/2`, the true
/// midpoint of the integration range. The two coincide at `m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MidpointVariant {
    Printed,
    Corrected,
}

impl MidpointVariant {
    pub const ALL: [MidpointVariant; 2] = [MidpointVariant::Printed, MidpointVariant::Corrected];

    /// Interior node for the rule on `[a, m·b]`.
    pub fn node(self, a: f64, b: f64, m: f64) -> f64 {
        match self {
            MidpointVariant::Printed => 0.5 * (a + b),
            MidpointVariant::Corrected => 0.5 * (a + m * b),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MidpointVariant::Printed => "printed",
            MidpointVariant::Corrected => "corrected",
        }
    }
}

impl fmt::Display for MidpointVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MidpointVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(MidpointVariant::Printed),
            "corrected" => Ok(MidpointVariant::Corrected),
            other => Err(Error::InvalidParameter(format!(
                "unknown midpoint variant `{other}` (expected printed|corrected)"
            ))),
        }
    }
}
