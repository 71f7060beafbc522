//! Regular operator-monotone functions and the scalar means they generate.
//!
//! Every function here is normalized (`f(1) = 1`), symmetric
//! (`f(t) = t f(1/t)`) and regular (`f(0) > 0`). The mean generated by `f`
//! is `m^f(x, y) = x f(y/x)`, extended to the boundary by its limits:
//! `m^f(x, 0) = x f(0)` and `m^f(0, 0) = 0`.
//!
//! Each regular `f` has a non-regular partner
//!
//! ```text
//! f~(x) = ((x + 1) - (x - 1)^2 f(0) / f(x)) / 2
//! ```
//!
//! which for the catalog members has the closed forms `sqrt(x)` (WY),
//! `2x / (x + 1)` (SLD) and `(x^a + x^(1-a)) / 2` (WYD family).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Smallest admissible distance of the WYD parameter from 0 and 1.
pub const ALPHA_MARGIN: f64 = 1e-3;

/// Below this |ln t| the WYD function is evaluated by its series in `ln t`.
const WYD_SERIES_RADIUS: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    WignerYanase,
    Sld,
    Wyd { alpha: f64 },
}

/// A member of the closed catalog of regular operator-monotone functions.
///
/// Addressable by string: `"wy"`, `"sld"` and `"wyd:<alpha>"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotoneFunctionSpec {
    kind: Kind,
}

impl MonotoneFunctionSpec {
    /// `f(t) = (sqrt(t) + 1)^2 / 4`, the Wigner-Yanase function.
    pub const fn wy() -> Self {
        Self { kind: Kind::WignerYanase }
    }

    /// `f(t) = (t + 1) / 2`, generator of the arithmetic mean.
    pub const fn sld() -> Self {
        Self { kind: Kind::Sld }
    }

    /// Wigner-Yanase-Dyson family
    /// `f_a(t) = a(1-a) (t-1)^2 / ((t^a - 1)(t^(1-a) - 1))`.
    pub fn wyd(alpha: f64) -> Result<Self> {
        if !(ALPHA_MARGIN..=1.0 - ALPHA_MARGIN).contains(&alpha) {
            return Err(Error::Domain(format!(
                "wyd parameter {alpha} outside [{ALPHA_MARGIN}, {}]",
                1.0 - ALPHA_MARGIN
            )));
        }
        Ok(Self { kind: Kind::Wyd { alpha } })
    }

    /// Representative members used by sweeps and property suites.
    pub fn catalog() -> Vec<Self> {
        vec![
            Self::wy(),
            Self::sld(),
            Self { kind: Kind::Wyd { alpha: 0.1 } },
            Self { kind: Kind::Wyd { alpha: 0.25 } },
            Self { kind: Kind::Wyd { alpha: 0.75 } },
        ]
    }

    /// Family name: `"wy"`, `"sld"` or `"wyd-alpha"`.
    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::WignerYanase => "wy",
            Kind::Sld => "sld",
            Kind::Wyd { .. } => "wyd-alpha",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            Kind::Wyd { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// The value `f(0)`.
    pub fn f_zero(&self) -> f64 {
        match self.kind {
            Kind::WignerYanase => 0.25,
            Kind::Sld => 0.5,
            Kind::Wyd { alpha } => alpha * (1.0 - alpha),
        }
    }

    pub fn eval_f(&self, t: f64) -> Result<f64> {
        check_nonnegative("t", t)?;
        Ok(self.f(t))
    }

    pub fn eval_mean(&self, x: f64, y: f64) -> Result<f64> {
        check_nonnegative("x", x)?;
        check_nonnegative("y", y)?;
        Ok(self.mean(x, y))
    }

    pub fn eval_tilde(&self, t: f64) -> Result<f64> {
        check_nonnegative("t", t)?;
        Ok(self.tilde(t))
    }

    pub fn eval_tilde_mean(&self, x: f64, y: f64) -> Result<f64> {
        check_nonnegative("x", x)?;
        check_nonnegative("y", y)?;
        Ok(self.tilde_mean(x, y))
    }

    pub(crate) fn f(&self, t: f64) -> f64 {
        match self.kind {
            Kind::WignerYanase => {
                let s = t.sqrt() + 1.0;
                0.25 * s * s
            }
            Kind::Sld => 0.5 * (t + 1.0),
            Kind::Wyd { alpha } => wyd(alpha, t),
        }
    }

    pub(crate) fn tilde(&self, t: f64) -> f64 {
        match self.kind {
            Kind::WignerYanase => t.sqrt(),
            Kind::Sld => 2.0 * t / (t + 1.0),
            Kind::Wyd { alpha } => {
                if t == 0.0 {
                    0.0
                } else {
                    0.5 * (t.powf(alpha) + t.powf(1.0 - alpha))
                }
            }
        }
    }

    /// `m^f(x, y)` for nonnegative arguments. The larger argument is used as
    /// the base so that `f` is only ever evaluated on `[0, 1]`.
    pub(crate) fn mean(&self, x: f64, y: f64) -> f64 {
        let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
        if hi == 0.0 {
            return 0.0;
        }
        match self.kind {
            Kind::Sld => 0.5 * (x + y),
            _ => hi * self.f(lo / hi),
        }
    }

    pub(crate) fn tilde_mean(&self, x: f64, y: f64) -> f64 {
        let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
        if hi == 0.0 || lo == 0.0 {
            return 0.0;
        }
        match self.kind {
            Kind::WignerYanase => (x * y).sqrt(),
            Kind::Sld => 2.0 * x * y / (x + y),
            Kind::Wyd { .. } => hi * self.tilde(lo / hi),
        }
    }
}

fn check_nonnegative(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {v} must be finite and nonnegative")))
    }
}

/// `a(1-a)(t-1)^2 / ((t^a - 1)(t^(1-a) - 1))` written in terms of
/// `u = ln t` so the factors `t^a - 1 = expm1(a u)` keep full relative
/// precision near `t = 1`. Inside the series radius
/// `ln f = u/2 + (1 + 2a(1-a)) u^2 / 24 + O(u^4)`.
fn wyd(alpha: f64, t: f64) -> f64 {
    let beta = 1.0 - alpha;
    if t == 0.0 {
        return alpha * beta;
    }
    let d = t - 1.0;
    let u = if d.abs() < 0.5 { d.ln_1p() } else { t.ln() };
    if u.abs() < WYD_SERIES_RADIUS {
        let c = (1.0 + 2.0 * alpha * beta) / 24.0;
        return (0.5 * u + c * u * u).exp();
    }
    alpha * beta * d * d / ((alpha * u).exp_m1() * (beta * u).exp_m1())
}

impl fmt::Display for MonotoneFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::WignerYanase => f.write_str("wy"),
            Kind::Sld => f.write_str("sld"),
            Kind::Wyd { alpha } => write!(f, "wyd:{alpha}"),
        }
    }
}

impl FromStr for MonotoneFunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "wy" => Ok(Self::wy()),
            "sld" => Ok(Self::sld()),
            other => {
                let alpha = other.strip_prefix("wyd:").ok_or_else(|| Error::UnknownFunction(other.to_string()))?;
                let alpha: f64 = alpha.parse().map_err(|_| Error::UnknownFunction(other.to_string()))?;
                Self::wyd(alpha)
            }
        }
    }
}
