//! Weights `f` with closed-form derivatives and antiderivatives.
//!
//! Every family here is smooth with derivatives of all orders, and all of
//! them have finite moments of every order along a Gaussian path, so any
//! order of derivative may be requested.
//!
//! Textual form: `one`, `poly:c0,c1,...` (for `c0 + c1 x + ...`), `cos:a`,
//! `sin:a` (for `cos(a x)`, `sin(a x)`) and `exp:a` (for `exp(a x)`,
//! `|a| ≤ 1`). A bare `cos`, `sin` or `exp` means `a = 1`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction {
    One,
    /// Coefficients in increasing degree.
    Polynomial(Vec<f64>),
    Cosine(f64),
    Sine(f64),
    Exp(f64),
}

impl WeightFunction {
    /// Parse the textual form described in the module docs.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (kind, arg) = match spec.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (spec, None),
        };
        let number = |s: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::WeightSpec(format!("`{s}` is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::WeightSpec(format!("`{s}` is not finite")))
            }
        };
        let w = match (kind, arg) {
            ("one", None) => WeightFunction::One,
            ("poly", Some(list)) => {
                let coeffs = list
                    .split(',')
                    .map(|c| number(c.trim()))
                    .collect::<Result<Vec<_>>>()?;
                WeightFunction::Polynomial(coeffs)
            }
            ("cos", a) => WeightFunction::Cosine(a.map_or(Ok(1.0), number)?),
            ("sin", a) => WeightFunction::Sine(a.map_or(Ok(1.0), number)?),
            ("exp", a) => WeightFunction::Exp(a.map_or(Ok(1.0), number)?),
            _ => {
                return Err(Error::WeightSpec(format!(
                    "unknown weight `{spec}`; expected one, poly:c0,c1,.., cos:a, sin:a or exp:a"
                )))
            }
        };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<()> {
        match self {
            WeightFunction::Exp(a) if a.abs() > 1.0 => Err(Error::WeightSpec(format!(
                "exp rate {a} is outside [-1, 1]"
            ))),
            WeightFunction::Polynomial(c) if c.is_empty() => {
                Err(Error::WeightSpec(String::from("empty polynomial")))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// `f^{(order)}(x)`.
    pub fn derivative(&self, order: u32, x: f64) -> f64 {
        match self {
            WeightFunction::One => {
                if order == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            WeightFunction::Polynomial(c) => {
                let k = order as usize;
                if k >= c.len() {
                    return 0.0;
                }
                // Horner on the differentiated coefficients i!/(i-k)! c_i.
                let mut acc = 0.0;
                for i in (k..c.len()).rev() {
                    let falling = ((i - k + 1)..=i).fold(1.0, |p, j| p * j as f64);
                    acc = acc * x + falling * c[i];
                }
                acc
            }
            WeightFunction::Cosine(a) => {
                libm::pow(*a, order as f64) * libm::cos(a * x + order as f64 * FRAC_PI_2)
            }
            WeightFunction::Sine(a) => {
                libm::pow(*a, order as f64) * libm::sin(a * x + order as f64 * FRAC_PI_2)
            }
            WeightFunction::Exp(a) => libm::pow(*a, order as f64) * libm::exp(a * x),
        }
    }

    /// `F(x) = ∫_0^x f(y) dy`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        match self {
            WeightFunction::One => x,
            WeightFunction::Polynomial(c) => {
                let mut acc = 0.0;
                for (i, ci) in c.iter().enumerate().rev() {
                    acc = acc * x + ci / (i + 1) as f64;
                }
                acc * x
            }
            WeightFunction::Cosine(a) if *a == 0.0 => x,
            WeightFunction::Cosine(a) => libm::sin(a * x) / a,
            WeightFunction::Sine(a) if *a == 0.0 => 0.0,
            WeightFunction::Sine(a) => (1.0 - libm::cos(a * x)) / a,
            WeightFunction::Exp(a) if *a == 0.0 => x,
            WeightFunction::Exp(a) => libm::expm1(a * x) / a,
        }
    }

    /// Highest derivative order available in closed form.
    pub fn max_derivative(&self) -> u32 {
        u32::MAX
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::One => f.write_str("one"),
            WeightFunction::Polynomial(c) => {
                f.write_str("poly:")?;
                for (i, ci) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{ci}")?;
                }
                Ok(())
            }
            WeightFunction::Cosine(a) => write!(f, "cos:{a}"),
            WeightFunction::Sine(a) => write!(f, "sin:{a}"),
            WeightFunction::Exp(a) => write!(f, "exp:{a}"),
        }
    }
}

impl core::str::FromStr for WeightFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
