use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2x2 game: `get(i, j)` is the payoff an `i`-player receives from a
/// `j`-player, with 1 = cooperator and 0 = defector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    pub p11: f64,
    pub p10: f64,
    pub p01: f64,
    pub p00: f64,
}

impl PayoffMatrix {
    /// Donation game: `[[b - c, -c], [b, 0]]`.
    pub fn canonical(b: f64, c: f64) -> Self {
        Self {
            p11: b - c,
            p10: -c,
            p01: b,
            p00: 0.0,
        }
    }

    pub fn general(p11: f64, p10: f64, p01: f64, p00: f64) -> Self {
        Self { p11, p10, p01, p00 }
    }

    pub fn zero() -> Self {
        Self::canonical(0.0, 0.0)
    }

    #[inline]
    pub fn get(&self, i: u8, j: u8) -> f64 {
        match (i, j) {
            (1, 1) => self.p11,
            (1, 0) => self.p10,
            (0, 1) => self.p01,
            (0, 0) => self.p00,
            _ => unreachable!("strategy labels are 0 or 1"),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.p00 == 0.0 && self.p11 == self.p01 + self.p10
    }

    /// Benefit `b = Π₀₁` of a canonical matrix.
    pub fn b(&self) -> f64 {
        self.p01
    }

    /// Cost `c = -Π₁₀` of a canonical matrix.
    pub fn c(&self) -> f64 {
        -self.p10
    }

    pub fn max_abs_entry(&self) -> f64 {
        [self.p11, self.p10, self.p01, self.p00]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn satisfies_equal_gains(&self) -> bool {
        let lhs = self.p11 - self.p10;
        let rhs = self.p01 - self.p00;
        (lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs()))
    }

    pub fn require_canonical(&self) -> Result<()> {
        if self.is_canonical() {
            Ok(())
        } else {
            Err(Error::UnsupportedPayoff(format!(
                "{self} is not of the form [[b-c,-c],[b,0]]; reduce it first"
            )))
        }
    }
}

impl fmt::Display for PayoffMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{},{}", self.p11, self.p10, self.p01, self.p00)
    }
}

/// Parses `"p11,p10;p01,p00"`.
impl FromStr for PayoffMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("payoff {s:?} is not of the form \"a,b;c,d\""));
        let rows: Vec<&str> = s.split(';').collect();
        if rows.len() != 2 {
            return Err(bad());
        }
        let mut vals = Vec::with_capacity(4);
        for row in rows {
            let cells: Vec<&str> = row.split(',').collect();
            if cells.len() != 2 {
                return Err(bad());
            }
            for cell in cells {
                vals.push(cell.trim().parse::<f64>().map_err(|_| bad())?);
            }
        }
        Ok(Self::general(vals[0], vals[1], vals[2], vals[3]))
    }
}

/// Result of mapping an equal-gains-from-switching game onto the canonical
/// donation game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedPayoff {
    pub payoff: PayoffMatrix,
    pub w: f64,
}

/// Subtracts `Π*₀₀` from every entry and rescales the intensity of selection
/// to `w / (1 + kΠ*₀₀w)`, which leaves death-birth transition probabilities
/// unchanged on a k-regular graph.
pub fn reduce_equal_gains(pi_star: &PayoffMatrix, w: f64, k: usize) -> Result<ReducedPayoff> {
    if !pi_star.satisfies_equal_gains() {
        return Err(Error::UnsupportedPayoff(format!(
            "{pi_star} violates equal gains from switching (Π11-Π10 != Π01-Π00)"
        )));
    }
    let scale = 1.0 + k as f64 * pi_star.p00 * w;
    if scale <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "1 + kΠ00·w = {scale} must be positive"
        )));
    }
    let d = pi_star.p00;
    let mut payoff = PayoffMatrix::general(pi_star.p11 - d, pi_star.p10 - d, pi_star.p01 - d, 0.0);
    // Force the exact canonical identity so downstream checks see it.
    payoff.p11 = payoff.p01 + payoff.p10;
    Ok(ReducedPayoff { payoff, w: w / scale })
}
