//! Configurations, payoffs, fitness and the exact transition rates of the
//! voter, death-birth and imitation chains.
//!
//! All three chains share the same shape: from `η` the chain moves to the
//! single-site flip `η^x` with probability `(λ/N)·cʷ(x, η)` and otherwise
//! stays put. Only the flip rate `cʷ` and the constant `λ` depend on the
//! update rule.

mod config;
mod payoff;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use config::Config;
pub use payoff::{reduce_equal_gains, PayoffMatrix, ReducedPayoff};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Voter,
    DeathBirth,
    Imitation,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Voter, Rule::DeathBirth, Rule::Imitation];

    /// The rule-specific `λ` that makes `(λ/N)cʷ` a transition probability.
    pub fn lambda(self, k: usize) -> f64 {
        match self {
            Rule::Voter | Rule::DeathBirth => 1.0,
            Rule::Imitation => k as f64 / (k as f64 + 1.0),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Rule::Voter => "voter",
            Rule::DeathBirth => "db",
            Rule::Imitation => "im",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "voter" | "v" => Ok(Rule::Voter),
            "db" | "death-birth" | "deathbirth" => Ok(Rule::DeathBirth),
            "im" | "imitation" => Ok(Rule::Imitation),
            other => Err(Error::Parse(format!(
                "unknown update rule {other:?} (expected voter, db or im)"
            ))),
        }
    }
}

/// Largest admissible intensity of selection: `0.9 / (1 + k·max|Πᵢⱼ|)`.
/// Below it every fitness value is at least `0.1·(1 - w)`.
pub fn w_max(payoff: &PayoffMatrix, k: usize) -> f64 {
    0.9 / (1.0 + k as f64 * payoff.max_abs_entry())
}

/// Update rule, intensity of selection and payoff of one chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub rule: Rule,
    pub w: f64,
    pub lambda: f64,
    pub payoff: PayoffMatrix,
}

impl ChainSpec {
    /// Validates `0 <= w < w_max(payoff, k)`.
    pub fn new(rule: Rule, w: f64, payoff: PayoffMatrix, k: usize) -> Result<Self> {
        if !(w >= 0.0) {
            return Err(Error::OutOfRange(format!("intensity of selection must be >= 0, got {w}")));
        }
        Self::signed(rule, w, payoff, k)
    }

    /// Like [`ChainSpec::new`] but admits small negative `w`, which central
    /// differences in `w` need. Requires `|w| < w_max`.
    pub(crate) fn signed(rule: Rule, w: f64, payoff: PayoffMatrix, k: usize) -> Result<Self> {
        let bound = w_max(&payoff, k);
        if !w.is_finite() || w.abs() >= bound {
            return Err(Error::WMaxViolation { w, w_max: bound });
        }
        Ok(Self {
            rule,
            w,
            lambda: rule.lambda(k),
            payoff,
        })
    }

    /// Same chain with `λ` replaced. Fixation probabilities do not depend on
    /// `λ`; this exists to check exactly that.
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::OutOfRange(format!("λ must lie in (0, 1], got {lambda}")));
        }
        self.lambda = lambda;
        Ok(self)
    }
}

/// Counts of cooperating and defecting neighbors of `x`.
#[inline]
fn neighbor_counts(g: &Graph, eta: &Config, x: usize) -> (usize, usize) {
    let ones = g.neighbors(x).iter().filter(|&&y| eta.get(y)).count();
    (ones, g.degree() - ones)
}

/// Voter flip rate: fraction of neighbors disagreeing with `x`.
pub fn voter_rate(g: &Graph, eta: &Config, x: usize) -> f64 {
    let (n1, n0) = neighbor_counts(g, eta, x);
    let disagree = if eta.get(x) { n0 } else { n1 };
    disagree as f64 / g.degree() as f64
}

#[inline]
fn fitness_value(g: &Graph, eta: &Config, payoff: &PayoffMatrix, w: f64, i: u8, x: usize) -> f64 {
    let (n1, n0) = neighbor_counts(g, eta, x);
    (1.0 - w) + w * (payoff.get(i, 1) * n1 as f64 + payoff.get(i, 0) * n0 as f64)
}

/// Fitness `ρᵢ(x) = (1 - w) + w(Πᵢ₁n₁(x) + Πᵢ₀n₀(x))` of an `i`-player at `x`.
pub fn fitness(g: &Graph, eta: &Config, spec: &ChainSpec, i: u8, x: usize) -> Result<f64> {
    let rho = fitness_value(g, eta, &spec.payoff, spec.w, i, x);
    if rho > 0.0 {
        Ok(rho)
    } else {
        Err(Error::WMaxViolation {
            w: spec.w,
            w_max: w_max(&spec.payoff, g.degree()),
        })
    }
}

/// Flip rate `cʷ(x, η)`.
///
/// Death-birth: `x` dies and the neighbors compete for the slot with weights
/// equal to their fitness; the rate is the winning weight of the opposite
/// type. Imitation: as death-birth but `x` itself also competes, and the
/// result is scaled by `(k+1)/k` so that `(λ/N)cʷ` with `λ = k/(k+1)` is the
/// transition probability.
pub fn update_rate(g: &Graph, eta: &Config, spec: &ChainSpec, x: usize) -> f64 {
    let own = eta.value(x);
    match spec.rule {
        Rule::Voter => voter_rate(g, eta, x),
        Rule::DeathBirth | Rule::Imitation => {
            let target = 1 - own;
            let mut winning = 0.0;
            let mut total = 0.0;
            for &y in g.neighbors(x) {
                let t = eta.value(y);
                let rho = fitness_value(g, eta, &spec.payoff, spec.w, t, y);
                total += rho;
                if t == target {
                    winning += rho;
                }
            }
            if winning == 0.0 {
                return 0.0;
            }
            if spec.rule == Rule::DeathBirth {
                winning / total
            } else {
                let k = g.degree() as f64;
                total += fitness_value(g, eta, &spec.payoff, spec.w, own, x);
                (winning * (k + 1.0)) / (total * k)
            }
        }
    }
}

/// One-step law from `η`: flip probabilities per vertex plus the holding mass.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    /// `(x, P(η, η^x))` for every vertex with a positive flip probability.
    pub flips: Vec<(usize, f64)>,
    pub stay: f64,
}

impl StepDistribution {
    pub fn total(&self) -> f64 {
        self.stay + self.flips.iter().map(|&(_, p)| p).sum::<f64>()
    }
}

pub fn step_distribution(g: &Graph, eta: &Config, spec: &ChainSpec) -> StepDistribution {
    let scale = spec.lambda / g.n_vertices() as f64;
    let flips: Vec<(usize, f64)> = (0..g.n_vertices())
        .filter_map(|x| {
            let r = update_rate(g, eta, spec, x);
            (r > 0.0).then_some((x, scale * r))
        })
        .collect();
    let stay = 1.0 - flips.iter().map(|&(_, p)| p).sum::<f64>();
    assert!(stay >= -1e-12, "negative holding mass {stay}: λ/N scaling is broken");
    StepDistribution {
        flips,
        stay: stay.max(0.0),
    }
}

/// Neighborhood densities around a vertex: `fᵢ` over neighbors and `fᵢⱼ` over
/// two-step walks `x ~ y ~ z` (with `z = x` allowed).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalFreqs {
    pub f1: f64,
    pub f0: f64,
    pub f11: f64,
    pub f10: f64,
    pub f01: f64,
    pub f00: f64,
}

impl LocalFreqs {
    pub fn f(&self, i: u8) -> f64 {
        if i == 1 {
            self.f1
        } else {
            self.f0
        }
    }

    pub fn f2(&self, i: u8, j: u8) -> f64 {
        match (i, j) {
            (1, 1) => self.f11,
            (1, 0) => self.f10,
            (0, 1) => self.f01,
            _ => self.f00,
        }
    }
}

pub fn local_freqs(g: &Graph, eta: &Config, x: usize) -> LocalFreqs {
    let k = g.degree() as f64;
    let mut counts = [[0usize; 2]; 2];
    let mut first = [0usize; 2];
    for &y in g.neighbors(x) {
        let i = eta.value(y) as usize;
        first[i] += 1;
        for &z in g.neighbors(y) {
            counts[i][eta.value(z) as usize] += 1;
        }
    }
    let k2 = k * k;
    LocalFreqs {
        f1: first[1] as f64 / k,
        f0: first[0] as f64 / k,
        f11: counts[1][1] as f64 / k2,
        f10: counts[1][0] as f64 / k2,
        f01: counts[0][1] as f64 / k2,
        f00: counts[0][0] as f64 / k2,
    }
}
