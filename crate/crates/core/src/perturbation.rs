//! First-order structure of the selection chains around the voter model.
//!
//! For small `w` the flip rates expand as `cʷ = c + w·h_{1-η(x)} + O(w²)`.
//! The functions `h₁`, `h₀` are closed-form polynomials in the local
//! densities of [`LocalFreqs`]; the difference kernel
//! `D(x, η) = (1 - η(x))h₁ - η(x)h₀` and its π-average drive the first-order
//! correction to fixation probabilities.

use crate::dynamics::{local_freqs, update_rate, voter_rate, ChainSpec, Config, PayoffMatrix, Rule};
use crate::graph::Graph;

/// `hᵢ(x, η)` for a canonical payoff `[[b-c, -c], [b, 0]]`.
///
/// The voter rule has no perturbation and returns 0.
pub fn h_value(rule: Rule, g: &Graph, eta: &Config, payoff: &PayoffMatrix, i: u8, x: usize) -> f64 {
    let k = g.degree() as f64;
    let (b, c) = (payoff.b(), payoff.c());
    let lf = local_freqs(g, eta, x);
    match rule {
        Rule::Voter => 0.0,
        Rule::DeathBirth => {
            let h1 = -(b + c) * k * lf.f0 * lf.f1 + k * b * lf.f00 + k * lf.f0 * (b * lf.f11 - b * lf.f00);
            if i == 1 {
                h1
            } else {
                -h1
            }
        }
        Rule::Imitation => {
            let pair_payoff = (b - c) * lf.f11 - c * lf.f10 + b * lf.f01;
            let kk = k / (k + 1.0);
            if i == 1 {
                k * ((b - c) * lf.f11 - c * lf.f10)
                    - k * kk * lf.f1 * pair_payoff
                    - kk * b * lf.f1 * lf.f1
            } else {
                k * b * lf.f01
                    - k * kk * lf.f0 * pair_payoff
                    - kk * lf.f0 * ((b - c) * lf.f1 - c * lf.f0)
            }
        }
    }
}

/// `D(x, η) = (1 - η(x))·h₁(x, η) - η(x)·h₀(x, η)`.
pub fn difference_kernel(rule: Rule, g: &Graph, eta: &Config, payoff: &PayoffMatrix, x: usize) -> f64 {
    if eta.get(x) {
        -h_value(rule, g, eta, payoff, 0, x)
    } else {
        h_value(rule, g, eta, payoff, 1, x)
    }
}

/// Per-vertex values of a perturbation quantity for one fixed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationField {
    pub rule: Rule,
    pub values: Vec<f64>,
}

impl PerturbationField {
    /// The field `x ↦ D(x, η)`.
    pub fn difference(rule: Rule, g: &Graph, eta: &Config, payoff: &PayoffMatrix) -> Self {
        Self {
            rule,
            values: (0..g.n_vertices())
                .map(|x| difference_kernel(rule, g, eta, payoff, x))
                .collect(),
        }
    }

    /// The field `x ↦ h_{1-η(x)}(x, η)`, i.e. the `w`-coefficient of each
    /// vertex's own flip rate.
    pub fn rate_slope(rule: Rule, g: &Graph, eta: &Config, payoff: &PayoffMatrix) -> Self {
        Self {
            rule,
            values: (0..g.n_vertices())
                .map(|x| h_value(rule, g, eta, payoff, 1 - eta.value(x), x))
                .collect(),
        }
    }
}

/// `Σₓ H(x)π(x)`.
pub fn pi_average(g: &Graph, field: &PerturbationField) -> f64 {
    assert_eq!(field.values.len(), g.n_vertices(), "field length must equal N");
    let pi = g.stationary();
    field
        .values
        .iter()
        .zip(pi.weights())
        .map(|(h, p)| h * p)
        .sum()
}

/// `D̄(η)`, the π-average of the difference kernel.
pub fn mean_difference(rule: Rule, g: &Graph, eta: &Config, payoff: &PayoffMatrix) -> f64 {
    pi_average(g, &PerturbationField::difference(rule, g, eta, payoff))
}

/// Stationary-weighted density of cooperators. Harmonic for the voter chain.
pub fn p1(g: &Graph, eta: &Config) -> f64 {
    let pi = g.stationary();
    (0..g.n_vertices())
        .filter(|&x| eta.get(x))
        .map(|x| pi.get(x))
        .sum()
}

/// `Kʷf(η) = Σₓ [Pʷ(η, η^x) - P(η, η^x)]·(f(η^x) - f(η))`, evaluated from the
/// exact rates of the chain in `spec` against the voter chain with the same
/// `λ`.
pub fn apply_signed_kernel<F>(g: &Graph, spec: &ChainSpec, f: F, eta: &Config) -> f64
where
    F: Fn(&Config) -> f64,
{
    let scale = spec.lambda / g.n_vertices() as f64;
    let here = f(eta);
    (0..g.n_vertices())
        .map(|x| {
            let delta = scale * (update_rate(g, eta, spec, x) - voter_rate(g, eta, x));
            if delta == 0.0 {
                0.0
            } else {
                delta * (f(&eta.flipped(x)) - here)
            }
        })
        .sum()
}

/// Second-order remainder `(cʷ - c - w·h_{1-η(x)}) / w²` of the rate
/// expansion. Diagnostic only; it should stay bounded as `w → 0`.
pub fn rate_remainder(g: &Graph, eta: &Config, spec: &ChainSpec, x: usize) -> f64 {
    let w = spec.w;
    assert!(w != 0.0, "the remainder is undefined at w = 0");
    let h = h_value(spec.rule, g, eta, &spec.payoff, 1 - eta.value(x), x);
    (update_rate(g, eta, spec, x) - voter_rate(g, eta, x) - w * h) / (w * w)
}

/// `max_{x, η} |rate_remainder|` over the whole state space (`N <= 20`).
pub fn max_rate_remainder(g: &Graph, spec: &ChainSpec) -> f64 {
    let n = g.n_vertices();
    assert!(n <= 20, "exhaustive remainder scan is limited to 20 vertices");
    let mut worst = 0.0_f64;
    for idx in 0..(1u64 << n) {
        let eta = Config::from_index(n, idx);
        for x in 0..n {
            worst = worst.max(rate_remainder(g, &eta, spec, x).abs());
        }
    }
    worst
}
