//! Exact fixation probabilities and 0-potentials over the full `2^N` state
//! space.
//!
//! States are indexed by the `N`-bit integer of the configuration, so the
//! absorbing states are index `0` (all defectors) and `2^N - 1` (all
//! cooperators). Transient state `s` sits at row `s - 1` of every system.

use serde::{Deserialize, Serialize};

use crate::dynamics::{update_rate, w_max, ChainSpec, Config, PayoffMatrix, Rule};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linsolve::{CsrMatrix, Method, Solver};
use crate::perturbation::mean_difference;

/// Largest graph the exact solver accepts by default (16384 states).
pub const N_EXACT_MAX: usize = 14;

/// Above this many vertices the iterative solver replaces dense LU.
pub const N_DENSE_MAX: usize = 10;

/// Finite-difference steps for the derivative at `w = 0`.
pub const DERIVATIVE_STEP: f64 = 1e-3;

/// Law of the initial configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum InitialDistribution {
    Point(Config),
    /// Uniform over configurations with exactly `n` cooperators.
    UniformN(usize),
    /// Independent cooperators with density `u`.
    Bernoulli(f64),
}

impl InitialDistribution {
    pub fn validate(&self, n_vertices: usize) -> Result<()> {
        match *self {
            InitialDistribution::Point(ref eta) if eta.len() != n_vertices => Err(Error::OutOfRange(format!(
                "initial configuration has {} sites, graph has {n_vertices}",
                eta.len()
            ))),
            InitialDistribution::UniformN(m) if m == 0 || m >= n_vertices => Err(Error::OutOfRange(format!(
                "uniform_n needs 1 <= n <= N-1, got n={m}, N={n_vertices}"
            ))),
            InitialDistribution::Bernoulli(u) if !(0.0..=1.0).contains(&u) => {
                Err(Error::OutOfRange(format!("Bernoulli density must lie in [0, 1], got {u}")))
            }
            _ => Ok(()),
        }
    }

    /// Expectation of a per-state function given as a table over all `2^N`
    /// state indices.
    pub fn expect(&self, n_vertices: usize, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), 1usize << n_vertices);
        match *self {
            InitialDistribution::Point(ref eta) => values[eta.index() as usize],
            InitialDistribution::UniformN(m) => {
                let (mut sum, mut count) = (0.0, 0usize);
                for (idx, v) in values.iter().enumerate() {
                    if idx.count_ones() as usize == m {
                        sum += v;
                        count += 1;
                    }
                }
                sum / count as f64
            }
            InitialDistribution::Bernoulli(u) => values
                .iter()
                .enumerate()
                .map(|(idx, v)| {
                    let ones = idx.count_ones() as i32;
                    u.powi(ones) * (1.0 - u).powi(n_vertices as i32 - ones) * v
                })
                .sum(),
        }
    }
}

/// A graph and an update rule, ready for exact solves.
#[derive(Debug, Clone)]
pub struct StateSpace {
    graph: Graph,
    rule: Rule,
    payoff: PayoffMatrix,
    lambda: Option<f64>,
}

impl StateSpace {
    pub fn new(graph: Graph, rule: Rule, payoff: PayoffMatrix) -> Result<Self> {
        Self::with_limit(graph, rule, payoff, N_EXACT_MAX)
    }

    pub fn with_limit(graph: Graph, rule: Rule, payoff: PayoffMatrix, max_n: usize) -> Result<Self> {
        let n = graph.n_vertices();
        if n > max_n || n > 30 {
            return Err(Error::TooLarge { n, max: max_n.min(30) });
        }
        Ok(Self {
            graph,
            rule,
            payoff,
            lambda: None,
        })
    }

    /// Replaces the rule's `λ` in every chain built from this space.
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn payoff(&self) -> &PayoffMatrix {
        &self.payoff
    }

    pub fn n_states(&self) -> usize {
        1usize << self.graph.n_vertices()
    }

    pub fn all_ones_index(&self) -> usize {
        self.n_states() - 1
    }

    fn method(&self) -> Method {
        if self.graph.n_vertices() <= N_DENSE_MAX {
            Method::Dense
        } else {
            Method::Iterative
        }
    }

    fn chain(&self, rule: Rule, w: f64) -> Result<ChainSpec> {
        let spec = ChainSpec::signed(rule, w, self.payoff, self.graph.degree())?;
        match self.lambda {
            Some(l) => spec.with_lambda(l),
            None => Ok(spec),
        }
    }

    /// `I - P_TT` over the transient states plus the one-step mass into the
    /// all-cooperator state.
    fn absorption_system(&self, spec: &ChainSpec) -> (CsrMatrix, Vec<f64>) {
        let n = self.graph.n_vertices();
        let ones = self.all_ones_index();
        let dim = self.n_states() - 2;
        let scale = spec.lambda / n as f64;
        let mut builder = CsrMatrix::builder(dim);
        let mut to_ones = vec![0.0; dim];
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(n);
        for state in 1..ones {
            let eta = Config::from_index(n, state as u64);
            row.clear();
            let mut leave = 0.0;
            for x in 0..n {
                let p = scale * update_rate(&self.graph, &eta, spec, x);
                if p == 0.0 {
                    continue;
                }
                leave += p;
                let target = state ^ (1 << x);
                if target == ones {
                    to_ones[state - 1] += p;
                } else if target != 0 {
                    row.push((target - 1, -p));
                }
            }
            assert!(leave > 0.0, "transient state {state} cannot move");
            row.push((state - 1, leave));
            row.sort_unstable_by_key(|&(c, _)| c);
            for &(c, v) in &row {
                builder.push(c, v);
            }
            builder.end_row();
        }
        (builder.finish(), to_ones)
    }

    fn embed(&self, transient: Vec<f64>, at_zero: f64, at_ones: f64) -> Vec<f64> {
        let mut full = Vec::with_capacity(self.n_states());
        full.push(at_zero);
        full.extend(transient);
        full.push(at_ones);
        full
    }

    fn fixation_table(&self, rule: Rule, w: f64) -> Result<Vec<f64>> {
        let spec = self.chain(rule, w)?;
        let (a, b) = self.absorption_system(&spec);
        let x = Solver::new(a, self.method())?.solve(&b)?;
        Ok(self.embed(x, 0.0, 1.0))
    }

    /// `Pʷ_η(τ₁ < ∞)` for every state index `η`.
    pub fn fixation_vector(&self, w: f64) -> Result<Vec<f64>> {
        ChainSpec::new(self.rule, w, self.payoff, self.graph.degree())?;
        self.fixation_table(self.rule, w)
    }

    /// `η ↦ ∫₀^∞ E_η[D̄(ξ_s)] ds` for the continuous-time voter model, via the
    /// discrete voter chain: `(λ/N)·E_η[Σₙ D̄(ξₙ)]`.
    pub fn potential_vector(&self) -> Result<Vec<f64>> {
        self.payoff.require_canonical()?;
        let n = self.graph.n_vertices();
        let voter = self.chain(Rule::Voter, 0.0)?;
        let voter = if self.rule == Rule::Voter {
            voter
        } else {
            // The voter chain runs with the perturbed chain's λ.
            voter.with_lambda(self.lambda.unwrap_or(self.rule.lambda(self.graph.degree())))?
        };
        let (a, _) = self.absorption_system(&voter);
        let rhs: Vec<f64> = (1..self.all_ones_index())
            .map(|s| mean_difference(self.rule, &self.graph, &Config::from_index(n, s as u64), &self.payoff))
            .collect();
        let sums = Solver::new(a, self.method())?.solve(&rhs)?;
        let scale = voter.lambda / n as f64;
        Ok(self.embed(sums.into_iter().map(|v| v * scale).collect(), 0.0, 0.0))
    }
}

/// `Pʷ_init(τ₁ < ∞)` by an exact absorption solve.
pub fn fixation_exact(space: &StateSpace, w: f64, init: &InitialDistribution) -> Result<f64> {
    let n = space.graph.n_vertices();
    init.validate(n)?;
    Ok(init.expect(n, &space.fixation_vector(w)?))
}

/// The 0-potential `∫₀^∞ E_init[D̄(ξ_s)] ds` under the voter model.
pub fn zero_potential(space: &StateSpace, init: &InitialDistribution) -> Result<f64> {
    let n = space.graph.n_vertices();
    init.validate(n)?;
    Ok(init.expect(n, &space.potential_vector()?))
}

/// `d/dw Pʷ_init(τ₁ < ∞)` at `w = 0`, by central differences at steps `h`
/// and `h/2` combined with one Richardson step. `h` starts at
/// [`DERIVATIVE_STEP`] and halves until it sits well inside `w_max`.
pub fn w_derivative_at_zero(space: &StateSpace, init: &InitialDistribution) -> Result<f64> {
    let n = space.graph.n_vertices();
    init.validate(n)?;
    if space.rule == Rule::Voter {
        return Ok(0.0);
    }
    let bound = w_max(&space.payoff, space.graph.degree());
    let mut h = DERIVATIVE_STEP;
    while h >= 0.5 * bound {
        h *= 0.5;
    }
    let at = |w: f64| -> Result<f64> { Ok(init.expect(n, &space.fixation_table(space.rule, w)?)) };
    let central = |step: f64| -> Result<f64> { Ok((at(step)? - at(-step)?) / (2.0 * step)) };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
