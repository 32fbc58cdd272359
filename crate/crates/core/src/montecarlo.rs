//! Monte Carlo estimates of fixation probabilities.
//!
//! Replicas simulate the jump chain of the perturbed dynamics: the holding
//! steps of the lazy chain are skipped and the flipping site is drawn with
//! probability proportional to its rate. Absorption probabilities are those
//! of the lazy chain.
//!
//! Replica `r` draws from a ChaCha8 stream keyed by `(seed, r)`, so results
//! do not depend on thread count or scheduling.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{update_rate, ChainSpec, Config};
use crate::error::{Error, Result};
use crate::exact::InitialDistribution;
use crate::graph::Graph;

pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPlan {
    pub replicas: u64,
    pub seed: u64,
    /// Jump-chain steps allowed per replica before it is censored.
    pub max_steps: u64,
    pub init: InitialDistribution,
}

impl SimPlan {
    pub fn new(replicas: u64, seed: u64, init: InitialDistribution) -> Self {
        Self {
            replicas,
            seed,
            max_steps: DEFAULT_MAX_STEPS,
            init,
        }
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    fn validate(&self, g: &Graph) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::OutOfRange("need at least one replica".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::OutOfRange("max_steps must be >= 1".into()));
        }
        self.init.validate(g.n_vertices())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    AbsorbedAt1,
    AbsorbedAt0,
    Censored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicaResult {
    pub outcome: Outcome,
    pub steps: u64,
}

/// Aggregate over replicas. Censored replicas are counted but left out of
/// `p_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub n_absorbed_1: u64,
    pub n_absorbed_0: u64,
    pub n_censored: u64,
}

impl Estimate {
    pub fn from_counts(n_absorbed_1: u64, n_absorbed_0: u64, n_censored: u64) -> Result<Self> {
        let decided = n_absorbed_1 + n_absorbed_0;
        if decided == 0 {
            return Err(Error::EstimateUnavailable { replicas: n_censored });
        }
        let p_hat = n_absorbed_1 as f64 / decided as f64;
        Ok(Self {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / decided as f64).sqrt(),
            n_absorbed_1,
            n_absorbed_0,
            n_censored,
        })
    }

    pub fn replicas(&self) -> u64 {
        self.n_absorbed_1 + self.n_absorbed_0 + self.n_censored
    }

    /// `|p_hat - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let gap = self.p_hat - target;
        if self.stderr == 0.0 {
            if gap == 0.0 {
                0.0
            } else {
                f64::INFINITY * gap.signum()
            }
        } else {
            gap / self.stderr
        }
    }
}

/// The RNG stream of replica `replica` under `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Draws an initial configuration. `uniform_n` accepts `0 <= n <= N` here.
pub fn sample_init<R: Rng + ?Sized>(init: &InitialDistribution, n_vertices: usize, rng: &mut R) -> Result<Config> {
    match *init {
        InitialDistribution::Point(ref eta) => {
            if eta.len() != n_vertices {
                return Err(Error::OutOfRange(format!(
                    "initial configuration has {} sites, graph has {n_vertices}",
                    eta.len()
                )));
            }
            Ok(eta.clone())
        }
        InitialDistribution::UniformN(m) => {
            if m > n_vertices {
                return Err(Error::OutOfRange(format!("cannot place {m} cooperators on {n_vertices} sites")));
            }
            let mut eta = Config::zeros(n_vertices);
            for x in sample(rng, n_vertices, m) {
                eta.set(x, true);
            }
            Ok(eta)
        }
        InitialDistribution::Bernoulli(u) => {
            if !(0.0..=1.0).contains(&u) {
                return Err(Error::OutOfRange(format!("Bernoulli density must lie in [0, 1], got {u}")));
            }
            let mut eta = Config::zeros(n_vertices);
            for x in 0..n_vertices {
                if rng.random_bool(u) {
                    eta.set(x, true);
                }
            }
            Ok(eta)
        }
    }
}

/// Shared read-only state of a simulation: the graph, the chain and each
/// site's radius-2 ball (the sites whose rates a flip can change).
struct Simulator<'a> {
    graph: &'a Graph,
    spec: &'a ChainSpec,
    balls: Vec<Vec<usize>>,
}

impl<'a> Simulator<'a> {
    fn new(graph: &'a Graph, spec: &'a ChainSpec) -> Self {
        let balls = (0..graph.n_vertices()).map(|x| graph.ball2(x)).collect();
        Self { graph, spec, balls }
    }

    fn run<R: Rng + ?Sized>(&self, mut eta: Config, max_steps: u64, rng: &mut R) -> ReplicaResult {
        let n = self.graph.n_vertices();
        let mut ones = eta.ones_count();
        let mut rates: Vec<f64> = (0..n).map(|x| update_rate(self.graph, &eta, self.spec, x)).collect();
        let mut steps = 0;
        loop {
            if ones == n {
                return ReplicaResult { outcome: Outcome::AbsorbedAt1, steps };
            }
            if ones == 0 {
                return ReplicaResult { outcome: Outcome::AbsorbedAt0, steps };
            }
            if steps == max_steps {
                return ReplicaResult { outcome: Outcome::Censored, steps };
            }
            // Summing afresh each step keeps the total free of drift.
            let total: f64 = rates.iter().sum();
            debug_assert!(total > 0.0, "transient state with no moves");
            let mut target = rng.random::<f64>() * total;
            let mut x = n - 1;
            for (i, &r) in rates.iter().enumerate() {
                if target < r {
                    x = i;
                    break;
                }
                target -= r;
            }
            // Guard against rounding landing on a zero-rate tail site.
            while rates[x] == 0.0 {
                x -= 1;
            }
            if eta.get(x) {
                ones -= 1;
            } else {
                ones += 1;
            }
            eta.flip(x);
            for &y in &self.balls[x] {
                rates[y] = update_rate(self.graph, &eta, self.spec, y);
            }
            steps += 1;
        }
    }
}

/// Runs one replica from `eta0` until absorption or `max_steps` jumps.
pub fn run_replica<R: Rng + ?Sized>(
    g: &Graph,
    spec: &ChainSpec,
    eta0: Config,
    max_steps: u64,
    rng: &mut R,
) -> ReplicaResult {
    Simulator::new(g, spec).run(eta0, max_steps, rng)
}

fn run_range(sim: &Simulator, plan: &SimPlan, range: std::ops::Range<u64>) -> Result<[u64; 3]> {
    range
        .into_par_iter()
        .map(|r| -> Result<[u64; 3]> {
            let mut rng = replica_rng(plan.seed, r);
            let eta = sample_init(&plan.init, sim.graph.n_vertices(), &mut rng)?;
            let res = sim.run(eta, plan.max_steps, &mut rng);
            Ok(match res.outcome {
                Outcome::AbsorbedAt1 => [1, 0, 0],
                Outcome::AbsorbedAt0 => [0, 1, 0],
                Outcome::Censored => [0, 0, 1],
            })
        })
        .try_reduce(|| [0; 3], |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]]))
}

/// Aggregates `plan.replicas` independent replicas.
pub fn estimate_fixation(g: &Graph, spec: &ChainSpec, plan: &SimPlan) -> Result<Estimate> {
    estimate_with_progress(g, spec, plan, plan.replicas, |_| {})
}

/// Like [`estimate_fixation`], but runs replicas in chunks of `chunk` and
/// reports the running estimate after each one. The final result does not
/// depend on `chunk`.
pub fn estimate_with_progress<F: FnMut(&Estimate)>(
    g: &Graph,
    spec: &ChainSpec,
    plan: &SimPlan,
    chunk: u64,
    mut progress: F,
) -> Result<Estimate> {
    plan.validate(g)?;
    let sim = Simulator::new(g, spec);
    let chunk = chunk.max(1);
    let mut counts = [0u64; 3];
    let mut start = 0;
    while start < plan.replicas {
        let end = (start + chunk).min(plan.replicas);
        let c = run_range(&sim, plan, start..end)?;
        for i in 0..3 {
            counts[i] += c[i];
        }
        if let Ok(partial) = Estimate::from_counts(counts[0], counts[1], counts[2]) {
            progress(&partial);
        }
        start = end;
    }
    Estimate::from_counts(counts[0], counts[1], counts[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{PayoffMatrix, Rule};
    use crate::exact::{fixation_exact, StateSpace};

    fn spec(rule: Rule, w: f64, b: f64, c: f64, k: usize) -> ChainSpec {
        ChainSpec::new(rule, w, PayoffMatrix::canonical(b, c), k).unwrap()
    }

    #[test]
    fn absorbed_start() {
        let g = Graph::cycle(4).unwrap();
        let s = spec(Rule::DeathBirth, 0.1, 2.0, 1.0, 2);
        let res = run_replica(&g, &s, Config::ones(4), 10, &mut replica_rng(1, 0));
        assert_eq!(res, ReplicaResult { outcome: Outcome::AbsorbedAt1, steps: 0 });
        let plan = SimPlan::new(100, 3, InitialDistribution::Point(Config::zeros(4)));
        let est = estimate_fixation(&g, &s, &plan).unwrap();
        assert_eq!((est.p_hat, est.stderr, est.n_absorbed_0), (0.0, 0.0, 100));
    }

    #[test]
    fn incremental_rates_stay_exact() {
        let g = Graph::petersen().unwrap();
        let s = spec(Rule::Imitation, 0.05, 4.0, 1.0, 3);
        let sim = Simulator::new(&g, &s);
        let mut rng = replica_rng(9, 0);
        let mut eta = sample_init(&InitialDistribution::Bernoulli(0.5), 10, &mut rng).unwrap();
        let mut rates: Vec<f64> = (0..10).map(|x| update_rate(&g, &eta, &s, x)).collect();
        for _ in 0..200 {
            let x = rng.random_range(0..10);
            eta.flip(x);
            for &y in &sim.balls[x] {
                rates[y] = update_rate(&g, &eta, &s, y);
            }
            for y in 0..10 {
                assert_eq!(rates[y], update_rate(&g, &eta, &s, y));
            }
        }
    }

    #[test]
    fn voter_c4_point() {
        let g = Graph::cycle(4).unwrap();
        let s = spec(Rule::Voter, 0.0, 0.0, 0.0, 2);
        let plan = SimPlan::new(100_000, 11, InitialDistribution::Point("1100".parse().unwrap()));
        let est = estimate_fixation(&g, &s, &plan).unwrap();
        assert!(est.z_score(0.5).abs() < 3.5, "{est:?}");
    }

    #[test]
    fn voter_c5_uniform() {
        let g = Graph::cycle(5).unwrap();
        let s = spec(Rule::Voter, 0.0, 0.0, 0.0, 2);
        let plan = SimPlan::new(200_000, 12, InitialDistribution::UniformN(2));
        let est = estimate_fixation(&g, &s, &plan).unwrap();
        assert!(est.z_score(0.4).abs() < 3.5, "{est:?}");
    }

    #[test]
    fn jump_chain_matches_exact_on_triangle() {
        let g = Graph::complete(3).unwrap();
        let init = InitialDistribution::UniformN(1);
        let mut seed = 100;
        for (rule, w) in [
            (Rule::DeathBirth, 0.1),
            (Rule::DeathBirth, 0.0),
            (Rule::DeathBirth, 0.05),
            (Rule::Imitation, 0.0),
            (Rule::Imitation, 0.05),
        ] {
            let payoff = PayoffMatrix::canonical(2.0, 1.0);
            let exact = fixation_exact(&StateSpace::new(g.clone(), rule, payoff).unwrap(), w, &init).unwrap();
            let s = ChainSpec::new(rule, w, payoff, 2).unwrap();
            seed += 1;
            let est = estimate_fixation(&g, &s, &SimPlan::new(100_000, seed, init.clone())).unwrap();
            assert!(est.z_score(exact).abs() < 3.5, "{rule} w={w}: {est:?} vs {exact}");
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let g = Graph::torus2d(3, 3).unwrap();
        let s = spec(Rule::DeathBirth, 0.02, 6.0, 1.0, 4);
        let plan = SimPlan::new(5000, 77, InitialDistribution::Bernoulli(0.3));
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_fixation(&g, &s, &plan).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, estimate_fixation(&g, &s, &plan).unwrap());
        let chunked = estimate_with_progress(&g, &s, &plan, 777, |_| {}).unwrap();
        assert_eq!(one, chunked);
    }

    #[test]
    fn progress_reports_each_chunk() {
        let g = Graph::cycle(5).unwrap();
        let s = spec(Rule::Voter, 0.0, 0.0, 0.0, 2);
        let plan = SimPlan::new(1000, 1, InitialDistribution::UniformN(2));
        let mut seen = Vec::new();
        estimate_with_progress(&g, &s, &plan, 300, |e| seen.push(e.replicas())).unwrap();
        assert_eq!(seen, vec![300, 600, 900, 1000]);
    }

    #[test]
    fn censoring_is_reported() {
        let g = Graph::cycle(6).unwrap();
        let s = spec(Rule::Voter, 0.0, 0.0, 0.0, 2);
        let plan = SimPlan::new(50, 5, InitialDistribution::Point("111000".parse().unwrap())).with_max_steps(1);
        assert_eq!(
            estimate_fixation(&g, &s, &plan),
            Err(Error::EstimateUnavailable { replicas: 50 })
        );
        let plan = plan.with_max_steps(6);
        let est = estimate_fixation(&g, &s, &plan).unwrap();
        assert_eq!(est.replicas(), 50);
        assert!(est.n_censored > 0);
        assert!(SimPlan::new(0, 1, InitialDistribution::UniformN(1)).validate(&g).is_err());
    }

    #[test]
    fn sample_init_edges() {
        let mut rng = replica_rng(0, 0);
        assert!(sample_init(&InitialDistribution::UniformN(4), 4, &mut rng).unwrap().is_all_ones());
        assert!(sample_init(&InitialDistribution::Bernoulli(0.0), 7, &mut rng).unwrap().is_all_zeros());
        assert!(sample_init(&InitialDistribution::Bernoulli(1.0), 7, &mut rng).unwrap().is_all_ones());
        assert!(sample_init(&InitialDistribution::UniformN(5), 4, &mut rng).is_err());
    }

    #[test]
    fn uniform_two_on_c4_is_uniform() {
        let draws = 100_000;
        let mut counts = std::collections::BTreeMap::new();
        let mut rng = replica_rng(42, 0);
        for _ in 0..draws {
            let eta = sample_init(&InitialDistribution::UniformN(2), 4, &mut rng).unwrap();
            *counts.entry(eta.index()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 6);
        let p = 1.0 / 6.0;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        for (idx, c) in counts {
            assert_eq!(idx.count_ones(), 2);
            assert!(((c as f64 / draws as f64) - p).abs() < 3.5 * se);
        }
    }
}
