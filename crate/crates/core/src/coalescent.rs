//! Hitting and meeting times of random walks, the Bernoulli transform, and
//! the walk-route assembly of the first-order constant `Γ`.
//!
//! Time is measured so that one step of the discrete walk equals one unit of
//! the rate-1 continuous walk. Two independent walks from distinct sites then
//! see jumps at total rate 2, which makes meeting times half the hitting
//! times on vertex-transitive graphs.

use num_traits::{Num, NumCast};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::gamma_closed_form;
use crate::dynamics::{PayoffMatrix, Rule};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linsolve::{CsrMatrix, Method, Solver};

/// Systems up to this many unknowns are factorised densely.
const DENSE_UNKNOWNS_MAX: usize = 2000;

/// Tolerance of the walk-route versus closed-form check in [`gamma`].
pub const GAMMA_ROUTE_TOL: f64 = 1e-8;

fn method_for(unknowns: usize) -> Method {
    if unknowns <= DENSE_UNKNOWNS_MAX {
        Method::Dense
    } else {
        Method::Iterative
    }
}

/// Row-major `N × N` table of reals indexed by ordered vertex pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTable {
    n: usize,
    values: Vec<f64>,
}

impl PairTable {
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.values[x * self.n..(x + 1) * self.n]
    }

    /// `max |t(x,y) - t(y,x)|`.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for x in 0..self.n {
            for y in x + 1..self.n {
                worst = worst.max((self.get(x, y) - self.get(y, x)).abs());
            }
        }
        worst
    }
}

/// `f(x, y) = E_x[T_y]` for the simple random walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingTable(pub PairTable);

/// `m(x, y) = E[M_{x,y}]` for two independent rate-1 walks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeetingTable(pub PairTable);

impl std::ops::Deref for HittingTable {
    type Target = PairTable;
    fn deref(&self) -> &PairTable {
        &self.0
    }
}

impl std::ops::Deref for MeetingTable {
    type Target = PairTable;
    fn deref(&self) -> &PairTable {
        &self.0
    }
}

impl HittingTable {
    /// Largest violation of `f(x,y) = 1 + (1/k) Σ_{z~x} f(z,y)` over `x ≠ y`.
    pub fn one_step_residual(&self, g: &Graph) -> f64 {
        let k = g.degree() as f64;
        let mut worst = 0.0_f64;
        for x in 0..self.n {
            for y in 0..self.n {
                if x == y {
                    continue;
                }
                let avg: f64 = g.neighbors(x).iter().map(|&z| self.get(z, y)).sum::<f64>() / k;
                worst = worst.max((self.get(x, y) - 1.0 - avg).abs());
            }
        }
        worst
    }

    /// `E_x[T⁺_x] = 1 + (1/k) Σ_{z~x} f(z,x)`.
    pub fn return_time(&self, g: &Graph, x: usize) -> f64 {
        1.0 + g.neighbors(x).iter().map(|&z| self.get(z, x)).sum::<f64>() / g.degree() as f64
    }
}

/// Solves one hitting system per target vertex, in parallel.
pub fn hitting_times(g: &Graph) -> Result<HittingTable> {
    let n = g.n_vertices();
    let inv_k = 1.0 / g.degree() as f64;
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|target| -> Result<Vec<f64>> {
            // Unknowns are the vertices other than `target`, in order.
            let slot = |v: usize| if v < target { v } else { v - 1 };
            let mut builder = CsrMatrix::builder(n - 1);
            for x in (0..n).filter(|&x| x != target) {
                let mut row: Vec<(usize, f64)> = vec![(slot(x), 1.0)];
                for &z in g.neighbors(x) {
                    if z != target {
                        row.push((slot(z), -inv_k));
                    }
                }
                row.sort_unstable_by_key(|&(c, _)| c);
                for (c, v) in row {
                    builder.push(c, v);
                }
                builder.end_row();
            }
            let sol = Solver::new(builder.finish(), method_for(n - 1))?.solve(&vec![1.0; n - 1])?;
            let mut col = sol;
            col.insert(target, 0.0);
            Ok(col)
        })
        .collect::<Result<_>>()?;
    let mut values = vec![0.0; n * n];
    for (y, col) in columns.iter().enumerate() {
        for (x, v) in col.iter().enumerate() {
            values[x * n + y] = *v;
        }
    }
    Ok(HittingTable(PairTable { n, values }))
}

/// Solves the two-walk product chain over unordered pairs of distinct sites,
/// absorbing on the diagonal.
pub fn meeting_times(g: &Graph) -> Result<MeetingTable> {
    let n = g.n_vertices();
    let k = g.degree() as f64;
    // Pair index of x < y.
    let pair = |x: usize, y: usize| -> usize {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        a * (2 * n - a - 1) / 2 + (b - a - 1)
    };
    let unknowns = n * (n - 1) / 2;
    let mut builder = CsrMatrix::builder(unknowns);
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(2 * g.degree() + 1);
    for x in 0..n {
        for y in x + 1..n {
            // 2k m(x,y) - Σ_{z~x} m(z,y) - Σ_{z~y} m(x,z) = k
            row.clear();
            row.push((pair(x, y), 2.0 * k));
            for &z in g.neighbors(x) {
                if z != y {
                    row.push((pair(z, y), -1.0));
                }
            }
            for &z in g.neighbors(y) {
                if z != x {
                    row.push((pair(x, z), -1.0));
                }
            }
            row.sort_unstable_by_key(|&(c, _)| c);
            for &(c, v) in &row {
                builder.push(c, v);
            }
            builder.end_row();
        }
    }
    let sol = Solver::new(builder.finish(), method_for(unknowns))?.solve(&vec![k; unknowns])?;
    let mut values = vec![0.0; n * n];
    for x in 0..n {
        for y in x + 1..n {
            let v = sol[pair(x, y)];
            values[x * n + y] = v;
            values[y * n + x] = v;
        }
    }
    Ok(MeetingTable(PairTable { n, values }))
}

/// Law of the simple random walk after `steps` steps from `start`.
pub fn walk_law(g: &Graph, start: usize, steps: usize) -> Vec<f64> {
    let n = g.n_vertices();
    let inv_k = 1.0 / g.degree() as f64;
    let mut law = vec![0.0; n];
    law[start] = 1.0;
    for _ in 0..steps {
        let mut next = vec![0.0; n];
        for (x, &p) in law.iter().enumerate() {
            if p != 0.0 {
                for &z in g.neighbors(x) {
                    next[z] += p * inv_k;
                }
            }
        }
        law = next;
    }
    law
}

/// Pair of walk positions whose table value is averaged, both walks started
/// at a common vertex `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkPair {
    /// One walk, at times `i` and `j`, `i <= j`.
    SameWalk(usize, usize),
    /// Two independent walks at times `i` and `j`.
    Independent(usize, usize),
}

/// `E_z[t(A, B)]` for the positions described by `which`.
pub fn pair_expectation(g: &Graph, table: &PairTable, z: usize, which: WalkPair) -> f64 {
    let dot = |law_a: &[f64], law_b: &[f64]| -> f64 {
        let mut acc = 0.0;
        for (a, &pa) in law_a.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            let row = table.row(a);
            acc += pa * law_b.iter().zip(row).map(|(pb, t)| pb * t).sum::<f64>();
        }
        acc
    };
    match which {
        WalkPair::Independent(i, j) => dot(&walk_law(g, z, i), &walk_law(g, z, j)),
        WalkPair::SameWalk(i, j) => {
            assert!(i <= j);
            let law_i = walk_law(g, z, i);
            law_i
                .iter()
                .enumerate()
                .filter(|&(_, &p)| p != 0.0)
                .map(|(a, &p)| {
                    let later = walk_law(g, a, j - i);
                    p * later.iter().zip(table.row(a)).map(|(pb, t)| pb * t).sum::<f64>()
                })
                .sum()
        }
    }
}

/// `E_π E_z[t(A, B)]`; `π` is uniform on a regular graph.
pub fn pi_pair_expectation(g: &Graph, table: &PairTable, which: WalkPair) -> f64 {
    let pi = g.stationary();
    (0..g.n_vertices())
        .map(|z| pi.get(z) * pair_expectation(g, table, z, which))
        .sum()
}

/// Three hitting-time averages over walks started from a common vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkAverages {
    /// `E[f(X₀, X₁)]`
    pub q1: f64,
    /// `E[f(X₁, Y₁)]`
    pub q2: f64,
    /// `E[f(X₁, Y₂)]`
    pub q3: f64,
}

impl WalkAverages {
    /// Values predicted for a `k`-regular graph on `N` vertices.
    pub fn predicted(n_total: usize, k: usize) -> Self {
        let (n, k) = (n_total as f64, k as f64);
        Self {
            q1: n - 1.0,
            q2: n - 2.0,
            q3: (1.0 + 1.0 / k) * (n - 1.0) + 1.0 / k - 2.0,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.q1 - other.q1)
            .abs()
            .max((self.q2 - other.q2).abs())
            .max((self.q3 - other.q3).abs())
    }
}

/// The three averages at a single starting vertex.
pub fn walk_averages_at(g: &Graph, table: &HittingTable, z: usize) -> WalkAverages {
    WalkAverages {
        q1: pair_expectation(g, table, z, WalkPair::SameWalk(0, 1)),
        q2: pair_expectation(g, table, z, WalkPair::Independent(1, 1)),
        q3: pair_expectation(g, table, z, WalkPair::Independent(1, 2)),
    }
}

/// The three averages with the start drawn from `π`.
pub fn lemma41_quantities(g: &Graph) -> Result<WalkAverages> {
    let table = hitting_times(g)?;
    let pi = g.stationary();
    let mut acc = WalkAverages { q1: 0.0, q2: 0.0, q3: 0.0 };
    for z in 0..g.n_vertices() {
        let q = walk_averages_at(g, &table, z);
        acc.q1 += pi.get(z) * q.q1;
        acc.q2 += pi.get(z) * q.q2;
        acc.q3 += pi.get(z) * q.q3;
    }
    Ok(acc)
}

/// Exact binomial coefficient, `N <= 64`.
pub fn binomial(n: usize, r: usize) -> Result<u128> {
    if n > 64 {
        return Err(Error::TooLarge { n, max: 64 });
    }
    if r > n {
        return Ok(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    Ok(acc)
}

fn cast<T: NumCast>(v: u128) -> Result<T> {
    T::from(v).ok_or_else(|| Error::OutOfRange(format!("binomial {v} does not fit the scalar type")))
}

/// `Σ αᵢ uⁱ` of degree at most `N`, where `N = n_sites()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial<T> {
    pub coeffs: Vec<T>,
}

impl<T: Num + NumCast + Copy> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::OutOfRange("polynomial needs N+1 >= 1 coefficients".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn n_sites(&self) -> usize {
        self.coeffs.len() - 1
    }
}

impl Polynomial<f64> {
    /// `Γ u (1 - u)` over `N` sites.
    pub fn gamma_u_one_minus_u(gamma: f64, n_sites: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::OutOfRange(format!("need N >= 2, got {n_sites}")));
        }
        let mut coeffs = vec![0.0; n_sites + 1];
        coeffs[1] = gamma;
        coeffs[2] = -gamma;
        Ok(Self { coeffs })
    }

    pub fn evaluate(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * u + a)
    }
}

/// Monomial coefficients of `Σₙ A(n) uⁿ (1-u)^{N-n}`.
pub fn bernoulli_transform<T: Num + NumCast + Copy>(a: &[T]) -> Result<Polynomial<T>> {
    if a.is_empty() {
        return Err(Error::OutOfRange("transform needs N+1 >= 1 values".into()));
    }
    let n_sites = a.len() - 1;
    let mut coeffs = vec![T::zero(); n_sites + 1];
    for (n, &an) in a.iter().enumerate() {
        for (i, slot) in coeffs.iter_mut().enumerate().skip(n) {
            let term = an * cast::<T>(binomial(n_sites - n, i - n)?)?;
            *slot = if (i - n) % 2 == 0 { *slot + term } else { *slot - term };
        }
    }
    Ok(Polynomial { coeffs })
}

/// Recovers `A(n) = Σᵢ αᵢ C(N-i, n-i)` from the monomial coefficients.
pub fn invert_transform<T: Num + NumCast + Copy>(p: &Polynomial<T>) -> Result<Vec<T>> {
    let n_sites = p.n_sites();
    let mut a = vec![T::zero(); n_sites + 1];
    for (i, &alpha) in p.coeffs.iter().enumerate() {
        for (n, slot) in a.iter_mut().enumerate().skip(i) {
            *slot = *slot + alpha * cast::<T>(binomial(n_sites - i, n - i)?)?;
        }
    }
    Ok(a)
}

/// Expectation under `uniform_n` of the function whose transform is `p`.
pub fn un_expectation(p: &Polynomial<f64>, n: usize) -> Result<f64> {
    let n_sites = p.n_sites();
    if n == 0 || n >= n_sites {
        return Err(Error::OutOfRange(format!("need 1 <= n <= N-1, got n={n}, N={n_sites}")));
    }
    let a = invert_transform(p)?;
    Ok(a[n] / binomial(n_sites, n)? as f64)
}

/// `Γ` assembled from π-averaged meeting times.
pub fn gamma_walk_route(rule: Rule, g: &Graph, payoff: &PayoffMatrix, meeting: &MeetingTable) -> Result<f64> {
    payoff.require_canonical()?;
    let (b, c) = (payoff.b(), payoff.c());
    let k = g.degree() as f64;
    let m = |which| pi_pair_expectation(g, meeting, which);
    Ok(match rule {
        Rule::Voter => 0.0,
        Rule::DeathBirth => {
            let x1y1 = m(WalkPair::Independent(1, 1));
            let y1y2 = m(WalkPair::SameWalk(1, 2));
            let x1y2 = m(WalkPair::Independent(1, 2));
            k * (-c * x1y1 - b * y1y2 + b * x1y2)
        }
        Rule::Imitation => {
            let y1y2 = m(WalkPair::SameWalk(1, 2));
            let x0x1 = m(WalkPair::SameWalk(0, 1));
            let y0y2 = m(WalkPair::SameWalk(0, 2));
            let x1y1 = m(WalkPair::Independent(1, 1));
            let x1y2 = m(WalkPair::Independent(1, 2));
            let kp1 = k + 1.0;
            k * (-b * y1y2 - (2.0 * c + b) / kp1 * x0x1 + b / kp1 * y0y2 - (k * c - b) / kp1 * x1y1
                + k * b / kp1 * x1y2)
        }
    })
}

/// `Γ` from the closed form, after checking it against the walk route.
pub fn gamma(rule: Rule, g: &Graph, payoff: &PayoffMatrix) -> Result<f64> {
    payoff.require_canonical()?;
    let closed = gamma_closed_form(rule, g.degree(), g.n_vertices(), payoff.b(), payoff.c());
    let walk = gamma_walk_route(rule, g, payoff, &meeting_times(g)?)?;
    if (walk - closed).abs() > GAMMA_ROUTE_TOL * closed.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "walk-route Γ = {walk} disagrees with closed form {closed}"
        )));
    }
    Ok(closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn transitive_suite() -> Vec<Graph> {
        vec![
            Graph::cycle(4).unwrap(),
            Graph::cycle(5).unwrap(),
            Graph::cycle(6).unwrap(),
            Graph::complete(3).unwrap(),
            Graph::complete(4).unwrap(),
            Graph::complete(6).unwrap(),
            Graph::torus2d(3, 4).unwrap(),
            Graph::petersen().unwrap(),
        ]
    }

    #[test]
    fn hitting_examples() {
        let f = hitting_times(&Graph::complete(4).unwrap()).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let want = if x == y { 0.0 } else { 3.0 };
                assert!((f.get(x, y) - want).abs() < 1e-12);
            }
        }
        let f = hitting_times(&Graph::cycle(4).unwrap()).unwrap();
        assert!((f.get(0, 1) - 3.0).abs() < 1e-12);
        assert!((f.get(0, 2) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hitting_invariants() {
        for g in transitive_suite().into_iter().chain([Graph::random_regular(16, 3, 5).unwrap()]) {
            let f = hitting_times(&g).unwrap();
            assert!(f.one_step_residual(&g) < 1e-10);
            for x in 0..g.n_vertices() {
                assert_eq!(f.get(x, x), 0.0);
                assert!((f.return_time(&g, x) - g.n_vertices() as f64).abs() < 1e-10);
                assert!(f.row(x).iter().all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn meeting_examples() {
        let m = meeting_times(&Graph::complete(5).unwrap()).unwrap();
        for x in 0..5 {
            for y in 0..5 {
                let want = if x == y { 0.0 } else { 2.0 };
                assert!((m.get(x, y) - want).abs() < 1e-12);
            }
        }
        let m = meeting_times(&Graph::cycle(4).unwrap()).unwrap();
        assert!((m.get(0, 1) - 1.5).abs() < 1e-12);
        assert!((m.get(0, 2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn meeting_is_half_hitting_on_transitive_graphs() {
        for g in transitive_suite() {
            let f = hitting_times(&g).unwrap();
            let m = meeting_times(&g).unwrap();
            assert_eq!(m.symmetry_residual(), 0.0);
            for x in 0..g.n_vertices() {
                for y in 0..g.n_vertices() {
                    assert!((m.get(x, y) - f.get(x, y) / 2.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn meeting_iterative_matches_dense() {
        // 64 vertices give 2016 unknowns, just over the dense limit.
        let g = Graph::cycle(64).unwrap();
        let m = meeting_times(&g).unwrap();
        for d in 1..32 {
            assert!((m.get(0, d) - (d * (64 - d)) as f64 / 2.0).abs() < 1e-7);
        }
    }

    #[test]
    fn walk_average_examples() {
        let cases = [
            (Graph::complete(4).unwrap(), (3.0, 2.0, 7.0 / 3.0)),
            (Graph::cycle(5).unwrap(), (4.0, 3.0, 4.5)),
            (Graph::petersen().unwrap(), (9.0, 8.0, 31.0 / 3.0)),
        ];
        for (g, (q1, q2, q3)) in cases {
            let got = lemma41_quantities(&g).unwrap();
            let want = WalkAverages { q1, q2, q3 };
            assert!(got.max_abs_diff(&want) < 1e-9, "{got:?}");
            assert!(got.max_abs_diff(&WalkAverages::predicted(g.n_vertices(), g.degree())) < 1e-9);
        }
    }

    #[test]
    fn walk_averages_per_vertex_on_transitive_graphs() {
        for g in transitive_suite() {
            let f = hitting_times(&g).unwrap();
            let want = WalkAverages::predicted(g.n_vertices(), g.degree());
            for z in 0..g.n_vertices() {
                assert!(walk_averages_at(&g, &f, z).max_abs_diff(&want) < 1e-9);
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2).unwrap(), 10);
        assert_eq!(binomial(64, 32).unwrap(), 1_832_624_140_942_590_534);
        assert_eq!(binomial(3, 5).unwrap(), 0);
        assert!(binomial(65, 2).is_err());
    }

    #[test]
    fn transform_examples() {
        let p = bernoulli_transform(&[1i128, 0, 0, 0]).unwrap();
        assert_eq!(p.coeffs, vec![1, -3, 3, -1]);
        let a = invert_transform(&Polynomial::new(vec![0i128, 1, 0, 0]).unwrap()).unwrap();
        assert_eq!(a, vec![0, 1, 2, 1]);
    }

    #[test]
    fn un_expectation_examples() {
        let gamma = -1.7;
        for n_sites in 3..12 {
            let p = Polynomial::gamma_u_one_minus_u(gamma, n_sites).unwrap();
            for n in 1..n_sites {
                let want = gamma * (n * (n_sites - n)) as f64 / (n_sites * (n_sites - 1)) as f64;
                assert!((un_expectation(&p, n).unwrap() - want).abs() < 1e-12);
            }
        }
        let mut one = vec![0.0; 6];
        one[0] = 1.0;
        assert!((un_expectation(&Polynomial::new(one).unwrap(), 3).unwrap() - 1.0).abs() < 1e-12);
        let p = Polynomial::new(vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((un_expectation(&p, 2).unwrap() - 0.4).abs() < 1e-12);
        assert!(un_expectation(&p, 0).is_err());
        assert!(un_expectation(&p, 5).is_err());
    }

    #[test]
    fn transform_matches_product_measure() {
        // 𝓑f(u) evaluated directly as a sum over A(n) uⁿ(1-u)^{N-n}.
        let a = [0.3, -1.0, 2.5, 0.0, 4.0];
        let p = bernoulli_transform(&a).unwrap();
        for u in [0.0f64, 0.2, 0.5, 0.9, 1.0] {
            let direct: f64 = a
                .iter()
                .enumerate()
                .map(|(n, an)| an * u.powi(n as i32) * (1.0 - u).powi(4 - n as i32))
                .sum();
            assert!((p.evaluate(u) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_examples() {
        let g = gamma(Rule::DeathBirth, &Graph::cycle(5).unwrap(), &PayoffMatrix::canonical(10.0, 1.0)).unwrap();
        assert!((g - 2.0).abs() < 1e-12);
        let g = gamma(Rule::Imitation, &Graph::complete(4).unwrap(), &PayoffMatrix::canonical(1.0, 1.0)).unwrap();
        assert!((g + 6.0).abs() < 1e-12);
        for rule in Rule::ALL {
            assert_eq!(gamma(rule, &Graph::petersen().unwrap(), &PayoffMatrix::zero()).unwrap(), 0.0);
        }
    }

    #[test]
    fn gamma_routes_agree_on_transitive_graphs() {
        for g in transitive_suite() {
            let m = meeting_times(&g).unwrap();
            for (b, c) in [(2.0, 1.0), (10.0, 1.0), (1.0, 3.0)] {
                let payoff = PayoffMatrix::canonical(b, c);
                for rule in [Rule::DeathBirth, Rule::Imitation] {
                    let walk = gamma_walk_route(rule, &g, &payoff, &m).unwrap();
                    let closed = gamma_closed_form(rule, g.degree(), g.n_vertices(), b, c);
                    assert!((walk - closed).abs() < 1e-8, "{rule} N={} {walk} {closed}", g.n_vertices());
                }
            }
        }
    }

    #[test]
    fn gamma_needs_canonical_payoff() {
        let p = PayoffMatrix::general(3.0, 1.0, 4.0, 2.0);
        assert!(gamma(Rule::DeathBirth, &Graph::cycle(5).unwrap(), &p).is_err());
    }

    proptest! {
        #[test]
        fn transform_round_trip_is_exact(a in proptest::collection::vec(-1000i128..1000, 1..14)) {
            let p = bernoulli_transform(&a).unwrap();
            prop_assert_eq!(invert_transform(&p).unwrap(), a);
        }
    }
}
