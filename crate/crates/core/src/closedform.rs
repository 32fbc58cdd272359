//! First-order fixation formulas, the b/c sign test and the replicator
//! baseline.
//!
//! On a `k`-regular graph of size `N`, starting from `n` uniformly placed
//! cooperators,
//!
//! ```text
//! P^w(fixation) = n/N + w · prefactor · bracket + O(w²)
//! ```
//!
//! where the bracket is affine in `N` and carries the sign of the selection
//! effect. The bracket times `N(N-1)/(n(N-n))` times the prefactor is the
//! constant `Γ` assembled independently in [`crate::coalescent`].

use serde::{Deserialize, Serialize};

use crate::dynamics::Rule;
use crate::error::{Error, Result};

/// The first-order expansion of the fixation probability from `uniform_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Result {
    /// `n/N`, the voter-model value.
    pub neutral_term: f64,
    /// Coefficient of `w`.
    pub coefficient: f64,
    pub prefactor: f64,
    pub bracket: f64,
}

impl Theorem1Result {
    pub fn first_order(&self, w: f64) -> f64 {
        self.neutral_term + w * self.coefficient
    }
}

fn check_sizes(k: usize, n_total: usize) -> Result<()> {
    if n_total < 3 {
        return Err(Error::OutOfRange(format!("population size must be >= 3, got {n_total}")));
    }
    if k < 2 || k > n_total - 1 {
        return Err(Error::OutOfRange(format!(
            "degree must satisfy 2 <= k <= N-1, got k={k}, N={n_total}"
        )));
    }
    Ok(())
}

/// Slope and intercept of the bracket as a function of `N`.
fn bracket_affine(rule: Rule, k: usize, b: f64, c: f64) -> (f64, f64) {
    let k = k as f64;
    match rule {
        Rule::Voter => (0.0, 0.0),
        Rule::DeathBirth => {
            // (b/k - c)(N - 2) + b(2/k - 2)
            let slope = b / k - c;
            (slope, -2.0 * slope + b * (2.0 / k - 2.0))
        }
        Rule::Imitation => {
            // (b/(k+2) - c)(N - 1) - ((2k+1)b - ck)/(k+2)
            let slope = b / (k + 2.0) - c;
            (slope, -slope - ((2.0 * k + 1.0) * b - c * k) / (k + 2.0))
        }
    }
}

/// The sign-carrying factor of the first-order coefficient.
pub fn bracket(rule: Rule, k: usize, n_total: usize, b: f64, c: f64) -> f64 {
    let (slope, intercept) = bracket_affine(rule, k, b, c);
    slope * n_total as f64 + intercept
}

/// Ratio `Γ / bracket`, which depends on `k` only.
fn gamma_scale(rule: Rule, k: usize) -> f64 {
    let k = k as f64;
    match rule {
        Rule::Voter => 0.0,
        Rule::DeathBirth => k / 2.0,
        Rule::Imitation => k * (k + 2.0) / (2.0 * (k + 1.0)),
    }
}

/// `Γ` in closed form: the first-order coefficient from `uniform_n` is
/// `Γ·n(N-n)/(N(N-1))`.
pub fn gamma_closed_form(rule: Rule, k: usize, n_total: usize, b: f64, c: f64) -> f64 {
    gamma_scale(rule, k) * bracket(rule, k, n_total, b, c)
}

pub fn theorem1_coefficient(rule: Rule, k: usize, n_total: usize, n: usize, b: f64, c: f64) -> Result<Theorem1Result> {
    check_sizes(k, n_total)?;
    if n == 0 || n >= n_total {
        return Err(Error::OutOfRange(format!("need 1 <= n <= N-1, got n={n}, N={n_total}")));
    }
    let big_n = n_total as f64;
    let spread = (n * (n_total - n)) as f64 / (big_n * (big_n - 1.0));
    let prefactor = match rule {
        // No selection; any positive prefactor keeps the result well formed.
        Rule::Voter => spread,
        _ => gamma_scale(rule, k) * spread,
    };
    let bracket = bracket(rule, k, n_total, b, c);
    Ok(Theorem1Result {
        neutral_term: n as f64 / big_n,
        coefficient: prefactor * bracket,
        prefactor,
        bracket,
    })
}

/// Direction of weak selection on cooperation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcVerdict {
    Favors,
    Opposes,
    Critical,
}

impl std::fmt::Display for BcVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BcVerdict::Favors => "favors",
            BcVerdict::Opposes => "opposes",
            BcVerdict::Critical => "critical",
        })
    }
}

fn critical_band(n_total: usize, b: f64, c: f64) -> f64 {
    1e-12 * 1f64.max(b.abs()).max(c.abs()) * n_total as f64
}

/// Sign of the bracket, shared by every `n` because the prefactor is
/// positive.
pub fn bc_sign(rule: Rule, k: usize, n_total: usize, b: f64, c: f64) -> Result<BcVerdict> {
    check_sizes(k, n_total)?;
    let value = bracket(rule, k, n_total, b, c);
    Ok(if value.abs() <= critical_band(n_total, b, c) {
        BcVerdict::Critical
    } else if value > 0.0 {
        BcVerdict::Favors
    } else {
        BcVerdict::Opposes
    })
}

/// Smallest population from which on the verdict no longer changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalSize {
    pub n0: usize,
    /// Large-population verdict, `Favors` or `Opposes`.
    pub verdict: BcVerdict,
}

/// Least `N₀ >= 3` such that the bracket has the sign of its slope for every
/// `N >= N₀`.
pub fn critical_size(rule: Rule, k: usize, b: f64, c: f64) -> Result<CriticalSize> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("degree must be >= 2, got {k}")));
    }
    let (slope, intercept) = bracket_affine(rule, k, b, c);
    if slope.abs() <= 1e-15 * 1f64.max(b.abs()).max(c.abs()) {
        return Err(Error::CriticalRatio);
    }
    let sign = slope.signum();
    let holds = |n: usize| sign * (slope * n as f64 + intercept) > critical_band(n, b, c);
    let root = -intercept / slope;
    let mut n0 = if root < 3.0 { 3 } else { root.floor() as usize + 1 };
    while !holds(n0) {
        n0 += 1;
    }
    while n0 > 3 && holds(n0 - 1) {
        n0 -= 1;
    }
    let verdict = if sign > 0.0 { BcVerdict::Favors } else { BcVerdict::Opposes };
    Ok(CriticalSize { n0, verdict })
}

/// First-order coefficient for death-birth on the complete graph `K_N`.
pub fn remark_complete_graph(n_total: usize, n: usize, b: f64, c: f64) -> Result<f64> {
    if n_total < 3 || n == 0 || n >= n_total {
        return Err(Error::OutOfRange(format!("need N >= 3 and 1 <= n <= N-1, got N={n_total}, n={n}")));
    }
    let big_n = n_total as f64;
    let spread = (n * (n_total - n)) as f64 / (2.0 * big_n);
    Ok(spread * (-c * (big_n - 2.0) - (2.0 - big_n / (big_n - 1.0)) * b))
}

/// Cooperator fraction under the well-mixed replicator equation
/// `z' = -c z (1 - z)`.
pub fn replicator_fraction(z0: f64, c: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z0) {
        return Err(Error::OutOfRange(format!("initial fraction must lie in [0, 1], got {z0}")));
    }
    if !(t >= 0.0) {
        return Err(Error::OutOfRange(format!("time must be >= 0, got {t}")));
    }
    let decay = (-c * t).exp();
    Ok(z0 * decay / (1.0 - z0 + z0 * decay))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn theorem1_examples() {
        let r = theorem1_coefficient(Rule::DeathBirth, 2, 5, 1, 6.0, 1.0).unwrap();
        assert!(r.bracket.abs() < 1e-12 && r.coefficient.abs() < 1e-12);

        let r = theorem1_coefficient(Rule::DeathBirth, 2, 3, 1, 2.0, 1.0).unwrap();
        assert!((r.prefactor - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.bracket + 2.0).abs() < 1e-15);
        assert!((r.coefficient + 2.0 / 3.0).abs() < 1e-15);

        let r = theorem1_coefficient(Rule::Imitation, 3, 4, 2, 1.0, 1.0).unwrap();
        assert!((r.coefficient + 2.0).abs() < 1e-12);

        let r = theorem1_coefficient(Rule::DeathBirth, 2, 5, 1, 10.0, 1.0).unwrap();
        assert!((r.first_order(1e-3) - 0.2004).abs() < 1e-15);
    }

    #[test]
    fn theorem1_ranges() {
        assert!(theorem1_coefficient(Rule::DeathBirth, 2, 2, 1, 1.0, 1.0).is_err());
        assert!(theorem1_coefficient(Rule::DeathBirth, 2, 5, 0, 1.0, 1.0).is_err());
        assert!(theorem1_coefficient(Rule::DeathBirth, 2, 5, 5, 1.0, 1.0).is_err());
        assert!(theorem1_coefficient(Rule::DeathBirth, 1, 5, 2, 1.0, 1.0).is_err());
        assert!(theorem1_coefficient(Rule::DeathBirth, 5, 5, 2, 1.0, 1.0).is_err());
        assert!(theorem1_coefficient(Rule::DeathBirth, 4, 5, 2, 1.0, 1.0).is_ok());
    }

    #[test]
    fn gamma_examples() {
        assert!((gamma_closed_form(Rule::DeathBirth, 2, 5, 10.0, 1.0) - 2.0).abs() < 1e-12);
        assert!((gamma_closed_form(Rule::Imitation, 3, 4, 1.0, 1.0) + 6.0).abs() < 1e-12);
        for rule in Rule::ALL {
            assert_eq!(gamma_closed_form(rule, 3, 10, 0.0, 0.0), 0.0);
        }
    }

    #[test]
    fn bc_sign_examples() {
        assert_eq!(bc_sign(Rule::DeathBirth, 3, 100, 4.0, 1.0).unwrap(), BcVerdict::Favors);
        assert!((bracket(Rule::DeathBirth, 3, 100, 4.0, 1.0) - 82.0 / 3.0).abs() < 1e-12);
        assert_eq!(bc_sign(Rule::DeathBirth, 3, 100, 2.0, 1.0).unwrap(), BcVerdict::Opposes);
        assert_eq!(bc_sign(Rule::DeathBirth, 2, 5, 6.0, 1.0).unwrap(), BcVerdict::Critical);
    }

    #[test]
    fn critical_size_examples() {
        let cs = critical_size(Rule::DeathBirth, 3, 4.0, 1.0).unwrap();
        assert_eq!(cs, CriticalSize { n0: 19, verdict: BcVerdict::Favors });
        let cs = critical_size(Rule::DeathBirth, 3, 2.0, 1.0).unwrap();
        assert_eq!(cs, CriticalSize { n0: 3, verdict: BcVerdict::Opposes });
        assert_eq!(critical_size(Rule::DeathBirth, 2, 2.0, 1.0), Err(Error::CriticalRatio));
        assert_eq!(critical_size(Rule::Imitation, 3, 5.0, 1.0), Err(Error::CriticalRatio));
    }

    #[test]
    fn critical_size_is_least_stable_point() {
        // Brute-force oracle over a grid of payoffs.
        for rule in [Rule::DeathBirth, Rule::Imitation] {
            for k in 2..6 {
                for bi in 0..40 {
                    let b = 0.37 * bi as f64;
                    let Ok(cs) = critical_size(rule, k, b, 1.0) else { continue };
                    let want = if cs.verdict == BcVerdict::Favors { 1.0 } else { -1.0 };
                    let good = |n: usize| want * bracket(rule, k, n, b, 1.0) > critical_band(n, b, 1.0);
                    for n in cs.n0..cs.n0 + 500 {
                        assert!(good(n), "{rule} k={k} b={b} n={n}");
                    }
                    if cs.n0 > 3 {
                        assert!(!good(cs.n0 - 1));
                    }
                }
            }
        }
    }

    #[test]
    fn complete_graph_examples() {
        assert!((remark_complete_graph(3, 1, 2.0, 1.0).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        assert!((remark_complete_graph(5, 1, 1.0, 1.0).unwrap() + 1.5).abs() < 1e-15);
    }

    #[test]
    fn replicator_examples() {
        assert_eq!(replicator_fraction(0.3, 0.0, 5.0).unwrap(), 0.3);
        assert_eq!(replicator_fraction(0.0, 1.0, 5.0).unwrap(), 0.0);
        assert_eq!(replicator_fraction(1.0, 1.0, 5.0).unwrap(), 1.0);
        let z = replicator_fraction(0.5, 1.0, 2f64.ln()).unwrap();
        assert!((z - 1.0 / 3.0).abs() < 1e-15);
        assert!(replicator_fraction(1.2, 1.0, 1.0).is_err());
        assert!(replicator_fraction(0.2, 1.0, -1.0).is_err());
    }

    #[test]
    fn replicator_matches_rk4() {
        let (z0, c, t_end, h) = (0.5, 1.0, 2f64.ln(), 1e-3);
        let rhs = |z: f64| -c * z * (1.0 - z);
        let steps = (t_end / h).round() as usize;
        let h = t_end / steps as f64;
        let mut z = z0;
        for _ in 0..steps {
            let k1 = rhs(z);
            let k2 = rhs(z + 0.5 * h * k1);
            let k3 = rhs(z + 0.5 * h * k2);
            let k4 = rhs(z + h * k3);
            z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((z - replicator_fraction(z0, c, t_end).unwrap()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn complete_graph_identity(n_total in 3usize..60, frac in 0.0f64..1.0, b in 0.01f64..20.0, c in 0.01f64..20.0) {
            let n = 1 + ((n_total - 2) as f64 * frac) as usize;
            let direct = remark_complete_graph(n_total, n, b, c).unwrap();
            let general = theorem1_coefficient(Rule::DeathBirth, n_total - 1, n_total, n, b, c).unwrap().coefficient;
            prop_assert!((direct - general).abs() < 1e-12 * direct.abs().max(1.0));
            prop_assert!(direct < 0.0);
        }

        #[test]
        fn verdict_independent_of_n(k in 2usize..6, extra in 1usize..30, b in 0.0f64..20.0, c in 0.0f64..5.0) {
            let n_total = k + extra;
            for rule in [Rule::DeathBirth, Rule::Imitation] {
                let verdict = bc_sign(rule, k, n_total, b, c).unwrap();
                for n in 1..n_total {
                    let r = theorem1_coefficient(rule, k, n_total, n, b, c).unwrap();
                    prop_assert!(r.prefactor > 0.0);
                    let sym = theorem1_coefficient(rule, k, n_total, n_total - n, b, c).unwrap();
                    prop_assert!((r.prefactor - sym.prefactor).abs() < 1e-15);
                    if verdict != BcVerdict::Critical {
                        prop_assert_eq!(r.coefficient > 0.0, verdict == BcVerdict::Favors);
                    }
                }
            }
        }

        #[test]
        fn replicator_decreasing(z0 in 0.01f64..0.99, c in 0.01f64..5.0, t in 0.0f64..10.0, dt in 0.001f64..1.0) {
            let a = replicator_fraction(z0, c, t).unwrap();
            let b = replicator_fraction(z0, c, t + dt).unwrap();
            prop_assert!(b < a);
        }
    }
}
