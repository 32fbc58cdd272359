//! The exact, walk and closed-form routes to the first-order coefficient,
//! checked against one another.

use fixlab_core::closedform::{gamma_closed_form, theorem1_coefficient};
use fixlab_core::coalescent::{
    gamma, gamma_walk_route, hitting_times, lemma41_quantities, meeting_times, WalkAverages,
};
use fixlab_core::exact::{w_derivative_at_zero, zero_potential, InitialDistribution, StateSpace};
use fixlab_core::{Graph, PayoffMatrix, Rule};

const RULES: [Rule; 2] = [Rule::DeathBirth, Rule::Imitation];

#[test]
fn potential_matches_closed_form_on_small_graphs() {
    let graphs = [
        Graph::cycle(4).unwrap(),
        Graph::cycle(7).unwrap(),
        Graph::complete(5).unwrap(),
        Graph::torus2d(3, 3).unwrap(),
        Graph::petersen().unwrap(),
    ];
    for g in &graphs {
        let (n_total, k) = (g.n_vertices(), g.degree());
        for (b, c) in [(3.0, 1.0), (0.5, 2.0)] {
            for rule in RULES {
                let space = StateSpace::new(g.clone(), rule, PayoffMatrix::canonical(b, c)).unwrap();
                let pot = space.potential_vector().unwrap();
                for n in 1..n_total {
                    let init = InitialDistribution::UniformN(n);
                    let got = init.expect(n_total, &pot);
                    let want = theorem1_coefficient(rule, k, n_total, n, b, c).unwrap().coefficient;
                    assert!((got - want).abs() < 1e-8, "{rule} N={n_total} n={n}: {got} vs {want}");
                }
            }
        }
    }
}

#[test]
fn derivative_matches_potential() {
    for g in [Graph::cycle(6).unwrap(), Graph::complete(4).unwrap()] {
        for rule in RULES {
            let space = StateSpace::new(g.clone(), rule, PayoffMatrix::canonical(5.0, 1.0)).unwrap();
            for init in [
                InitialDistribution::UniformN(2),
                InitialDistribution::Bernoulli(0.3),
                InitialDistribution::Point(fixlab_core::Config::from_index(g.n_vertices(), 0b0101)),
            ] {
                let d = w_derivative_at_zero(&space, &init).unwrap();
                let p = zero_potential(&space, &init).unwrap();
                assert!((d - p).abs() < 1e-5, "{rule} {init:?}: {d} vs {p}");
            }
        }
    }
}

/// Random regular graphs are generally not vertex-transitive, so hitting
/// times need not be symmetric and `m = f/2` fails pair by pair. The
/// π-averaged quantities, and hence `Γ`, still come out as on transitive
/// graphs.
#[test]
fn routes_agree_on_random_regular_graphs() {
    for (n_total, k, seed) in [(8, 3, 1), (10, 3, 2), (12, 3, 3), (10, 4, 4)] {
        let g = Graph::random_regular(n_total, k, seed).unwrap();
        let f = hitting_times(&g).unwrap();
        let m = meeting_times(&g).unwrap();
        let averages = lemma41_quantities(&g).unwrap();
        println!(
            "rr:{n_total}:{k}:{seed}  hitting asymmetry {:.3e}  walk-average gap {:.3e}",
            f.symmetry_residual(),
            averages.max_abs_diff(&WalkAverages::predicted(n_total, k))
        );
        assert!(averages.max_abs_diff(&WalkAverages::predicted(n_total, k)) < 1e-9);
        for rule in RULES {
            let payoff = PayoffMatrix::canonical(4.0, 1.0);
            let walk = gamma_walk_route(rule, &g, &payoff, &m).unwrap();
            let closed = gamma_closed_form(rule, k, n_total, 4.0, 1.0);
            assert!((walk - closed).abs() < 1e-8, "{rule}: {walk} vs {closed}");
            assert_eq!(gamma(rule, &g, &payoff).unwrap(), closed);

            let space = StateSpace::new(g.clone(), rule, payoff).unwrap();
            let pot = zero_potential(&space, &InitialDistribution::UniformN(1)).unwrap();
            let want = closed * (n_total - 1) as f64 / (n_total * (n_total - 1)) as f64;
            assert!((pot - want).abs() < 1e-8, "{rule}: {pot} vs {want}");
        }
    }
}
