use std::io::Write;

use fixlab_core::closedform::{bc_sign, bracket, critical_size, gamma_closed_form, theorem1_coefficient};
use fixlab_core::coalescent::{gamma, hitting_times, walk_averages_at, meeting_times, WalkAverages, PairTable};
use fixlab_core::dynamics::reduce_equal_gains;
use fixlab_core::exact::{fixation_exact, w_derivative_at_zero, zero_potential, InitialDistribution, StateSpace};
use fixlab_core::montecarlo::{estimate_with_progress, SimPlan};
use fixlab_core::perturbation::p1;
use fixlab_core::{ChainSpec, Error, Graph, PayoffMatrix, Rule};
use serde::Serialize;

use crate::args::{BcArgs, ChainArgs, ExactArgs, McArgs, SweepArgs, TableKind, TablesArgs, Theorem1Args};
use crate::record::{
    BcOutputs, ExactDeltas, ExactOutputs, Inputs, McOutputs, Outputs, RunRecord, TablesOutputs, Theorem1Outputs,
};
use crate::specs::{format_init, instantiate, parse_init, GraphSpec};
use crate::CliError;

type CmdResult = Result<(), CliError>;

/// Tolerances of the exact command's cross-route checks, relative to
/// `max(1, |value|)`.
const DERIVATIVE_TOL: f64 = 1e-5;
const GAMMA_TOL: f64 = 1e-8;

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn build_graph(spec: &str) -> Result<(GraphSpec, Graph), CliError> {
    let parsed: GraphSpec = spec.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
    let graph = parsed.build()?;
    Ok((parsed, graph))
}

fn init_arg(s: &str) -> Result<InitialDistribution, CliError> {
    parse_init(s).map_err(|e| CliError::Usage(e.to_string()))
}

/// The payoff and intensity actually simulated, after any equal-gains
/// reduction.
struct ResolvedChain {
    payoff: PayoffMatrix,
    w: f64,
    payoff_given: Option<PayoffMatrix>,
    w_given: Option<f64>,
}

fn resolve_chain(args: &ChainArgs, k: usize) -> Result<ResolvedChain, CliError> {
    match args.payoff {
        Some(given) => {
            let reduced = reduce_equal_gains(&given, args.w, k)?;
            Ok(ResolvedChain {
                payoff: reduced.payoff,
                w: reduced.w,
                payoff_given: Some(given),
                w_given: Some(args.w),
            })
        }
        None => Ok(ResolvedChain {
            payoff: PayoffMatrix::canonical(args.b.unwrap_or(0.0), args.c.unwrap_or(0.0)),
            w: args.w,
            payoff_given: None,
            w_given: None,
        }),
    }
}

fn chain_inputs(spec: &GraphSpec, g: &Graph, args: &ChainArgs, chain: &ResolvedChain, init: &InitialDistribution) -> Inputs {
    Inputs {
        graph: Some(spec.to_string()),
        n_vertices: Some(g.n_vertices()),
        degree: Some(g.degree()),
        rule: Some(args.rule),
        payoff_given: chain.payoff_given,
        w_given: chain.w_given,
        b: Some(chain.payoff.b()),
        c: Some(chain.payoff.c()),
        w: Some(chain.w),
        init: Some(format_init(init)),
        ..Inputs::default()
    }
}

/// Fixation probability of the voter model from `init`.
fn neutral_value(g: &Graph, init: &InitialDistribution) -> f64 {
    match init {
        InitialDistribution::Point(eta) => p1(g, eta),
        InitialDistribution::UniformN(n) => *n as f64 / g.n_vertices() as f64,
        InitialDistribution::Bernoulli(u) => *u,
    }
}

/// First-order coefficient from `Γ`, where the start law allows one.
fn coefficient_from_gamma(gamma: f64, n_total: usize, init: &InitialDistribution) -> Option<f64> {
    match init {
        InitialDistribution::UniformN(n) => Some(gamma * (n * (n_total - n)) as f64 / (n_total * (n_total - 1)) as f64),
        InitialDistribution::Bernoulli(u) => Some(gamma * u * (1.0 - u)),
        InitialDistribution::Point(_) => None,
    }
}

fn emit_json(out: &mut dyn Write, record: &RunRecord) -> CmdResult {
    let text = serde_json::to_string_pretty(record).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out, "{text}").map_err(io)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

fn describe_chain(out: &mut dyn Write, inputs: &Inputs) -> CmdResult {
    let show = |v: Option<f64>| opt(v);
    writeln!(
        out,
        "graph: {} (N={}, k={})",
        inputs.graph.as_deref().unwrap_or("?"),
        inputs.n_vertices.unwrap_or(0),
        inputs.degree.unwrap_or(0)
    )
    .map_err(io)?;
    if let Some(rule) = inputs.rule {
        writeln!(out, "rule: {rule}").map_err(io)?;
    }
    if let Some(given) = inputs.payoff_given {
        writeln!(out, "payoff given: {given} at w = {}", show(inputs.w_given)).map_err(io)?;
    }
    writeln!(out, "b: {}  c: {}  w: {}", show(inputs.b), show(inputs.c), show(inputs.w)).map_err(io)?;
    if let Some(init) = &inputs.init {
        writeln!(out, "init: {init}").map_err(io)?;
    }
    Ok(())
}

pub fn exact(args: &ExactArgs, out: &mut dyn Write) -> CmdResult {
    let (spec, g) = build_graph(&args.chain.graph)?;
    let init = init_arg(&args.chain.init)?;
    let chain = resolve_chain(&args.chain, g.degree())?;
    let rule = args.chain.rule;
    // Validates w against w_max before any solve.
    ChainSpec::new(rule, chain.w, chain.payoff, g.degree())?;
    let space = StateSpace::new(g.clone(), rule, chain.payoff)?;
    let fixation = fixation_exact(&space, chain.w, &init)?;
    let neutral = neutral_value(&g, &init);

    let potential = zero_potential(&space, &init)?;
    let derivative = w_derivative_at_zero(&space, &init)?;
    let gamma = if rule == Rule::Voter { None } else { Some(gamma(rule, &g, &chain.payoff)?) };
    let coefficient = coefficient_from_gamma(gamma.unwrap_or(0.0), g.n_vertices(), &init);
    let first_order = coefficient.map(|a| neutral + chain.w * a);

    let outputs = ExactOutputs {
        fixation,
        neutral,
        zero_potential: potential,
        w_derivative: derivative,
        gamma,
        coefficient,
        first_order,
        deltas: ExactDeltas {
            derivative_minus_potential: derivative - potential,
            potential_minus_coefficient: coefficient.map(|a| potential - a),
            fixation_minus_first_order: first_order.map(|f| fixation - f),
        },
    };
    let inputs = chain_inputs(&spec, &g, &args.chain, &chain, &init);
    let record = RunRecord::new("exact", inputs.clone(), Outputs::Exact(outputs.clone()));
    if args.json {
        emit_json(out, &record)?;
    } else {
        describe_chain(out, &inputs)?;
        let lines = [
            ("fixation", Some(outputs.fixation)),
            ("neutral", Some(outputs.neutral)),
            ("zero_potential", Some(outputs.zero_potential)),
            ("w_derivative", Some(outputs.w_derivative)),
            ("gamma", outputs.gamma),
            ("first_order_coefficient", outputs.coefficient),
            ("first_order", outputs.first_order),
            ("fixation - first_order", outputs.deltas.fixation_minus_first_order),
            ("w_derivative - zero_potential", Some(outputs.deltas.derivative_minus_potential)),
            ("zero_potential - coefficient", outputs.deltas.potential_minus_coefficient),
        ];
        for (name, value) in lines {
            writeln!(out, "{name}: {}", opt(value)).map_err(io)?;
        }
    }

    let gap = outputs.deltas.derivative_minus_potential.abs();
    if gap > DERIVATIVE_TOL * potential.abs().max(1.0) {
        return Err(Error::Consistency(format!("w-derivative and 0-potential differ by {gap:e}")).into());
    }
    if let Some(d) = outputs.deltas.potential_minus_coefficient {
        if d.abs() > GAMMA_TOL * potential.abs().max(1.0) {
            return Err(Error::Consistency(format!("0-potential and Γ route differ by {:e}", d.abs())).into());
        }
    }
    Ok(())
}

pub fn mc(args: &McArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (spec, g) = build_graph(&args.chain.graph)?;
    let init = init_arg(&args.chain.init)?;
    let chain = resolve_chain(&args.chain, g.degree())?;
    let rule = args.chain.rule;
    let chain_spec = ChainSpec::new(rule, chain.w, chain.payoff, g.degree())?;
    let plan = SimPlan::new(args.replicas, args.seed, init.clone()).with_max_steps(args.max_steps);
    let mut progress_error = None;
    let estimate = estimate_with_progress(&g, &chain_spec, &plan, args.chunk, |partial| {
        if args.progress && progress_error.is_none() {
            let line = serde_json::to_string(partial).expect("estimates serialize");
            if let Err(e) = writeln!(err, "{line}") {
                progress_error = Some(e);
            }
        }
    })?;
    if let Some(e) = progress_error {
        return Err(io(e));
    }
    let exact = if args.exact {
        let space = StateSpace::new(g.clone(), rule, chain.payoff)?;
        Some(fixation_exact(&space, chain.w, &init)?)
    } else {
        None
    };
    let outputs = McOutputs {
        estimate,
        exact,
        z_score: exact.map(|p| estimate.z_score(p)),
    };
    let mut inputs = chain_inputs(&spec, &g, &args.chain, &chain, &init);
    inputs.seed = Some(args.seed);
    inputs.replicas = Some(args.replicas);
    inputs.max_steps = Some(args.max_steps);
    let record = RunRecord::new("mc", inputs.clone(), Outputs::MonteCarlo(outputs.clone()));
    if args.json {
        return emit_json(out, &record);
    }
    describe_chain(out, &inputs)?;
    writeln!(out, "replicas: {}  seed: {}", args.replicas, args.seed).map_err(io)?;
    writeln!(out, "p_hat: {}  stderr: {}", estimate.p_hat, estimate.stderr).map_err(io)?;
    writeln!(
        out,
        "absorbed at 1: {}  absorbed at 0: {}  censored: {}",
        estimate.n_absorbed_1, estimate.n_absorbed_0, estimate.n_censored
    )
    .map_err(io)?;
    if let (Some(p), Some(z)) = (outputs.exact, outputs.z_score) {
        writeln!(out, "exact: {p}  z: {z:.3}").map_err(io)?;
    }
    Ok(())
}

pub fn theorem1(args: &Theorem1Args, out: &mut dyn Write) -> CmdResult {
    let result = theorem1_coefficient(args.rule, args.k, args.population, args.cooperators, args.b, args.c)?;
    let verdict = bc_sign(args.rule, args.k, args.population, args.b, args.c)?;
    let gamma = gamma_closed_form(args.rule, args.k, args.population, args.b, args.c);
    let outputs = Theorem1Outputs {
        result,
        gamma,
        verdict,
        first_order: args.w.map(|w| result.first_order(w)),
    };
    let inputs = Inputs {
        rule: Some(args.rule),
        degree: Some(args.k),
        population: Some(args.population),
        cooperators: Some(args.cooperators),
        b: Some(args.b),
        c: Some(args.c),
        w: args.w,
        ..Inputs::default()
    };
    if args.json {
        return emit_json(out, &RunRecord::new("theorem1", inputs, Outputs::Theorem1(outputs)));
    }
    writeln!(out, "rule: {}  k: {}  N: {}  n: {}  b: {}  c: {}", args.rule, args.k, args.population, args.cooperators, args.b, args.c)
        .map_err(io)?;
    writeln!(out, "neutral: {}", result.neutral_term).map_err(io)?;
    writeln!(out, "prefactor: {}", result.prefactor).map_err(io)?;
    writeln!(out, "bracket: {}", result.bracket).map_err(io)?;
    writeln!(out, "coefficient: {}", result.coefficient).map_err(io)?;
    writeln!(out, "gamma: {gamma}").map_err(io)?;
    writeln!(out, "verdict: {verdict}").map_err(io)?;
    if let Some(p) = outputs.first_order {
        writeln!(out, "first_order: {p}").map_err(io)?;
    }
    Ok(())
}

pub fn bc_rule(args: &BcArgs, out: &mut dyn Write) -> CmdResult {
    let threshold = match args.rule {
        Rule::DeathBirth => format!("k = {}", args.k),
        Rule::Imitation => format!("k+2 = {}", args.k + 2),
        Rule::Voter => return Err(CliError::Usage("the b/c rule needs --rule db or --rule im".into())),
    };
    let outputs = match args.population {
        Some(n_total) => {
            let verdict = bc_sign(args.rule, args.k, n_total, args.b, args.c)?;
            let value = bracket(args.rule, args.k, n_total, args.b, args.c);
            BcOutputs {
                bracket: Some(value),
                verdict: Some(verdict),
                critical_size: None,
                asymptotic_verdict: None,
                summary: format!("selection {verdict} cooperation at N = {n_total} (bracket {value})"),
            }
        }
        None => match critical_size(args.rule, args.k, args.b, args.c) {
            Ok(cs) => BcOutputs {
                bracket: None,
                verdict: None,
                critical_size: Some(cs.n0),
                asymptotic_verdict: Some(cs.verdict),
                summary: format!("{} for N >= {} (b/c = {} against {threshold})", cs.verdict, cs.n0, args.b / args.c),
            },
            Err(Error::CriticalRatio) => {
                return Err(CliError::Domain(format!(
                    "critical ratio: b/c = {} equals {threshold}, so no critical size exists",
                    args.b / args.c
                )))
            }
            Err(e) => return Err(e.into()),
        },
    };
    let inputs = Inputs {
        rule: Some(args.rule),
        degree: Some(args.k),
        population: args.population,
        b: Some(args.b),
        c: Some(args.c),
        ..Inputs::default()
    };
    if args.json {
        return emit_json(out, &RunRecord::new("bc-rule", inputs, Outputs::BcRule(outputs)));
    }
    writeln!(out, "{}", outputs.summary).map_err(io)
}

fn pair_rows(t: &PairTable) -> Vec<Vec<f64>> {
    (0..t.n_vertices()).map(|x| t.row(x).to_vec()).collect()
}

pub fn tables(args: &TablesArgs, out: &mut dyn Write) -> CmdResult {
    let (spec, g) = build_graph(&args.graph)?;
    let f = hitting_times(&g)?;
    let pi = g.stationary();
    let mut averages = WalkAverages { q1: 0.0, q2: 0.0, q3: 0.0 };
    for z in 0..g.n_vertices() {
        let q = walk_averages_at(&g, &f, z);
        averages.q1 += pi.get(z) * q.q1;
        averages.q2 += pi.get(z) * q.q2;
        averages.q3 += pi.get(z) * q.q3;
    }
    let predicted = WalkAverages::predicted(g.n_vertices(), g.degree());
    if args.json {
        let m = meeting_times(&g)?;
        let outputs = TablesOutputs {
            hitting: pair_rows(&f),
            meeting: pair_rows(&m),
            hitting_symmetry_residual: f.symmetry_residual(),
            averages,
            averages_predicted: predicted,
        };
        let inputs = Inputs {
            graph: Some(spec.to_string()),
            n_vertices: Some(g.n_vertices()),
            degree: Some(g.degree()),
            ..Inputs::default()
        };
        return emit_json(out, &RunRecord::new("tables", inputs, Outputs::Tables(outputs)));
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    match args.kind {
        TableKind::Hitting | TableKind::Meeting => {
            let table = if args.kind == TableKind::Hitting { f.0.clone() } else { meeting_times(&g)?.0 };
            let mut header = vec!["x".to_string()];
            header.extend((0..g.n_vertices()).map(|y| y.to_string()));
            w.write_record(&header).map_err(csv_err)?;
            for x in 0..g.n_vertices() {
                let mut row = vec![x.to_string()];
                row.extend(table.row(x).iter().map(|v| v.to_string()));
                w.write_record(&row).map_err(csv_err)?;
            }
        }
        TableKind::Averages => {
            w.write_record(["quantity", "value", "predicted"]).map_err(csv_err)?;
            for (name, got, want) in [
                ("q1", averages.q1, predicted.q1),
                ("q2", averages.q2, predicted.q2),
                ("q3", averages.q3, predicted.q3),
            ] {
                w.write_record([name, &got.to_string(), &want.to_string()]).map_err(csv_err)?;
            }
            w.write_record(["hitting_symmetry_residual", &f.symmetry_residual().to_string(), "0"])
                .map_err(csv_err)?;
        }
    }
    w.flush().map_err(io)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SweepParam {
    W,
    Bc,
    Population,
}

struct Grid {
    param: SweepParam,
    values: Vec<f64>,
}

fn parse_grid(s: &str) -> Result<Grid, CliError> {
    let usage = |msg: &str| CliError::Usage(format!("--vary {s:?}: {msg}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(usage("expected PARAM:start:stop:step"));
    }
    let param = match parts[0] {
        "w" => SweepParam::W,
        "bc" => SweepParam::Bc,
        "N" | "n" => SweepParam::Population,
        _ => return Err(usage("PARAM must be w, bc or N")),
    };
    let num = |t: &str| t.parse::<f64>().map_err(|_| usage("start, stop and step must be numbers"));
    let (start, stop, step) = (num(parts[1])?, num(parts[2])?, num(parts[3])?);
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(usage("step must be positive and the bounds finite"));
    }
    if param == SweepParam::Population && (start.fract() != 0.0 || step.fract() != 0.0 || start < 0.0) {
        return Err(usage("an N sweep needs whole numbers"));
    }
    let count = if stop < start { 0 } else { ((stop - start) / step + 1e-9).floor() as usize + 1 };
    Ok(Grid {
        param,
        values: (0..count).map(|i| start + i as f64 * step).collect(),
    })
}

/// One CSV row. Field order is the column order.
#[derive(Debug, Default, Serialize)]
struct SweepRow {
    graph: String,
    #[serde(rename = "N")]
    population: Option<usize>,
    k: Option<usize>,
    rule: String,
    b: f64,
    c: f64,
    w: f64,
    init: String,
    exact: Option<f64>,
    exact_minus_neutral: Option<f64>,
    mc_p_hat: Option<f64>,
    mc_stderr: Option<f64>,
    first_order: Option<f64>,
    bracket: Option<f64>,
    error: String,
}

fn sweep_point(row: &mut SweepRow, args: &SweepArgs, init: &InitialDistribution) -> Result<(), Error> {
    let spec: GraphSpec = row.graph.parse()?;
    let g = spec.build()?;
    let (n_total, k) = (g.n_vertices(), g.degree());
    row.population = Some(n_total);
    row.k = Some(k);
    init.validate(n_total)?;
    let payoff = PayoffMatrix::canonical(row.b, row.c);
    let chain = ChainSpec::new(args.rule, row.w, payoff, k)?;
    let neutral = neutral_value(&g, init);
    if n_total >= 3 && k < n_total {
        row.bracket = Some(bracket(args.rule, k, n_total, row.b, row.c));
        let gamma = gamma_closed_form(args.rule, k, n_total, row.b, row.c);
        row.first_order = coefficient_from_gamma(gamma, n_total, init).map(|a| neutral + row.w * a);
    }
    if n_total <= fixlab_core::exact::N_EXACT_MAX {
        let p = fixation_exact(&StateSpace::new(g.clone(), args.rule, payoff)?, row.w, init)?;
        row.exact = Some(p);
        row.exact_minus_neutral = Some(p - neutral);
    }
    if args.replicas > 0 {
        let plan = SimPlan::new(args.replicas, args.seed, init.clone()).with_max_steps(args.max_steps);
        let est = estimate_with_progress(&g, &chain, &plan, args.replicas, |_| {})?;
        row.mc_p_hat = Some(est.p_hat);
        row.mc_stderr = Some(est.stderr);
    }
    Ok(())
}

pub fn sweep(args: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    let grid = parse_grid(&args.vary)?;
    let init = init_arg(&args.init)?;
    let templated = args.graph.contains("{N}");
    if templated != (grid.param == SweepParam::Population) {
        return Err(CliError::Usage(
            "--graph must contain {N} exactly when sweeping N (e.g. --graph cycle:{N} --vary N:3:12:1)".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    if grid.values.is_empty() {
        // serde-driven headers only appear with a first row.
        w.write_record([
            "graph",
            "N",
            "k",
            "rule",
            "b",
            "c",
            "w",
            "init",
            "exact",
            "exact_minus_neutral",
            "mc_p_hat",
            "mc_stderr",
            "first_order",
            "bracket",
            "error",
        ])
        .map_err(csv_err)?;
    }
    for &value in &grid.values {
        let mut row = SweepRow {
            graph: args.graph.clone(),
            rule: args.rule.short_name().to_string(),
            b: args.b,
            c: args.c,
            w: args.w,
            init: format_init(&init),
            ..SweepRow::default()
        };
        match grid.param {
            SweepParam::W => row.w = value,
            SweepParam::Bc => row.b = value * args.c,
            SweepParam::Population => row.graph = instantiate(&args.graph, value as usize),
        }
        if let Err(e) = sweep_point(&mut row, args, &init) {
            row.error = e.to_string();
        }
        w.serialize(&row).map_err(csv_err)?;
        w.flush().map_err(io)?;
    }
    w.flush().map_err(io)
}
