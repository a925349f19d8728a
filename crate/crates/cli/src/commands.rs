use std::fmt::Write as _;

use mwrc_core::imeasure::compute_atoms;
use mwrc_core::rates::{
    assign_rates, check_conditions, kappa_star, min_feasible_kappa, RegionReport,
};
use mwrc_core::simulator::{run_sweep, RateScaling, SimConfig, SimMode, SimResult};
use mwrc_core::subset::all_nonempty;
use mwrc_core::{check_abcmi, intersection_feasible, AbcmiReport, Execution};
use serde_json::Value;

use crate::error::CliError;
use crate::problem::Problem;
use crate::report::{fixed, num, nums, object, subset, tuple};

/// Exit status for a negative verdict.
pub const NEGATIVE: i32 = 1;

pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub exit: i32,
}

fn capacities(problem: &Problem) -> Result<Vec<f64>, CliError> {
    Ok(problem.channel.capacities()?)
}

fn abcmi_section(report: &AbcmiReport, text: &mut String) -> Value {
    let verdict = if report.satisfied { "pass" } else { "fail" };
    let _ = writeln!(text, "ABCMI: {verdict}");
    for w in &report.weights {
        let _ = writeln!(
            text,
            "  weight {}: max {} min {} bound {} slack {}{}",
            w.weight,
            fixed(w.mu_max),
            fixed(w.mu_min),
            fixed(w.bound),
            fixed(w.slack()),
            if w.negative_atom {
                " (negative atom)"
            } else {
                ""
            }
        );
    }
    object([
        ("satisfied", Value::Bool(report.satisfied)),
        ("negative_atoms", Value::Bool(report.has_negative_atoms())),
        (
            "weights",
            Value::Array(
                report
                    .weights
                    .iter()
                    .map(|w| {
                        object([
                            ("weight", Value::from(w.weight)),
                            ("mu_max", num(w.mu_max)),
                            ("mu_min", num(w.mu_min)),
                            ("bound", num(w.bound)),
                            ("slack", num(w.slack())),
                            ("satisfied", Value::Bool(w.satisfied)),
                            ("negative_atom", Value::Bool(w.negative_atom)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

fn region_section(report: &RegionReport, text: &mut String) -> Value {
    let _ = writeln!(
        text,
        "C1 (|S| <= L-2 inequalities): {}",
        if report.c1 { "pass" } else { "fail" }
    );
    let _ = writeln!(
        text,
        "C2 (|S| = L-1 equalities): {}",
        if report.c2 { "pass" } else { "fail" }
    );
    for r in &report.records {
        let _ = writeln!(
            text,
            "  S={:<12} sum r = {}  H(S|S^c) = {}  slack {}",
            r.subset.to_string(),
            fixed(r.lhs),
            fixed(r.rhs),
            fixed(r.slack())
        );
    }
    object([
        ("c1", Value::Bool(report.c1)),
        ("c2", Value::Bool(report.c2)),
        (
            "records",
            Value::Array(
                report
                    .records
                    .iter()
                    .map(|r| {
                        object([
                            ("subset", subset(r.subset)),
                            ("lhs", num(r.lhs)),
                            ("rhs", num(r.rhs)),
                            ("slack", num(r.slack())),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

struct RatesSection {
    json: Value,
    ok: bool,
}

fn rates_section(problem: &Problem, text: &mut String) -> Result<RatesSection, CliError> {
    let atoms = compute_atoms(&problem.source);
    let assignment = assign_rates(&atoms);
    let _ = writeln!(text, "rates r = {}", tuple(&assignment.rates));
    if !assignment.negative.is_empty() {
        let users: Vec<String> = assignment
            .negative
            .iter()
            .map(|u| (u + 1).to_string())
            .collect();
        let _ = writeln!(text, "  negative rates for users {}", users.join(", "));
    }
    let report = check_conditions(&problem.source, &assignment.rates)?;
    let region = region_section(&report, text);
    let one_based = |v: &[usize]| Value::Array(v.iter().map(|&u| Value::from(u + 1)).collect());
    Ok(RatesSection {
        ok: report.c1 && report.c2 && assignment.negative.is_empty(),
        json: object([
            ("raw", nums(&assignment.raw)),
            ("rates", nums(&assignment.rates)),
            ("clamped_users", one_based(&assignment.clamped)),
            ("negative_users", one_based(&assignment.negative)),
            ("conditions", region),
        ]),
    })
}

pub fn analyze(problem: &Problem) -> Result<Outcome, CliError> {
    let pmf = &problem.source;
    let users = pmf.users();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "users: {users}, alphabet sizes {:?}, field order {}",
        pmf.alphabet_sizes(),
        problem.channel.q()
    );

    let table = pmf.entropy_table(Execution::default());
    let atoms = compute_atoms(pmf);
    let _ = writeln!(text, "{:<14} {:>14} {:>14}", "subset", "H(S)", "atom");
    let mut rows = Vec::new();
    for s in all_nonempty(users) {
        let _ = writeln!(
            text,
            "{:<14} {:>14} {:>14}",
            s.to_string(),
            fixed(table.get(s)),
            fixed(atoms.get(s))
        );
        rows.push(object([
            ("subset", subset(s)),
            ("weight", Value::from(s.len())),
            ("entropy", num(table.get(s))),
            ("atom", num(atoms.get(s))),
        ]));
    }
    let abcmi = abcmi_section(&check_abcmi(&atoms), &mut text);
    let rates = rates_section(problem, &mut text)?;
    let caps = capacities(problem)?;
    let star = kappa_star(pmf, &problem.channel)?;
    let _ = writeln!(text, "capacities {}", tuple(&caps));
    let _ = writeln!(text, "kappa* = {}", fixed(star));
    Ok(Outcome {
        text,
        json: object([
            ("command", Value::from("analyze")),
            ("users", Value::from(users)),
            ("alphabet_sizes", Value::from(pmf.alphabet_sizes().to_vec())),
            ("q", Value::from(problem.channel.q())),
            ("subsets", Value::Array(rows)),
            ("abcmi", abcmi),
            ("rates", rates.json),
            ("capacities", nums(&caps)),
            ("kappa_star", num(star)),
        ]),
        exit: 0,
    })
}

pub fn abcmi(problem: &Problem) -> Result<Outcome, CliError> {
    let report = check_abcmi(&compute_atoms(&problem.source));
    let mut text = String::new();
    let json = abcmi_section(&report, &mut text);
    Ok(Outcome {
        text,
        json: object([("command", Value::from("abcmi")), ("abcmi", json)]),
        exit: if report.satisfied { 0 } else { NEGATIVE },
    })
}

pub fn rates(problem: &Problem) -> Result<Outcome, CliError> {
    let mut text = String::new();
    let section = rates_section(problem, &mut text)?;
    Ok(Outcome {
        text,
        json: object([("command", Value::from("rates")), ("rates", section.json)]),
        exit: if section.ok { 0 } else { NEGATIVE },
    })
}

pub fn kappa(problem: &Problem) -> Result<Outcome, CliError> {
    let caps = capacities(problem)?;
    let star = kappa_star(&problem.source, &problem.channel)?;
    let min = min_feasible_kappa(&problem.source, &problem.channel)?;
    let mut text = String::new();
    let _ = writeln!(text, "capacities {}", tuple(&caps));
    let _ = writeln!(text, "kappa* = {}", fixed(star));
    match min {
        Some(k) => {
            let _ = writeln!(
                text,
                "smallest kappa with intersecting regions = {}",
                fixed(k)
            );
        }
        None => {
            let _ = writeln!(text, "regions do not intersect below kappa* + 64");
        }
    }
    Ok(Outcome {
        text,
        json: object([
            ("command", Value::from("kappa")),
            ("capacities", nums(&caps)),
            ("kappa_star", num(star)),
            ("min_feasible_kappa", min.map_or(Value::Null, num)),
        ]),
        exit: 0,
    })
}

fn resolve_kappa(problem: &Problem, kappa: f64, relative: bool) -> Result<f64, CliError> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(mwrc_core::Error::InvalidKappa(kappa).into());
    }
    if relative {
        let star = kappa_star(&problem.source, &problem.channel)?;
        if star == 0.0 {
            return Err(CliError::Usage(
                "--relative needs a positive kappa*, but kappa* is 0".into(),
            ));
        }
        Ok(kappa * star)
    } else {
        Ok(kappa)
    }
}

pub fn feasible(problem: &Problem, kappa: f64, relative: bool) -> Result<Outcome, CliError> {
    let kappa = resolve_kappa(problem, kappa, relative)?;
    let result = intersection_feasible(&problem.source, &problem.channel, kappa)?;
    let mut text = String::new();
    let witness = match &result.witness {
        Some(w) => {
            let _ = writeln!(
                text,
                "kappa = {}: feasible, witness r = {}",
                fixed(kappa),
                tuple(w)
            );
            nums(w)
        }
        None => {
            let _ = writeln!(text, "kappa = {}: infeasible", fixed(kappa));
            Value::Null
        }
    };
    Ok(Outcome {
        text,
        json: object([
            ("command", Value::from("feasible")),
            ("kappa", num(kappa)),
            ("feasible", Value::Bool(result.feasible)),
            ("witness", witness),
        ]),
        exit: if result.feasible { 0 } else { NEGATIVE },
    })
}

pub struct SimulateArgs {
    pub kappas: Vec<f64>,
    pub relative: bool,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub mode: SimMode,
    pub scaling: RateScaling,
    pub dither: bool,
    pub execution: Execution,
}

fn sim_json(r: &SimResult) -> Value {
    object([
        ("kappa", num(r.kappa)),
        ("m", Value::from(r.m)),
        ("channel_uses", Value::from(r.channel_uses)),
        ("rates", nums(&r.rates)),
        ("bin_bits", Value::from(r.bin_bits.clone())),
        ("deliverable", Value::Bool(r.deliverable)),
        ("trials", Value::from(r.trials)),
        ("failures", Value::from(r.failures)),
        (
            "failures_per_user",
            Value::from(r.failures_per_user.clone()),
        ),
        ("pe_overall", num(r.pe_overall)),
        ("pe_per_user", nums(&r.pe_per_user)),
        ("wilson_interval", nums(&[r.wilson.0, r.wilson.1])),
    ])
}

pub fn simulate(problem: &Problem, args: &SimulateArgs) -> Result<Outcome, CliError> {
    if args.kappas.is_empty() {
        return Err(CliError::Usage("--kappa needs at least one value".into()));
    }
    let kappas = args
        .kappas
        .iter()
        .map(|&k| resolve_kappa(problem, k, args.relative))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = SimConfig {
        mode: args.mode,
        scaling: args.scaling,
        dither: args.dither,
        execution: args.execution,
        ..SimConfig::new(args.m, kappas[0], args.trials, args.seed)
    };
    let results = run_sweep(&problem.source, &problem.channel, &cfg, &kappas)?;
    let star = kappa_star(&problem.source, &problem.channel)?;

    let mut text = String::new();
    let mode = match args.mode {
        SimMode::Ideal => "ideal",
        SimMode::SymbolLevel => "symbol-level",
    };
    let _ = writeln!(
        text,
        "mode {mode}, m = {}, trials = {}, seed = {}, kappa* = {}",
        args.m,
        args.trials,
        args.seed,
        fixed(star)
    );
    let _ = writeln!(
        text,
        "{:>12} {:>6} {:>10} {:>12} {:>12} {:>12}",
        "kappa", "uses", "bits", "pe", "wilson_lo", "wilson_hi"
    );
    for r in &results {
        let bits: Vec<String> = r.bin_bits.iter().map(u32::to_string).collect();
        let _ = writeln!(
            text,
            "{:>12} {:>6} {:>10} {:>12} {:>12} {:>12}{}",
            fixed(r.kappa),
            r.channel_uses,
            bits.join("/"),
            fixed(r.pe_overall),
            fixed(r.wilson.0),
            fixed(r.wilson.1),
            if r.deliverable {
                ""
            } else {
                "  (rates exceed channel)"
            }
        );
    }
    let scaling = match args.scaling {
        RateScaling::Fixed => "fixed",
        RateScaling::FillChannel => "fill-channel",
    };
    Ok(Outcome {
        text,
        json: object([
            ("command", Value::from("simulate")),
            ("mode", Value::from(mode)),
            ("scaling", Value::from(scaling)),
            ("dither", Value::Bool(args.dither)),
            ("m", Value::from(args.m)),
            ("trials", Value::from(args.trials)),
            ("seed", Value::from(args.seed)),
            ("kappa_star", num(star)),
            (
                "results",
                Value::Array(results.iter().map(sim_json).collect()),
            ),
        ]),
        exit: 0,
    })
}

/// Parses `"0.8,1,1.3"`.
pub fn parse_kappa_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| format!("invalid kappa {part:?}: {e}"))
        })
        .collect()
}
