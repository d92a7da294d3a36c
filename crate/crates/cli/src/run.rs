use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use supersat::amplifier::{
    affine_fiber_count, choose_parameters, fiber_count_by_enumeration, run_amplifier4,
    run_varnavides3, AmplifierReport, Sampling,
};
use supersat::counting::{count_all_convolution, count_all_naive, count_distinct_with, Method};
use supersat::encoding::no_carry_sweep;
use supersat::extremal::{
    max_free_subset_with, min_solution_count, turan_threshold, SearchLimits, SearchMode,
};
use supersat::geometry::{
    behrend_set, behrend_with, slice_sizes, sphere_cap, verify_no_three_collinear,
};
use supersat::modular::choose_prime;
use supersat::scalar::parse_rational;
use supersat::{
    counting::count_distinct, Density, Error, GroundSet, InvariantEquation, Prime, Rational,
    Universe,
};

use crate::args::*;
use crate::CliError;

/// Rows for the optional CSV side file.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Outcome {
    pub summary: String,
    pub result: Value,
    pub table: Table,
    /// Set when the run finished but found an invariant violation; the
    /// report is still written.
    pub failure: Option<CliError>,
}

impl Outcome {
    fn new(summary: String, result: impl Serialize, table: Table) -> Result<Self, CliError> {
        let result = serde_json::to_value(result).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Outcome {
            summary,
            result,
            table,
            failure: None,
        })
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    #[serde(flatten)]
    result: &'a Value,
    config: &'a Command,
}

pub fn render(command: &Command, outcome: &Outcome) -> String {
    let name = match command {
        Command::Count(_) => "count",
        Command::Extremal(_) => "extremal",
        Command::Sphere(_) => "sphere",
        Command::Behrend(_) => "behrend",
        Command::EncodeCheck(_) => "encode-check",
        Command::Varnavides(_) => "varnavides",
        Command::Amplify(_) => "amplify",
        Command::Fibercount(_) => "fibercount",
        Command::Replay(_) => "replay",
    };
    let report = Report {
        command: name,
        result: &outcome.result,
        config: command,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}

pub fn write_csv(path: &Path, table: &Table) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
    w.write_record(&table.header)
        .map_err(|e| CliError::Io(e.to_string()))?;
    for row in &table.rows {
        w.write_record(row)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn rational(text: &str) -> Result<Rational, CliError> {
    Ok(parse_rational(text)?)
}

fn resolve_prime(p: &str, n: u64, eq: &InvariantEquation) -> Result<Prime, CliError> {
    if p == "auto" {
        return Ok(choose_prime(n, eq.a_sum())?.p);
    }
    let value: u64 = p
        .parse()
        .map_err(|_| CliError::Config(format!("--p expects a prime or \"auto\", got {p:?}")))?;
    Ok(Prime::new(value)?)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn build_set(
    source: &SetArgs,
    universe: Option<Universe>,
    seed: u64,
) -> Result<GroundSet, CliError> {
    let need = || CliError::Config("this set source needs a universe (--n or --p)".into());
    let set = if let Some(path) = &source.set {
        let text = read(path)?;
        let set = if text.trim_start().starts_with('{') {
            GroundSet::from_json(&text)?
        } else {
            let n = match universe {
                Some(Universe::Interval { n }) => Some(n),
                _ => None,
            };
            GroundSet::from_text(&text, n)?
        };
        match (universe, set.universe()) {
            (Some(Universe::Field { p }), Universe::Interval { .. }) => set.embed_in_field(p)?,
            _ => set,
        }
    } else if let Some(density) = &source.density {
        GroundSet::random_with_density(universe.ok_or_else(need)?, rational(density)?, seed)?
    } else if source.full {
        GroundSet::full(universe.ok_or_else(need)?)?
    } else if source.behrend {
        match universe.ok_or_else(need)? {
            Universe::Interval { n } => behrend_set(n)?.set,
            Universe::Field { p } => behrend_set(p.get() - 1)?.set.embed_in_field(p)?,
        }
    } else {
        return Err(CliError::Config(
            "give one of --set, --density, --full or --behrend".into(),
        ));
    };
    Ok(set)
}

fn universe_json(u: Universe) -> Value {
    serde_json::to_value(u).expect("universe serializes")
}

pub fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Count(a) => count(a),
        Command::Extremal(a) => extremal(a),
        Command::Sphere(a) => sphere(a),
        Command::Behrend(a) => behrend(a),
        Command::EncodeCheck(a) => encode_check(a),
        Command::Varnavides(a) => varnavides(a),
        Command::Amplify(a) => amplify(a),
        Command::Fibercount(a) => fibercount(a),
        Command::Replay(a) => {
            let report: Value = serde_json::from_str(&read(&a.report)?)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let config = report
                .get("config")
                .ok_or_else(|| CliError::Config("report has no \"config\"".into()))?;
            let inner: Command = serde_json::from_value(config.clone())
                .map_err(|e| CliError::Config(format!("bad config: {e}")))?;
            if matches!(inner, Command::Replay(_)) {
                return Err(CliError::Config(
                    "a replay report cannot be replayed".into(),
                ));
            }
            dispatch(&inner)
        }
    }
}

fn count(a: &CountArgs) -> Result<Outcome, CliError> {
    let universe = match (&a.p, a.n) {
        (Some(p), n) => Some(Universe::field(resolve_prime(p, n.unwrap_or(100), &a.eq)?)),
        (None, Some(n)) => Some(Universe::interval(n)),
        (None, None) => None,
    };
    let set = build_set(&a.source, universe, a.source.set_seed.unwrap_or(a.seed))?;
    let method = match a.method {
        CountMethod::Naive => Method::Naive,
        CountMethod::Convolution => Method::Convolution,
    };
    let value = match (a.mode, method) {
        (CountMode::All, Method::Naive) => count_all_naive(&a.eq, &set)?,
        (CountMode::All, Method::Convolution) => count_all_convolution(&a.eq, &set)?,
        (CountMode::Distinct, m) => count_distinct_with(&a.eq, &set, m)?,
    };
    let density: f64 = set.density();
    let result = json!({
        "equation": a.eq,
        "universe": universe_json(set.universe()),
        "set_size": set.len(),
        "density": density,
        "mode": a.mode,
        "method": a.method,
        "count": value,
    });
    let table = Table {
        header: vec!["density", "set_size", "count"],
        rows: vec![vec![
            density.to_string(),
            set.len().to_string(),
            value.to_string(),
        ]],
    };
    Outcome::new(value.to_string(), result, table)
}

fn extremal(a: &ExtremalArgs) -> Result<Outcome, CliError> {
    let limits = SearchLimits {
        max_n: a.max_n,
        node_budget: if a.m.is_some() { None } else { a.budget },
    };
    let need_n = || CliError::Config("--n is required".into());
    if let Some(eps) = &a.epsilon {
        let epsilon = rational(eps)?;
        let horizon = a
            .horizon
            .or(a.n)
            .ok_or_else(|| CliError::Config("--horizon is required with --epsilon".into()))?;
        let est = turan_threshold(&a.eq, epsilon, horizon, &limits)?;
        let rows = est
            .max_free_sizes
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let n = i as u64 + 1;
                vec![
                    n.to_string(),
                    m.to_string(),
                    epsilon.ceil_mul(n).to_string(),
                ]
            })
            .collect();
        let result = json!({
            "equation": a.eq,
            "epsilon": eps,
            "horizon": est.horizon,
            "r_hat": est.r_hat,
            "certified": est.certified,
            "max_free_sizes": est.max_free_sizes,
        });
        let summary = match est.r_hat {
            Some(r) => format!("r_hat={r}"),
            None => "r_hat=none".to_string(),
        };
        return Outcome::new(
            summary,
            result,
            Table {
                header: vec!["n", "max_free_size", "ceil_eps_n"],
                rows,
            },
        );
    }
    let n = a.n.ok_or_else(need_n)?;
    if let Some(m) = a.m {
        let (mode, budget) = if a.anneal {
            (SearchMode::Anneal, a.budget.unwrap_or(100_000))
        } else {
            (SearchMode::Exact, a.budget.unwrap_or(10_000_000))
        };
        let est = min_solution_count(&a.eq, n, m, mode, budget, a.seed)?;
        let table = Table {
            header: vec!["n", "m", "min_count", "exact"],
            rows: vec![vec![
                n.to_string(),
                m.to_string(),
                est.min_count.to_string(),
                est.exact.to_string(),
            ]],
        };
        let mut result = serde_json::to_value(&est).expect("estimate serializes");
        result["equation"] = json!(a.eq);
        return Outcome::new(format!("min_count={}", est.min_count), result, table);
    }
    if a.anneal {
        return Err(CliError::Config("--anneal applies to --m only".into()));
    }
    let rec = max_free_subset_with(&a.eq, n, &limits)?;
    let table = Table {
        header: vec!["n", "max_free_size"],
        rows: vec![vec![n.to_string(), rec.max_free_size.to_string()]],
    };
    let mut result = serde_json::to_value(&rec).expect("record serializes");
    result["equation"] = json!(a.eq);
    Outcome::new(
        format!("max_free_size={}", rec.max_free_size),
        result,
        table,
    )
}

fn sphere(a: &SphereArgs) -> Result<Outcome, CliError> {
    let cap = sphere_cap(a.t, a.d)?;
    let on_sphere = cap
        .points
        .iter()
        .all(|x| x.iter().map(|&c| (c * c) as u64).sum::<u64>() == cap.r);
    let no_three_collinear = verify_no_three_collinear(&cap.points);
    let rows = slice_sizes(a.t, a.d)?
        .into_iter()
        .map(|(r, s)| vec![r.to_string(), s.to_string()])
        .collect();
    let result = json!({
        "t": cap.t,
        "d": cap.d,
        "r": cap.r,
        "size": cap.len(),
        "size_floor": cap.size_floor(),
        "on_sphere": on_sphere,
        "no_three_collinear": no_three_collinear,
        "points": cap.points,
    });
    let mut out = Outcome::new(
        format!("size={} r={}", cap.len(), cap.r),
        result,
        Table {
            header: vec!["r", "size"],
            rows,
        },
    )?;
    if !on_sphere || !no_three_collinear {
        out.failure = Some(Error::Invariant("sphere cap failed verification".into()).into());
    }
    Ok(out)
}

fn behrend(a: &BehrendArgs) -> Result<Outcome, CliError> {
    let b = match (a.t, a.d) {
        (Some(t), Some(d)) => behrend_with(a.n, t, d)?,
        _ => behrend_set(a.n)?,
    };
    let progressions = count_distinct(&InvariantEquation::three_ap(), &b.set)?;
    let rows = b
        .set
        .elements()
        .iter()
        .zip(&b.points)
        .map(|(x, pt)| {
            vec![
                x.to_string(),
                pt.iter().map(i64::to_string).collect::<Vec<_>>().join(" "),
            ]
        })
        .collect();
    let result = json!({
        "n": a.n,
        "size": b.set.len(),
        "params": b.params,
        "progressions": progressions,
        "elements": b.set.elements(),
        "points": b.points,
    });
    let mut out = Outcome::new(
        format!("size={}", b.set.len()),
        result,
        Table {
            header: vec!["element", "point"],
            rows,
        },
    )?;
    if progressions != 0 {
        out.failure =
            Some(Error::Invariant(format!("Behrend set has {progressions} progressions")).into());
    }
    Ok(out)
}

fn encode_check(a: &EncodeCheckArgs) -> Result<Outcome, CliError> {
    let sweep = no_carry_sweep(
        &a.eq,
        a.t,
        a.d,
        (!a.exhaustive).then_some(a.samples),
        a.seed,
    )?;
    let table = Table {
        header: vec!["checked", "solutions", "disagreements"],
        rows: vec![vec![
            sweep.checked.to_string(),
            sweep.solutions.to_string(),
            sweep.disagreements.to_string(),
        ]],
    };
    let mut result = serde_json::to_value(&sweep).expect("sweep serializes");
    result["equation"] = json!(a.eq);
    let mut out = Outcome::new(
        format!(
            "checked={} disagreements={}",
            sweep.checked, sweep.disagreements
        ),
        result,
        table,
    )?;
    if sweep.disagreements > 0 {
        out.failure = Some(Error::Invariant("encoding carried".into()).into());
    }
    Ok(out)
}

fn sampling(f: &FieldArgs) -> Sampling {
    if f.exhaustive {
        Sampling::Exhaustive
    } else {
        Sampling::Random {
            trials: f.trials,
            seed: f.seed,
        }
    }
}

fn amplifier_outcome(report: AmplifierReport, extra: Value) -> Result<Outcome, CliError> {
    let table = Table {
        header: vec![
            "epsilon",
            "trials",
            "good_fraction",
            "distinct_solutions",
            "theoretical_floor",
        ],
        rows: vec![vec![
            report.epsilon.to_string(),
            report.trials.to_string(),
            report.good_fraction.to_string(),
            report.distinct_solutions.to_string(),
            report.theoretical_floor.to_string(),
        ]],
    };
    let summary = format!(
        "distinct_solutions={} theoretical_floor={:.3} validity_failures={}",
        report.distinct_solutions, report.theoretical_floor, report.validity_failures
    );
    let failures = report.validity_failures;
    let mut result = serde_json::to_value(&report).expect("report serializes");
    if let (Value::Object(map), Value::Object(more)) = (&mut result, extra) {
        map.extend(more);
    }
    let mut out = Outcome::new(summary, result, table)?;
    if failures > 0 {
        out.failure = Some(
            Error::Invariant(format!("{failures} emitted tuples are not solutions in S")).into(),
        );
    }
    Ok(out)
}

fn field_set(eq: &InvariantEquation, f: &FieldArgs) -> Result<(Prime, GroundSet), CliError> {
    let p = resolve_prime(&f.p, f.n, eq)?;
    let set = build_set(
        &f.source,
        Some(Universe::field(p)),
        f.source.set_seed.unwrap_or(f.seed),
    )?;
    Ok((p, set))
}

fn varnavides(a: &VarnavidesArgs) -> Result<Outcome, CliError> {
    let (p, set) = field_set(&a.eq, &a.field)?;
    let (r, source) = match a.r {
        Some(r) => (r, "given"),
        None => {
            let eps = match &a.field.source.density {
                Some(d) => rational(d)?,
                None => Rational::new(set.len() as i64, p.get() as i64),
            };
            let half = eps / Rational::from_integer(2);
            let est = turan_threshold(&a.eq, half, a.horizon, &SearchLimits::default())?;
            let r = est.r_hat.ok_or_else(|| {
                CliError::from(Error::Budget(format!(
                    "no threshold at density {half} certified up to {}",
                    a.horizon
                )))
            })?;
            (r, "threshold")
        }
    };
    let report = run_varnavides3(&a.eq, &set, r, sampling(&a.field))?;
    amplifier_outcome(report, json!({ "r": r, "r_source": source }))
}

fn amplify(a: &AmplifyArgs) -> Result<Outcome, CliError> {
    let (p, set) = field_set(&a.eq, &a.field)?;
    let epsilon = match (&a.epsilon, &a.field.source.density) {
        (Some(e), _) | (None, Some(e)) => rational(e)?,
        (None, None) => Rational::new(set.len() as i64, p.get() as i64),
    };
    let override_td = a.t.zip(a.d);
    let mut params = choose_parameters(epsilon, rational(&a.c)?, a.eq.a_sum(), override_td)?;
    params.trials = a.field.trials;
    params.seed = a.field.seed;
    params.exhaustive = a.field.exhaustive;
    params.enforce_guard = a.enforce_guard;
    let report = run_amplifier4(&a.eq, &set, &params)?;
    amplifier_outcome(
        report,
        json!({ "target_epsilon": epsilon.to_string(), "overridden": params.overridden }),
    )
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad {what} entry {s:?}")))
        })
        .collect()
}

fn fibercount(a: &FibercountArgs) -> Result<Outcome, CliError> {
    let p = Prime::new(a.p)?;
    let points: Vec<Vec<i64>> = a
        .points
        .split(';')
        .map(|pt| parse_list(pt, "point"))
        .collect::<Result<_, _>>()?;
    let targets: Vec<u64> = parse_list(&a.targets, "target")?;
    let fc = affine_fiber_count(&points, &targets, p, a.d)?;
    let enumerated = if a.verify {
        Some(fiber_count_by_enumeration(&points, &targets, p, a.d)?)
    } else {
        None
    };
    let result = json!({
        "p": a.p,
        "d": a.d,
        "points": points,
        "targets": targets,
        "count": fc.count,
        "rank": fc.rank,
        "consistent": fc.consistent,
        "degenerate": fc.degenerate,
        "enumerated": enumerated,
    });
    let table = Table {
        header: vec!["count", "rank", "degenerate"],
        rows: vec![vec![
            fc.count.to_string(),
            fc.rank.to_string(),
            fc.degenerate.to_string(),
        ]],
    };
    let mut out = Outcome::new(format!("count={}", fc.count), result, table)?;
    if enumerated.is_some_and(|e| e != fc.count) {
        out.failure = Some(Error::Invariant("rank count disagrees with enumeration".into()).into());
    }
    Ok(out)
}
