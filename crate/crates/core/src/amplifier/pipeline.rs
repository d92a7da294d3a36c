use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    count_helpful_tuples, drive, fiber_indices, field_of, find_helpful_tuple_by, interval_points,
    is_good, AffineSample, AmplifierParams, ParameterChecks, Sampling,
};
use crate::counting::{all_distinct, count_distinct, GroundSet, Universe};
use crate::equation::InvariantEquation;
use crate::error::{Error, Result};
use crate::geometry::{sphere_cap, LatticePoint};
use crate::modular::{eval_form, Prime};
use crate::scalar::Density;

/// How many emitted solutions are kept verbatim in a report.
const KEPT_SOLUTIONS: usize = 8;

/// A solution in `S` pushed forward from a fiber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundSolution {
    pub s: Vec<u64>,
    pub source_b: AffineSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplifierReport {
    pub kind: String,
    pub equation: InvariantEquation,
    pub p: u64,
    /// `|S|/p`.
    pub epsilon: f64,
    pub set_size: u64,
    pub t: u64,
    pub d: usize,
    pub cap_size: u64,
    pub trials: u64,
    pub exhaustive: bool,
    pub good_count: u64,
    pub good_fraction: f64,
    pub mean_fiber: f64,
    /// Samples with `b₁ = … = b_d = 0`; they map `X` to a single point.
    pub degenerate_samples: u64,
    /// Good, non-degenerate samples whose fiber yielded no solution.
    pub extraction_failures: u64,
    pub solutions_emitted: u64,
    pub distinct_solutions: u64,
    /// Helpful tuples in `X`.
    pub helpful_tuple_count: u64,
    /// Largest number of samples that can emit one solution.
    pub dedup_bound: u64,
    pub max_multiplicity: u64,
    /// `max_multiplicity ≤ dedup_bound`; only asserted under exhaustive runs.
    pub dedup_sound: Option<bool>,
    /// The guaranteed number of distinct solutions scaled to the samples drawn.
    pub theoretical_floor: f64,
    pub floor_met: bool,
    /// `ε|X| ≥ 8`.
    pub guard_holds: bool,
    pub validity_failures: u64,
    pub seed: Option<u64>,
    pub parameter_checks: Option<ParameterChecks>,
    pub sample_solutions: Vec<FoundSolution>,
}

enum Step {
    Degenerate,
    Skipped,
    Failed,
    Emitted { s: Vec<u64>, valid: bool },
}

struct Trial {
    fiber: u64,
    good: bool,
    step: Step,
    b: AffineSample,
}

struct Setup<'a> {
    eq: &'a InvariantEquation,
    set: &'a GroundSet,
    points: &'a [LatticePoint],
    p: Prime,
    dim: usize,
    sampling: Sampling,
}

#[derive(Default)]
struct Tally {
    good: u64,
    fiber_sum: u64,
    degenerate: u64,
    failures: u64,
    emitted: u64,
    invalid: u64,
    seen: BTreeMap<Vec<u64>, u64>,
    kept: Vec<FoundSolution>,
    error: Option<Error>,
}

impl Setup<'_> {
    fn trial(&self, index: u64) -> Result<Trial> {
        let b = self.sampling.sample(self.p, self.dim + 1, index);
        let fiber = fiber_indices(self.points, &b, self.set);
        let good = is_good(fiber.len(), self.set.len(), self.p, self.points.len());
        let step = if b.is_constant() {
            Step::Degenerate
        } else if !good {
            Step::Skipped
        } else {
            let pts: Vec<LatticePoint> = fiber.iter().map(|&i| self.points[i].clone()).collect();
            let images: Vec<u64> = pts.iter().map(|x| b.apply(x)).collect();
            let found = find_helpful_tuple_by(self.eq, &pts, |idx| {
                all_distinct(&idx.iter().map(|&i| images[i]).collect::<Vec<_>>())
            })?;
            match found {
                None => Step::Failed,
                Some(h) => {
                    let s: Vec<u64> = h.indices.iter().map(|&i| images[i]).collect();
                    let valid = s.iter().all(|&v| self.set.contains(v))
                        && all_distinct(&s)
                        && eval_form(self.eq, &s, self.p)? == 0;
                    Step::Emitted { s, valid }
                }
            }
        };
        Ok(Trial {
            fiber: fiber.len() as u64,
            good,
            step,
            b,
        })
    }

    fn run(&self) -> Result<(u64, Tally)> {
        let total = self.sampling.count(self.p, self.dim + 1)?;
        let tally = drive(
            total,
            |i| self.trial(i),
            Tally::default(),
            |acc, _, outcome| {
                let trial = match outcome {
                    Ok(t) => t,
                    Err(e) => {
                        acc.error.get_or_insert(e);
                        return;
                    }
                };
                acc.fiber_sum += trial.fiber;
                acc.good += trial.good as u64;
                match trial.step {
                    Step::Degenerate => acc.degenerate += 1,
                    Step::Skipped => {}
                    Step::Failed => acc.failures += 1,
                    Step::Emitted { s, valid } => {
                        acc.emitted += 1;
                        acc.invalid += !valid as u64;
                        if acc.kept.len() < KEPT_SOLUTIONS {
                            acc.kept.push(FoundSolution {
                                s: s.clone(),
                                source_b: trial.b,
                            });
                        }
                        *acc.seen.entry(s).or_insert(0) += 1;
                    }
                }
            },
        );
        match tally.error {
            Some(e) => Err(e),
            None => Ok((total, tally)),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn report(
        &self,
        kind: &str,
        total: u64,
        tally: Tally,
        t: u64,
        helpful: u64,
        dedup_bound: u64,
        floor: f64,
    ) -> AmplifierReport {
        let distinct = tally.seen.len() as u64;
        let max_multiplicity = tally.seen.values().copied().max().unwrap_or(0);
        let exhaustive = self.sampling == Sampling::Exhaustive;
        AmplifierReport {
            kind: kind.to_string(),
            equation: self.eq.clone(),
            p: self.p.get(),
            epsilon: self.set.len() as f64 / self.p.get() as f64,
            set_size: self.set.len() as u64,
            t,
            d: self.dim,
            cap_size: self.points.len() as u64,
            trials: total,
            exhaustive,
            good_count: tally.good,
            good_fraction: tally.good as f64 / total as f64,
            mean_fiber: tally.fiber_sum as f64 / total as f64,
            degenerate_samples: tally.degenerate,
            extraction_failures: tally.failures,
            solutions_emitted: tally.emitted,
            distinct_solutions: distinct,
            helpful_tuple_count: helpful,
            dedup_bound,
            max_multiplicity,
            dedup_sound: exhaustive.then_some(max_multiplicity <= dedup_bound),
            theoretical_floor: floor,
            floor_met: distinct as f64 >= floor,
            guard_holds: guard(self.set, self.p, self.points.len()),
            validity_failures: tally.invalid,
            seed: self.sampling.seed(),
            parameter_checks: None,
            sample_solutions: tally.kept,
        }
    }
}

fn guard(set: &GroundSet, p: Prime, cap: usize) -> bool {
    set.len() as u128 * cap as u128 >= 8 * p.get() as u128
}

/// Three-variable amplification over `X = [R]`: every good affine map
/// `x ↦ b₀ + b₁x` carries a solution in `[R]` into `S`.
pub fn run_varnavides3(
    eq: &InvariantEquation,
    set: &GroundSet,
    r: u64,
    sampling: Sampling,
) -> Result<AmplifierReport> {
    if eq.k() != 3 {
        return Err(Error::UnsupportedArity { k: eq.k() });
    }
    let p = field_of(set)?;
    if r < 1 || r >= p.get() {
        return Err(Error::input(format!(
            "R = {r} must lie in [1, p) for p = {}",
            p.get()
        )));
    }
    let points = interval_points(r);
    if !guard(set, p, points.len()) {
        return Err(Error::input(format!(
            "ε·R = {}·{r}/{} is below 8",
            set.len(),
            p.get()
        )));
    }
    let setup = Setup {
        eq,
        set,
        points: &points,
        p,
        dim: 1,
        sampling,
    };
    let (total, tally) = setup.run()?;
    // A solution in [R] and its image fix (b₀, b₁) uniquely.
    let helpful = count_distinct(eq, &GroundSet::full(Universe::interval(r))?)?;
    let floor = total as f64 / (2.0 * (r * r) as f64);
    Ok(setup.report("varnavides", total, tally, r, helpful, helpful, floor))
}

/// Four-variable amplification over the sphere cap `X ⊆ [t]^d`.
pub fn run_amplifier4<T: Density>(
    eq: &InvariantEquation,
    set: &GroundSet,
    params: &AmplifierParams<T>,
) -> Result<AmplifierReport> {
    if eq.k() != 4 {
        return Err(Error::UnsupportedArity { k: eq.k() });
    }
    if params.a_sum != eq.a_sum() {
        return Err(Error::input(format!(
            "parameters were chosen for a = {}, equation has a = {}",
            params.a_sum,
            eq.a_sum()
        )));
    }
    let p = field_of(set)?;
    if params.t >= p.get() {
        return Err(Error::input(format!(
            "t = {} must be below p = {}",
            params.t,
            p.get()
        )));
    }
    let cap = sphere_cap(params.t, params.d)?;
    if params.enforce_guard && !guard(set, p, cap.len()) {
        return Err(Error::input(format!(
            "ε|X| = {}·{}/{} is below 8",
            set.len(),
            cap.len(),
            p.get()
        )));
    }
    let sampling = params.sampling();
    let setup = Setup {
        eq,
        set,
        points: &cap.points,
        p,
        dim: params.d,
        sampling,
    };
    let (total, tally) = setup.run()?;
    let helpful = count_helpful_tuples(eq, &cap.points)?;
    let per_tuple = (p.get() as u128).pow(params.d as u32 - 2);
    let dedup_bound = (helpful as u128 * per_tuple).min(u64::MAX as u128) as u64;
    let eps = set.len() as f64 / p.get() as f64;
    let log_floor = -1.0 + 8.0 * params.c.to_f64() * eps.log2() + 3.0 * (p.get() as f64).log2()
        - (params.d as f64 + 1.0) * (p.get() as f64).log2()
        + (total as f64).log2();
    let mut report = setup.report(
        "amplifier",
        total,
        tally,
        params.t,
        helpful,
        dedup_bound,
        log_floor.exp2(),
    );
    report.parameter_checks = Some(params.checks);
    Ok(report)
}
