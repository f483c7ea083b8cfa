//! Randomized sweeps over generated functions, tuples, and partitions.
//!
//! Each trial derives its own counter-based RNG stream from `(seed,
//! trial index)`, so a sweep is a pure function of its config: trials can
//! run in parallel and still aggregate to a byte-identical summary.
//! Individual trial failures (an overflowing power, a quadrature that ran
//! out of budget) are recorded per trial and never abort the sweep.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Expr;
use crate::hermite_hadamard::{hh_report_with, HHInput, HHReport};
use crate::holder_integral::{
    chain_holds, verify_chain_with, BoundChainReport, ConjugateExponents, WeightPartition,
};
use crate::holder_sum::{
    verify_sum_chain_with, DiscreteWeightPartition, PositiveTuple, SumChainReport,
};
use crate::kahan::KahanSum;
use crate::quadrature::{Interval, QuadratureConfig};
use crate::report::ReportTol;

/// Case family a sweep draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Integral chains with polynomial `f`, `g`.
    Poly,
    /// Integral chains with exponential/trigonometric `f`, `g`.
    ExpTrig,
    /// Integral chains mixing both function families.
    Mixed,
    /// Discrete chains over random positive tuples.
    Tuples,
    /// Trapezoid-defect reports over derivative-convex templates.
    Hh,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Poly => "poly",
            Family::ExpTrig => "exp-trig",
            Family::Mixed => "mixed",
            Family::Tuples => "tuples",
            Family::Hh => "hh",
        };
        f.write_str(name)
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "poly" => Ok(Family::Poly),
            "exp-trig" => Ok(Family::ExpTrig),
            "mixed" => Ok(Family::Mixed),
            "tuples" => Ok(Family::Tuples),
            "hh" => Ok(Family::Hh),
            other => Err(format!(
                "unknown family `{other}` (expected poly, exp-trig, mixed, tuples or hh)"
            )),
        }
    }
}

/// Parameters of one sweep. The seed fully determines every generated
/// case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub trials: u64,
    pub seed: u64,
    pub family: Family,
    /// Exponent range `p` is drawn from, a sub-range of (1, 64].
    pub p_range: (f64, f64),
    /// Tuple length range for the `tuples` family.
    pub n_range: (usize, usize),
    pub report_tol: ReportTol,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            trials: 100,
            seed: 0,
            family: Family::Mixed,
            p_range: (1.1, 10.0),
            n_range: (1, 10_000),
            report_tol: ReportTol::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("p range ({low}, {high}) must satisfy 1 < low < high <= 64")]
    BadPRange { low: f64, high: f64 },
    #[error("n range ({low}, {high}) must satisfy 1 <= low <= high")]
    BadNRange { low: usize, high: usize },
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::NoTrials);
        }
        let (lo, hi) = self.p_range;
        if !(lo > 1.0 && lo < hi && hi <= 64.0) {
            return Err(ConfigError::BadPRange { low: lo, high: hi });
        }
        let (nlo, nhi) = self.n_range;
        if !(nlo >= 1 && nlo <= nhi) {
            return Err(ConfigError::BadNRange {
                low: nlo,
                high: nhi,
            });
        }
        Ok(())
    }

    /// The generated case for one trial: a pure function of `(seed, trial)`.
    pub fn case_for_trial(&self, trial: u64) -> Case {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        generate_case(&mut rng, self.family, self.p_range, self.n_range)
    }
}

/// One generated verification case.
#[derive(Debug, Clone, PartialEq)]
pub enum Case {
    Integral {
        f: Expr,
        g: Expr,
        exps: ConjugateExponents,
        partition: WeightPartition,
    },
    Tuples {
        a: PositiveTuple,
        b: PositiveTuple,
        exps: ConjugateExponents,
        partition: DiscreteWeightPartition,
    },
    Hh {
        input: HHInput,
    },
}

/// Serializable echo of a case, sufficient to reproduce it by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseSummary {
    Integral {
        f: String,
        g: String,
        a: f64,
        b: f64,
        p: f64,
        q: f64,
        weights: Vec<String>,
    },
    Tuples {
        a: Vec<f64>,
        b: Vec<f64>,
        p: f64,
        q: f64,
        rows: Vec<Vec<f64>>,
    },
    Hh {
        f: String,
        f_prime: String,
        a: f64,
        b: f64,
        p: f64,
        q: f64,
    },
}

impl Case {
    pub fn summary(&self) -> CaseSummary {
        match self {
            Case::Integral {
                f,
                g,
                exps,
                partition,
            } => CaseSummary::Integral {
                f: f.to_string(),
                g: g.to_string(),
                a: partition.interval().a(),
                b: partition.interval().b(),
                p: exps.p(),
                q: exps.q(),
                weights: partition.weights().iter().map(|w| w.to_string()).collect(),
            },
            Case::Tuples {
                a,
                b,
                exps,
                partition,
            } => CaseSummary::Tuples {
                a: a.values().to_vec(),
                b: b.values().to_vec(),
                p: exps.p(),
                q: exps.q(),
                rows: partition.rows().to_vec(),
            },
            Case::Hh { input } => CaseSummary::Hh {
                f: input.f().to_string(),
                f_prime: input.f_prime().to_string(),
                a: input.interval().a(),
                b: input.interval().b(),
                p: input.exps().p(),
                q: input.exps().q(),
            },
        }
    }
}

/// Report produced by the verification matching a case's family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TrialReport {
    Integral(BoundChainReport),
    Sum(SumChainReport),
    Hh(HHReport),
}

impl TrialReport {
    /// Re-derives the verdict from the reported values rather than
    /// trusting the `chain_ok` flag, so doctored reports are still caught.
    pub fn violates(&self) -> bool {
        match self {
            TrialReport::Integral(r) => {
                !chain_holds(r.lhs, r.refined_total, r.classical, r.tolerance)
            }
            TrialReport::Sum(r) => !chain_holds(r.lhs, r.refined_total, r.classical, r.tolerance),
            TrialReport::Hh(r) => !r.ordering_ok,
        }
    }

    /// `(gap_refined, gap_lhs, tightening_ratio)` in the chain's terms; for
    /// trapezoid reports the roles are played by (dragomir - refined,
    /// refined - defect, relative tightening).
    fn gaps(&self) -> (f64, f64, Option<f64>) {
        match self {
            TrialReport::Integral(r) => (
                r.gap_refined,
                r.gap_lhs,
                (r.classical > 0.0).then(|| r.gap_refined / r.classical),
            ),
            TrialReport::Sum(r) => (
                r.gap_refined,
                r.gap_lhs,
                (r.classical > 0.0).then(|| r.gap_refined / r.classical),
            ),
            TrialReport::Hh(r) => (
                r.dragomir - r.refined,
                r.refined - r.defect,
                (r.dragomir > 0.0).then(|| (r.dragomir - r.refined) / r.dragomir),
            ),
        }
    }
}

/// A trial whose chain ordering failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub trial: u64,
    pub inputs: CaseSummary,
    pub report: TrialReport,
}

/// A trial that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialError {
    pub trial: u64,
    pub inputs: CaseSummary,
    pub message: String,
}

/// Order statistics over one gap quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    pub count: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

impl GapStats {
    fn from_values(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let count = values.len();
        let mean = values.iter().copied().collect::<KahanSum>().total() / count as f64;
        let quantile = |q: f64| values[((count - 1) as f64 * q).round() as usize];
        Some(GapStats {
            count,
            min: values[0],
            mean,
            max: values[count - 1],
            q25: quantile(0.25),
            median: quantile(0.5),
            q75: quantile(0.75),
        })
    }
}

/// Aggregated outcome of a sweep.
///
/// `violations` is empty exactly when every evaluated trial's chain held;
/// trials that errored out are listed separately and count toward
/// `trials_run` but not toward the gap statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub trials_run: u64,
    pub violations: Vec<ViolationRecord>,
    pub errors: Vec<TrialError>,
    pub gap_refined: Option<GapStats>,
    pub gap_lhs: Option<GapStats>,
    pub tightening_ratio: Option<GapStats>,
}

/// Quadrature settings for sweep trials: default tolerances with a
/// subdivision budget large enough for the kinks `|f|^p` introduces at
/// unknown zeros of generated integrands.
fn sweep_quadrature() -> QuadratureConfig {
    QuadratureConfig::default().with_min_subdivisions(4000)
}

fn gen_coefficient<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-5.0..5.0)
}

fn gen_poly<R: Rng>(rng: &mut R) -> Expr {
    let degree = rng.random_range(0..=4usize);
    let mut acc = Expr::constant(gen_coefficient(rng));
    for _ in 0..degree {
        acc = acc * Expr::var() + Expr::constant(gen_coefficient(rng));
    }
    acc
}

fn gen_exp_trig<R: Rng>(rng: &mut R) -> Expr {
    let amplitude = Expr::constant(gen_coefficient(rng));
    let rate = Expr::constant(rng.random_range(-2.0..2.0));
    let phase = Expr::constant(rng.random_range(-3.0..3.0));
    match rng.random_range(0..4u8) {
        0 => amplitude * (rate * Expr::var()).exp(),
        1 => amplitude * (rate * Expr::var() + phase).sin(),
        2 => amplitude * (rate * Expr::var() + phase).cos(),
        _ => amplitude * (rate * Expr::var() + phase).sin() + Expr::constant(gen_coefficient(rng)),
    }
}

fn gen_function<R: Rng>(rng: &mut R, family: Family) -> Expr {
    match family {
        Family::Poly => gen_poly(rng),
        Family::ExpTrig => gen_exp_trig(rng),
        _ => {
            if rng.random::<bool>() {
                gen_poly(rng)
            } else {
                gen_exp_trig(rng)
            }
        }
    }
}

fn gen_interval<R: Rng>(rng: &mut R) -> Interval {
    let a = rng.random_range(-6.0..4.0);
    let length = rng.random_range(0.5..4.0);
    Interval::new(a, a + length).expect("generated interval is valid")
}

fn gen_exponents<R: Rng>(rng: &mut R, p_range: (f64, f64)) -> ConjugateExponents {
    let p = rng.random_range(p_range.0..=p_range.1);
    ConjugateExponents::from_p(p).expect("generated p lies in (1, 64]")
}

/// Weight partitions are valid by construction: pairs `(w, 1 - w)` with
/// `w` ranging in [0, 1], uniform n-way constants, the sin^2/cos^2 pair,
/// or the linear pair.
fn gen_partition<R: Rng>(rng: &mut R, interval: Interval) -> WeightPartition {
    let partition = match rng.random_range(0..4u8) {
        0 => WeightPartition::linear(interval),
        1 => WeightPartition::trig(interval),
        2 => {
            let n = rng.random_range(2..=4usize);
            let weights = vec![Expr::constant(1.0 / n as f64); n];
            WeightPartition::new(weights, interval)
        }
        _ => {
            let center = Expr::constant(rng.random_range(interval.a()..interval.b()));
            let w = match rng.random_range(0..3u8) {
                0 => {
                    let rate = Expr::constant(rng.random_range(0.2..1.5));
                    (rate * Expr::var()).sin().pow(Expr::constant(2.0))
                }
                1 => {
                    let shift = Expr::var() - center;
                    Expr::constant(1.0) / (Expr::constant(1.0) + shift.clone() * shift)
                }
                _ => {
                    let shift = Expr::var() - center;
                    (-(shift.clone() * shift)).exp()
                }
            };
            let complement = Expr::constant(1.0) - w.clone();
            WeightPartition::new(vec![w, complement], interval)
        }
    };
    partition.expect("generated partitions are valid by construction")
}

fn gen_tuple<R: Rng>(rng: &mut R, n: usize) -> PositiveTuple {
    let values = (0..n)
        .map(|_| 10f64.powf(rng.random_range(-3.0..3.0)))
        .collect();
    PositiveTuple::new(values).expect("log-uniform entries are positive")
}

fn gen_discrete_partition<R: Rng>(rng: &mut R, n: usize) -> DiscreteWeightPartition {
    let partition = match rng.random_range(0..4u8) {
        0 => DiscreteWeightPartition::linear(n),
        1 => DiscreteWeightPartition::trig(n),
        2 => {
            let m = rng.random_range(2..=8usize);
            DiscreteWeightPartition::new(vec![vec![1.0 / m as f64; n]; m])
        }
        _ => {
            let m = rng.random_range(2..=8usize);
            let mut rows = vec![vec![0.0; n]; m];
            for k in 0..n {
                let column: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
                let total: f64 = column.iter().sum();
                for (row, value) in rows.iter_mut().zip(&column) {
                    row[k] = value / total;
                }
            }
            DiscreteWeightPartition::new(rows)
        }
    };
    partition.expect("generated discrete partitions are valid by construction")
}

fn gen_hh_case<R: Rng>(rng: &mut R, p_range: (f64, f64)) -> HHInput {
    let exps = gen_exponents(rng, p_range);
    let a = rng.random_range(-3.0..1.0);
    let length = rng.random_range(0.5..2.0);
    let interval = Interval::new(a, a + length).expect("generated interval is valid");
    let c = rng.random_range(0.2..2.0);
    let (f, f_prime) = match rng.random_range(0..3u8) {
        0 => {
            let degree = 2 * rng.random_range(1..=4usize);
            let f = Expr::var().pow(Expr::constant(degree as f64));
            let fp = Expr::constant(degree as f64)
                * Expr::var().pow(Expr::constant((degree - 1) as f64));
            (f, fp)
        }
        1 => {
            let f = (Expr::constant(c) * Expr::var()).exp();
            let fp = Expr::constant(c) * (Expr::constant(c) * Expr::var()).exp();
            (f, fp)
        }
        _ => {
            let up = (Expr::constant(c) * Expr::var()).exp();
            let down = (Expr::constant(-c) * Expr::var()).exp();
            let f = (up.clone() + down.clone()) / Expr::constant(2.0);
            let fp = Expr::constant(c) * (up - down) / Expr::constant(2.0);
            (f, fp)
        }
    };
    HHInput::new(f, f_prime, interval, exps).expect("generated derivative templates are exact")
}

/// Draws one case; a deterministic function of the RNG state.
pub fn generate_case<R: Rng>(
    rng: &mut R,
    family: Family,
    p_range: (f64, f64),
    n_range: (usize, usize),
) -> Case {
    match family {
        Family::Tuples => {
            let n = rng.random_range(n_range.0..=n_range.1);
            Case::Tuples {
                a: gen_tuple(rng, n),
                b: gen_tuple(rng, n),
                exps: gen_exponents(rng, p_range),
                partition: gen_discrete_partition(rng, n),
            }
        }
        Family::Hh => Case::Hh {
            input: gen_hh_case(rng, p_range),
        },
        _ => {
            let interval = gen_interval(rng);
            Case::Integral {
                f: gen_function(rng, family),
                g: gen_function(rng, family),
                exps: gen_exponents(rng, p_range),
                partition: gen_partition(rng, interval),
            }
        }
    }
}

struct TrialOutcome {
    trial: u64,
    inputs: CaseSummary,
    result: Result<TrialReport, String>,
}

fn run_trial(config: &SweepConfig, trial: u64) -> TrialOutcome {
    let case = config.case_for_trial(trial);
    let inputs = case.summary();
    let result = match &case {
        Case::Integral {
            f,
            g,
            exps,
            partition,
        } => verify_chain_with(
            f,
            g,
            exps,
            partition,
            &sweep_quadrature(),
            &config.report_tol,
        )
        .map(TrialReport::Integral)
        .map_err(|e| e.to_string()),
        Case::Tuples {
            a,
            b,
            exps,
            partition,
        } => verify_sum_chain_with(a, b, exps, partition, &config.report_tol)
            .map(TrialReport::Sum)
            .map_err(|e| e.to_string()),
        Case::Hh { input } => hh_report_with(input, &sweep_quadrature(), &config.report_tol)
            .map(TrialReport::Hh)
            .map_err(|e| e.to_string()),
    };
    TrialOutcome {
        trial,
        inputs,
        result,
    }
}

fn aggregate(outcomes: Vec<TrialOutcome>) -> SweepSummary {
    let trials_run = outcomes.len() as u64;
    let mut violations = Vec::new();
    let mut errors = Vec::new();
    let mut gap_refined = Vec::new();
    let mut gap_lhs = Vec::new();
    let mut tightening = Vec::new();
    // Outcomes arrive ordered by trial index, so violations are too.
    for outcome in outcomes {
        match outcome.result {
            Ok(report) => {
                let (refined, lhs, ratio) = report.gaps();
                gap_refined.push(refined);
                gap_lhs.push(lhs);
                if let Some(r) = ratio {
                    tightening.push(r);
                }
                if report.violates() {
                    violations.push(ViolationRecord {
                        trial: outcome.trial,
                        inputs: outcome.inputs,
                        report,
                    });
                }
            }
            Err(message) => errors.push(TrialError {
                trial: outcome.trial,
                inputs: outcome.inputs,
                message,
            }),
        }
    }
    SweepSummary {
        trials_run,
        violations,
        errors,
        gap_refined: GapStats::from_values(gap_refined),
        gap_lhs: GapStats::from_values(gap_lhs),
        tightening_ratio: GapStats::from_values(tightening),
    }
}

/// Runs every trial in parallel and aggregates order-independently.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepSummary, ConfigError> {
    config.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial))
        .collect();
    Ok(aggregate(outcomes))
}

/// Serial variant of [`run_sweep`]; produces an identical summary.
pub fn run_sweep_serial(config: &SweepConfig) -> Result<SweepSummary, ConfigError> {
    config.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .map(|trial| run_trial(config, trial))
        .collect();
    Ok(aggregate(outcomes))
}
