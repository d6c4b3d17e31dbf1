//! Scripted experiment suites producing [`ExperimentReport`]s.
//!
//! Each report is a numeric table with a `pass` column (1 or 0); the verdict
//! is pass iff every row passes. Reports serialise to CSV with trailing
//! `#`-prefixed metadata lines, and are fully determined by their id,
//! parameters and seed.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;

use crate::axioms::{
    axiom2_samples, check_axiom1, log_times, random_flow_generator, srel_counterexample, srel_evaluation,
    unitary_flow_path, SREL_MARGIN_FLOOR,
};
use crate::bounds::{commutator_lower_bound, commutator_upper_bound, BoundReport};
use crate::coherence::{eta2, measure_value, rewrite_in_basis, MeasureId};
use crate::haar::{
    exact_expected_eta2_sq, haar_samples, random_basis, random_density, random_hermitian, MonteCarloEstimate,
    SeededGenerator,
};
use crate::linalg::{purity, DensityMatrix, HermitianObservable, OrthonormalBasis, Tolerances};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_N_LIST: [usize; 5] = [2, 4, 8, 16, 32];

/// A numeric table plus the metadata needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    fn new(id: &str, seed: u64, columns: &[&str]) -> Self {
        Self {
            id: id.to_string(),
            seed,
            parameters: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, value: impl Display) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// True iff every row has `pass == 1`.
    pub fn verdict(&self) -> bool {
        match self.column_index("pass") {
            Some(j) => self.rows.iter().all(|r| r[j] == 1.0),
            None => false,
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| format_number(v))).map_err(csv_err)?;
        }
        let mut out = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        let mut meta = |line: String| {
            out.extend_from_slice(line.as_bytes());
            out.push(b'\n');
        };
        meta(format!("# experiment={}", self.id));
        meta(format!("# seed={}", self.seed));
        for (k, v) in &self.parameters {
            meta(format!("# {k}={v}"));
        }
        for note in &self.notes {
            meta(format!("# note={note}"));
        }
        meta(format!("# verdict={}", if self.verdict() { "pass" } else { "fail" }));
        String::from_utf8(out).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    /// Writes `<dir>/<id>.csv` and returns its path.
    pub fn write_csv(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let path = dir.join(format!("{}.csv", self.id));
        let text = self
            .to_csv()
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        let mut f = std::fs::File::create(&path)?;
        f.write_all(text.as_bytes())?;
        Ok(path)
    }
}

/// Integers verbatim, moderate magnitudes in positional notation, the rest in
/// scientific notation; all shortest round-trip.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else if (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn join<T: Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// Runs `count` trials in parallel; trial `t` draws from sub-stream `t` of a
/// master split off `g`, so results do not depend on the thread count.
fn par_trials<T, F>(g: &mut SeededGenerator, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut SeededGenerator) -> Result<T> + Sync,
{
    let master = g.split();
    (0..count)
        .into_par_iter()
        .map(|t| f(t, &mut master.substream(t as u64)))
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Tally {
    checks: usize,
    violations: usize,
    min_slack: f64,
}

impl Tally {
    const EMPTY: Tally = Tally {
        checks: 0,
        violations: 0,
        min_slack: f64::INFINITY,
    };

    fn record(&mut self, slack: f64, ok: bool) {
        self.checks += 1;
        self.violations += usize::from(!ok);
        self.min_slack = self.min_slack.min(slack);
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checks += other.checks;
        self.violations += other.violations;
        self.min_slack = self.min_slack.min(other.min_slack);
        self
    }
}

#[derive(Debug, Clone)]
pub struct Theorem42Config {
    pub n_list: Vec<usize>,
    /// Random `(rho, B, F)` triples per `n`.
    pub trials: usize,
    /// Random unitary paths per `n` for axiom 1.
    pub paths_per_n: usize,
    pub seed: u64,
    pub measures: Vec<MeasureId>,
}

impl Default for Theorem42Config {
    fn default() -> Self {
        Self {
            n_list: DEFAULT_N_LIST.to_vec(),
            trials: 1000,
            paths_per_n: 5,
            seed: DEFAULT_SEED,
            measures: MeasureId::COHERENCE_MEASURES.to_vec(),
        }
    }
}

/// Flow times for axiom-1 paths: `t = 0` then `10^-1 .. 10^-9`.
pub fn axiom1_times() -> Vec<f64> {
    let mut ts = vec![0.0];
    ts.extend(log_times(-1.0, -9.0, 17));
    ts
}

/// Pointwise factor `k` in `measure <= k * d` along a path, where known.
fn axiom1_factor(measure: MeasureId, n: usize) -> Option<f64> {
    match measure {
        MeasureId::Eta1 | MeasureId::EtaInf => Some(n as f64),
        MeasureId::Eta2 | MeasureId::Delta => Some(1.0),
        MeasureId::SRel(_) => None,
    }
}

/// Axiom-1 path decay threshold.
pub const DECAY_THRESHOLD: f64 = 1e-6;
const PATH_TOLERANCE: f64 = 1e-12;

fn assess_path(distances: &[f64], values: &[f64], measure: MeasureId, n: usize) -> Tally {
    let mut tally = Tally::EMPTY;
    if let Some(k) = axiom1_factor(measure, n) {
        for (&d, &v) in distances.iter().zip(values) {
            let slack = k * d - v;
            tally.record(slack, slack >= -PATH_TOLERANCE);
        }
    }
    // times after the first decrease towards zero
    for w in values[1..].windows(2) {
        let slack = w[0] - w[1];
        tally.record(slack, slack >= -PATH_TOLERANCE);
    }
    let (d_end, v_end) = (*distances.last().unwrap(), *values.last().unwrap());
    if d_end < DECAY_THRESHOLD {
        let slack = DECAY_THRESHOLD - v_end;
        tally.record(slack, slack > 0.0);
    }
    tally
}

/// Rank of the `t`-th random state: cycles through `1..=n`.
fn trial_rank(t: usize, n: usize) -> usize {
    1 + t % n
}

fn trial_state<R: Rng + ?Sized>(t: usize, n: usize, rng: &mut R) -> DensityMatrix {
    if t == 0 {
        DensityMatrix::maximally_mixed(n)
    } else {
        random_density(n, trial_rank(t, n), rng)
    }
}

/// Axiom 2 on random `(rho, B, F)` triples plus the extremal subspaces of
/// each `(rho, B)`, and axiom 1 along random unitary flows towards the
/// eigenbasis of `rho`. Trial 0 at every `n` uses `I/n`.
///
/// Columns: `n, measure, kind, checks, violations, min_slack, pass`, where
/// `kind` is the axiom number and `measure` is [`MeasureId::code`]. For
/// `SRel(c)` the axiom-2 row also counts the constructed counterexample.
pub fn run_theorem42_suite(config: &Theorem42Config) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "theorem42",
        config.seed,
        &["n", "measure", "kind", "checks", "violations", "min_slack", "pass"],
    );
    report.param("n_list", join(&config.n_list));
    report.param("trials", config.trials);
    report.param("paths_per_n", config.paths_per_n);
    report.param("measures", join(&config.measures));
    report.param("axiom2_tolerance", format_number(crate::axioms::AXIOM2_TOLERANCE));

    let mut g = SeededGenerator::new(config.seed);
    let measures = &config.measures;
    for &n in &config.n_list {
        let axiom2: Vec<Vec<Tally>> = par_trials(&mut g, config.trials, |t, rng| {
            let rho = trial_state(t, n, rng);
            let b = random_basis(n, rng);
            let s = rewrite_in_basis(&rho, &b)?;
            let samples = axiom2_samples(&s, 1, rng)?;
            Ok(measures
                .iter()
                .map(|&m| {
                    let value = measure_value(&s, m);
                    let mut tally = Tally::EMPTY;
                    for sample in &samples {
                        let r = sample.report(value);
                        tally.record(r.slack, r.satisfied);
                    }
                    tally
                })
                .collect())
        })?;
        let axiom1: Vec<Vec<Tally>> = par_trials(&mut g, config.paths_per_n, |t, rng| {
            let rho = trial_state(t, n, rng);
            let k = random_flow_generator(n, rng);
            let path = unitary_flow_path(rho.eigenbasis(), &k, &axiom1_times())?;
            measures
                .iter()
                .map(|&m| {
                    let trace = check_axiom1(&rho, m, &path)?;
                    Ok(assess_path(&trace.distances, &trace.values, m, n))
                })
                .collect()
        })?;

        for (j, &m) in measures.iter().enumerate() {
            let mut a2 = axiom2.iter().fold(Tally::EMPTY, |acc, t| acc.merge(t[j]));
            if let MeasureId::SRel(c) = m {
                match srel_counterexample(c) {
                    Ok(found) if n == config.n_list[0] => {
                        let ev = found.evaluation;
                        let r = BoundReport::with_tolerance(ev.deviation, ev.bound, crate::axioms::AXIOM2_TOLERANCE);
                        a2.record(r.slack, r.satisfied);
                        report.notes.push(format!(
                            "srel c={c}: counterexample eps={} deviation={} bound={} margin={}",
                            format_number(ev.epsilon),
                            format_number(ev.deviation),
                            format_number(ev.bound),
                            format_number(ev.margin)
                        ));
                    }
                    Ok(_) => {}
                    Err(e) => report.notes.push(format!("srel c={c}: {e}")),
                }
            }
            let a1 = axiom1.iter().fold(Tally::EMPTY, |acc, t| acc.merge(t[j]));
            for (kind, tally) in [(1.0, a1), (2.0, a2)] {
                report.push(vec![
                    n as f64,
                    f64::from(m.code()),
                    kind,
                    tally.checks as f64,
                    tally.violations as f64,
                    tally.min_slack,
                    flag(tally.violations == 0),
                ]);
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct Proposition31Config {
    pub n_list: Vec<usize>,
    /// Random pairs per `n`; the hand-built cases use a tenth of this.
    pub trials: usize,
    pub seed: u64,
}

impl Default for Proposition31Config {
    fn default() -> Self {
        Self {
            n_list: DEFAULT_N_LIST.to_vec(),
            trials: 500,
            seed: DEFAULT_SEED,
        }
    }
}

/// Pair families in the commutator suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCase {
    Random = 1,
    Commuting = 2,
    MutuallyUnbiased = 3,
    NearDegenerate = 4,
    SpinZX = 5,
}

fn random_spectrum<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn pair_for<R: Rng + ?Sized>(
    case: PairCase,
    n: usize,
    rng: &mut R,
) -> Result<(HermitianObservable, HermitianObservable)> {
    let tol = Tolerances::default();
    match case {
        PairCase::Random => Ok((
            HermitianObservable::new(&random_hermitian(n, rng), &tol)?,
            HermitianObservable::new(&random_hermitian(n, rng), &tol)?,
        )),
        PairCase::Commuting => {
            let b = random_basis(n, rng);
            Ok((
                HermitianObservable::from_spectrum(&random_spectrum(n, rng), &b)?,
                HermitianObservable::from_spectrum(&random_spectrum(n, rng), &b)?,
            ))
        }
        PairCase::MutuallyUnbiased => Ok((
            HermitianObservable::from_spectrum(&random_spectrum(n, rng), &OrthonormalBasis::standard(n))?,
            HermitianObservable::from_spectrum(&random_spectrum(n, rng), &OrthonormalBasis::fourier(n))?,
        )),
        PairCase::NearDegenerate => {
            let mut spec = random_spectrum(n, rng);
            spec[1] = spec[0] + 1e-12;
            Ok((
                HermitianObservable::from_spectrum(&spec, &random_basis(n, rng))?,
                HermitianObservable::new(&random_hermitian(n, rng), &tol)?,
            ))
        }
        PairCase::SpinZX => Ok((
            HermitianObservable::from_spectrum(&[0.5, -0.5], &OrthonormalBasis::standard(2))?,
            HermitianObservable::from_spectrum(&[0.5, -0.5], &OrthonormalBasis::fourier(2))?,
        )),
    }
}

/// Upper and lower commutator bounds on random and hand-built pairs.
///
/// Columns: `n, case, bound, checks, violations, skipped, min_rel_slack, pass`
/// with `case` a [`PairCase`] code and `bound` 1 for the upper, 2 for the
/// lower bound. Pairs with a degenerate spectrum are skipped by the lower
/// bound only.
pub fn run_proposition31_suite(config: &Proposition31Config) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "prop31",
        config.seed,
        &[
            "n",
            "case",
            "bound",
            "checks",
            "violations",
            "skipped",
            "min_rel_slack",
            "pass",
        ],
    );
    report.param("n_list", join(&config.n_list));
    report.param("trials", config.trials);
    report.param("relative_tolerance", format_number(1e-9));

    let mut g = SeededGenerator::new(config.seed);
    let extra = (config.trials / 10).max(1);
    for &n in &config.n_list {
        let mut cases = vec![
            (PairCase::Random, config.trials),
            (PairCase::Commuting, extra),
            (PairCase::MutuallyUnbiased, extra),
        ];
        if n >= 2 {
            cases.push((PairCase::NearDegenerate, extra));
        }
        if n == 2 {
            cases.push((PairCase::SpinZX, 1));
        }
        for (case, count) in cases {
            let results = par_trials(&mut g, count, |_, rng| {
                let (a, b) = pair_for(case, n, rng)?;
                let upper = commutator_upper_bound(&a, &b)?;
                let lower = match commutator_lower_bound(&a, &b) {
                    Ok(r) => Some(r),
                    Err(Error::DegenerateSpectrum { .. }) => None,
                    Err(e) => return Err(e),
                };
                Ok((upper, lower))
            })?;
            let mut upper = (Tally::EMPTY, 0usize);
            let mut lower = (Tally::EMPTY, 0usize);
            for (u, l) in results {
                upper.0.record(u.relative_slack(), u.satisfied);
                match l {
                    Some(l) => lower.0.record(l.relative_slack(), l.satisfied),
                    None => lower.1 += 1,
                }
            }
            for (bound, (tally, skipped)) in [(1.0, upper), (2.0, lower)] {
                report.push(vec![
                    n as f64,
                    case as i32 as f64,
                    bound,
                    tally.checks as f64,
                    tally.violations as f64,
                    skipped as f64,
                    tally.min_slack,
                    flag(tally.violations == 0),
                ]);
            }
        }
    }
    Ok(report)
}

/// State families for the purity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateFamily {
    Pure,
    Mixed { rank: usize },
    MaximallyMixed,
}

impl StateFamily {
    pub fn code(&self) -> u8 {
        match self {
            StateFamily::Pure => 1,
            StateFamily::Mixed { .. } => 2,
            StateFamily::MaximallyMixed => 3,
        }
    }

    fn rank(&self, n: usize) -> usize {
        match *self {
            StateFamily::Pure => 1,
            StateFamily::Mixed { rank } => rank.min(n),
            StateFamily::MaximallyMixed => n,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> DensityMatrix {
        match self {
            StateFamily::MaximallyMixed => DensityMatrix::maximally_mixed(n),
            _ => random_density(n, self.rank(n), rng),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PuritySweepConfig {
    pub n_list: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub families: Vec<StateFamily>,
}

impl Default for PuritySweepConfig {
    fn default() -> Self {
        Self {
            n_list: DEFAULT_N_LIST.to_vec(),
            samples: 2000,
            seed: DEFAULT_SEED,
            families: vec![
                StateFamily::Pure,
                StateFamily::Mixed { rank: 2 },
                StateFamily::MaximallyMixed,
            ],
        }
    }
}

/// Z-score threshold in the purity sweep.
pub const Z_THRESHOLD: f64 = 4.0;

/// `eta_2^2` over Haar-random bases against its exact mean, and the mean
/// absolute deviation `|eta_2^2 - tr(rho^2)|` as `n` grows.
///
/// Columns: `n, family, rank, purity, mean_eta2_sq, se, exact, z,
/// mean_abs_dev, abs_dev_se, monotone_ok, pass`. `monotone_ok` records
/// whether `mean_abs_dev` did not increase since the previous `n` of the same
/// family; a row passes iff `|z| <= 4` and `monotone_ok`.
pub fn run_purity_sweep(config: &PuritySweepConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "purity",
        config.seed,
        &[
            "n",
            "family",
            "rank",
            "purity",
            "mean_eta2_sq",
            "se",
            "exact",
            "z",
            "mean_abs_dev",
            "abs_dev_se",
            "monotone_ok",
            "pass",
        ],
    );
    report.param("n_list", join(&config.n_list));
    report.param("samples", config.samples);
    report.param(
        "families",
        config
            .families
            .iter()
            .map(|f| format!("{}:{}", f.code(), f.rank(usize::MAX)))
            .collect::<Vec<_>>()
            .join(";"),
    );
    report.param("z_threshold", format_number(Z_THRESHOLD));

    let mut g = SeededGenerator::new(config.seed);
    let mut previous: Vec<Option<f64>> = vec![None; config.families.len()];
    for &n in &config.n_list {
        for (fi, family) in config.families.iter().enumerate() {
            let rho = family.sample(n, &mut g);
            let p = purity(&rho);
            let values = haar_samples(n, config.samples, &mut g, |u| {
                let basis = OrthonormalBasis::from_unitary_unchecked(u.clone());
                let s = rewrite_in_basis(&rho, &basis).expect("dimensions agree");
                eta2(&s).powi(2)
            });
            let est = MonteCarloEstimate::from_samples(&values)?;
            let deviations: Vec<f64> = values.iter().map(|v| (v - p).abs()).collect();
            let dev = MonteCarloEstimate::from_samples(&deviations)?;
            let exact = exact_expected_eta2_sq(&rho);
            let z = est.z_score(exact);
            let monotone = previous[fi].is_none_or(|prev| dev.mean <= prev);
            previous[fi] = Some(dev.mean);
            report.push(vec![
                n as f64,
                f64::from(family.code()),
                family.rank(n) as f64,
                p,
                est.mean,
                est.std_error,
                exact,
                z,
                dev.mean,
                dev.std_error,
                flag(monotone),
                flag(z.abs() <= Z_THRESHOLD && monotone),
            ]);
        }
    }
    Ok(report)
}

/// Reference `ε` at which `ref_margin` is reported.
pub const SREL_REFERENCE_EPSILON: f64 = 0.1;

/// The S_rel counterexample for each constant `c`.
///
/// Columns: `c, epsilon, threshold, deviation, bound, margin, ref_margin,
/// pass`; `ref_margin` is the margin at `ε = 0.1` and is informational. A `c`
/// for which no violation is found yields a row of `nan` with `pass = 0`.
pub fn run_srel_demo(c_list: &[f64]) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "srel",
        0,
        &[
            "c",
            "epsilon",
            "threshold",
            "deviation",
            "bound",
            "margin",
            "ref_margin",
            "pass",
        ],
    );
    report.param(
        "c_list",
        c_list.iter().map(|&c| format_number(c)).collect::<Vec<_>>().join(";"),
    );
    report.param("margin_floor", format_number(SREL_MARGIN_FLOOR));
    report.param("reference_epsilon", format_number(SREL_REFERENCE_EPSILON));
    for &c in c_list {
        let reference = srel_evaluation(c, SREL_REFERENCE_EPSILON)?.margin;
        match srel_counterexample(c) {
            Ok(found) => {
                let ev = found.evaluation;
                report.push(vec![
                    c,
                    ev.epsilon,
                    found.threshold,
                    ev.deviation,
                    ev.bound,
                    ev.margin,
                    reference,
                    flag(ev.margin > SREL_MARGIN_FLOOR),
                ]);
            }
            Err(e @ Error::NotFound { .. }) => {
                report.notes.push(format!("c={c}: {e}"));
                let nan = f64::NAN;
                report.push(vec![c, nan, nan, nan, nan, nan, reference, 0.0]);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
