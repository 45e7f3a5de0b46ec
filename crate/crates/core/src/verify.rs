//! The end-to-end acceptance suite.
//!
//! Each check is a [`Criterion`] registered under a fixed id. Checks share a
//! [`VerifyContext`] that builds the large tables once, on first use. Wall
//! clock limits are enforced but elapsed times are kept out of the report so
//! that identical configurations give byte-identical output.

use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::ap::{self, ApQuery, OnTheFly};
use crate::cache;
use crate::characters::{self, euler_phi};
use crate::config::{OutputFormat, RunConfig};
use crate::equi;
use crate::error::{Error, Result};
use crate::exact::{self, ATable, DivisorSums, MemoryBudget};
use crate::fit::fit_exponent;
use crate::output;
use crate::parallel::Workers;
use crate::zeta;

/// Largest cutoff any check needs.
pub const TABLE_LIMIT: u64 = 1_000_000;

const DECADES: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

/// Outcome of one check, as it appears in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: String,
    pub measured: f64,
    pub relation: String,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

/// What a check computed, before bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub measured: f64,
    pub relation: &'static str,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

pub trait Criterion: Send + Sync {
    fn id(&self) -> u32;

    fn name(&self) -> &'static str;

    fn time_limit(&self) -> Option<Duration> {
        None
    }

    fn evaluate(&self, ctx: &VerifyContext) -> Result<Evaluation>;
}

/// Shared, lazily built inputs for a verification run.
pub struct VerifyContext {
    config: RunConfig,
    a_table: OnceLock<std::result::Result<Arc<ATable>, Error>>,
    b_table: OnceLock<std::result::Result<Arc<DivisorSums>, Error>>,
}

impl VerifyContext {
    pub fn new(config: RunConfig) -> Self {
        Self {
            config,
            a_table: OnceLock::new(),
            b_table: OnceLock::new(),
        }
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn budget(&self) -> MemoryBudget {
        self.config.budget()
    }

    /// `a_0..=a_{TABLE_LIMIT}`, read from the cache file when it covers the range.
    pub fn a_table(&self) -> Result<Arc<ATable>> {
        self.a_table
            .get_or_init(|| {
                cache::load_or_build(self.config.cache_path.as_deref(), TABLE_LIMIT, self.budget()).map(Arc::new)
            })
            .as_ref()
            .map(Arc::clone)
            .map_err(Error::replay)
    }

    /// `b_1..=b_{TABLE_LIMIT}`.
    pub fn b_table(&self) -> Result<Arc<DivisorSums>> {
        self.b_table
            .get_or_init(|| {
                self.budget().check("divisor-sum sieve", 16 * (TABLE_LIMIT + 1))?;
                let a = self.a_table()?;
                exact::b_sieve_from(&a, TABLE_LIMIT).map(Arc::new)
            })
            .as_ref()
            .map(Arc::clone)
            .map_err(Error::replay)
    }
}

pub fn criteria() -> Vec<Box<dyn Criterion>> {
    vec![
        Box::new(ZeroSet),
        Box::new(PartitionIdentity),
        Box::new(DivisorSumSieve),
        Box::new(MainTermConvergence),
        Box::new(ProgressionMainTerm),
        Box::new(CharacterIdentities),
        Box::new(TwistedSumDichotomy),
        Box::new(ErdosTuran),
        Box::new(SecondDerivativeBound),
        Box::new(ZetaClosedForms),
        Box::new(AbscissaDiscrimination),
        Box::new(PoleResidue),
        Box::new(CesaroMainTerm),
        Box::new(Determinism),
    ]
}

/// Looks a check up by id or by name.
pub fn criterion(key: &str) -> Result<Box<dyn Criterion>> {
    criteria()
        .into_iter()
        .find(|c| c.name() == key || key.parse::<u32>().is_ok_and(|id| id == c.id()))
        .ok_or_else(|| Error::Unknown {
            kind: "criterion",
            name: key.to_string(),
        })
}

/// Runs one check. Errors and blown time limits become failures.
pub fn run_criterion(c: &dyn Criterion, ctx: &VerifyContext) -> (CriterionOutcome, Duration) {
    let started = Instant::now();
    let result = c.evaluate(ctx);
    let elapsed = started.elapsed();
    let mut outcome = match result {
        Ok(e) => CriterionOutcome {
            id: c.id(),
            name: c.name().to_string(),
            measured: e.measured,
            relation: e.relation.to_string(),
            threshold: e.threshold,
            passed: e.passed,
            detail: e.detail,
        },
        Err(err) => CriterionOutcome {
            id: c.id(),
            name: c.name().to_string(),
            measured: f64::NAN,
            relation: String::new(),
            threshold: f64::NAN,
            passed: false,
            detail: format!("error: {err}"),
        },
    };
    if let Some(limit) = c.time_limit() {
        if elapsed > limit {
            outcome.passed = false;
            outcome.detail.push_str(&format!("; exceeded the {}s time limit", limit.as_secs()));
        }
    }
    (outcome, elapsed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRun {
    pub outcomes: Vec<CriterionOutcome>,
    /// Wall clock per check, same order as `outcomes`. Not part of the report.
    pub elapsed: Vec<Duration>,
}

impl VerifyRun {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn render(&self, format: OutputFormat) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        output::write_rows(format, &self.outcomes, &mut buf)?;
        Ok(buf)
    }
}

/// Runs every registered check on a pool of `config.worker_count` threads.
pub fn run_verify(config: &RunConfig) -> Result<VerifyRun> {
    run_selected(config, &criteria())
}

pub fn run_selected(config: &RunConfig, selected: &[Box<dyn Criterion>]) -> Result<VerifyRun> {
    let workers = config.workers()?;
    let ctx = VerifyContext::new(config.clone());
    let (outcomes, elapsed) = workers.install(|| selected.iter().map(|c| run_criterion(c.as_ref(), &ctx)).unzip());
    Ok(VerifyRun { outcomes, elapsed })
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn decade_points(f: impl Fn(u64) -> Result<f64>) -> Result<Vec<(f64, f64)>> {
    DECADES.iter().map(|&x| Ok((x as f64, f(x)?))).collect()
}

struct ZeroSet;

impl Criterion for ZeroSet {
    fn id(&self) -> u32 {
        1
    }

    fn name(&self) -> &'static str {
        "zero_set"
    }

    fn time_limit(&self) -> Option<Duration> {
        Some(Duration::from_secs(10))
    }

    fn evaluate(&self, ctx: &VerifyContext) -> Result<Evaluation> {
        let table = ctx.a_table()?;
        let zeros: Vec<u64> = (0..=TABLE_LIMIT).filter(|&n| table.get(n) == 0).collect();
        let unexpected = zeros.iter().filter(|n| ![0, 1, 24].contains(*n)).count();
        let passed = zeros == [0, 1, 24];
        Ok(Evaluation {
            measured: unexpected as f64,
            relation: "==",
            threshold: 0.0,
            passed,
            detail: format!("a_n = 0 for n in {zeros:?} among n <= {TABLE_LIMIT}"),
        })
    }
}

struct PartitionIdentity;

impl Criterion for PartitionIdentity {
    fn id(&self) -> u32 {
        2
    }

    fn name(&self) -> &'static str {
        "partition_identity"
    }

    fn evaluate(&self, _ctx: &VerifyContext) -> Result<Evaluation> {
        let mut failures = Vec::new();
        let mut checked = 0;
        for x in [100, 1_000, 10_000] {
            for q in 1..=20 {
                checked += 1;
                if !ap::partition_check_with(&OnTheFly, q, x)?.holds {
                    failures.push((q, x));
                }
            }
        }
        Ok(Evaluation {
            measured: failures.len() as f64,
            relation: "==",
            threshold: 0.0,
            passed: failures.is_empty(),
            detail: format!("{checked} (q, x) pairs, mismatches {failures:?}"),
        })
    }
}

struct DivisorSumSieve;

impl Criterion for DivisorSumSieve {
    fn id(&self) -> u32 {
        3
    }

    fn name(&self) -> &'static str {
        "divisor_sum_sieve"
    }

    fn evaluate(&self, ctx: &VerifyContext) -> Result<Evaluation> {
        const X: u64 = 10_000;
        let sieve = exact::b_sieve(X, ctx.budget())?;
        let brute = |n: u64| -> u64 {
            let mut total = 0;
            let mut d = 1;
            while d * d <= n {
                if n.is_multiple_of(d) {
                    total += exact::a_u64(d).expect("small index");
                    if d * d != n {
                        total += exact::a_u64(n / d).expect("small index");
                    }
                }
                d += 1;
            }
            total
        };
        let mismatches: Vec<u64> = (1..=X).filter(|&n| sieve.get(n) != brute(n)).collect();
        Ok(Evaluation {
            measured: mismatches.len() as f64,
            relation: "==",
            threshold: 0.0,
            passed: mismatches.is_empty(),
            detail: format!("b_n for n <= {X} against divisor enumeration, first mismatches {:?}", &mismatches[..mismatches.len().min(5)]),
        })
    }
}

/// Deviation `|ratio - 1|` at each decade and the exponent of `|M - main|`.
fn progression_trend(table: &ATable, b: u64, q: u64) -> Result<(Vec<f64>, f64)> {
    let reports = DECADES
        .iter()
        .map(|&x| Ok(ap::average_a_ap_with(table, &ApQuery::new(b, q, x)?)))
        .collect::<Result<Vec<_>>>()?;
    let deviations = reports.iter().map(|r| (r.ratio - 1.0).abs()).collect();
    let points: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| (r.x as f64, (r.raw_sum as f64 - ap::main_term_sum(r.x, q)).abs()))
        .collect();
    Ok((deviations, fit_exponent(&points)?.slope))
}

struct MainTermConvergence;

impl Criterion for MainTermConvergence {
    fn id(&self) -> u32 {
        4
    }

    fn name(&self) -> &'static str {
        "main_term_convergence"
    }

    fn time_limit(&self) -> Option<Duration> {
        Some(Duration::from_secs(60))
    }

    fn evaluate(&self, ctx: &VerifyContext) -> Result<Evaluation> {
        let table = ctx.a_table()?;
        let threshold = 29.0 / 12.0 + 0.15;
        let (dev, slope) = progression_trend(&table, 0, 1)?;
        let shrinks = dev[3] < dev[0];
        Ok(Evaluation {
            measured: slope,
            relation: "<=",
            threshold,
            passed: shrinks && slope <= threshold,
            detail: format!("|ratio - 1| at 1e3..1e6: [{}]; residual exponent {slope:.4}", sci(&dev)),
        })
    }
}

struct ProgressionMainTerm;

impl Criterion for ProgressionMainTerm {
    fn id(&self) -> u32 {
        5
    }

    fn name(&self) -> &'static str {
        "progression_main_term"
    }

    fn evaluate(&self, ctx: &VerifyContext) -> Result<Evaluation> {
        let table = ctx.a_table()?;
        let threshold = 29.0 / 12.0 + 0.20;
        let mut worst: f64 = f64::NEG_INFINITY;
        let mut passed = true;
        let mut parts = Vec::new();
        for (b, q) in [(1, 3), (2, 5), (3, 8)] {
            let (dev, slope) = progression_trend(&table, b, q)?;
            passed &= dev[3] < dev[0] && slope <= threshold;
            worst = worst.max(slope);
            parts.push(format!("({b} mod {q}): |ratio - 1| [{}], exponent {slope:.4}", sci(&dev)));
        }
        Ok(Evaluation {
            measured: worst,
            relation: "<=",
            threshold,
            passed,
            detail: parts.join("; "),
        })
    }
}

struct CharacterIdentities;

impl Criterion for CharacterIdentities {
    fn id(&self) -> u32 {
        6
    }

    fn name(&self) -> &'static str {
        "character_identities"
    }

    fn evaluate(&self, _ctx: &VerifyContext) -> Result<Evaluation> {
        let mut orth: f64 = 0.0;
        let mut residue: f64 = 0.0;
        for q in 1..=24u64 {
            let chars = characters::characters(q)?;
            let tables: Vec<Vec<Complex64>> = chars.iter().map(|c| c.value_table()).collect();
            let phi = euler_phi(q) as f64;
            for (i, ti) in tables.iter().enumerate() {
                for (j, tj) in tables.iter().enumerate() {
                    let inner: Complex64 = ti.iter().zip(tj).map(|(u, v)| u * v.conj()).sum();
                    let expected = if i == j { phi } else { 0.0 };
                    orth = orth.max((inner - expected).norm());
                }
            }
            for (chi, sum) in chars.iter().zip(characters::character_residue_sum(q)?) {
                let expected = if chi.is_principal() { phi } else { 0.0 };
                residue = residue.max((sum - expected).norm());
            }
        }
        let mut recon: f64 = 0.0;
        const X: u64 = 10_000;
        for q in 1..=12u64 {
            for b in (0..q).filter(|b| b.gcd(&q) == 1) {
                let direct = ap::sum_a_ap(&ApQuery::new(b, q, X)?) as f64;
                let rebuilt = characters::ap_reconstruct(b, q, X)?;
                recon = recon.max((rebuilt - direct).norm() / direct.max(1.0));
            }
        }
        Ok(Evaluation {
            measured: orth,
            relation: "<=",
            threshold: 1e-9,
            passed: orth <= 1e-9 && residue <= 1e-10 && recon <= 1e-6,
            detail: format!(
                "orthogonality error {orth:.3e} (q <= 24, limit 1e-9); residue sums {residue:.3e} (limit 1e-10); \
                 progression reconstruction relative error {recon:.3e} (q <= 12, x = {X}, limit 1e-6)"
            ),
        })
    }
}

struct TwistedSumDichotomy;

impl Criterion for TwistedSumDichotomy {
    fn id(&self) -> u32 {
        7
    }

    fn name(&self) -> &'static str {
        "twisted_sum_dichotomy"
    }

    fn evaluate(&self, ctx: &VerifyContext) -> Result<Evaluation> {
        let table = ctx.a_table()?;
        let threshold = 29.0 / 12.0 + 0.2;
        let chars = characters::characters(3)?;
        let principal = &chars[0];
        let other = &chars[1];
        let mut dev = Vec::new();
        for &x in &DECADES {
            let r = characters::twisted_sum_with(table.as_ref(), principal, x)?;
            dev.push((r.re_s / r.main_term - 1.0).abs());
        }
        let points = decade_points(|x| Ok(characters::twisted_sum_with(table.as_ref(), other, x)?.value().norm()))?;
        let slope = fit_exponent(&points)?.slope;
        Ok(Evaluation {
            measured: slope,
            relation: "<=",
            threshold,
            passed: strictly_decreasing(&dev) && slope <= threshold,
            detail: format!(
                "principal mod 3 |ratio - 1| at 1e3..1e6: [{}]; nonprincipal |S| exponent {slope:.4}",
                sci(&dev)
            ),
        })
    }
}

struct ErdosTuran;

impl Criterion for ErdosTuran {
    fn id(&self) -> u32 {
        8
    }

    fn name(&self) -> &'static str {
        "erdos_turan"
    }

    fn evaluate(&self, ctx: &VerifyContext) -> Result<Evaluation> {
        let bits = ctx.config().precision_bits;
        let mut worst: f64 = 0.0;
        let mut failures = Vec::new();
        for n in [1_000, 10_000] {
            for (q, b) in [(1, 0), (7, 3)] {
                let sample = equi::frac_family_with_bits(1, q, b, n, bits)?;
                for k in [10, 100, 1_000] {
                    let c = equi::erdos_turan_bound(&sample, k)?;
                    worst = worst.max(c.measured / c.bound);
                    if !c.satisfied {
                        failures.push((n, q, k));
                    }
                }
            }
        }
        Ok(Evaluation {
            measured: worst,
            relation: "<=",
            threshold: 1.0,
            passed: failures.is_empty(),
            detail: format!("largest measured/bound over 12 cases {worst:.4}; violations (N, q, K) {failures:?}"),
        })
    }
}

struct SecondDerivativeBound;

impl Criterion for SecondDerivativeBound {
    fn id(&self) -> u32 {
        9
    }

    fn name(&self) -> &'static str {
        "second_derivative_bound"
    }

    fn evaluate(&self, _ctx: &VerifyContext) -> Result<Evaluation> {
        let mut worst: f64 = 0.0;
        let mut failures = Vec::new();
        for (start, end) in [(1_000, 2_000), (10_000, 11_000)] {
            for q in [1, 3] {
                for m in [1, 2, 5, 10] {
                    let c = equi::kn_bound(start, end, q, m)?;
                    worst = worst.max(c.measured / c.bound);
                    if !c.satisfied {
                        failures.push((start, q, m));
                    }
                }
            }
        }
        Ok(Evaluation {
            measured: worst,
            relation: "<=",
            threshold: 1.0,
            passed: failures.is_empty(),
            detail: format!("largest measured/bound over 16 cases {worst:.4}; violations (start, q, m) {failures:?}"),
        })
    }
}

struct ZetaClosedForms;

impl Criterion for ZetaClosedForms {
    fn id(&self) -> u32 {
        10
    }

    fn name(&self) -> &'static str {
        "zeta_closed_forms"
    }

    fn evaluate(&self, _ctx: &VerifyContext) -> Result<Evaluation> {
        use std::f64::consts::PI;
        let e2 = (zeta::zeta_real(2.0, 1e-12)? - PI * PI / 6.0).abs();
        let e4 = (zeta::zeta_real(4.0, 1e-12)? - PI.powi(4) / 90.0).abs();
        let err = e2.max(e4);
        Ok(Evaluation {
            measured: err,
            relation: "<=",
            threshold: 1e-10,
            passed: err <= 1e-10,
            detail: format!("|zeta(2) - pi^2/6| = {e2:.3e}, |zeta(4) - pi^4/90| = {e4:.3e}"),
        })
    }
}

/// At `s = 2.45` the truncations of `G` settle while those of `zeta(s - 3/2)`
/// keep growing. Doubling differences of `G` fluctuate with the sign pattern
/// of `c_n`, so their decrease is judged by the fitted trend and the first
/// against the last step.
struct AbscissaDiscrimination;

impl Criterion for AbscissaDiscrimination {
    fn id(&self) -> u32 {
        11
    }

    fn name(&self) -> &'static str {
        "abscissa_discrimination"
    }

    fn evaluate(&self, ctx: &VerifyContext) -> Result<Evaluation> {
        const S: f64 = 2.45;
        let shifted = zeta::series("zeta_shift", ctx.budget())?;
        let truncations: Vec<u64> = (14..=18).map(|k| 1u64 << k).collect();
        let mut g_steps = Vec::new();
        let mut z_sums = Vec::new();
        for &n in &truncations {
            let g_n = zeta::partial_g(S, n)?.re;
            let g_2n = zeta::partial_g(S, 2 * n)?.re;
            g_steps.push((g_2n - g_n).abs());
            z_sums.push(shifted.partial(S, n)?.re);
        }
        let z_steps: Vec<f64> = z_sums.windows(2).map(|w| w[1] - w[0]).collect();
        let points: Vec<(f64, f64)> = truncations.iter().map(|&n| n as f64).zip(g_steps.iter().copied()).collect();
        let trend = fit_exponent(&points)?.slope;
        let monotone_steps = g_steps.windows(2).filter(|w| w[1] < w[0]).count();
        let g_settles = trend < 0.0 && g_steps[g_steps.len() - 1] < g_steps[0];
        let z_grows = strictly_increasing(&z_sums) && strictly_increasing(&z_steps);
        Ok(Evaluation {
            measured: trend,
            relation: "<",
            threshold: 0.0,
            passed: g_settles && z_grows,
            detail: format!(
                "|G(2N) - G(N)| for N = 2^14..2^18: [{}] ({monotone_steps} of {} steps decreasing); \
                 zeta(s - 3/2) truncations [{}], increments [{}]",
                sci(&g_steps),
                g_steps.len() - 1,
                z_sums.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", "),
                sci(&z_steps),
            ),
        })
    }
}

struct PoleResidue;

impl Criterion for PoleResidue {
    fn id(&self) -> u32 {
        12
    }

    fn name(&self) -> &'static str {
        "pole_residue"
    }

    fn evaluate(&self, _ctx: &VerifyContext) -> Result<Evaluation> {
        let f = zeta::residue_probe(&[2.51], TABLE_LIMIT)?[0];
        let h = zeta::residue_probe_h(&[2.51], TABLE_LIMIT)?[0];
        let ef = (f.product - f.target).abs();
        let eh = (h.product - h.target).abs();
        Ok(Evaluation {
            measured: ef,
            relation: "<=",
            threshold: 1e-2,
            passed: ef <= 1e-2 && eh <= 2e-2,
            detail: format!(
                "(s - 5/2) F(s) at s = 2.51, N = {TABLE_LIMIT}: {:.6} vs {:.6}; H probe {:.6} vs {:.6}, error {eh:.3e} (limit 2e-2)",
                f.product, f.target, h.product, h.target
            ),
        })
    }
}

struct CesaroMainTerm;

impl Criterion for CesaroMainTerm {
    fn id(&self) -> u32 {
        13
    }

    fn name(&self) -> &'static str {
        "cesaro_main_term"
    }

    fn time_limit(&self) -> Option<Duration> {
        Some(Duration::from_secs(120))
    }

    fn evaluate(&self, ctx: &VerifyContext) -> Result<Evaluation> {
        let sums = ctx.b_table()?;
        let z = zeta::zeta_five_halves();
        let threshold = 41.0 / 12.0 + 0.2;
        let reports = DECADES
            .iter()
            .map(|&x| zeta::cesaro_b_from(&sums, x, z))
            .collect::<Result<Vec<_>>>()?;
        let dev: Vec<f64> = reports.iter().map(|r| (r.ratio - 1.0).abs()).collect();
        let points: Vec<(f64, f64)> = reports.iter().map(|r| (r.x as f64, r.residual.abs())).collect();
        let slope = fit_exponent(&points)?.slope;
        Ok(Evaluation {
            measured: slope,
            relation: "<=",
            threshold,
            passed: strictly_decreasing(&dev) && slope <= threshold,
            detail: format!(
                "S = sum b_n (x - n) against 2 zeta(5/2) x^(7/2) / (35 sqrt 3): |ratio - 1| at 1e3..1e6 [{}]; residual exponent {slope:.4}",
                sci(&dev)
            ),
        })
    }
}

/// Reruns every other check on one and on eight threads and compares the
/// rendered reports byte for byte.
struct Determinism;

impl Criterion for Determinism {
    fn id(&self) -> u32 {
        14
    }

    fn name(&self) -> &'static str {
        "determinism"
    }

    fn evaluate(&self, ctx: &VerifyContext) -> Result<Evaluation> {
        let others: Vec<Box<dyn Criterion>> = criteria().into_iter().filter(|c| c.id() != self.id()).collect();
        let render = |workers: usize| -> Result<Vec<u8>> {
            let config = RunConfig {
                worker_count: workers,
                ..ctx.config().clone()
            };
            let pool = Workers::new(workers)?;
            let inner = VerifyContext::new(config);
            let outcomes: Vec<CriterionOutcome> =
                pool.install(|| others.iter().map(|c| run_criterion(c.as_ref(), &inner).0).collect());
            let mut buf = Vec::new();
            output::write_rows(OutputFormat::Json, &outcomes, &mut buf)?;
            Ok(buf)
        };
        let one = render(1)?;
        let eight = render(8)?;
        let differing = one.iter().zip(&eight).filter(|(a, b)| a != b).count() + one.len().abs_diff(eight.len());
        Ok(Evaluation {
            measured: differing as f64,
            relation: "==",
            threshold: 0.0,
            passed: differing == 0,
            detail: format!("{} report bytes on 1 and 8 workers, {differing} differ", one.len()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete_and_ordered() {
        let ids: Vec<u32> = criteria().iter().map(|c| c.id()).collect();
        assert_eq!(ids, (1..=14).collect::<Vec<_>>());
        assert_eq!(criterion("7").unwrap().name(), "twisted_sum_dichotomy");
        assert_eq!(criterion("pole_residue").unwrap().id(), 12);
        assert!(criterion("99").is_err());
    }

    #[test]
    fn tiny_budget_fails_cleanly() {
        let config = RunConfig {
            memory_budget_bytes: 1 << 20,
            worker_count: 2,
            ..RunConfig::default()
        };
        let selected: Vec<_> = ["1", "3", "13"].iter().map(|k| criterion(k).unwrap()).collect();
        let run = run_selected(&config, &selected).unwrap();
        assert_eq!(run.outcomes.len(), 3);
        // the 10^4 sieve fits in a mebibyte, the 10^6 tables do not
        assert!(run.outcomes[1].passed);
        for o in [&run.outcomes[0], &run.outcomes[2]] {
            assert!(!o.passed);
            assert!(o.detail.contains("resource limit exceeded"), "{}", o.detail);
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let config = RunConfig {
            worker_count: 0,
            ..RunConfig::default()
        };
        assert!(run_verify(&config).is_err());
    }
}
