//! Randomized verification of every identity on a catalog entry.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::algebra::{AlgebraVector, Decomposition, LieAlgebra};
use crate::bch::{bch, bch_multi, BchConfig};
use crate::catalog::CatalogEntry;
use crate::diff::Stencil;
use crate::error::{Error, Result};
use crate::factorization::{factorize, factorize_path, NewtonConfig, PathConfig};
use crate::integrator::{LocalRepresentation, DERIVATIVE_STEP};
use crate::logderiv::{
    log_derivative, log_derivative_by_definition, product_rule_residual, structural_identity_residual,
    structural_identity_residual_at_step, SmoothPath,
};
use crate::oracle;
use crate::quadrature::QuadratureRule;
use crate::report::{self, CheckRecord, VerificationReport};
use crate::representation::Representation;

pub const TOLERANCE_TABLE: &str = "defaults-v1";

/// Sampling radii (ℓ² norm balls).
pub const BCH_RADIUS: f64 = 0.3;
pub const CHART_RADIUS: f64 = 0.15;
pub const COMMUTATION_RADIUS: f64 = 2.0;
pub const IDENTITY_RADIUS: f64 = 1.0;
pub const PATH_COEFF_RADIUS: f64 = 0.2;

/// Steps for the observed-order checks (plain central differences).
pub const ORDER_STEPS: (f64, f64) = (0.04, 0.02);
/// A coarse-step residual below this is at the roundoff level of the solver
/// (Newton tolerance over the step), so no decay can be observed.
const EXACT_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn samples(self) -> usize {
        match self {
            Level::Quick => 10,
            Level::Full => 100,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(Error::InvalidArgument(format!("unknown level \"{s}\" (quick|full)"))),
        }
    }
}

/// The versioned tolerance table, keyed by check name without its
/// `/decomposition/representation` suffix.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    [
        ("algebra.antisymmetry", 1e-12),
        ("algebra.jacobi", 1e-12),
        ("decomposition.partition_of_identity", 1e-10),
        ("decomposition.mutual_annihilation", 1e-10),
        ("bch.oracle", 1e-9),
        ("bch.nilpotent", 1e-14),
        ("factorize.round_trip", 1e-11),
        ("factorize.group_oracle", 1e-9),
        ("logderiv.straight_line", 1e-12),
        ("logderiv.formula_equivalence", 1e-8),
        ("logderiv.product_rule", 1e-7),
        ("logderiv.reparametrization", 1e-7),
        ("logderiv.structural", 1e-6),
        ("logderiv.structural_order", 0.3),
        ("rep.homomorphism", 1e-10),
        ("rep.bracket", 1e-10),
        ("rep.skew", 1e-12),
        ("rep.orthogonality", 1e-11),
        ("rep.commutation", 1e-9),
        ("rep.constancy", 1e-9),
        ("rep.duhamel", 1e-9),
        ("rep.fsss", 1e-10),
        ("rep.derpath", 1e-7),
        ("rep.derpath_order", 0.3),
        ("pi.multiplicativity", 1e-8),
        ("pi.uniqueness", 1e-8),
        ("pi.ode", 1e-6),
        ("pi.ode_order", 0.3),
        ("pi.derived_rep", 1e-7),
        ("pi.unitarity", 1e-10),
        ("pi.order_independence", 1e-8),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub level: Level,
    /// Overrides the level's sample count when set.
    pub samples: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub bch: BchConfig<f64>,
    pub newton: NewtonConfig<f64>,
    pub path: PathConfig<f64>,
    pub quadrature_nodes: usize,
    pub derivative_step: f64,
}

impl SuiteConfig {
    pub fn new(seed: u64, level: Level) -> Self {
        SuiteConfig {
            seed,
            level,
            samples: None,
            tolerances: default_tolerances(),
            bch: BchConfig::default(),
            newton: NewtonConfig::default(),
            path: PathConfig::default(),
            quadrature_nodes: crate::quadrature::DEFAULT_NODES,
            derivative_step: DERIVATIVE_STEP,
        }
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(self.level.samples())
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = Some(n);
        self
    }

    /// Override one tolerance; the name must be in the table.
    pub fn with_tolerance(mut self, name: &str, value: f64) -> Result<Self> {
        match self.tolerances.get_mut(name) {
            Some(t) if value.is_finite() && value >= 0.0 => {
                *t = value;
                Ok(self)
            }
            Some(_) => Err(Error::InvalidArgument(format!("tolerance for {name} must be a finite non-negative number"))),
            None => Err(Error::InvalidArgument(format!("unknown check \"{name}\" in tolerance override"))),
        }
    }

    pub fn tolerance(&self, check: &str) -> f64 {
        let base = check.split('/').next().unwrap_or(check);
        self.tolerances.get(base).copied().unwrap_or(0.0)
    }

    fn echo(&self) -> BTreeMap<String, serde_json::Value> {
        let mut m = BTreeMap::new();
        m.insert("seed".into(), json!(self.seed));
        m.insert("level".into(), json!(self.level.as_str()));
        m.insert("samples".into(), json!(self.samples()));
        m.insert("tolerance_table".into(), json!(TOLERANCE_TABLE));
        m.insert("bch.max_order".into(), json!(self.bch.max_order));
        m.insert("bch.term_tolerance".into(), json!(self.bch.term_tolerance));
        m.insert("bch.domain_radius".into(), json!(self.bch.domain_radius));
        m.insert("newton.max_iter".into(), json!(self.newton.max_iter));
        m.insert("newton.residual_tolerance".into(), json!(self.newton.residual_tolerance));
        m.insert("newton.jacobian_step".into(), json!(self.newton.jacobian_step));
        m.insert("newton.component_limit".into(), json!(self.newton.component_limit));
        m.insert("path.grid_points".into(), json!(self.path.grid_points));
        m.insert("path.max_gap".into(), json!(self.path.max_gap));
        m.insert("path.derivative_step".into(), json!(self.path.derivative_step));
        m.insert("integrator.derivative_step".into(), json!(self.derivative_step));
        m.insert("order_steps".into(), json!([ORDER_STEPS.0, ORDER_STEPS.1]));
        m.insert("quadrature_nodes".into(), json!(self.quadrature_nodes));
        m.insert(
            "radii".into(),
            json!({
                "bch": BCH_RADIUS,
                "chart": CHART_RADIUS,
                "commutation": COMMUTATION_RADIUS,
                "identities": IDENTITY_RADIUS,
                "path_coefficients": PATH_COEFF_RADIUS,
            }),
        );
        m
    }
}

/// Deterministic generator for one check: seeded from the suite seed and
/// the check name, so results do not depend on scheduling.
pub fn check_rng(seed: u64, check: &str) -> ChaCha8Rng {
    let h = Sha256::digest(format!("{seed}:{check}").as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&h[..8]);
    ChaCha8Rng::seed_from_u64(u64::from_le_bytes(bytes))
}

/// Uniform sample from the closed ball of radius `r` in `R^dim`.
pub fn sample_ball<R: Rng>(rng: &mut R, dim: usize, r: f64) -> DVector<f64> {
    let dir = sample_unit(rng, dim);
    let u: f64 = rng.gen();
    dir * (r * u.powf(1.0 / dim as f64))
}

/// Uniform sample from the unit sphere.
pub fn sample_unit<R: Rng>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let g = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = g.norm();
        if n > 1e-12 {
            return g / n;
        }
    }
}

pub fn sample_vector<R: Rng>(rng: &mut R, alg: &LieAlgebra<f64>, r: f64) -> AlgebraVector<f64> {
    AlgebraVector::from_dvector(sample_ball(rng, alg.dim(), r))
}

/// Quadratic path `c₀ + c₁t + c₂t²` on `[0, 1]` with coefficients in the
/// ball of radius `r`.
pub fn sample_path<R: Rng>(rng: &mut R, alg: &LieAlgebra<f64>, r: f64) -> SmoothPath<f64> {
    let coeffs = (0..3).map(|_| sample_vector(rng, alg, r)).collect();
    SmoothPath::polynomial(coeffs, (0.0, 1.0)).expect("coefficients share a dimension")
}

/// Observed order `log₂(r_coarse / r_fine)` turned into a residual
/// `|p − 2|`. Both residuals below the exactness floor give 0.
pub fn order_residual(coarse: f64, fine: f64) -> (f64, String) {
    if coarse <= EXACT_FLOOR {
        return (0.0, format!("residual {coarse:.3e} at the coarse step is at roundoff level; no truncation error to observe"));
    }
    let p = (coarse / fine).log2();
    ((p - 2.0).abs(), format!("observed order {p:.3} (residuals {coarse:.3e} -> {fine:.3e})"))
}

/// Accumulates per-sample residuals of one check.
#[derive(Default)]
struct Acc {
    worst: f64,
    samples: usize,
    skipped: usize,
    errors: Vec<String>,
    inputs: String,
    details: Vec<String>,
}

impl Acc {
    fn add(&mut self, r: Result<f64>, inputs: impl Debug) {
        self.inputs.push_str(&format!("{inputs:?};"));
        match r {
            Ok(r) => {
                self.samples += 1;
                if !(r <= self.worst) {
                    self.worst = r;
                }
            }
            Err(Error::ChartOutOfRange { .. }) => self.skipped += 1,
            Err(e) => {
                self.samples += 1;
                self.worst = f64::NAN;
                if self.errors.len() < 3 {
                    self.errors.push(e.to_string());
                }
            }
        }
    }

    fn record(self, name: &str, cfg: &SuiteConfig) -> CheckRecord {
        let residual = if self.samples == 0 { f64::NAN } else { self.worst };
        let mut rec = CheckRecord::new(name, residual, cfg.tolerance(name))
            .with_samples(self.samples)
            .with_digest(report::digest(&self.inputs));
        if self.samples == 0 {
            rec = rec.with_detail("no sample completed");
        }
        if self.skipped > 0 {
            rec = rec.with_detail(format!("{} samples outside the chart, skipped", self.skipped));
        }
        for e in self.errors {
            rec = rec.with_detail(e);
        }
        for d in self.details {
            rec = rec.with_detail(d);
        }
        rec
    }
}

#[derive(Default)]
struct Output {
    records: Vec<CheckRecord>,
    witnesses: Vec<(String, f64)>,
}

type Job<'a> = Box<dyn Fn() -> Output + Send + Sync + 'a>;

fn coords(x: &AlgebraVector<f64>) -> Vec<f64> {
    x.to_vec()
}

/// Run every applicable check on `entry`. Never aborts: failures and
/// errors become failing records.
pub fn run_suite(entry: &CatalogEntry, cfg: &SuiteConfig) -> VerificationReport {
    let start = Instant::now();
    let mut jobs: Vec<Job<'_>> = Vec::new();
    let alg = &entry.algebra;
    let n = cfg.samples();

    jobs.push(Box::new(move || Output {
        records: alg
            .validate()
            .records
            .into_iter()
            .map(|r| CheckRecord { tolerance: cfg.tolerance(&r.check_name), ..r })
            .collect(),
        witnesses: vec![],
    }));

    if let Some(real) = &entry.realization {
        jobs.push(Box::new(move || {
            let name = "bch.oracle";
            let mut rng = check_rng(cfg.seed, name);
            let mut acc = Acc::default();
            for _ in 0..n {
                let x = sample_vector(&mut rng, alg, BCH_RADIUS);
                let y = sample_vector(&mut rng, alg, BCH_RADIUS);
                let r = bch(alg, &x, &y, &cfg.bch).and_then(|p| {
                    let (reference, _) = oracle::bch_reference(real, &x, &y)?;
                    Ok(p.value.distance(&reference))
                });
                acc.add(r, (coords(&x), coords(&y)));
            }
            Output { records: vec![acc.record(name, cfg)], ..Default::default() }
        }));
    }

    if entry.name == "heisenberg3" {
        jobs.push(Box::new(move || {
            let name = "bch.nilpotent";
            let mut rng = check_rng(cfg.seed, name);
            let mut acc = Acc::default();
            for _ in 0..n {
                let a: f64 = rng.gen_range(-1.0..=1.0);
                let b: f64 = rng.gen_range(-1.0..=1.0);
                let r = (|| {
                    let x = alg.element(&[a, 0.0, 0.0])?;
                    let y = alg.element(&[0.0, b, 0.0])?;
                    let expected = alg.element(&[a, b, a * b / 2.0])?;
                    Ok(bch(alg, &x, &y, &cfg.bch)?.value.distance(&expected))
                })();
                acc.add(r, (a, b));
            }
            Output { records: vec![acc.record(name, cfg)], ..Default::default() }
        }));
    }

    jobs.push(Box::new(move || logderiv_checks(alg, cfg)));

    for dec in &entry.decompositions {
        jobs.push(Box::new(move || {
            let mut out = Output::default();
            let report = dec.validate();
            for r in report.records {
                let name = format!("{}/{}", r.check_name, dec.name());
                out.records.push(CheckRecord { tolerance: cfg.tolerance(&name), check_name: name, ..r });
            }
            for (k, v) in report.witnesses {
                out.witnesses.push((format!("{k}/{}", dec.name()), v));
            }
            out.records.push(round_trip(alg, dec, cfg));
            if let Some(Ok(_)) | Some(Err(_)) = entry.oracle_components(dec.name(), &alg.zero()) {
                out.records.push(group_oracle(entry, dec, cfg));
            }
            out
        }));
        if dec.n_blocks() >= 2 {
            jobs.push(Box::new(move || structural_checks(alg, dec, cfg)));
        }
    }

    for rep in &entry.representations {
        jobs.push(Box::new(move || representation_checks(rep, cfg)));
        for dec in &entry.decompositions {
            jobs.push(Box::new(move || integrator_checks(rep, dec, cfg)));
        }
    }

    let outputs: Vec<Output> = jobs.par_iter().map(|job| job()).collect();

    let mut report = VerificationReport::new(format!("catalog entry {}", entry.name));
    report.config = cfg.echo();
    report.tolerances = cfg.tolerances.clone();
    report.notes.push(crate::representation::FINITE_DIMENSION_NOTE.into());
    report.notes.push(entry.notes.clone());
    for o in outputs {
        report.extend(o.records);
        report.witnesses.extend(o.witnesses);
    }
    report.finalize();
    report.witnesses.insert("suite_wall_time_ms".into(), start.elapsed().as_secs_f64() * 1e3);
    report
}

fn timed<F: FnOnce() -> CheckRecord>(f: F) -> CheckRecord {
    let t = Instant::now();
    let rec = f();
    let ms = t.elapsed().as_secs_f64() * 1e3;
    rec.with_wall_time_ms(ms)
}

fn round_trip(alg: &LieAlgebra<f64>, dec: &Decomposition<f64>, cfg: &SuiteConfig) -> CheckRecord {
    timed(|| {
        let name = format!("factorize.round_trip/{}", dec.name());
        let mut rng = check_rng(cfg.seed, &name);
        let mut acc = Acc::default();
        for _ in 0..cfg.samples() {
            let z = sample_vector(&mut rng, alg, CHART_RADIUS);
            let r = factorize(alg, dec, &z, &cfg.bch, &cfg.newton).and_then(|p| {
                let back = bch_multi(alg, &p.components, &cfg.bch)?.value;
                let membership = p
                    .components
                    .iter()
                    .enumerate()
                    .map(|(j, c)| dec.block_residual(j, c))
                    .fold(0.0, f64::max);
                Ok(back.distance(&z).max(membership))
            });
            acc.add(r, coords(&z));
        }
        acc.record(&name, cfg)
    })
}

fn group_oracle(entry: &CatalogEntry, dec: &Decomposition<f64>, cfg: &SuiteConfig) -> CheckRecord {
    timed(|| {
        let alg = &entry.algebra;
        let name = format!("factorize.group_oracle/{}", dec.name());
        let mut rng = check_rng(cfg.seed, &name);
        let mut acc = Acc::default();
        for _ in 0..cfg.samples() {
            let z = sample_vector(&mut rng, alg, CHART_RADIUS);
            let r = factorize(alg, dec, &z, &cfg.bch, &cfg.newton).and_then(|p| {
                let (comps, _) = entry
                    .oracle_components(dec.name(), &z)
                    .ok_or_else(|| Error::Precondition("no group oracle".into()))??;
                Ok(p.components.iter().zip(&comps).map(|(a, b)| a.distance(b)).fold(0.0, f64::max))
            });
            acc.add(r, coords(&z));
        }
        acc.record(&name, cfg)
    })
}

fn logderiv_checks(alg: &LieAlgebra<f64>, cfg: &SuiteConfig) -> Output {
    let q = QuadratureRule::gauss_legendre(cfg.quadrature_nodes).expect("positive node count");
    let n = cfg.samples();
    let mut out = Output::default();

    out.records.push(timed(|| {
        let name = "logderiv.straight_line";
        let mut rng = check_rng(cfg.seed, name);
        let mut acc = Acc::default();
        for _ in 0..n {
            let x = sample_vector(&mut rng, alg, IDENTITY_RADIUS);
            let t: f64 = rng.gen();
            let p = SmoothPath::straight_line(x.clone());
            acc.add(log_derivative(alg, &p, t, &q).map(|d| d.distance(&x)), (coords(&x), t));
        }
        acc.record(name, cfg)
    }));

    out.records.push(timed(|| {
        let name = "logderiv.formula_equivalence";
        let mut rng = check_rng(cfg.seed, name);
        let mut acc = Acc::default();
        for i in 0..n {
            let p = sample_path(&mut rng, alg, PATH_COEFF_RADIUS);
            let t: f64 = rng.gen();
            let r = log_derivative(alg, &p, t, &q)
                .and_then(|a| Ok(a.distance(&log_derivative_by_definition(alg, &p, t, &cfg.bch)?)));
            acc.add(r, (i, t, coords(&p.value(t))));
        }
        acc.record(name, cfg)
    }));

    out.records.push(timed(|| {
        let name = "logderiv.product_rule";
        let mut rng = check_rng(cfg.seed, name);
        let mut acc = Acc::default();
        for _ in 0..n {
            let a = sample_path(&mut rng, alg, PATH_COEFF_RADIUS / 2.0);
            let b = sample_path(&mut rng, alg, PATH_COEFF_RADIUS / 2.0);
            let t: f64 = rng.gen();
            let r = product_rule_residual(alg, &a, &b, t, &q, &cfg.bch);
            acc.add(r, (t, coords(&a.value(t)), coords(&b.value(t))));
        }
        acc.record(name, cfg)
    }));

    out.records.push(timed(|| {
        let name = "logderiv.reparametrization";
        let mut rng = check_rng(cfg.seed, name);
        let mut acc = Acc::default();
        for _ in 0..n {
            let p = sample_path(&mut rng, alg, PATH_COEFF_RADIUS);
            let t: f64 = rng.gen();
            // φ(t) = (t + t²)/2 maps [0, 1] onto itself.
            let r = p
                .reparametrized(|t| (t + t * t) / 2.0, |t| (1.0 + 2.0 * t) / 2.0, (0.0, 1.0))
                .and_then(|rp| {
                    let lhs = log_derivative(alg, &rp.numerical(), t, &q)?;
                    let rhs = log_derivative(alg, &p, (t + t * t) / 2.0, &q)?.scale((1.0 + 2.0 * t) / 2.0);
                    Ok(lhs.distance(&rhs))
                });
            acc.add(r, (t, coords(&p.value(t))));
        }
        acc.record(name, cfg)
    }));
    out
}

fn structural_checks(alg: &LieAlgebra<f64>, dec: &Decomposition<f64>, cfg: &SuiteConfig) -> Output {
    let q = QuadratureRule::gauss_legendre(cfg.quadrature_nodes).expect("positive node count");
    let mut out = Output::default();
    let name = format!("logderiv.structural/{}", dec.name());
    let order_name = format!("logderiv.structural_order/{}", dec.name());
    let t0 = Instant::now();
    let mut rng = check_rng(cfg.seed, &name);
    let mut acc = Acc::default();
    let mut order = Acc::default();
    let order_samples = 3.min(cfg.samples());
    for i in 0..cfg.samples() {
        let x = sample_vector(&mut rng, alg, CHART_RADIUS);
        let y = sample_vector(&mut rng, alg, CHART_RADIUS);
        let t: f64 = rng.gen();
        let path = factorize_path(alg, dec, &x, &y, &cfg.bch, &cfg.newton, &cfg.path);
        let inputs = (coords(&x), coords(&y), t);
        match path {
            Err(e) => acc.add(Err(e), inputs),
            Ok(path) => {
                acc.add(structural_identity_residual(&path, t, &q), &inputs);
                if i < order_samples {
                    // Interior point so both steps use central differences.
                    let s = 0.2 + 0.6 * t;
                    let r = (|| {
                        let coarse = structural_identity_residual_at_step(&path, s, &q, Stencil::central(ORDER_STEPS.0))?;
                        let fine = structural_identity_residual_at_step(&path, s, &q, Stencil::central(ORDER_STEPS.1))?;
                        let (res, detail) = order_residual(coarse, fine);
                        order.details.push(detail);
                        Ok(res)
                    })();
                    order.add(r, &inputs);
                }
            }
        }
    }
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    out.records.push(acc.record(&name, cfg).with_wall_time_ms(ms));
    out.records.push(order.record(&order_name, cfg));
    out
}

fn representation_checks(rep: &Representation<f64>, cfg: &SuiteConfig) -> Output {
    let alg = rep.algebra();
    let q = QuadratureRule::gauss_legendre(cfg.quadrature_nodes).expect("positive node count");
    let n = cfg.samples();
    let dh = rep.dim_h();
    let tag = rep.name();
    let mut out = Output::default();
    for r in rep.validate().records {
        let name = format!("{}/{tag}", r.check_name);
        out.records.push(CheckRecord { tolerance: cfg.tolerance(&name), check_name: name, ..r });
    }

    let sampled = |base: &str, f: &mut dyn FnMut(&mut ChaCha8Rng, &mut Acc)| {
        timed(|| {
            let name = format!("{base}/{tag}");
            let mut rng = check_rng(cfg.seed, &name);
            let mut acc = Acc::default();
            for _ in 0..n {
                f(&mut rng, &mut acc);
            }
            acc.record(&name, cfg)
        })
    };

    out.records.push(sampled("rep.bracket", &mut |rng, acc| {
        let x = sample_vector(rng, alg, COMMUTATION_RADIUS);
        let y = sample_vector(rng, alg, COMMUTATION_RADIUS);
        let scale = 1.0 + x.norm() * y.norm();
        acc.add(rep.homomorphism_residual(&x, &y).map(|r| r / scale), (coords(&x), coords(&y)));
    }));
    out.records.push(sampled("rep.commutation", &mut |rng, acc| {
        let x = sample_vector(rng, alg, COMMUTATION_RADIUS);
        let y = sample_vector(rng, alg, COMMUTATION_RADIUS);
        acc.add(rep.commutation_residual(&x, &y), (coords(&x), coords(&y)));
    }));
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    out.records.push(sampled("rep.constancy", &mut |rng, acc| {
        let x = sample_vector(rng, alg, IDENTITY_RADIUS);
        let y = sample_vector(rng, alg, IDENTITY_RADIUS);
        let v = sample_unit(rng, dh);
        acc.add(rep.constancy_residual(&x, &y, &grid, &v), (coords(&x), coords(&y)));
    }));
    out.records.push(sampled("rep.duhamel", &mut |rng, acc| {
        let x = sample_vector(rng, alg, IDENTITY_RADIUS);
        let y = sample_vector(rng, alg, IDENTITY_RADIUS);
        let t: f64 = rng.gen();
        let v = sample_unit(rng, dh);
        acc.add(rep.duhamel_residual(&x, &y, t, &v, &q), (coords(&x), coords(&y), t));
    }));
    if rep.is_skew() {
        out.records.push(sampled("rep.fsss", &mut |rng, acc| {
            let x = sample_vector(rng, alg, IDENTITY_RADIUS);
            let y = sample_vector(rng, alg, IDENTITY_RADIUS);
            let v = sample_unit(rng, dh);
            let w = sample_unit(rng, dh);
            acc.add(rep.fsss_pairing_residual(&x, &y, &v, &w), (coords(&x), coords(&y)));
        }));
        out.records.push(sampled("rep.orthogonality", &mut |rng, acc| {
            let x = sample_vector(rng, alg, COMMUTATION_RADIUS);
            acc.add(rep.exp_op(&x).map(|u| u.orthogonality_defect()), coords(&x));
        }));
    }
    out.records.push(sampled("rep.derpath", &mut |rng, acc| {
        let p = sample_path(rng, alg, PATH_COEFF_RADIUS);
        let t: f64 = rng.gen_range(0.1..0.9);
        let v = sample_unit(rng, dh);
        let r = rep.derpath_residual(&p, t, &v, &q, Stencil::richardson(cfg.derivative_step));
        acc.add(r, (t, coords(&p.value(t))));
    }));
    out.records.push(timed(|| {
        let name = format!("rep.derpath_order/{tag}");
        let mut rng = check_rng(cfg.seed, &name);
        let mut acc = Acc::default();
        for _ in 0..3.min(n) {
            let p = sample_path(&mut rng, alg, PATH_COEFF_RADIUS);
            let t: f64 = rng.gen_range(0.2..0.8);
            let v = sample_unit(&mut rng, dh);
            let r = (|| {
                let coarse = rep.derpath_residual(&p, t, &v, &q, Stencil::central(ORDER_STEPS.0))?;
                let fine = rep.derpath_residual(&p, t, &v, &q, Stencil::central(ORDER_STEPS.1))?;
                let (res, detail) = order_residual(coarse, fine);
                acc.details.push(detail);
                Ok(res)
            })();
            acc.add(r, (t, coords(&p.value(t))));
        }
        acc.record(&name, cfg)
    }));
    out
}

fn integrator_checks(rep: &Representation<f64>, dec: &Decomposition<f64>, cfg: &SuiteConfig) -> Output {
    let mut out = Output::default();
    let tag = format!("{}/{}", dec.name(), rep.name());
    let lr = if rep.validate().all_pass() {
        LocalRepresentation::new(rep.clone(), dec.clone(), cfg.bch, cfg.newton)
    } else {
        LocalRepresentation::new_unchecked(rep.clone(), dec.clone(), cfg.bch, cfg.newton)
    };
    let lr = match lr {
        Ok(lr) => lr.with_stencil(Stencil::richardson(cfg.derivative_step)),
        Err(e) => {
            out.records.push(
                CheckRecord::new(format!("pi.multiplicativity/{tag}"), f64::NAN, cfg.tolerance("pi.multiplicativity"))
                    .with_detail(e.to_string()),
            );
            return out;
        }
    };
    out.witnesses.push((format!("chart_radius/{tag}"), lr.chart_radius()));
    let alg = rep.algebra();
    let n = cfg.samples();
    let dh = rep.dim_h();
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();

    let sampled = |base: &str, f: &mut dyn FnMut(&mut ChaCha8Rng, &mut Acc)| {
        timed(|| {
            let name = format!("{base}/{tag}");
            let mut rng = check_rng(cfg.seed, &name);
            let mut acc = Acc::default();
            for _ in 0..n {
                f(&mut rng, &mut acc);
            }
            acc.record(&name, cfg)
        })
    };

    out.records.push(sampled("pi.multiplicativity", &mut |rng, acc| {
        let x = sample_vector(rng, alg, CHART_RADIUS);
        let y = sample_vector(rng, alg, CHART_RADIUS);
        acc.add(lr.multiplicativity_residual(&x, &y), (coords(&x), coords(&y)));
    }));
    out.records.push(sampled("pi.uniqueness", &mut |rng, acc| {
        let x = sample_vector(rng, alg, CHART_RADIUS);
        let y = sample_vector(rng, alg, CHART_RADIUS);
        let v = sample_unit(rng, dh);
        acc.add(lr.uniqueness_check(&x, &y, &v, &grid), (coords(&x), coords(&y)));
    }));
    out.records.push(sampled("pi.ode", &mut |rng, acc| {
        let x = sample_vector(rng, alg, CHART_RADIUS);
        let y = sample_vector(rng, alg, CHART_RADIUS);
        let v = sample_unit(rng, dh);
        acc.add(lr.ode_residual(&x, &y, &v, &grid), (coords(&x), coords(&y)));
    }));
    out.records.push(timed(|| {
        let name = format!("pi.ode_order/{tag}");
        let mut rng = check_rng(cfg.seed, &name);
        let mut acc = Acc::default();
        let interior: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        for _ in 0..3.min(n) {
            let x = sample_vector(&mut rng, alg, CHART_RADIUS);
            let y = sample_vector(&mut rng, alg, CHART_RADIUS);
            let v = sample_unit(&mut rng, dh);
            let r = (|| {
                let coarse = lr.ode_residual_with(&x, &y, &v, &interior, Stencil::central(ORDER_STEPS.0))?;
                let fine = lr.ode_residual_with(&x, &y, &v, &interior, Stencil::central(ORDER_STEPS.1))?;
                let (res, detail) = order_residual(coarse, fine);
                acc.details.push(detail);
                Ok(res)
            })();
            acc.add(r, (coords(&x), coords(&y)));
        }
        acc.record(&name, cfg)
    }));
    out.records.push(sampled("pi.derived_rep", &mut |rng, acc| {
        let x = sample_vector(rng, alg, CHART_RADIUS);
        let v = sample_unit(rng, dh);
        acc.add(lr.derived_rep_residual(&x, &v), coords(&x));
    }));
    if rep.is_skew() {
        out.records.push(sampled("pi.unitarity", &mut |rng, acc| {
            let z = sample_vector(rng, alg, CHART_RADIUS);
            acc.add(lr.unitarity_residual(&z), coords(&z));
        }));
    }
    if dec.n_blocks() >= 2 {
        let reversed: Vec<usize> = (0..dec.n_blocks()).rev().collect();
        out.records.push(sampled("pi.order_independence", &mut |rng, acc| {
            let z = sample_vector(rng, alg, CHART_RADIUS);
            acc.add(lr.order_independence_residual(&z, &reversed), coords(&z));
        }));
    }
    let mut rng = check_rng(cfg.seed, &format!("pi.lipschitz/{tag}"));
    let mut lipschitz = 0.0f64;
    for _ in 0..n {
        let z1 = sample_vector(&mut rng, alg, CHART_RADIUS);
        let z2 = sample_vector(&mut rng, alg, CHART_RADIUS);
        if let Ok(c) = lr.lipschitz_ratio(&z1, &z2) {
            lipschitz = lipschitz.max(c);
        }
    }
    out.witnesses.push((format!("lipschitz/{tag}"), lipschitz));
    out
}
