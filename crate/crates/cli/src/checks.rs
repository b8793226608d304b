//! One function per check. Each returns a JSON body, a CSV table and a verdict;
//! numerical errors inside a check become failed entries, not aborts.

use berezin::bergman::{
    balanced_verdict, monomial_norm_sq, BalancedReport, BergmanBasis, NormBackend, TruncationPolicy,
};
use berezin::domain::{DomainKind, DomainModel, Point};
use berezin::numerics::gauss_jacobi;
use berezin::projective::{exp_neg_diastasis_check, hereditary_report, pullback_check};
use berezin::rootdata::{is_nontrivial, lambda0, projective_range_bounds};
use berezin::starprod::{correspondence_check, separation_check, QuantContext};
use berezin::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CheckName, RunConfig};
use crate::exact::exact_lambda0;

pub const HEREDITARY_TOL: f64 = 1e-7;
pub const PULLBACK_TOL: f64 = 1e-4;
pub const SEPARATION_TOL: f64 = 1e-6;
/// Relative slack allowed when checking that correspondence defects decrease.
pub const DECAY_SLACK: f64 = 0.05;
/// Sample radius for the correspondence check; keeps the operator truncation
/// below the degree cap up to λμ ≈ 80.
pub const STAR_RADIUS: f64 = 0.5;
pub const STAR_MAX_SAMPLES: usize = 16;
pub const PULLBACK_MAX_SAMPLES: usize = 25;

/// A CSV table with a fixed header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Series used for the optional plots.
#[derive(Debug, Clone)]
pub enum PlotData {
    Epsilon(Vec<(f64, Vec<f64>)>),
    Decay {
        lambdas: Vec<f64>,
        e1: Vec<f64>,
        e2: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub check: CheckName,
    pub passed: bool,
    pub body: Value,
    pub table: Table,
    pub plot: Option<PlotData>,
}

pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub model: DomainModel<f64>,
    pub lambda0: f64,
    pub quad_order: usize,
}

impl Context<'_> {
    fn nontrivial(&self, lambda: f64) -> bool {
        is_nontrivial(&self.model.root_data(), lambda).unwrap_or(false)
    }

    /// Independent RNG stream per check and per λ index.
    fn rng(&self, check: CheckName, lambda_index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(((check as u64) << 32) | lambda_index as u64);
        rng
    }

    fn random_pairs(&self, rng: &mut ChaCha8Rng, count: usize, radius: f64) -> Vec<(Point<f64>, Point<f64>)> {
        (0..count)
            .map(|_| {
                (
                    self.model.sample_point(rng, radius),
                    self.model.sample_point(rng, radius),
                )
            })
            .collect()
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn coords(z: &[Complex64]) -> Vec<String> {
    z.iter().flat_map(|c| [num(c.re), num(c.im)]).collect()
}

fn coord_header(dim: usize) -> Vec<String> {
    (0..dim).flat_map(|i| [format!("re{i}"), format!("im{i}")]).collect()
}

fn skipped(lambda: f64, lambda0: f64) -> Value {
    json!({
        "lambda": lambda,
        "skipped": format!("TrivialSpace: lambda <= lambda0 = {lambda0}"),
    })
}

pub fn run_check(ctx: &Context, check: CheckName) -> CheckOutcome {
    match check {
        CheckName::Lambda0 => lambda0_check(ctx),
        CheckName::Nontrivial => nontrivial_check(ctx),
        CheckName::Balanced => balanced_check(ctx),
        CheckName::Diastasis => diastasis_check(ctx),
        CheckName::Hereditary => hereditary_check(ctx),
        CheckName::Pullback => pullback_check_all(ctx),
        CheckName::Star => star_check(ctx),
        CheckName::Separation => separation_check_all(ctx),
    }
}

/// Threshold from the root data against the integrability threshold of the
/// weight `(1 - |z|²)^{λμ - n - 1}` (ball) or `(1 - |z_i|²)^{λμ - 2}` (polydisk).
fn lambda0_check(ctx: &Context) -> CheckOutcome {
    let model = &ctx.model;
    let rd = model.root_data();
    let integrability = match model.kind() {
        DomainKind::Disk | DomainKind::Ball => model.dim() as f64 / model.mu(),
        DomainKind::Polydisk => 1.0 / model.mu(),
    };
    let range = projective_range_bounds(&rd).ok();
    let passed = (ctx.lambda0 - integrability).abs() <= 1e-12 * integrability.max(1.0);
    let mut table = Table::new(&["lambda0", "integrability_threshold", "lambda0_exact"]);
    let exact = exact_lambda0(&rd);
    table.push(vec![
        num(ctx.lambda0),
        num(integrability),
        exact.clone().unwrap_or_default(),
    ]);
    CheckOutcome {
        check: CheckName::Lambda0,
        passed,
        body: json!({
            "lambda0": ctx.lambda0,
            "lambda0_exact": exact,
            "integrability_threshold": integrability,
            "root_data": rd,
            "projective_range": range,
        }),
        table,
        plot: None,
    }
}

fn nontrivial_check(ctx: &Context) -> CheckOutcome {
    let model = &ctx.model;
    let mut table = Table::new(&[
        "lambda",
        "is_nontrivial",
        "weight_exponent",
        "integrable",
        "norm_one_sq",
    ]);
    let mut entries = Vec::new();
    let mut passed = true;
    for &lambda in &ctx.config.lambdas {
        let nontrivial = ctx.nontrivial(lambda);
        let exponent = match model.kind() {
            DomainKind::Disk | DomainKind::Ball => lambda * model.mu() - model.dim() as f64 - 1.0,
            DomainKind::Polydisk => lambda * model.mu() - 2.0,
        };
        let integrable = gauss_jacobi(ctx.quad_order, exponent).is_ok();
        let norm = if nontrivial {
            monomial_norm_sq(
                model,
                lambda,
                &vec![0; model.dim()],
                NormBackend::Quadrature { order: ctx.quad_order },
            )
            .ok()
        } else {
            None
        };
        let ok = nontrivial == integrable && nontrivial == (lambda > ctx.lambda0);
        passed &= ok;
        table.push(vec![
            num(lambda),
            nontrivial.to_string(),
            num(exponent),
            integrable.to_string(),
            norm.map(num).unwrap_or_default(),
        ]);
        entries.push(json!({
            "lambda": lambda,
            "is_nontrivial": nontrivial,
            "weight_exponent": exponent,
            "integrable": integrable,
            "norm_one_sq": norm,
            "at_threshold": lambda == ctx.lambda0,
            "passed": ok,
        }));
    }
    CheckOutcome {
        check: CheckName::Nontrivial,
        passed,
        body: json!({ "lambda0": ctx.lambda0, "criterion": "strict", "results": entries }),
        table,
        plot: None,
    }
}

fn balanced_check(ctx: &Context) -> CheckOutcome {
    let cfg = ctx.config;
    let mut header = vec!["lambda".to_string(), "index".to_string()];
    header.extend(coord_header(ctx.model.dim()));
    header.push("epsilon".into());
    let mut table = Table {
        header,
        rows: Vec::new(),
    };
    let mut reports: Vec<Value> = Vec::new();
    let mut series = Vec::new();
    let mut passed = true;
    for (i, &lambda) in cfg.lambdas.iter().enumerate() {
        let seed = cfg.seed.wrapping_add(i as u64);
        match balanced_verdict(&ctx.model, lambda, cfg.samples, cfg.tol, seed) {
            Ok(report) => {
                passed &= report.is_balanced;
                push_epsilon_rows(&mut table, &report);
                if let Some(mean) = report.mean_epsilon {
                    series.push((lambda, report.samples.iter().map(|s| s.epsilon / mean - 1.0).collect()));
                }
                reports.push(serde_json::to_value(&report).expect("report serializes"));
            }
            Err(e) => {
                passed = false;
                reports.push(json!({ "lambda": lambda, "is_balanced": false, "reason": e.to_string() }));
            }
        }
    }
    CheckOutcome {
        check: CheckName::Balanced,
        passed,
        body: json!({ "lambda0": ctx.lambda0, "tol": cfg.tol, "results": reports }),
        table,
        plot: Some(PlotData::Epsilon(series)),
    }
}

fn push_epsilon_rows(table: &mut Table, report: &BalancedReport<f64>) {
    for (j, s) in report.samples.iter().enumerate() {
        let mut row = vec![num(report.lambda), j.to_string()];
        row.extend(s.z.iter().map(|&v| num(v)));
        row.push(num(s.epsilon));
        table.push(row);
    }
}

fn diastasis_check(ctx: &Context) -> CheckOutcome {
    let mut rng = ctx.rng(CheckName::Diastasis, 0);
    let mut pairs = ctx.random_pairs(&mut rng, ctx.config.samples, berezin::domain::SAMPLE_RADIUS);
    let diagonal = (ctx.config.samples / 10).max(1);
    pairs.extend((0..diagonal).map(|_| {
        let x = ctx.model.sample_point(&mut rng, berezin::domain::SAMPLE_RADIUS);
        (x.clone(), x)
    }));
    let mut table = Table::new(&["index", "exp_neg_diastasis", "coincident"]);
    match exp_neg_diastasis_check(&ctx.model, &pairs) {
        Ok(report) => {
            for (j, v) in report.values.iter().enumerate() {
                table.push(vec![j.to_string(), num(*v), (j >= ctx.config.samples).to_string()]);
            }
            CheckOutcome {
                check: CheckName::Diastasis,
                passed: report.passed(),
                body: serde_json::to_value(&report).expect("report serializes"),
                table,
                plot: None,
            }
        }
        Err(e) => failed(CheckName::Diastasis, e, table),
    }
}

fn failed(check: CheckName, e: impl std::fmt::Display, table: Table) -> CheckOutcome {
    CheckOutcome {
        check,
        passed: false,
        body: json!({ "error": e.to_string() }),
        table,
        plot: None,
    }
}

/// Runs `per_lambda` on every nontrivial λ; trivial ones are recorded as skipped.
/// The check fails if nothing ran.
fn over_nontrivial<F>(ctx: &Context, table: &mut Table, mut per_lambda: F) -> (bool, Vec<Value>)
where
    F: FnMut(usize, f64, &mut Table) -> berezin::Result<(bool, Value)>,
{
    let mut passed = true;
    let mut ran = 0;
    let mut entries = Vec::new();
    for (i, &lambda) in ctx.config.lambdas.iter().enumerate() {
        if !ctx.nontrivial(lambda) {
            entries.push(skipped(lambda, ctx.lambda0));
            continue;
        }
        ran += 1;
        match per_lambda(i, lambda, table) {
            Ok((ok, value)) => {
                passed &= ok;
                entries.push(value);
            }
            Err(e) => {
                passed = false;
                entries.push(json!({ "lambda": lambda, "error": e.to_string() }));
            }
        }
    }
    (passed && ran > 0, entries)
}

fn hereditary_check(ctx: &Context) -> CheckOutcome {
    let mut table = Table::new(&["lambda", "index", "residual"]);
    let (passed, entries) = over_nontrivial(ctx, &mut table, |i, lambda, table| {
        let mut rng = ctx.rng(CheckName::Hereditary, i);
        let pairs = ctx.random_pairs(&mut rng, ctx.config.samples, berezin::domain::SAMPLE_RADIUS);
        let basis = BergmanBasis::new(&ctx.model, lambda, TruncationPolicy::default())?;
        let report = hereditary_report(&basis, &pairs)?;
        for (j, r) in report.residuals.iter().enumerate() {
            table.push(vec![num(lambda), j.to_string(), num(*r)]);
        }
        let ok = report.max_residual < HEREDITARY_TOL;
        let mut value = serde_json::to_value(&report).expect("report serializes");
        value["passed"] = json!(ok);
        Ok((ok, value))
    });
    CheckOutcome {
        check: CheckName::Hereditary,
        passed,
        body: json!({ "tol": HEREDITARY_TOL, "results": entries }),
        table,
        plot: None,
    }
}

#[derive(Serialize)]
struct PullbackEntry {
    lambda: f64,
    max_residual: f64,
    points: Vec<Vec<f64>>,
    residuals: Vec<Vec<Vec<f64>>>,
    passed: bool,
}

fn pullback_check_all(ctx: &Context) -> CheckOutcome {
    let mut header = vec!["lambda".to_string(), "index".to_string()];
    header.extend(coord_header(ctx.model.dim()));
    header.push("max_residual".into());
    let mut table = Table {
        header,
        rows: Vec::new(),
    };
    let count = ctx.config.samples.min(PULLBACK_MAX_SAMPLES);
    let (passed, entries) = over_nontrivial(ctx, &mut table, |i, lambda, table| {
        let mut rng = ctx.rng(CheckName::Pullback, i);
        let basis = BergmanBasis::new(&ctx.model, lambda, TruncationPolicy::default())?;
        let mut entry = PullbackEntry {
            lambda,
            max_residual: 0.0,
            points: Vec::new(),
            residuals: Vec::new(),
            passed: true,
        };
        for j in 0..count {
            let z = ctx.model.sample_point(&mut rng, berezin::domain::SAMPLE_RADIUS);
            let r = pullback_check(&basis, &z, None)?;
            let worst = r.iter().flatten().copied().fold(0.0, f64::max);
            entry.max_residual = entry.max_residual.max(worst);
            let mut row = vec![num(lambda), j.to_string()];
            row.extend(coords(&z));
            row.push(num(worst));
            table.push(row);
            entry.points.push(z.iter().flat_map(|c| [c.re, c.im]).collect());
            entry.residuals.push(r);
        }
        entry.passed = entry.max_residual < PULLBACK_TOL;
        Ok((entry.passed, serde_json::to_value(&entry).expect("entry serializes")))
    });
    CheckOutcome {
        check: CheckName::Pullback,
        passed,
        body: json!({ "tol": PULLBACK_TOL, "results": entries }),
        table,
        plot: None,
    }
}

/// Correspondence defects for `f = Re z`, `g = Im z` along the nontrivial λ.
fn star_check(ctx: &Context) -> CheckOutcome {
    let mut table = Table::new(&["lambda", "E1", "E2"]);
    let mut lambdas: Vec<f64> = ctx
        .config
        .lambdas
        .iter()
        .copied()
        .filter(|&l| ctx.nontrivial(l))
        .collect();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    if lambdas.is_empty() {
        return failed(CheckName::Star, "no nontrivial lambda to quantize", table);
    }
    let mut rng = ctx.rng(CheckName::Star, 0);
    let count = ctx.config.samples.min(STAR_MAX_SAMPLES);
    let mut samples = vec![vec![Complex64::new(0.0, 0.0)]];
    samples.extend((1..count).map(|_| ctx.model.sample_point(&mut rng, STAR_RADIUS)));
    let report = match correspondence_check(&ctx.model, |z| z[0].re, |z| z[0].im, &lambdas, &samples, ctx.quad_order) {
        Ok(r) => r,
        Err(e) => return failed(CheckName::Star, e, table),
    };
    let nonincreasing = |e: &[f64]| e.windows(2).all(|w| w[1] <= w[0] * (1.0 + DECAY_SLACK));
    let passed = nonincreasing(&report.e1) && nonincreasing(&report.e2);
    for ((l, a), b) in report.lambdas.iter().zip(&report.e1).zip(&report.e2) {
        table.push(vec![num(*l), num(*a), num(*b)]);
    }
    let plot = PlotData::Decay {
        lambdas: report.lambdas.clone(),
        e1: report.e1.clone(),
        e2: report.e2.clone(),
    };
    let mut body = serde_json::to_value(&report).expect("report serializes");
    body["symbols"] = json!(["Re z", "Im z"]);
    body["bracket"] = json!("{f,g} = -(f_x g_y - f_y g_x) / (2 Phi_zzbar)");
    body["sample_radius"] = json!(STAR_RADIUS);
    body["quad_order"] = json!(ctx.quad_order);
    CheckOutcome {
        check: CheckName::Star,
        passed,
        body,
        table,
        plot: Some(plot),
    }
}

fn separation_check_all(ctx: &Context) -> CheckOutcome {
    let mut table = Table::new(&["lambda", "index", "gap", "expected_gap"]);
    let (passed, entries) = over_nontrivial(ctx, &mut table, |i, lambda, table| {
        let mut rng = ctx.rng(CheckName::Separation, i);
        let q = QuantContext::new(&ctx.model, lambda, berezin::domain::SAMPLE_RADIUS, ctx.quad_order)?;
        let mut reports = Vec::new();
        let mut ok = true;
        let mut min_gap = f64::INFINITY;
        for (j, (x1, x2)) in ctx
            .random_pairs(&mut rng, ctx.config.samples, berezin::domain::SAMPLE_RADIUS)
            .into_iter()
            .enumerate()
        {
            let r = separation_check(&q, &x1, &x2)?;
            ok &= r.separated && (r.gap - r.expected_gap).abs() < SEPARATION_TOL;
            min_gap = min_gap.min(r.gap);
            table.push(vec![num(lambda), j.to_string(), num(r.gap), num(r.expected_gap)]);
            reports.push(r);
        }
        Ok((
            ok,
            json!({ "lambda": lambda, "min_gap": min_gap, "passed": ok, "pairs": reports }),
        ))
    });
    CheckOutcome {
        check: CheckName::Separation,
        passed,
        body: json!({ "tol": SEPARATION_TOL, "results": entries }),
        table,
        plot: None,
    }
}

/// λ₀ of the configured model.
pub fn model_lambda0(model: &DomainModel<f64>) -> berezin::Result<f64> {
    lambda0(&model.root_data())
}
