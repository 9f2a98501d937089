//! The verification campaigns behind each subcommand.

use isoglue_core::flat_torus::tangent_norm;
use isoglue_core::glued_space::{
    check_metric_axioms, check_triple, nearest_in_compact, nearest_line_set, nearest_on_line, triangle_counterexample,
    AxiomReport, MetricSpace, ViolationKind,
};
use isoglue_core::isometry::{
    construct_x_isometry, decompose_z_isometry, solve_torus_part, subtorus_period, verify_isometry, x1_group_elements,
    VerificationReport, X1Kind,
};
use isoglue_core::oracle;
use isoglue_core::orbit::{
    circle_orbit_membership, compare_local_identity, density_search, local_isometry_check, non_closure_report, Budget,
    DensityReport, GroupOrbitCertificate, Membership, Obstruction, SearchStrategy,
};
use isoglue_core::sampling::{sample_rng, PointSource, RandomScalar, Sampler};
use isoglue_core::{
    Axis, Error, ExactScalar, GluedSpace, GluingParams, GramMatrix, LineIsometry, OneParamSubgroup, ProductIsometry,
    Scalar, ScalarMode, Subtorus, TorusIsometry, TorusPoint, XIsometry, XPoint, ZPoint,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{Mode, RunConfig, SpaceKind};
use crate::error::{CliError, UsageError};
use crate::wire::{self, float, object, WirePoint, WireScalar};

/// Violations beyond this many are counted but not listed.
pub const MAX_LISTED: usize = 100;

/// What a subcommand produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub report: Value,
    /// Per-command defaults that were filled in, echoed into the config.
    pub defaults: Vec<(&'static str, String)>,
    /// Rows `target_u1,target_u2,t,distance` for CSV output.
    pub table: Option<Vec<[String; 4]>>,
}

impl Outcome {
    fn new(passed: bool, report: Value, defaults: Vec<(&'static str, String)>) -> Self {
        Outcome { passed, report, defaults, table: None }
    }
}

type Run = Result<Outcome, CliError>;

fn mode_name(mode: ScalarMode) -> Value {
    match mode {
        ScalarMode::Exact => "exact".into(),
        ScalarMode::Float { .. } => "float".into(),
    }
}

fn scalar_mode(cfg: &RunConfig, default: Mode) -> (Mode, ScalarMode) {
    match cfg.mode_or(default) {
        Mode::Exact => (Mode::Exact, ScalarMode::Exact),
        Mode::Float => (Mode::Float, ScalarMode::Float { epsilon: cfg.epsilon }),
    }
}

fn mode_default(m: Mode) -> (&'static str, String) {
    ("mode", if m == Mode::Exact { "exact" } else { "float" }.to_string())
}

/// The configured space over `S`.
fn space<S: WireScalar>(cfg: &RunConfig) -> Result<GluedSpace<S>, CliError> {
    let params = GluingParams::new(S::from_exact(&cfg.field.rational(cfg.r.clone())), S::from_exact(&cfg.field.rational(cfg.m.clone())), cfg.strict)?;
    let subgroup = OneParamSubgroup::canonical(S::from_exact(&cfg.alpha))?;
    Ok(GluedSpace::new(params, cfg.gram.clone(), subgroup))
}

fn params_json<S: WireScalar>(p: &GluingParams<S>, gram: &GramMatrix, alpha: &ExactScalar) -> Value {
    object([
        ("M", p.m().wire()),
        ("R", p.r().wire()),
        ("alpha", alpha.wire()),
        ("gram", Value::Array(gram.entries().iter().map(|q| wire::rational(q)).collect())),
        ("strict", p.is_strict().into()),
    ])
}

fn gram_f64(g: &GramMatrix) -> oracle::Gram {
    let e = g.entries();
    [e[0].to_f64().unwrap_or(f64::NAN), e[1].to_f64().unwrap_or(f64::NAN), e[2].to_f64().unwrap_or(f64::NAN)]
}

fn requires_exact(mode: Mode, key: &str, what: &str) -> Result<(), CliError> {
    if mode == Mode::Float {
        return Err(UsageError::new(key, format!("{what} runs in exact mode only")).into());
    }
    Ok(())
}

fn violation_kind(k: ViolationKind) -> Value {
    match k {
        ViolationKind::Symmetry => "symmetry".into(),
        ViolationKind::Identity => "identity".into(),
        ViolationKind::Triangle => "triangle".into(),
    }
}

fn axiom_report<P: WirePoint, S: WireScalar>(r: &AxiomReport<P>, params: &GluingParams<S>, gram: &GramMatrix, alpha: &ExactScalar) -> Value {
    let listed = r
        .violations
        .iter()
        .take(MAX_LISTED)
        .map(|v| {
            object([
                ("a", v.a.wire()),
                ("b", v.b.wire()),
                ("c", v.c.wire()),
                ("index", v.index.into()),
                ("kind", violation_kind(v.kind)),
                ("lhs", float(v.lhs)),
                ("rhs", float(v.rhs)),
                ("slack", float(v.slack)),
            ])
        })
        .collect();
    object([
        ("max_abs_error", float(r.max_abs_error)),
        ("mode", mode_name(r.mode)),
        ("params", params_json(params, gram, alpha)),
        ("samples", r.samples.into()),
        ("space", r.space.into()),
        ("violation_count", r.violations.len().into()),
        ("violations", Value::Array(listed)),
    ])
}

fn par_axioms<M>(view: &M, sampler: &Sampler<M::Scalar>, n: u64, mode: ScalarMode) -> AxiomReport<M::Point>
where
    M: MetricSpace + Sync,
    M::Scalar: RandomScalar,
    M::Point: Send,
    Sampler<M::Scalar>: PointSource<[M::Point; 3]> + Sync,
{
    // Ordered collect keeps the report independent of the thread count.
    let outcomes: Vec<_> = (0..n).into_par_iter().map(|i| check_triple(view, i, &sampler.sample(i), mode)).collect();
    AxiomReport::assemble(view.name(), mode, outcomes)
}

pub fn verify_metric(cfg: &RunConfig) -> Run {
    match scalar_mode(cfg, Mode::Float) {
        (Mode::Exact, mode) => verify_metric_in::<ExactScalar>(cfg, mode, 2_000),
        (Mode::Float, mode) => verify_metric_in::<f64>(cfg, mode, 100_000),
    }
}

fn verify_metric_in<S: WireScalar>(cfg: &RunConfig, mode: ScalarMode, default_n: u64) -> Run
where
    S::Context: Send + Sync,
{
    let space = space::<S>(cfg)?;
    let n = cfg.samples_or(default_n);
    let sampler = Sampler::<S>::new(cfg.seed, S::context_of(&cfg.alpha));
    let report = match cfg.space {
        SpaceKind::Z => {
            let r = par_axioms(&space.z(), &sampler, n, mode);
            (r.passed(), axiom_report(&r, &space.params, &space.gram, &cfg.alpha))
        }
        SpaceKind::X => {
            let r = par_axioms(&space.x(), &sampler, n, mode);
            (r.passed(), axiom_report(&r, &space.params, &space.gram, &cfg.alpha))
        }
    };
    let defaults = vec![mode_default(cfg.mode_or(Mode::Float)), ("samples", n.to_string())];
    Ok(Outcome::new(report.0, report.1, defaults))
}

pub fn counterexample(cfg: &RunConfig) -> Run {
    match scalar_mode(cfg, Mode::Exact) {
        (Mode::Exact, mode) => counterexample_in::<ExactScalar>(cfg, mode),
        (Mode::Float, mode) => counterexample_in::<f64>(cfg, mode),
    }
}

fn counterexample_in<S: WireScalar>(cfg: &RunConfig, mode: ScalarMode) -> Run {
    let space = space::<S>(cfg)?;
    let ce = match triangle_counterexample(&space.params) {
        Ok(ce) => ce,
        Err(Error::InvalidParams(_)) => {
            return Err(UsageError::new("R", "2R >= M: the glued distance is a metric and has no counterexample".into()).into())
        }
        Err(e) => return Err(e.into()),
    };
    let triple = vec![[ce.a.clone(), ce.c.clone(), ce.b.clone()]];
    let axioms = check_metric_axioms(&space.z(), &triple, 1, mode)?;
    let flagged = axioms.violations.iter().any(|v| v.kind == ViolationKind::Triangle);
    let d = |p: &ZPoint<S>, q: &ZPoint<S>| wire::length(&space.z_distance(p, q));
    let report = object([
        ("a", ce.a.wire()),
        ("b", ce.b.wire()),
        ("c", ce.c.wire()),
        ("d_ab", d(&ce.a, &ce.b)),
        ("d_ac", d(&ce.a, &ce.c)),
        ("d_cb", d(&ce.c, &ce.b)),
        ("flagged", flagged.into()),
        ("axioms", axiom_report(&axioms, &space.params, &space.gram, &cfg.alpha)),
        ("slack", ce.slack.wire()),
        ("slack_value", float(ce.slack.to_f64())),
    ]);
    // A counterexample is a violation: the run reports failure on purpose.
    Ok(Outcome::new(false, report, vec![mode_default(cfg.mode_or(Mode::Exact))]))
}

pub fn nearest(cfg: &RunConfig) -> Run {
    let (m, _) = scalar_mode(cfg, Mode::Exact);
    requires_exact(m, "mode", "nearest")?;
    let f = cfg.field;
    let params = cfg.params();
    let gram = &cfg.gram;
    let og = gram_f64(gram);
    let (rf, mf) = (params.r().to_f64(), params.m().to_f64());
    let n = cfg.samples_or(50);
    let grid = cfg.grid;
    let gn = grid as i64;
    let grid_point = |rng: &mut rand_chacha::ChaCha8Rng| {
        let (i, j) = (rng.gen_range(0..gn), rng.gen_range(0..gn));
        (TorusPoint::new(f.ratio(i, gn), f.ratio(j, gn)), (i as usize, j as usize))
    };
    let xy = |p: &TorusPoint<ExactScalar>| [p.u1().to_f64(), p.u2().to_f64()];
    let line_parameter = |rng: &mut rand_chacha::ChaCha8Rng| f.ratio(rng.gen_range(-800..800), rng.gen_range(1..=16));

    let compact: Vec<(bool, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(cfg.seed, i);
            let (y, ij) = grid_point(&mut rng);
            let r = line_parameter(&mut rng);
            let got = nearest_in_compact(&ZPoint::Cylinder(y.clone(), r.clone()), &params, gram, grid).expect("cylinder point");
            let (arg, d) = oracle::nearest_compact(oracle::Point { y: xy(&y), t: Some(r.to_f64()) }, rf, mf, og, grid);
            let positive = got.gap.radicand.sign() != isoglue_core::Sign::Zero || got.gap.offset.sign() == isoglue_core::Sign::Positive;
            let ok = got.point == y && arg == ij && (d - got.distance.value()).abs() < 1e-12 && positive;
            (ok, got.gap.value())
        })
        .collect();

    let line_set: Vec<(bool, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(cfg.seed ^ 0x5eed_0001, i);
            let (y, ij) = grid_point(&mut rng);
            let mut ts = vec![f.integer(-10), f.zero(), f.ratio(37, 10)];
            ts.push(line_parameter(&mut rng));
            let others: Vec<_> = (0..8).map(|_| grid_point(&mut rng).0).collect();
            let check = nearest_line_set(&y).check(&params, gram, &ts, &others);
            let ts_f: Vec<f64> = ts.iter().map(ExactScalar::to_f64).collect();
            let mins = oracle::line_set_minimizers(xy(&y), &ts_f, rf, mf, og, grid, 1e-12);
            let ok = check.holds() && mins.len() == ts.len() && mins.iter().all(|m| m.0 == ij);
            (ok, check.off_line_excess.map_or(f64::INFINITY, |e| e.value()))
        })
        .collect();

    let on_line: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(cfg.seed ^ 0x5eed_0002, i);
            let (y, _) = grid_point(&mut rng);
            let (y2, _) = grid_point(&mut rng);
            let r = line_parameter(&mut rng);
            let got = nearest_on_line(&ZPoint::Cylinder(y.clone(), r.clone()), &y2, &params, gram).expect("cylinder point");
            let brute = oracle::nearest_on_line(xy(&y), r.to_f64(), xy(&y2), rf, mf, og, cfg.t_grid);
            got.point == ZPoint::Cylinder(y2, r.clone())
                && got.unique
                && brute.is_some_and(|(t, d)| t == r.to_f64() && (d - got.distance.value()).abs() < 1e-12)
        })
        .collect();

    let summary = |oks: &mut dyn Iterator<Item = bool>| {
        let v: Vec<bool> = oks.collect();
        (v.iter().filter(|b| **b).count(), v.len())
    };
    let (c_ok, c_n) = summary(&mut compact.iter().map(|e| e.0));
    let (l_ok, l_n) = summary(&mut line_set.iter().map(|e| e.0));
    let (o_ok, o_n) = summary(&mut on_line.iter().copied());
    let min_gap = compact.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let min_excess = line_set.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let part = |ok: usize, total: usize, extra: Option<(&str, f64)>| {
        let mut fields = vec![("agreements", ok.into()), ("instances", total.into())];
        if let Some((k, v)) = extra {
            fields.push((k, float(v)));
        }
        object(fields)
    };
    let report = object([
        ("compact", part(c_ok, c_n, Some(("min_gap", min_gap)))),
        ("grid", grid.into()),
        ("line_set", part(l_ok, l_n, Some(("min_excess", min_excess)))),
        ("on_line", part(o_ok, o_n, None)),
        ("params", params_json(&params, gram, &cfg.alpha)),
        ("t_grid", cfg.t_grid.into()),
    ]);
    let passed = c_ok == c_n && l_ok == l_n && o_ok == o_n;
    Ok(Outcome::new(passed, report, vec![mode_default(Mode::Exact), ("samples", n.to_string())]))
}

fn line_json<S: WireScalar>(l: &LineIsometry<S>) -> Value {
    object([("reflect", l.reflect.into()), ("shift", l.shift.wire())])
}

fn torus_iso_json<S: WireScalar>(t: &TorusIsometry<S>) -> Value {
    object([("invert", t.invert.into()), ("x", wire::torus_point(&t.x))])
}

fn verification_json<P: WirePoint>(r: &VerificationReport<P>) -> Value {
    let failures = r
        .failures
        .iter()
        .take(MAX_LISTED)
        .map(|f| {
            object([
                ("d_after", float(f.d_after)),
                ("d_before", float(f.d_before)),
                ("index", f.index.into()),
                ("p", f.p.wire()),
                ("q", f.q.wire()),
            ])
        })
        .collect();
    object([
        ("failure_count", r.failures.len().into()),
        ("failures", Value::Array(failures)),
        ("kind", r.kind.into()),
        ("max_error", float(r.max_error)),
        ("mode", mode_name(r.mode)),
        ("samples", r.samples.into()),
    ])
}

fn random_line<S: WireScalar, R: Rng>(sampler: &Sampler<S>, rng: &mut R) -> LineIsometry<S> {
    let a = sampler.line_parameter(rng);
    if rng.gen::<bool>() {
        LineIsometry::reflection(a)
    } else {
        LineIsometry::translation(a)
    }
}

fn random_product<S: WireScalar, R: Rng>(sampler: &Sampler<S>, rng: &mut R) -> ProductIsometry<S> {
    let x = sampler.torus_point(rng);
    let torus = if rng.gen::<bool>() { TorusIsometry::inversion_then_translation(x) } else { TorusIsometry::translation(x) };
    ProductIsometry::new(torus, random_line(sampler, rng))
}

pub fn isometry_check(cfg: &RunConfig) -> Run {
    match scalar_mode(cfg, Mode::Exact) {
        (Mode::Exact, mode) => isometry_check_in::<ExactScalar>(cfg, mode),
        (Mode::Float, mode) => isometry_check_in::<f64>(cfg, mode),
    }
}

fn isometry_check_in<S: WireScalar>(cfg: &RunConfig, mode: ScalarMode) -> Run
where
    S::Context: Send + Sync,
{
    let space = space::<S>(cfg)?;
    let ctx = S::context_of(&cfg.alpha);
    let n = cfg.samples_or(1_000);
    let sampler = Sampler::<S>::new(cfg.seed, ctx.clone());
    let mut rng = sample_rng(cfg.seed, u64::MAX);
    let mut passed = true;

    let lines: Vec<LineIsometry<S>> = (0..4).map(|_| random_line(&sampler, &mut rng)).collect();
    let lifts: Vec<Value> = lines
        .par_iter()
        .map(|line| {
            let iso = construct_x_isometry(line, &space.subgroup);
            let r = verify_isometry(&space.x(), |p| iso.apply(p), &sampler, n, mode).expect("mode matches scalar");
            (r.passed(), object([("line", line_json(line)), ("report", verification_json(&r)), ("torus", torus_iso_json(iso.torus()))]))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .map(|(ok, v)| {
            passed &= ok;
            v
        })
        .collect();

    let round_trips = 100u64;
    let products: Vec<ProductIsometry<S>> = (0..round_trips).map(|_| random_product(&sampler, &mut rng)).collect();
    let trip_failures: Vec<u64> = products
        .par_iter()
        .enumerate()
        .filter_map(|(i, g)| {
            let probe = Sampler::<S>::new(cfg.seed.wrapping_add(i as u64 + 1), ctx.clone());
            let back = decompose_z_isometry(|p: &ZPoint<S>| g.apply(p), &probe, 8, mode);
            let preserved = verify_isometry(&space.z(), |p| g.apply(p), &probe, 8, mode).map(|r| r.passed());
            let same = matches!(&back, Ok(h) if mode.is_exact() && h == g || !mode.is_exact() && back.is_ok());
            (!(same && preserved.unwrap_or(false))).then_some(i as u64)
        })
        .collect();
    passed &= trip_failures.is_empty();

    let one = S::from_i64(&ctx, 1);
    let swap = |p: &ZPoint<S>| match p {
        ZPoint::Compact(y) => ZPoint::Cylinder(y.clone(), S::zero_in(&ctx)),
        ZPoint::Cylinder(y, _) => ZPoint::Compact(y.clone()),
    };
    let scale = |p: &ZPoint<S>| match p {
        ZPoint::Cylinder(y, t) => ZPoint::Cylinder(y.clone(), t.clone() + t),
        other => other.clone(),
    };
    let flip = |p: &ZPoint<S>| {
        let sw = |y: &TorusPoint<S>| TorusPoint::new(y.u2().clone(), y.u1().clone());
        match p {
            ZPoint::Compact(y) => ZPoint::Compact(sw(y)),
            ZPoint::Cylinder(y, t) => ZPoint::Cylinder(sw(y), t.clone()),
        }
    };
    let twist = |p: &ZPoint<S>| match p {
        ZPoint::Cylinder(y, t) if !y.is_identity() => ZPoint::Cylinder(y.clone(), t.clone() + &one),
        other => other.clone(),
    };
    let mut impostors = Vec::new();
    let mut check_impostor = |name: &'static str, f: &dyn Fn(&ZPoint<S>) -> ZPoint<S>| {
        let verdict = match decompose_z_isometry(f, &sampler, 16, mode) {
            Ok(_) => {
                passed = false;
                Value::Null
            }
            Err(e) => e.to_string().into(),
        };
        impostors.push((name, verdict));
    };
    check_impostor("component_swap", &swap);
    check_impostor("coordinate_swap", &flip);
    check_impostor("line_twist", &twist);
    check_impostor("t_scaling", &scale);
    // scaling also moves distances on the cylinder
    let pairs = vec![[ZPoint::Cylinder(TorusPoint::identity(&ctx), S::zero_in(&ctx)), ZPoint::Cylinder(TorusPoint::identity(&ctx), one.clone() / &S::from_i64(&ctx, 2))]];
    let scaled = verify_isometry(&space.z(), scale, &pairs, 1, mode)?;
    passed &= !scaled.passed();

    let report = object([
        ("impostors", object(impostors)),
        ("lifts", Value::Array(lifts)),
        ("round_trips", object([("count", round_trips.into()), ("failures", Value::Array(trip_failures.into_iter().map(Value::from).collect()))])),
        ("scaling_report", verification_json(&scaled)),
    ]);
    Ok(Outcome::new(passed, report, vec![mode_default(cfg.mode_or(Mode::Exact)), ("samples", n.to_string())]))
}

pub fn lift(cfg: &RunConfig) -> Run {
    let (m, _) = scalar_mode(cfg, Mode::Exact);
    requires_exact(m, "mode", "lift")?;
    let f = cfg.field;
    let subgroup = cfg.subgroup();
    let n = cfg.samples_or(10);
    let sampler = Sampler::<ExactScalar>::new(cfg.seed, f);
    let probes = [f.zero(), f.ratio(1, 3), f.sqrt_d(), f.integer(-2)];
    let mut passed = true;
    let rows = (0..n)
        .map(|i| {
            let mut rng = sampler.rng(i);
            let line = random_line(&sampler, &mut rng);
            let iso = construct_x_isometry(&line, &subgroup);
            let graph = iso.as_product().preserves_graph(&subgroup, &probes);
            let unique = solve_torus_part(&line, &subgroup, &probes[1], &probes[2]).as_ref() == Some(iso.torus());
            passed &= graph && unique;
            object([
                ("line", line_json(&line)),
                ("preserves_graph", graph.into()),
                ("torus", torus_iso_json(iso.torus())),
                ("unique", unique.into()),
            ])
        })
        .collect();
    let report = object([("alpha", cfg.alpha.wire()), ("lifts", Value::Array(rows))]);
    Ok(Outcome::new(passed, report, vec![mode_default(Mode::Exact), ("samples", n.to_string())]))
}

fn density_json(r: &DensityReport) -> Value {
    let strategy = match r.strategy {
        SearchStrategy::GridTorus => "grid-torus".to_string(),
        SearchStrategy::CfCircle(Axis::First) => "cf-circle/first".to_string(),
        SearchStrategy::CfCircle(Axis::Second) => "cf-circle/second".to_string(),
    };
    let hits = r
        .hits
        .iter()
        .map(|h| {
            object([
                ("distance", float(h.distance)),
                ("squared_distance", h.squared_distance.wire()),
                ("steps", h.steps.into()),
                ("t", h.t.wire()),
                ("target", wire::torus_point(&h.target)),
                ("within", h.within.into()),
            ])
        })
        .collect();
    object([
        ("budget", object([("convergents", r.budget.max_convergents.into()), ("grid_steps", r.budget.grid_steps.into())])),
        ("epsilon", float(r.epsilon)),
        ("hits", Value::Array(hits)),
        ("strategy", strategy.into()),
        ("success", r.success.into()),
        ("worst", float(r.worst)),
    ])
}

fn density_rows(reports: &[DensityReport]) -> Vec<[String; 4]> {
    reports
        .iter()
        .flat_map(|r| r.hits.iter())
        .map(|h| [h.target.u1().to_string(), h.target.u2().to_string(), h.t.to_string(), format!("{:.16e}", h.distance)])
        .collect()
}

fn budget(cfg: &RunConfig) -> Budget {
    Budget { max_convergents: cfg.convergents, grid_steps: cfg.budget }
}

fn epsilons_or(cfg: &RunConfig, default: &[f64]) -> (Vec<f64>, (&'static str, String)) {
    let eps = if cfg.epsilons.is_empty() { default.to_vec() } else { cfg.epsilons.clone() };
    let text = eps.iter().map(|e| format!("{e:e}")).collect::<Vec<_>>().join(",");
    (eps, ("epsilons", text))
}

pub fn density(cfg: &RunConfig) -> Run {
    let (m, _) = scalar_mode(cfg, Mode::Exact);
    requires_exact(m, "mode", "density")?;
    let f = cfg.field;
    let subgroup = cfg.subgroup();
    let strategy_name = cfg.strategy.clone().unwrap_or_else(|| "grid-torus".into());
    let (epsilons, eps_default) = epsilons_or(cfg, &[1e-2, 1e-4, 1e-6]);
    let mut defaults = vec![mode_default(Mode::Exact), ("strategy", strategy_name.clone()), eps_default];
    let y0 = cfg.point("basepoint", cfg.basepoint.as_deref(), TorusPoint::identity(&f))?;
    let (strategy, targets) = if strategy_name == "cf-circle" {
        let sub = Subtorus::new(cfg.axis);
        let targets = match &cfg.target {
            Some(t) => vec![sub.point(crate::config::parse_scalar("target", t, f)?)],
            None => {
                let n = cfg.targets.unwrap_or(1_000);
                defaults.push(("targets", n.to_string()));
                (0..n as i64).map(|k| sub.point(f.ratio(k, n as i64))).collect()
            }
        };
        if !sub.contains(&y0)? {
            return Err(UsageError::new("basepoint", "cf-circle needs a basepoint on the chosen subtorus".into()).into());
        }
        (SearchStrategy::CfCircle(cfg.axis), targets)
    } else {
        let targets = match (&cfg.target, cfg.targets) {
            (Some(t), _) => vec![crate::config::parse_point("target", t, f)?],
            (None, Some(n)) => {
                let sampler = Sampler::<ExactScalar>::new(cfg.seed, f);
                (0..n as u64).map(|i| PointSource::<TorusPoint<ExactScalar>>::sample(&sampler, i)).collect()
            }
            (None, None) => {
                defaults.push(("target", "0,1/2".into()));
                vec![TorusPoint::new(f.zero(), f.ratio(1, 2))]
            }
        };
        (SearchStrategy::GridTorus, targets)
    };
    let reports = epsilons
        .par_iter()
        .map(|&eps| density_search(&y0, &targets, eps, &subgroup, &cfg.gram, strategy, budget(cfg)))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.success);
    let report = object([
        ("basepoint", wire::torus_point(&y0)),
        ("searches", Value::Array(reports.iter().map(density_json).collect())),
    ]);
    let mut out = Outcome::new(passed, report, defaults);
    out.table = Some(density_rows(&reports));
    Ok(out)
}

fn membership_json(m: &Membership) -> Value {
    match m {
        Membership::Member { t } => object([("member", true.into()), ("t", t.wire())]),
        Membership::NonMember(c) => {
            let obstruction = match &c.obstruction {
                Obstruction::ShiftNotIntegral { required } => {
                    object([("kind", "shift_not_integral".into()), ("required", wire::rational(required))])
                }
                Obstruction::ResidueNotIntegral { shift, residue } => object([
                    ("kind", "residue_not_integral".into()),
                    ("residue", wire::rational(residue)),
                    ("shift", shift.to_string().into()),
                ]),
            };
            object([
                ("equation", object([("offset", c.equation.offset.wire()), ("step", c.equation.step.wire())])),
                ("family", format!("{:?}", c.family).into()),
                ("member", false.into()),
                ("obstruction", obstruction),
                ("statement", c.to_string().into()),
            ])
        }
    }
}

fn certificate_json(c: &GroupOrbitCertificate) -> Value {
    object([
        ("outside_orbit", c.outside_orbit().into()),
        ("reflections", membership_json(&c.reflections)),
        ("translations", membership_json(&c.translations)),
    ])
}

/// Replays both non-membership certificates; `None` subtorus for the torus.
fn replays(c: &GroupOrbitCertificate, subgroup: &OneParamSubgroup<ExactScalar>, sub: Option<&Subtorus>) -> bool {
    [&c.translations, &c.reflections].iter().all(|m| m.certificate().is_some_and(|cert| cert.replay(subgroup, sub).is_ok()))
}

pub fn non_closure(cfg: &RunConfig) -> Run {
    let (m, _) = scalar_mode(cfg, Mode::Exact);
    requires_exact(m, "mode", "non-closure")?;
    let f = cfg.field;
    let subgroup = cfg.subgroup();
    let (epsilons, eps_default) = epsilons_or(cfg, &[1e-2, 1e-4, 1e-6]);
    let y0 = cfg.point("basepoint", cfg.basepoint.as_deref(), TorusPoint::identity(&f))?;
    let target = cfg.point("target", cfg.target.as_deref(), TorusPoint::new(f.zero(), f.ratio(1, 2)))?;
    let defaults = vec![mode_default(Mode::Exact), eps_default, ("target", "0,1/2".into())];
    let base = [("basepoint", wire::torus_point(&y0)), ("target", wire::torus_point(&target))];
    match non_closure_report(&y0, &target, &epsilons, &subgroup, &cfg.gram, budget(cfg)) {
        Ok(r) => {
            let replayed = replays(&r.certificate, &subgroup, None);
            let mut fields = base.to_vec();
            fields.push(("certificate", certificate_json(&r.certificate)));
            fields.push(("replayed", replayed.into()));
            fields.push(("searches", Value::Array(r.searches.iter().map(density_json).collect())));
            Ok(Outcome::new(r.passed() && replayed, object(fields), defaults))
        }
        Err(Error::TargetOnOrbit { t }) => {
            let mut fields = base.to_vec();
            fields.push(("on_orbit", t.into()));
            Ok(Outcome::new(false, object(fields), defaults))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn local_isometry(cfg: &RunConfig) -> Run {
    match scalar_mode(cfg, Mode::Exact) {
        (Mode::Exact, mode) => local_isometry_in::<ExactScalar>(cfg, mode),
        (Mode::Float, mode) => local_isometry_in::<f64>(cfg, mode),
    }
}

fn local_isometry_in<S: WireScalar>(cfg: &RunConfig, mode: ScalarMode) -> Run {
    let space = space::<S>(cfg)?;
    let ctx = S::context_of(&cfg.alpha);
    let radius = space.validity_radius();
    let norm = tangent_norm(space.subgroup.direction(), &space.gram);
    let mut defaults = vec![mode_default(cfg.mode_or(Mode::Exact))];
    let check_json = |c: &isoglue_core::orbit::LocalIsometryCheck<S>| {
        object([("holds", c.holds.into()), ("lhs", wire::length(&c.lhs)), ("rhs", wire::length(&c.rhs)), ("s", c.s.wire()), ("t", c.t.wire())])
    };
    let head = vec![("norm", wire::length(&norm)), ("radius", float(radius))];

    if let (Some(t), Some(s)) = (&cfg.t, &cfg.s) {
        let (t, s) = (S::from_exact(t), S::from_exact(s));
        let mut fields = head;
        let passed = match local_isometry_check(&t, &s, &space, mode) {
            Ok(c) => {
                fields.push(("check", check_json(&c)));
                c.holds
            }
            Err(Error::OutsideValidityRadius { radius }) => {
                fields.push(("refused", object([("radius", float(radius))])));
                let c = compare_local_identity(&t, &s, &space, mode)?;
                fields.push(("unguarded", check_json(&c)));
                false
            }
            Err(e) => return Err(e.into()),
        };
        return Ok(Outcome::new(passed, object(fields), defaults));
    }

    let n = cfg.samples_or(100);
    defaults.push(("samples", n.to_string()));
    let sampler = Sampler::<S>::new(cfg.seed, ctx.clone());
    // a rational step safely inside the radius
    let step = BigRational::from_float(radius * 0.99).expect("finite radius") / BigRational::from_integer(BigInt::from(100));
    let step = S::from_exact(&cfg.field.rational(step));
    let mut failures = Vec::new();
    for i in 0..n {
        let mut rng = sampler.rng(i);
        let t = sampler.line_parameter(&mut rng);
        let k = rng.gen_range(-100..=100i64);
        let s = t.clone() + &(step.clone() * &S::from_i64(&ctx, k));
        match local_isometry_check(&t, &s, &space, mode) {
            Ok(c) if c.holds => {}
            Ok(c) => failures.push(check_json(&c)),
            Err(e) => failures.push(e.to_string().into()),
        }
    }
    // beyond the cap the identity is refused, and indeed fails
    let t = S::zero_in(&ctx);
    let far = space.params.m().clone() + &(S::from_i64(&ctx, 1) / &S::from_i64(&ctx, 2));
    let refusal = match local_isometry_check(&t, &far, &space, mode) {
        Err(Error::OutsideValidityRadius { radius }) => Some(radius),
        _ => None,
    };
    let unguarded = compare_local_identity(&t, &far, &space, mode)?;
    let passed = failures.is_empty() && refusal.is_some() && !unguarded.holds;
    let mut fields = head;
    fields.push(("failures", Value::Array(failures)));
    fields.push(("refusal", object([("delta", far.wire()), ("radius", refusal.map_or(Value::Null, float)), ("unguarded", check_json(&unguarded))])));
    fields.push(("samples", n.into()));
    Ok(Outcome::new(passed, object(fields), defaults))
}

pub fn x1_group(cfg: &RunConfig) -> Run {
    let (m, _) = scalar_mode(cfg, Mode::Exact);
    requires_exact(m, "mode", "x1-group")?;
    let f = cfg.field;
    let subgroup = cfg.subgroup();
    let sub = Subtorus::new(cfg.axis);
    let (epsilons, eps_default) = epsilons_or(cfg, &[1e-3]);
    let n_targets = cfg.targets.unwrap_or(1_000);
    let n_pairs = cfg.samples_or(100);
    let defaults = vec![
        mode_default(Mode::Exact),
        eps_default,
        ("samples", n_pairs.to_string()),
        ("target", "1/2".into()),
        ("targets", n_targets.to_string()),
    ];
    let mut passed = true;

    let k = cfg.k_range;
    let elements = x1_group_elements(&subgroup, &sub, -k..=k)?;
    let period = subtorus_period(&subgroup, &sub)?;
    let theta = sub.coordinate(&subgroup.point(&period)).clone();
    let probes = [f.zero(), f.ratio(1, 3), f.sqrt_d()];
    let rows: Vec<Value> = elements
        .iter()
        .map(|e| {
            let expected = (theta.clone() * &f.integer(e.k)).frac();
            let rotation_ok = e.kind == X1Kind::Reflection || e.rotation == expected;
            let graph = e.isometry.as_product().preserves_graph(&subgroup, &probes);
            passed &= rotation_ok && graph;
            object([
                ("anchor", wire::torus_point(&e.anchor)),
                ("graph_preserved", graph.into()),
                ("k", e.k.into()),
                ("kind", if e.kind == X1Kind::Translation { "translation" } else { "reflection" }.into()),
                ("line", line_json(e.isometry.line())),
                ("rotation", e.rotation.wire()),
                ("rotation_matches", rotation_ok.into()),
            ])
        })
        .collect();

    let y0 = cfg.point("basepoint", cfg.basepoint.as_deref(), TorusPoint::identity(&f))?;
    if !sub.contains(&y0)? {
        return Err(UsageError::new("basepoint", "basepoint must lie on the chosen subtorus".into()).into());
    }
    let targets: Vec<_> = (0..n_targets as i64).map(|j| sub.point(f.ratio(j, n_targets as i64))).collect();
    let searches = epsilons
        .par_iter()
        .map(|&eps| density_search(&y0, &targets, eps, &subgroup, &cfg.gram, SearchStrategy::CfCircle(cfg.axis), budget(cfg)))
        .collect::<Result<Vec<_>, _>>()?;
    passed &= searches.iter().all(|s| s.success);

    let target_s = match &cfg.target {
        Some(t) => crate::config::parse_scalar("target", t, f)?,
        None => f.ratio(1, 2),
    };
    let target = sub.point(target_s);
    let certificate = circle_orbit_membership(&y0, &target, &subgroup, &sub)?;
    let replayed = replays(&certificate, &subgroup, Some(&sub));
    passed &= certificate.outside_orbit() && replayed;

    let sampler = Sampler::<ExactScalar>::new(cfg.seed, f);
    let space = GluedSpace::new(cfg.params(), cfg.gram.clone(), subgroup.clone());
    let transitive = (0..n_pairs).all(|i| {
        let mut rng = sampler.rng(i);
        let (t, s) = (sampler.line_parameter(&mut rng), sampler.line_parameter(&mut rng));
        let g = XIsometry::carrying(&t, &s, &subgroup);
        let probe = XPoint::Graph(sampler.line_parameter(&mut rng));
        let moved = g.apply(&XPoint::Graph(t.clone())) == XPoint::Graph(s.clone());
        let dist = space.x_distance(&XPoint::Graph(t), &probe).exact_eq(&space.x_distance(&XPoint::Graph(s), &g.apply(&probe)));
        moved && dist
    });
    passed &= transitive;

    let report = object([
        ("certificate", certificate_json(&certificate)),
        ("elements", Value::Array(rows)),
        ("period", period.wire()),
        ("replayed", replayed.into()),
        ("searches", Value::Array(searches.iter().map(density_json).collect())),
        ("theta", theta.wire()),
        ("transitive_on_graph", transitive.into()),
        ("transitivity_pairs", n_pairs.into()),
    ]);
    Ok(Outcome::new(passed, report, defaults))
}
