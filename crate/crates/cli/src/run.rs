use std::fs;

use serde::Serialize;
use serde_json::{json, Value};

use qcx_core::complex::{
    check_reinhardt, qpsh_index_on_grid, reinhardt_pullback, tube_pseudoconvexity_check, TubeSpec,
};
use qcx_core::qconvex::{
    approximate_from_above, classify_on_grid, grid_q_index, sup_convolve_detailed, witness_search, KernelProfile,
    KernelSpec, QIndexReport, WitnessBudget,
};
use qcx_core::sets::{
    continuity_principle_test, graph_complement_family, graph_family_with_offset, neg_log_dist_field,
    set_q_convex_check, ContinuityVerdict, DistanceKind, GraphMap, OpenSetModel, SetVerdict,
};
use qcx_core::{DomainBox, Error, FieldSpec, GridField, GridSpec, Report, ScalarField};

use crate::args::{BudgetArgs, Common, FieldArgs, Profile, SetArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::UnknownVariable { .. }
            | Error::Invalid(_)
            | Error::NotSmooth(_)
            | Error::NotMember { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Table of sampled values for `--csv`.
pub struct Samples {
    pub header: Vec<String>,
    pub rows: Vec<(Vec<f64>, Option<f64>)>,
}

pub struct Outcome {
    pub report: Report,
    pub summary: Vec<String>,
    /// Final stdout line.
    pub answer: String,
    pub samples: Option<Samples>,
}

/// Echo of the effective configuration. Output paths and the thread count
/// are left out so reports from different runs compare equal.
#[derive(Serialize)]
struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<FieldSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    set: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<usize>,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    bounds: Option<DomainBox>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<WitnessBudget>,
    seed: u64,
    tol: f64,
    #[serde(skip_serializing_if = "Value::is_null")]
    options: Value,
}

impl RunConfig {
    fn new(common: &Common) -> Self {
        Self {
            field: None,
            set: None,
            q: None,
            bounds: None,
            resolution: None,
            budget: None,
            seed: common.seed,
            tol: common.tol,
            options: Value::Null,
        }
    }

    fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config is plain data")
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results are plain data")
}

/// Inline JSON when the text starts with `{` or `[`, otherwise a file path.
fn load_json(text: &str) -> CliResult<Value> {
    let trimmed = text.trim_start();
    let body = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        text.to_string()
    } else {
        fs::read_to_string(text).map_err(|e| CliError::Usage(format!("cannot read {text}: {e}")))?
    };
    serde_json::from_str(&body).map_err(|e| CliError::Usage(format!("invalid JSON: {e}")))
}

fn parse_box(text: Option<&str>, dim: usize) -> CliResult<Option<DomainBox>> {
    let Some(text) = text else { return Ok(None) };
    let b: DomainBox = serde_json::from_value(load_json(text)?).map_err(|e| CliError::Usage(format!("--box: {e}")))?;
    if b.dim() != dim {
        return usage(format!("--box has {} axes, expected {dim}", b.dim()));
    }
    if !b.is_bounded() {
        return usage("--box must be bounded");
    }
    Ok(Some(b))
}

fn field_spec(args: &FieldArgs) -> CliResult<FieldSpec> {
    if let Some(text) = &args.field {
        let mut spec: FieldSpec =
            serde_json::from_value(load_json(text)?).map_err(|e| CliError::Usage(format!("--field: {e}")))?;
        spec.complex |= args.complex;
        return Ok(spec);
    }
    let (Some(expr), Some(dim)) = (&args.expr, args.dim) else {
        return usage("give --expr with --dim, or --field");
    };
    Ok(FieldSpec {
        dim,
        expr: expr.clone(),
        bounds: None,
        smooth: None,
        complex: args.complex,
    })
}

fn budget(b: &BudgetArgs, tol: f64) -> WitnessBudget {
    WitnessBudget {
        slices: b.slices,
        boundary_samples: b.boundary_samples,
        interior_samples: b.interior_samples,
        tol,
        ..WitnessBudget::default()
    }
}

fn grid(bounds: &DomainBox, resolution: usize) -> CliResult<GridSpec> {
    if resolution < 2 {
        return usage("--resolution must be at least 2");
    }
    Ok(GridSpec::uniform(bounds.clone(), resolution)?)
}

fn axis_names(n: usize, complex: bool) -> Vec<String> {
    if complex {
        let m = n / 2;
        (1..=m)
            .map(|i| format!("x{i}"))
            .chain((1..=m).map(|i| format!("y{i}")))
            .collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn sample(f: &ScalarField, grid: &GridSpec, complex: bool) -> Samples {
    let mut header = axis_names(grid.dim(), complex);
    header.push("value".into());
    let rows = grid
        .points()
        .map(|p| {
            let v = f.eval(&p).ok();
            (p, v)
        })
        .collect();
    Samples { header, rows }
}

fn index_summary(r: &QIndexReport) -> Vec<String> {
    vec![
        format!("field: {}", r.field),
        format!("points: {} (failed: {})", r.points, r.failures),
        format!(
            "strict index: {}",
            r.strict_index.map_or("n/a".to_string(), |i| i.to_string())
        ),
    ]
}

fn index_result(r: &QIndexReport) -> Value {
    json!({
        "kind": r.kind,
        "q_index": r.q_index,
        "strict_index": r.strict_index,
        "points": r.points,
        "failures": r.failures,
        "grid": r.grid,
    })
}

pub fn classify(field: &FieldArgs, resolution: usize, common: &Common) -> CliResult<Outcome> {
    let spec = field_spec(field)?;
    let f = spec.build()?;
    let n = f.dim();
    let bounds = parse_box(field.bounds.as_deref(), n)?.unwrap_or_else(|| DomainBox::cube(n, -1.0, 1.0));
    let g = grid(&bounds, resolution)?;
    let report = if spec.complex {
        qpsh_index_on_grid(&f, &g, common.tol)?
    } else {
        classify_on_grid(&f, &g, common.tol)?
    };
    let Some(q_index) = report.q_index else {
        return Err(CliError::Numeric("no grid point could be classified".into()));
    };
    let mut config = RunConfig::new(common);
    config.field = Some(spec.clone());
    config.bounds = Some(bounds);
    config.resolution = Some(resolution);
    let mut out = Report::new("classify", config.to_value(), index_result(&report));
    if common.records {
        out = out.with_records(to_value(&report.records));
    }
    let mut summary = index_summary(&report);
    summary.insert(
        1,
        format!("kind: {}", if spec.complex { "levi" } else { "real_hessian" }),
    );
    summary.push("q-index:".into());
    Ok(Outcome {
        report: out,
        summary,
        answer: q_index.to_string(),
        samples: common.csv.as_ref().map(|_| sample(&f, &g, spec.complex)),
    })
}

pub fn witness(field: &FieldArgs, q: usize, b: &BudgetArgs, resolution: usize, common: &Common) -> CliResult<Outcome> {
    let spec = field_spec(field)?;
    if spec.complex {
        return usage("witness search works on real fields; drop --complex");
    }
    let f = spec.build()?;
    let n = f.dim();
    let bounds = parse_box(field.bounds.as_deref(), n)?.unwrap_or_else(|| DomainBox::cube(n, -1.0, 1.0));
    let budget = budget(b, common.tol);
    let outcome = witness_search(&f, q, &bounds, &budget, common.seed)?;
    let mut config = RunConfig::new(common);
    config.field = Some(spec);
    config.q = Some(q);
    config.bounds = Some(bounds.clone());
    config.budget = Some(budget);
    let verdict = if outcome.trivial {
        "trivial"
    } else if outcome.witness.is_some() {
        "witness"
    } else {
        "none"
    };
    let mut summary = vec![
        format!("field: {} at level q={q}", f.id()),
        format!(
            "balls examined: {} (skipped: {})",
            outcome.balls_examined, outcome.balls_skipped
        ),
    ];
    let answer = match &outcome.witness {
        Some(w) => {
            summary.push(format!(
                "violation at {:?}: u={:.6e} > l={:.6e}",
                w.ambient_point, w.u_value, w.l_value
            ));
            format!("witness margin={:.6e}", w.margin)
        }
        None if outcome.trivial => "none (q >= n)".to_string(),
        None => "none".to_string(),
    };
    let result = json!({ "verdict": verdict, "search": outcome });
    let samples = match &common.csv {
        Some(_) => Some(sample(&f, &grid(&bounds, resolution)?, false)),
        None => None,
    };
    Ok(Outcome {
        report: Report::new("witness", config.to_value(), result),
        summary,
        answer,
        samples,
    })
}

fn load_set(args: &SetArgs) -> CliResult<(OpenSetModel, Value, DomainBox)> {
    let raw = load_json(&args.set)?;
    let set = OpenSetModel::from_json(&raw)?;
    let n = set.dim();
    let bounds = match parse_box(args.bounds.as_deref(), n)? {
        Some(b) => b,
        None => {
            let bb = set.bbox();
            let clipped = bb.intersect(&DomainBox::cube(n, -1.0, 1.0));
            match clipped {
                Some(c) => c,
                None if bb.is_bounded() => bb,
                None => return usage("the set misses [-1,1]^n; pass --box"),
            }
        }
    };
    Ok((set.clone(), set.to_json(), bounds))
}

fn verdict_name(v: SetVerdict) -> &'static str {
    match v {
        SetVerdict::Consistent => "consistent",
        SetVerdict::NotQConvex => "not_q_convex",
        SetVerdict::Trivial => "trivial",
    }
}

pub fn set_check(args: &SetArgs, q: usize, b: &BudgetArgs, resolution: usize, common: &Common) -> CliResult<Outcome> {
    let (set, set_json, bounds) = load_set(args)?;
    let budget = budget(b, common.tol);
    let report = set_q_convex_check(&set, q, &bounds, &budget, common.seed)?;
    let mut config = RunConfig::new(common);
    config.set = Some(set_json);
    config.q = Some(q);
    config.bounds = Some(bounds.clone());
    config.budget = Some(budget);
    let verdict = verdict_name(report.verdict);
    let mut summary = vec![
        format!("set in R^{} at level q={q}", set.dim()),
        format!(
            "balls examined: {} (skipped: {})",
            report.search.balls_examined, report.search.balls_skipped
        ),
    ];
    if let Some(w) = &report.search.witness {
        summary.push(format!("witness at {:?}, margin {:.6e}", w.ambient_point, w.margin));
    }
    let samples = match &common.csv {
        Some(_) => {
            let f = neg_log_dist_field(&set, DistanceKind::Euclid)?;
            Some(sample(&f, &grid(&bounds, resolution)?, false))
        }
        None => None,
    };
    Ok(Outcome {
        report: Report::new(
            "set-check",
            config.to_value(),
            json!({ "verdict": verdict, "check": report }),
        ),
        summary,
        answer: verdict.to_string(),
        samples,
    })
}

fn parse_half_width(a: &str) -> CliResult<f64> {
    match a.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
        s => match s.parse::<f64>() {
            Ok(v) if v > 0.0 => Ok(v),
            _ => usage(format!("--a must be a positive number or inf, got '{a}'")),
        },
    }
}

pub fn tube(
    args: &SetArgs,
    a: &str,
    q: usize,
    b: &BudgetArgs,
    resolution: usize,
    common: &Common,
) -> CliResult<Outcome> {
    let (set, set_json, bounds) = load_set(args)?;
    let a = parse_half_width(a)?;
    let n = set.dim();
    let w = 0.9 * a.min(1.0);
    let full = bounds.product(&DomainBox::cube(n, -w, w));
    let g = grid(&full, resolution)?;
    let t = TubeSpec::new(set, a)?;
    let budget = budget(b, common.tol);
    let report = tube_pseudoconvexity_check(&t, q, &g, common.tol, &bounds, &budget, common.seed)?;
    let mut config = RunConfig::new(common);
    config.set = Some(set_json);
    config.q = Some(q);
    config.bounds = Some(bounds);
    config.resolution = Some(resolution);
    config.budget = Some(budget);
    config.options = json!({ "a": if a.is_finite() { json!(a) } else { json!("inf") }, "imag_window": w });
    let verdict = if report.q_pseudoconvex {
        "consistent"
    } else {
        "violation"
    };
    let summary = vec![
        format!("tube over a set in R^{n}, half-width {a}, level q={q}"),
        format!(
            "grid: {} nodes, {} outside, {} kinks skipped, {} near the boundary, {} failed",
            report.points, report.non_members, report.skipped_kinks, report.skipped_edge, report.failures
        ),
        format!(
            "Levi index: {}",
            report.levi_index.map_or("n/a".to_string(), |i| i.to_string())
        ),
        format!(
            "base set check: {} (agrees: {})",
            verdict_name(report.set_check.verdict),
            report.agree
        ),
    ];
    let samples = common.csv.as_ref().map(|_| sample(&t.neg_log_dist(), &g, true));
    Ok(Outcome {
        report: Report::new(
            "tube",
            config.to_value(),
            json!({ "verdict": verdict, "check": report }),
        ),
        summary,
        answer: verdict.to_string(),
        samples,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn reinhardt(
    expr: &str,
    dim: usize,
    domain: Option<&str>,
    bounds: Option<&str>,
    resolution: usize,
    common: &Common,
) -> CliResult<Outcome> {
    let domain = parse_box(domain, dim)?.unwrap_or_else(|| DomainBox::cube(dim, -1.0, 1.0));
    let u = ScalarField::from_expr(expr, dim)?.with_domain(domain.clone())?;
    let bounds = parse_box(bounds, 2 * dim)?.unwrap_or_else(|| DomainBox::cube(2 * dim, -2.0, 2.0));
    let g = grid(&bounds, resolution)?;
    let report = check_reinhardt(&u, &g, common.tol)?;
    let mut config = RunConfig::new(common);
    config.field = Some(FieldSpec {
        dim,
        expr: expr.to_string(),
        bounds: Some(domain),
        smooth: None,
        complex: false,
    });
    config.bounds = Some(bounds);
    config.resolution = Some(resolution);
    let summary = vec![
        format!("pullback of {} to C^{dim}", u.id()),
        format!(
            "compared {} nodes, {} agree; skipped {}, failed {}",
            report.compared, report.agreeing, report.skipped, report.failures
        ),
        format!(
            "real index {}, Levi index {}",
            report.real_index.map_or("n/a".into(), |i| i.to_string()),
            report.levi_index.map_or("n/a".into(), |i| i.to_string())
        ),
    ];
    let samples = common.csv.as_ref().map(|_| sample(&reinhardt_pullback(&u), &g, true));
    Ok(Outcome {
        answer: format!("agreement {:.4}", report.fraction),
        report: Report::new("reinhardt", config.to_value(), to_value(&report)),
        summary,
        samples,
    })
}

fn parse_point(text: Option<&str>, n: usize, fill: f64) -> CliResult<Vec<f64>> {
    let Some(text) = text else { return Ok(vec![fill; n]) };
    let p: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad point '{text}': {e}")))?;
    if p.len() != n {
        return usage(format!("point '{text}' needs {n} coordinates"));
    }
    Ok(p)
}

/// Signed gap `f_j(x(t)) - chord_j(t)` of largest magnitude over a scan of
/// `(-1, 1)`, as `(t, gap)`.
fn strongest_gap(map: &GraphMap, j: usize, x1: &[f64], x2: &[f64]) -> CliResult<(f64, f64)> {
    let f = &map.f[j];
    let (fa, fb) = (f.eval(x1).map_err(Error::from)?, f.eval(x2).map_err(Error::from)?);
    let mut hi = (0.0, f64::NEG_INFINITY);
    let mut lo = (0.0, f64::INFINITY);
    for i in 1..200 {
        let t = -1.0 + i as f64 / 100.0;
        let x: Vec<f64> = x1
            .iter()
            .zip(x2)
            .map(|(a, b)| (1.0 - t) / 2.0 * a + (1.0 + t) / 2.0 * b)
            .collect();
        let gap = f.eval(&x).map_err(Error::from)? - ((1.0 - t) / 2.0 * fa + (1.0 + t) / 2.0 * fb);
        if gap > hi.1 {
            hi = (t, gap);
        }
        if gap < lo.1 {
            lo = (t, gap);
        }
    }
    Ok(if hi.1.abs() >= lo.1.abs() { hi } else { lo })
}

#[allow(clippy::too_many_arguments)]
pub fn graph_demo(
    f: &[String],
    dim: usize,
    k: Option<usize>,
    x1: Option<&str>,
    x2: Option<&str>,
    t0: Option<f64>,
    t_steps: usize,
    s_steps: usize,
    common: &Common,
) -> CliResult<Outcome> {
    if let Some(k) = k {
        if k != f.len() {
            return usage(format!("--k {k} but {} components given", f.len()));
        }
    }
    let sources: Vec<&str> = f.iter().map(String::as_str).collect();
    let map = GraphMap::parse(dim, &sources)?;
    let x1 = parse_point(x1, dim, -1.0)?;
    let x2 = parse_point(x2, dim, 1.0)?;

    // The lifted component goes first; pick the one with the largest gap.
    let mut best: (usize, f64, f64) = (0, 0.0, 0.0);
    for j in 0..map.k() {
        let (t, gap) = strongest_gap(&map, j, &x1, &x2)?;
        if gap.abs() > best.2.abs() {
            best = (j, t, gap);
        }
    }
    let (j, scanned_t, gap) = best;
    let mut order: Vec<usize> = (0..map.k()).collect();
    order.swap(0, j);
    let permuted = GraphMap {
        n: dim,
        f: order.iter().map(|&i| map.f[i].clone()).collect(),
    };
    let tol = 1e-12 * x1.iter().chain(&x2).fold(1.0_f64, |m, c| m.max(c.abs()));
    let t0 = t0.unwrap_or(if gap.abs() <= tol { 0.0 } else { scanned_t });
    let (fam, kind) = match graph_complement_family(&permuted, &x1, &x2, t0) {
        Ok(fam) => (fam, "sweep onto graph"),
        Err(Error::Precondition(_)) if gap.abs() <= tol => (
            graph_family_with_offset(&permuted, &x1, &x2, t0, 1.0, 1.0)?,
            "offset sweep (f affine along the chord)",
        ),
        Err(e) => return Err(e.into()),
    };
    let set = OpenSetModel::GraphComplement(permuted);
    let verdict = continuity_principle_test(&set, &fam, t_steps, s_steps)?;
    let unpermute = |p: &[f64]| -> Vec<f64> {
        let mut out = p.to_vec();
        for (slot, &orig) in order.iter().enumerate() {
            out[dim + orig] = p[dim + slot];
        }
        out
    };
    let mut summary = vec![
        format!("graph of f: R^{dim} -> R^{} ({kind})", map.k()),
        format!("lifted component f{}, chord {:?} -> {:?}, t0 = {t0}", j + 1, x1, x2),
    ];
    let (answer, residual, verdict_json) = match &verdict {
        ContinuityVerdict::Violated { t, point, s, trace } => {
            let point = unpermute(point);
            let res = map
                .eval(&point[..dim])
                .map_err(Error::from)?
                .iter()
                .zip(&point[dim..])
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            summary.push(format!("A_1 leaves the set at {point:?} (graph residual {res:.3e})"));
            (
                format!("violated t={t}"),
                Some(res),
                json!({ "verdict": "violated", "t": t, "point": point, "s": s, "trace": trace }),
            )
        }
        ContinuityVerdict::Holds { .. } => ("holds".to_string(), None, to_value(&verdict)),
        ContinuityVerdict::Inapplicable { reason } => {
            summary.push(reason.clone());
            ("inapplicable".to_string(), None, to_value(&verdict))
        }
    };
    let mut config = RunConfig::new(common);
    config.options = json!({
        "f": f, "dim": dim, "x1": x1, "x2": x2, "t0": t0, "t_steps": t_steps, "s_steps": s_steps,
    });
    let result = json!({
        "family": fam.label,
        "lifted_component": j + 1,
        "continuity": verdict_json,
        "graph_residual": residual,
    });
    Ok(Outcome {
        report: Report::new("graph-demo", config.to_value(), result),
        summary,
        answer,
        samples: None,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn regularize(
    field: &FieldArgs,
    radius: f64,
    profile: Profile,
    k: u32,
    resolution: usize,
    stride: usize,
    common: &Common,
) -> CliResult<Outcome> {
    let spec = field_spec(field)?;
    if spec.complex {
        return usage("regularize works on real fields; drop --complex");
    }
    let u = spec.build()?;
    let n = u.dim();
    let bounds = parse_box(field.bounds.as_deref(), n)?.unwrap_or_else(|| DomainBox::cube(n, -1.0, 1.0));
    let g = grid(&bounds, resolution)?;
    let kernel = KernelSpec::new(
        radius,
        match profile {
            Profile::Polynomial => KernelProfile::Polynomial,
            Profile::Bump => KernelProfile::Bump,
        },
    )?;
    let input = classify_on_grid(&u, &g, common.tol)?;
    let values: Vec<f64> = g
        .points()
        .map(|p| u.eval(&p))
        .collect::<Result<_, _>>()
        .map_err(Error::from)?;
    // Sup-convolution needs u >= 0; constants do not change the index.
    let lowest = values.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = if lowest < 0.0 { 1.0 - lowest } else { 0.0 };
    let shifted = GridField::new(g.clone(), values.iter().map(|v| v + shift).collect())?;
    let conv = sup_convolve_detailed(&shifted, &kernel, None)?;
    let mask = conv.stable_mask(stride);
    let output = grid_q_index(&conv.field, stride, common.tol, Some(&mask))?;
    let approx = approximate_from_above(&u, &g, k, &kernel)?;

    let mut config = RunConfig::new(common);
    config.field = Some(spec);
    config.bounds = Some(bounds);
    config.resolution = Some(resolution);
    config.options = json!({ "kernel": kernel, "k": k, "stride": stride });
    let kinks = mask.iter().filter(|m| !**m).count();
    let summary = vec![
        format!("field: {}", u.id()),
        format!(
            "input q-index {}, output grid {:?}, {} nodes masked as kinks or edges",
            input.q_index.map_or("n/a".into(), |i| i.to_string()),
            conv.field.grid.resolution,
            kinks
        ),
        format!(
            "approximation from above: min margin {:.6e}, max gap {:.6e}",
            approx.min_margin, approx.max_upper_gap
        ),
        "output q-index:".into(),
    ];
    let result = json!({
        "input_q_index": input.q_index,
        "output": index_result(&output),
        "shift": shift,
        "masked_nodes": kinks,
        "approximation": { "k": approx.k, "min_margin": approx.min_margin, "max_upper_gap": approx.max_upper_gap },
    });
    let samples = common.csv.as_ref().map(|_| {
        let grid = &conv.field.grid;
        Samples {
            header: axis_names(n, false).into_iter().chain(["value".to_string()]).collect(),
            rows: (0..grid.len())
                .map(|i| (grid.point(i), Some(conv.field.values[i] - shift)))
                .collect(),
        }
    });
    let answer = output.q_index.map_or("n/a".into(), |i| i.to_string());
    let mut report = Report::new("regularize", config.to_value(), result);
    if common.records {
        report = report.with_records(to_value(&output.records));
    }
    Ok(Outcome {
        report,
        summary,
        answer,
        samples,
    })
}
