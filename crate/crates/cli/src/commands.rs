use crate::input::{cover, cover_from_id, json_arg, level_range};
use crate::{Failure, Report, RunConfig};
use clap::{Args, ValueEnum};
use flatcoh::classify::{
    blowup9_profile, neighborhood_profile, theorem_main_profile, toroidal_classify, Blowup9Spec, SurfaceSpec,
    ToroidalSpec,
};
use flatcoh::cover::{transitions, ueda_bounds, UedaOptions};
use flatcoh::pic0::{ComplexJson, FlatLineBundle};
use flatcoh::series::{
    build_laurent_witness, build_taylor_witness, denominator_budget, radius_verdict, read_cocycle, solve_formal,
    write_cocycle, write_solution, Content, FormalHeader, MIN_LEVELS,
};
use flatcoh::{cf_convergents, classify_growth, Error, GrowthSource, Schedule, ThetaSpec};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::BufReader;

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Io(e.to_string()))
}

fn csv_text<R: Serialize>(rows: &[R]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct ThetaArgs {
    /// ThetaSpec JSON, e.g. '{"kind":"rational","num":1,"den":3}'.
    #[arg(long)]
    theta: Option<String>,
    /// `(a + b sqrt(d)) / c`.
    #[arg(long, num_args = 4, value_names = ["A", "B", "C", "D"], allow_negative_numbers = true)]
    quadratic: Option<Vec<i64>>,
    #[arg(long, num_args = 2, value_names = ["NUM", "DEN"], allow_negative_numbers = true)]
    rational: Option<Vec<i64>>,
    /// The asymptotically-zero number of the default schedule.
    #[arg(long)]
    az: bool,
}

impl ThetaArgs {
    fn spec(&self) -> Result<ThetaSpec, Failure> {
        if let Some(raw) = &self.theta {
            return json_arg("theta", raw);
        }
        if let Some(q) = &self.quadratic {
            let qi = flatcoh::diophantine::QuadraticIrrational::new(q[0], q[1], q[2], q[3])
                .map_err(|e| Failure::Usage(e.to_string()))?;
            return Ok(ThetaSpec::Quadratic(qi));
        }
        if let Some(r) = &self.rational {
            return ThetaSpec::rational(r[0], r[1]).map_err(|e| Failure::Usage(e.to_string()));
        }
        Ok(ThetaSpec::az_default())
    }
}

#[derive(Serialize)]
struct ConvergentRow {
    k: usize,
    a: String,
    p: String,
    q: String,
    beta_lo: f64,
    beta_hi: f64,
}

pub fn classify_theta(a: &ThetaArgs, cfg: &RunConfig) -> Result<Report, Failure> {
    let theta = a.spec()?;
    let prec = cfg.prec();
    let v = classify_growth(&GrowthSource::single(theta.clone()), cfg.horizon, &prec)?;
    let json = json!({
        "theta": to_value(&theta)?,
        "label": v.label,
        "certificate": v.certificate,
        "exponent": v.exponent,
        "horizon": v.horizon,
    });
    // as many convergents as the expansion certifies
    let mut convs = Vec::new();
    for k in (1..=cfg.horizon).rev() {
        if let Ok(c) = cf_convergents(&theta, k, &prec) {
            convs = c;
            break;
        }
    }
    let rows: Vec<ConvergentRow> = convs
        .iter()
        .map(|c| ConvergentRow {
            k: c.index,
            a: c.a.to_string(),
            p: c.p.to_string(),
            q: c.q.to_string(),
            beta_lo: c.beta.lo,
            beta_hi: c.beta.hi,
        })
        .collect();
    Ok(Report { json, csv: Some(csv_text(&rows)?) })
}

#[derive(Args, Debug)]
pub struct BundleCaseArgs {
    /// FlatLineBundle JSON, e.g. '{"p":0,"q":{"kind":"quadratic","a":-1,"b":1,"c":2,"d":5}}'.
    #[arg(long)]
    bundle: String,
}

pub fn bundle_case(a: &BundleCaseArgs, cfg: &RunConfig) -> Result<Report, Failure> {
    let f: FlatLineBundle = json_arg("bundle", &a.bundle)?;
    let prec = cfg.prec();
    let v = f.case_label(cfg.horizon, &prec)?;
    let d = f.distance_to_trivial(&prec)?;
    let (torsion, order) = f.is_torsion();
    let row = if torsion { Value::Null } else { to_value(&neighborhood_profile(&f, cfg.horizon, &prec)?)? };
    let json = json!({
        "bundle": to_value(&f)?,
        "label": v.label,
        "certificate": v.certificate,
        "exponent": v.exponent,
        "horizon": v.horizon,
        "torsion_order": order.map(|o| o.to_string()),
        "distance": d,
        "table1_row": row,
    });
    Ok(Report { json, csv: None })
}

#[derive(Args, Debug)]
pub struct UedaArgs {
    #[arg(long)]
    grid: Option<usize>,
    /// Nerve JSON (inline or file).
    #[arg(long)]
    nerve: Option<String>,
    #[arg(long)]
    bundle: String,
    /// Twist exponents, `A..B` inclusive; defaults to `1..horizon`.
    #[arg(long, allow_hyphen_values = true)]
    levels: Option<String>,
    /// Hill-climb steps after the minimax start.
    #[arg(long, default_value_t = 4000)]
    iterations: usize,
}

#[derive(Serialize)]
struct UedaRow {
    n: i64,
    d: f64,
    k_lower: f64,
    k_upper: f64,
    sigma_min: f64,
    route: flatcoh::cover::SigmaRoute,
}

#[derive(Serialize)]
struct UedaCsvRow {
    n: i64,
    d: f64,
    #[serde(rename = "K_lower")]
    k_lower: f64,
    #[serde(rename = "K_upper")]
    k_upper: f64,
}

pub fn ueda(a: &UedaArgs, cfg: &RunConfig) -> Result<Report, Failure> {
    let (c, id) = cover(a.grid, a.nerve.as_deref(), 4)?;
    let f: FlatLineBundle = json_arg("bundle", &a.bundle)?;
    let range = match &a.levels {
        Some(r) => level_range(r)?,
        None => 1..=cfg.horizon as i64,
    };
    let prec = cfg.prec();
    let opts = UedaOptions { iterations: a.iterations, seed: cfg.seed };
    let mut rows = Vec::new();
    for n in range {
        let big = BigInt::from(n);
        let cx = transitions(&c, &f, &big, &prec)?;
        let b = ueda_bounds(&cx, &opts)?;
        let d = f.power_big(&big).distance_to_trivial(&prec)?.mid();
        rows.push(UedaRow { n, d, k_lower: b.k_lower, k_upper: b.k_upper, sigma_min: b.sigma_min, route: b.route });
    }
    let csv_rows: Vec<UedaCsvRow> =
        rows.iter().map(|r| UedaCsvRow { n: r.n, d: r.d, k_lower: r.k_lower, k_upper: r.k_upper }).collect();
    let json = json!({
        "cover": id,
        "bundle": to_value(&f)?,
        "seed": cfg.seed,
        "iterations": a.iterations,
        "rows": to_value(&rows)?,
    });
    Ok(Report { json, csv: Some(csv_text(&csv_rows)?) })
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Cocycle file: JSON header line, then `level,id,re,im` rows.
    #[arg(long)]
    input: std::path::PathBuf,
    /// Overrides the cover named in the header.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    nerve: Option<String>,
}

#[derive(Serialize)]
struct SolvedLevel {
    level: i64,
    m: f64,
    g_norm: f64,
    k_upper: f64,
    residual: f64,
    estimate_holds: bool,
}

pub fn solve_cocycle(a: &SolveArgs, cfg: &RunConfig) -> Result<Report, Failure> {
    let file = std::fs::File::open(&a.input).map_err(|e| Failure::Usage(format!("{}: {e}", a.input.display())))?;
    let (header, g) = read_cocycle(BufReader::new(file)).map_err(|e| match e {
        Error::InvalidInput(m) => Failure::Usage(format!("{}: {m}", a.input.display())),
        e => Failure::Lib(e),
    })?;
    let (c, id) = if a.grid.is_some() || a.nerve.is_some() {
        cover(a.grid, a.nerve.as_deref(), 4)?
    } else {
        (cover_from_id(&header.cover)?, header.cover.clone())
    };
    let prec = cfg.prec();
    let sol = solve_formal(&c, &header.bundle, &g, &prec)?;
    let levels: Vec<SolvedLevel> = sol
        .levels()
        .iter()
        .map(|(&level, s)| SolvedLevel {
            level,
            m: s.m,
            g_norm: s.g_norm,
            k_upper: s.k_upper,
            residual: s.residual,
            estimate_holds: s.estimate_holds(),
        })
        .collect();
    let radius = if sol.levels().len() >= MIN_LEVELS {
        to_value(&radius_verdict(sol.direction(), &sol.norms())?)?
    } else {
        Value::Null
    };
    let json = json!({
        "cover": id,
        "bundle": to_value(&header.bundle)?,
        "direction": header.direction,
        "levels": to_value(&levels)?,
        "estimate_violations": sol.estimate_violations(),
        "radius": radius,
    });
    let out_header = FormalHeader { cover: id, content: Content::Solution, ..header };
    let mut buf = Vec::new();
    write_solution(&mut buf, &out_header, &sol)?;
    let csv = String::from_utf8(buf).map_err(|e| Failure::Io(e.to_string()))?;
    Ok(Report { json, csv: Some(csv) })
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum DirectionArg {
    Taylor,
    Laurent,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(long, value_enum, default_value_t = DirectionArg::Taylor)]
    direction: DirectionArg,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    nerve: Option<String>,
    /// Defaults to `(0, theta_az)` with the default schedule.
    #[arg(long)]
    bundle: Option<String>,
    /// Taylor growth rate `R > 1`.
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    /// Laurent schedule JSON; defaults to `R_nu = nu + 1`.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long, default_value_t = 3)]
    lambda_max: u32,
    /// Largest `|n|` scanned.
    #[arg(long, conflicts_with = "denominators")]
    budget: Option<u64>,
    /// Budget `q_K` of the asymptotically-zero component; used when that component exists.
    #[arg(long, default_value_t = 3)]
    denominators: usize,
    #[arg(long, default_value_t = 4000)]
    iterations: usize,
    /// Also write the witness cocycle (every selected level) to this file.
    #[arg(long)]
    cocycle_out: Option<std::path::PathBuf>,
}

#[derive(Serialize)]
struct WitnessCsvRow {
    level: i64,
    max_f: f64,
    #[serde(rename = "R_pow_n")]
    r_pow_n: f64,
    pass: bool,
}

fn default_budget(f: &FlatLineBundle, a: &WitnessArgs, cfg: &RunConfig) -> Result<u64, Failure> {
    if let Some(b) = a.budget {
        return Ok(b);
    }
    let az = [&f.q, &f.p].into_iter().find_map(|s| match s.collapse() {
        Some(t @ ThetaSpec::Az(_)) => Some(t),
        _ => None,
    });
    match az {
        Some(t) => Ok(denominator_budget(&t, a.denominators, &cfg.prec())?),
        None => Ok(cfg.horizon as u64),
    }
}

pub fn witness(a: &WitnessArgs, cfg: &RunConfig) -> Result<Report, Failure> {
    let (c, id) = cover(a.grid, a.nerve.as_deref(), 4)?;
    let f: FlatLineBundle = match &a.bundle {
        Some(raw) => json_arg("bundle", raw)?,
        None => FlatLineBundle::standard(ThetaSpec::integer(0), ThetaSpec::az_default()),
    };
    let budget = default_budget(&f, a, cfg)?;
    let prec = cfg.prec();
    let opts = UedaOptions { iterations: a.iterations, seed: cfg.seed };
    let w = match a.direction {
        DirectionArg::Taylor => build_taylor_witness(&c, &f, a.r, a.lambda_max, budget, &opts, &prec)?,
        DirectionArg::Laurent => {
            let schedule: Schedule = match &a.schedule {
                Some(raw) => json_arg("schedule", raw)?,
                None => Schedule::default(),
            };
            build_laurent_witness(&c, &f, schedule, a.lambda_max, budget, &opts, &prec)?
        }
    };
    if let Some(path) = &a.cocycle_out {
        let header =
            FormalHeader { cover: id.clone(), bundle: f.clone(), direction: w.direction, content: Content::Cocycle };
        let file = std::fs::File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        write_cocycle(std::io::BufWriter::new(file), &header, &w.cocycle(None))?;
    }
    let cert = w.certificate();
    let rows: Vec<WitnessCsvRow> = cert
        .levels
        .iter()
        .map(|l| WitnessCsvRow { level: l.level, max_f: l.max_f, r_pow_n: l.threshold, pass: l.pass })
        .collect();
    let json = json!({
        "cover": id,
        "bundle": to_value(&f)?,
        "budget": budget,
        "supports_disjoint": w.supports_disjoint(),
        "certificate": to_value(&cert)?,
        "scan": to_value(&w.scan)?,
    });
    Ok(Report { json, csv: Some(csv_text(&rows)?) })
}

#[derive(Args, Debug)]
pub struct ToroidalArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Complex JSON `{"re":..,"im":..}`.
    #[arg(long, default_value = r#"{"re":0,"im":1}"#)]
    tau: String,
}

pub fn toroidal(a: &ToroidalArgs, cfg: &RunConfig) -> Result<Report, Failure> {
    let spec = ToroidalSpec { tau: json_arg("tau", &a.tau)?, p: json_arg("p", &a.p)?, q: json_arg("q", &a.q)? };
    let r = toroidal_classify(&spec, cfg.horizon, &cfg.prec())?;
    Ok(Report { json: to_value(&r)?, csv: None })
}

#[derive(Args, Debug)]
pub struct Blowup9Args {
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    #[arg(long, default_value = r#"{"re":0,"im":1}"#)]
    tau: String,
    /// JSON array of eight complex points; all at the origin by default.
    #[arg(long)]
    points: Option<String>,
    /// Base class on the cubic.
    #[arg(long)]
    s0: Option<String>,
}

pub fn blowup9(a: &Blowup9Args, cfg: &RunConfig) -> Result<Report, Failure> {
    let mut spec = Blowup9Spec {
        tau: json_arg("tau", &a.tau)?,
        points: [ComplexJson { re: 0.0, im: 0.0 }; 8],
        theta: json_arg("theta", &a.theta)?,
        s0: ComplexJson { re: 0.0, im: 0.0 },
    };
    if let Some(raw) = &a.points {
        spec.points = json_arg("points", raw)?;
    }
    if let Some(raw) = &a.s0 {
        spec.s0 = json_arg("s0", raw)?;
    }
    let spec = spec.normalized().map_err(|e| Failure::Usage(e.to_string()))?;
    let p = blowup9_profile(&spec, cfg.horizon, &cfg.prec())?;
    Ok(Report { json: to_value(&p)?, csv: None })
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    /// SurfaceSpec JSON: `{"euler_number": e, "components": [{"bundle": .., "degree": 0}]}`.
    #[arg(long)]
    surface: String,
}

pub fn profile(a: &ProfileArgs, cfg: &RunConfig) -> Result<Report, Failure> {
    let spec: SurfaceSpec = json_arg("surface", &a.surface)?;
    let p = theorem_main_profile(&spec, cfg.horizon, &cfg.prec())?;
    Ok(Report { json: to_value(&p)?, csv: None })
}
