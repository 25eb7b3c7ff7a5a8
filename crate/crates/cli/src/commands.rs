use std::fs::{self, File};
use std::io::BufWriter;

use flate2::write::GzEncoder;
use flate2::Compression;
use gelkit::montecarlo::write_component_table;
use gelkit::{
    analyze_gelation_with_rate, asymptote, compare_sizes, component_stats, degree_distribution,
    empirical_degree_check, moments_closed_form, moments_exact, run_ensemble, size_distribution, Assignment,
    DistributionOptions, ExpectedSize, FunctionalityDistribution, MCConfig, MCEnsembleResult, SystemState,
};
use serde_json::{json, Map, Value};

use crate::args::{AssignmentArg, Format, GelCmd, McCmd, MixOpts, OutArgs, SimArgs, SizeCmd, StateCmd, ValidateCmd};
use crate::grid::parse_points;
use crate::output::{emit, fmt_num, num, nums, opt_num, render_json, Table};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn load_mixture(opts: &MixOpts) -> Result<FunctionalityDistribution> {
    let src = match (&opts.source.mix, &opts.source.mix_file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?,
        (None, None) => return Err(CliError::Usage("one of --mix or --mix-file is required".into())),
    };
    let dist_opts = DistributionOptions {
        normalize: opts.normalize,
        ..DistributionOptions::default()
    };
    Ok(FunctionalityDistribution::parse_with(&src, dist_opts)?)
}

#[derive(Clone, Copy, PartialEq)]
enum Axis {
    Conversion,
    Time,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::Conversion => "c",
            Axis::Time => "t",
        }
    }
}

struct Points {
    axis: Axis,
    states: Vec<SystemState>,
}

impl Points {
    fn is_sweep(&self) -> bool {
        self.states.len() > 1
    }

    fn coordinate(&self, s: &SystemState) -> f64 {
        match self.axis {
            Axis::Conversion => s.density(),
            Axis::Time => s.time(),
        }
    }
}

fn load_points(cmd: &StateCmd, f: &FunctionalityDistribution) -> Result<Points> {
    if !(cmd.rate.is_finite() && cmd.rate > 0.0) {
        return Err(CliError::Usage(format!("--rate must be positive, got {}", cmd.rate)));
    }
    let (axis, raw) = match (&cmd.at.conversion, &cmd.at.time) {
        (Some(c), None) => (Axis::Conversion, c),
        (None, Some(t)) => (Axis::Time, t),
        _ => return Err(CliError::Usage("exactly one of --conversion or --time is required".into())),
    };
    let values = parse_points(raw).map_err(CliError::Usage)?;
    let states = values
        .into_iter()
        .map(|x| match axis {
            Axis::Conversion => SystemState::from_density_with_rate(f, x, cmd.rate),
            Axis::Time => SystemState::from_time_with_rate(f, x, cmd.rate),
        })
        .collect::<gelkit::Result<Vec<_>>>()?;
    Ok(Points { axis, states })
}

fn format_of(out: &OutArgs, default: Format) -> Format {
    out.format.unwrap_or(default)
}

fn finish(out: &OutArgs, text: String) -> Result<()> {
    emit(out.out.as_deref(), &text).map_err(|e| CliError::Io("writing output".into(), e))
}

fn header(command: &str, f: &FunctionalityDistribution) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), Value::from(command));
    m.insert(
        "mixture".into(),
        Value::Object(f.iter().map(|(k, v)| (k.to_string(), num(v))).collect()),
    );
    m
}

fn state_json(s: &SystemState) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("c".into(), num(s.density()));
    m.insert("t".into(), num(s.time()));
    m
}

/// Leading columns for per-`n` tables: the swept coordinate, if any.
fn lead_columns(points: &Points, names: &[&str]) -> Vec<String> {
    let mut cols = Vec::new();
    if points.is_sweep() {
        cols.push(points.axis.name().to_string());
    }
    cols.extend(names.iter().map(|s| s.to_string()));
    cols
}

fn lead_cells(points: &Points, s: &SystemState) -> Vec<String> {
    if points.is_sweep() {
        vec![fmt_num(points.coordinate(s))]
    } else {
        Vec::new()
    }
}

pub fn degree(cmd: &StateCmd) -> Result<()> {
    let f = load_mixture(&cmd.mix)?;
    let points = load_points(cmd, &f)?;
    let text = match format_of(&cmd.out, Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(lead_columns(&points, &["n", "u"]));
            for s in &points.states {
                let dd = degree_distribution(&f, s);
                for (n, &u) in dd.marginal().iter().enumerate() {
                    let mut row = lead_cells(&points, s);
                    row.extend([n.to_string(), fmt_num(u)]);
                    t.row(row);
                }
            }
            t.render()
        }
        Format::Json => {
            let mut top = header("degree", &f);
            let pts: Vec<Value> = points
                .states
                .iter()
                .map(|s| {
                    let dd = degree_distribution(&f, s);
                    let mut p = state_json(s);
                    p.insert("u".into(), nums(dd.marginal()));
                    let joint: Map<String, Value> = dd.rows().map(|(m, row)| (m.to_string(), nums(row))).collect();
                    p.insert("joint".into(), Value::Object(joint));
                    Value::Object(p)
                })
                .collect();
            top.insert("points".into(), Value::Array(pts));
            render_json(&Value::Object(top))
        }
    };
    finish(&cmd.out, text)
}

pub fn moments(cmd: &StateCmd) -> Result<()> {
    let f = load_mixture(&cmd.mix)?;
    let points = load_points(cmd, &f)?;
    let mut rows = Vec::new();
    for s in &points.states {
        let exact = moments_exact(&degree_distribution(&f, s));
        let closed = if s.time().is_finite() { Some(moments_closed_form(&f, s)?) } else { None };
        rows.push((s, exact, closed));
    }
    let text = match format_of(&cmd.out, Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(["c", "t", "mu1", "mu2", "mu3", "mu1_closed", "mu2_closed", "mu3_legacy"]);
            for (s, e, cf) in &rows {
                let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
                t.row(vec![
                    fmt_num(s.density()),
                    fmt_num(s.time()),
                    fmt_num(e.mu1),
                    fmt_num(e.mu2),
                    fmt_num(e.mu3),
                    opt(cf.map(|c| c.mu1)),
                    opt(cf.map(|c| c.mu2)),
                    opt(cf.map(|c| c.mu3_legacy)),
                ]);
            }
            t.render()
        }
        Format::Json => {
            let mut top = header("moments", &f);
            let pts: Vec<Value> = rows
                .iter()
                .map(|(s, e, cf)| {
                    let mut p = state_json(s);
                    p.insert("mu1".into(), num(e.mu1));
                    p.insert("mu2".into(), num(e.mu2));
                    p.insert("mu3".into(), num(e.mu3));
                    p.insert("mu1_closed".into(), opt_num(cf.map(|c| c.mu1)));
                    p.insert("mu2_closed".into(), opt_num(cf.map(|c| c.mu2)));
                    p.insert("mu3_legacy".into(), opt_num(cf.map(|c| c.mu3_legacy)));
                    Value::Object(p)
                })
                .collect();
            top.insert("points".into(), Value::Array(pts));
            render_json(&Value::Object(top))
        }
    };
    finish(&cmd.out, text)
}

pub fn gel(cmd: &GelCmd) -> Result<()> {
    let f = load_mixture(&cmd.mix)?;
    if !(cmd.rate.is_finite() && cmd.rate > 0.0) {
        return Err(CliError::Usage(format!("--rate must be positive, got {}", cmd.rate)));
    }
    let g = analyze_gelation_with_rate(&f, cmd.rate);
    let text = match format_of(&cmd.out, Format::Json) {
        Format::Csv => {
            let mut t = Table::new(["gels", "t_gel", "c_gel", "criterion"]);
            t.row(vec![
                g.gels_in_finite_time.to_string(),
                fmt_num(g.t_gel),
                g.c_gel.map(fmt_num).unwrap_or_default(),
                fmt_num(g.criterion_value),
            ]);
            t.render()
        }
        Format::Json => {
            let mut top = header("gel", &f);
            top.insert("gels".into(), Value::Bool(g.gels_in_finite_time));
            top.insert("t_gel".into(), num(g.t_gel));
            top.insert("c_gel".into(), opt_num(g.c_gel));
            top.insert("criterion".into(), num(g.criterion_value));
            top.insert("rate".into(), num(cmd.rate));
            render_json(&Value::Object(top))
        }
    };
    finish(&cmd.out, text)
}

pub fn sizedist(cmd: &SizeCmd) -> Result<()> {
    let f = load_mixture(&cmd.state.mix)?;
    let points = load_points(&cmd.state, &f)?;
    let n_max = cmd.size.nmax as usize;
    let dists = points
        .states
        .iter()
        .map(|s| size_distribution(&degree_distribution(&f, s), n_max, cmd.size.method.into()))
        .collect::<gelkit::Result<Vec<_>>>()?;
    let text = match format_of(&cmd.state.out, Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(lead_columns(&points, &["n", "w"]));
            for (s, sd) in points.states.iter().zip(&dists) {
                for (n, w) in sd.iter() {
                    let mut row = lead_cells(&points, s);
                    row.extend([n.to_string(), fmt_num(w)]);
                    t.row(row);
                }
            }
            t.render()
        }
        Format::Json => {
            let mut top = header("sizedist", &f);
            top.insert("method".into(), Value::from(gelkit::Method::from(cmd.size.method).name()));
            top.insert("n_max".into(), Value::from(n_max));
            let pts: Vec<Value> = points
                .states
                .iter()
                .zip(&dists)
                .map(|(s, sd)| {
                    let mut p = state_json(s);
                    p.insert("mass".into(), num(sd.mass()));
                    p.insert("truncation_deficit".into(), num(sd.truncation_deficit()));
                    p.insert("unreliable".into(), json!(sd.unreliable()));
                    p.insert("refined".into(), json!(sd.refined()));
                    p.insert("w".into(), nums(sd.values()));
                    Value::Object(p)
                })
                .collect();
            top.insert("points".into(), Value::Array(pts));
            render_json(&Value::Object(top))
        }
    };
    finish(&cmd.state.out, text)
}

fn expected_kind(e: &ExpectedSize) -> &'static str {
    match e {
        ExpectedSize::Finite { .. } => "finite",
        ExpectedSize::Divergent { .. } => "divergent",
        ExpectedSize::Empty => "empty",
    }
}

pub fn stats(cmd: &StateCmd) -> Result<()> {
    let f = load_mixture(&cmd.mix)?;
    let points = load_points(cmd, &f)?;
    let all = points
        .states
        .iter()
        .map(|s| component_stats(&degree_distribution(&f, s)))
        .collect::<gelkit::Result<Vec<_>>>()?;
    let text = match format_of(&cmd.out, Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(["c", "t", "r0", "gel_fraction", "expected_size", "expected_size_kind"]);
            for (s, st) in points.states.iter().zip(&all) {
                t.row(vec![
                    fmt_num(s.density()),
                    fmt_num(s.time()),
                    fmt_num(st.r0),
                    fmt_num(st.gel_fraction),
                    fmt_num(st.expected_size.value()),
                    expected_kind(&st.expected_size).into(),
                ]);
            }
            t.render()
        }
        Format::Json => {
            let mut top = header("stats", &f);
            let pts: Vec<Value> = points
                .states
                .iter()
                .zip(&all)
                .map(|(s, st)| {
                    let mut p = state_json(s);
                    p.insert("r0".into(), num(st.r0));
                    p.insert("gel_fraction".into(), num(st.gel_fraction));
                    let mut e = Map::new();
                    e.insert("kind".into(), Value::from(expected_kind(&st.expected_size)));
                    e.insert("value".into(), num(st.expected_size.value()));
                    if let ExpectedSize::Divergent { order } = st.expected_size {
                        e.insert("order".into(), Value::from(order));
                    }
                    p.insert("expected_size".into(), Value::Object(e));
                    Value::Object(p)
                })
                .collect();
            top.insert("points".into(), Value::Array(pts));
            render_json(&Value::Object(top))
        }
    };
    finish(&cmd.out, text)
}

pub fn asymptote_cmd(cmd: &StateCmd) -> Result<()> {
    let f = load_mixture(&cmd.mix)?;
    let points = load_points(cmd, &f)?;
    let all = points
        .states
        .iter()
        .map(|s| asymptote(&degree_distribution(&f, s)))
        .collect::<gelkit::Result<Vec<_>>>()?;
    let text = match format_of(&cmd.out, Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(["c", "t", "c1", "c2", "c1_time_form", "c2_time_form", "exact_decay_rate"]);
            for (s, a) in points.states.iter().zip(&all) {
                t.row(vec![
                    fmt_num(s.density()),
                    fmt_num(s.time()),
                    fmt_num(a.c1),
                    fmt_num(a.c2),
                    a.c1_time_form.map(fmt_num).unwrap_or_default(),
                    a.c2_time_form.map(fmt_num).unwrap_or_default(),
                    fmt_num(a.exact_decay_rate),
                ]);
            }
            t.render()
        }
        Format::Json => {
            let mut top = header("asymptote", &f);
            let pts: Vec<Value> = points
                .states
                .iter()
                .zip(&all)
                .map(|(s, a)| {
                    let mut p = state_json(s);
                    p.insert("c1".into(), num(a.c1));
                    p.insert("c2".into(), num(a.c2));
                    p.insert("c1_time_form".into(), opt_num(a.c1_time_form));
                    p.insert("c2_time_form".into(), opt_num(a.c2_time_form));
                    p.insert("exact_decay_rate".into(), num(a.exact_decay_rate));
                    Value::Object(p)
                })
                .collect();
            top.insert("points".into(), Value::Array(pts));
            render_json(&Value::Object(top))
        }
    };
    finish(&cmd.out, text)
}

fn mc_config(f: &FunctionalityDistribution, c: f64, sim: &SimArgs) -> MCConfig {
    let mut cfg = MCConfig::new(f.clone(), sim.vertices as usize, c)
        .with_runs(sim.runs as usize)
        .with_seed(sim.seed);
    cfg.assignment = match sim.assignment {
        AssignmentArg::Quota => Assignment::ExactQuota,
        AssignmentArg::Multinomial => Assignment::Multinomial,
    };
    cfg.reject_self_loops = !sim.allow_self_loops;
    cfg.allow_multi_edges = !sim.no_multi_edges;
    cfg
}

fn single_state(points: &Points) -> Result<SystemState> {
    match points.states.as_slice() {
        [s] => Ok(*s),
        _ => Err(CliError::Usage("simulation commands take a single conversion or time".into())),
    }
}

fn dump(res: &MCEnsembleResult, sim: &SimArgs) -> Result<()> {
    let Some(path) = &sim.dump_components else {
        return Ok(());
    };
    let file = File::create(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let mut gz = GzEncoder::new(BufWriter::new(file), Compression::default());
    write_component_table(res, &mut gz).map_err(|e| CliError::Io("writing component dump".into(), e))?;
    gz.finish().map_err(|e| CliError::Io("writing component dump".into(), e))?;
    Ok(())
}

fn ensemble_summary(res: &MCEnsembleResult, cfg: &MCConfig) -> Vec<(&'static str, Value)> {
    vec![
        ("vertices", Value::from(cfg.n_vertices)),
        ("runs", Value::from(res.runs_completed)),
        ("seed", Value::from(cfg.seed)),
        ("target_c", num(cfg.target_c)),
        ("achieved_c", num(res.achieved_c)),
        ("post_gel", Value::Bool(res.post_gel)),
        ("largest_fraction", num(res.largest_fraction)),
        ("largest_fraction_stderr", num(res.largest_fraction_stderr)),
        ("mean_finite_size", num(res.mean_finite_size)),
        ("mean_finite_size_stderr", num(res.mean_finite_size_stderr)),
        ("self_loop_rejections", Value::from(res.self_loop_rejections)),
        ("multi_edges", Value::from(res.multi_edges)),
    ]
}

fn comment_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().filter(|_| n.is_f64()).map(fmt_num).unwrap_or_else(|| n.to_string()),
        other => other.to_string(),
    }
}

pub fn mc(cmd: &McCmd) -> Result<()> {
    let f = load_mixture(&cmd.state.mix)?;
    let points = load_points(&cmd.state, &f)?;
    let s = single_state(&points)?;
    let cfg = mc_config(&f, s.density(), &cmd.sim);
    let res = run_ensemble(&cfg)?;
    dump(&res, &cmd.sim)?;
    let summary = ensemble_summary(&res, &cfg);
    let text = match format_of(&cmd.state.out, Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(["n", "w", "stderr"]);
            for (k, v) in &summary {
                t.comment(k, comment_value(v));
            }
            for n in 1..=res.size_histogram.len() {
                t.row(vec![n.to_string(), fmt_num(res.w(n)), fmt_num(res.w_stderr(n))]);
            }
            t.render()
        }
        Format::Json => {
            let mut top = header("mc", &f);
            for (k, v) in summary {
                top.insert(k.into(), v);
            }
            top.insert("w".into(), nums(&res.size_histogram));
            top.insert("w_stderr".into(), nums(&res.size_stderr));
            top.insert("degree".into(), nums(&res.degree_histogram));
            top.insert("degree_stderr".into(), nums(&res.degree_stderr));
            render_json(&Value::Object(top))
        }
    };
    finish(&cmd.state.out, text)
}

pub fn validate(cmd: &ValidateCmd) -> Result<()> {
    let f = load_mixture(&cmd.state.mix)?;
    let points = load_points(&cmd.state, &f)?;
    let s = single_state(&points)?;
    let cfg = mc_config(&f, s.density(), &cmd.sim);
    let res = run_ensemble(&cfg)?;
    dump(&res, &cmd.sim)?;

    let dd = degree_distribution(&f, &s);
    let sd = size_distribution(&dd, cmd.nmax as usize, cmd.method.into())?;
    let cmp = compare_sizes(&res, &sd, cmd.nmax as usize);
    let degree_check = empirical_degree_check(&res, &dd);
    let mut summary = ensemble_summary(&res, &cfg);
    summary.push(("tv_distance", num(cmp.tv_distance)));
    summary.push(("degree_tv_distance", num(degree_check.tv_distance)));
    summary.push(("degree_fluctuation_scale", num(degree_check.fluctuation_scale)));
    if dd.mean_degree() > 0.0 {
        let st = component_stats(&dd)?;
        summary.push(("gel_fraction", num(st.gel_fraction)));
        summary.push(("expected_size", num(st.expected_size.value())));
    }

    let text = match format_of(&cmd.state.out, Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(["n", "analytic", "empirical", "stderr", "z"]);
            for (k, v) in &summary {
                t.comment(k, comment_value(v));
            }
            for r in &cmp.rows {
                t.row(vec![
                    r.n.to_string(),
                    fmt_num(r.analytic),
                    fmt_num(r.empirical),
                    fmt_num(r.stderr),
                    fmt_num(r.z),
                ]);
            }
            t.render()
        }
        Format::Json => {
            let mut top = header("validate", &f);
            for (k, v) in summary {
                top.insert(k.into(), v);
            }
            let rows: Vec<Value> = cmp
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "analytic": num(r.analytic),
                        "empirical": num(r.empirical),
                        "stderr": num(r.stderr),
                        "z": num(r.z),
                    })
                })
                .collect();
            top.insert("rows".into(), Value::Array(rows));
            render_json(&Value::Object(top))
        }
    };
    finish(&cmd.state.out, text)
}
