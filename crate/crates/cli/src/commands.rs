use std::fmt::Write as _;
use std::path::Path;

use fracid_core::ctrl::{self, ContinuousOrderPid, TuningProblem, TuningReport};
use fracid_core::fixtures::{FixtureBank, SAMPLE_TIME};
use fracid_core::fotf::{synth_freq_data, CommensurateFoTf, DiscreteTf, FrequencyResponse};
use fracid_core::io::{self, Model};
use fracid_core::sim::{self, SimResult};
use fracid_core::sysid_freq::{self, Aggregation, LevyProblem, SweepCell, Weighting};
use fracid_core::sysid_time::{self, EstimatorSpec, RegenConfig, TimeSeries};
use fracid_core::wplane::{self, WPlanePoleSet};
use fracid_core::RationalOrder;

use crate::config::RunConfig;
use crate::svg::{self, Series};
use crate::{CliError, CliResult, Output};

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: fracid_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| {
        let err = CliError::from(e);
        match err {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        }
    })
}

/// A model named either by a file path or by a fixture label.
#[derive(Clone, Debug, PartialEq)]
pub struct Named<T> {
    pub name: String,
    pub value: T,
}

fn load_model(source: &str) -> CliResult<Option<(String, Model)>> {
    let path = Path::new(source);
    if !path.is_file() {
        return Ok(None);
    }
    let text = read_file(path)?;
    let model = in_file(path, Model::from_json(&text))?;
    let name = path
        .file_stem()
        .map_or(source.to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Some((name, model)))
}

/// Fractional plant from a model file or a fixture label.
pub fn resolve_fo(bank: &FixtureBank, source: &str) -> CliResult<Named<CommensurateFoTf>> {
    match load_model(source)? {
        Some((name, Model::Fo(m))) => Ok(Named { name, value: m }),
        Some((_, other)) => Err(CliError::validation(format!(
            "{source}: expected a fractional (fo) model, found {}",
            other.kind()
        ))),
        None => {
            let f = bank.get(source)?;
            Ok(Named {
                name: f.label.to_string(),
                value: f.fo.clone(),
            })
        }
    }
}

/// Discrete model from a file or a fixture label.
pub fn resolve_discrete(bank: &FixtureBank, source: &str) -> CliResult<Named<DiscreteTf>> {
    match load_model(source)? {
        Some((name, Model::Discrete(m))) => Ok(Named { name, value: m }),
        Some((_, other)) => Err(CliError::validation(format!(
            "{source}: expected a discrete model, found {}",
            other.kind()
        ))),
        None => {
            let f = bank.get(source)?;
            Ok(Named {
                name: f.label.to_string(),
                value: f.discrete.clone(),
            })
        }
    }
}

/// Controller from a file, or the published one when `source` is `None`.
pub fn resolve_controller(
    bank: &FixtureBank,
    source: Option<&str>,
) -> CliResult<ContinuousOrderPid> {
    let Some(source) = source else {
        return Ok(bank.controller.clone());
    };
    match load_model(source)? {
        Some((_, Model::Controller(c))) => Ok(c),
        Some((_, other)) => Err(CliError::validation(format!(
            "{source}: expected a controller (copid) model, found {}",
            other.kind()
        ))),
        None => Err(CliError::validation(format!(
            "{source}: no such controller file"
        ))),
    }
}

/// Plants by name, all eight fixtures when the list is empty.
pub fn resolve_plants(
    bank: &FixtureBank,
    sources: &[String],
) -> CliResult<Vec<Named<CommensurateFoTf>>> {
    if sources.is_empty() {
        return Ok(bank
            .fixtures
            .iter()
            .map(|f| Named {
                name: f.label.to_string(),
                value: f.fo.clone(),
            })
            .collect());
    }
    sources.iter().map(|s| resolve_fo(bank, s)).collect()
}

/// Parses `arx:na,nb,nk`, `oe:nb,nf,nk`, `armax:na,nb,nc,nk` or
/// `bj:nb,nc,nd,nf,nk`.
pub fn parse_spec(text: &str) -> CliResult<EstimatorSpec> {
    let bad = || {
        CliError::validation(format!(
            "bad estimator {text:?}; use arx:na,nb,nk | oe:nb,nf,nk | armax:na,nb,nc,nk | bj:nb,nc,nd,nf,nk"
        ))
    };
    let (kind, orders) = text.split_once(':').ok_or_else(bad)?;
    let n: Vec<usize> = orders
        .split(',')
        .map(|v| v.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let spec = match (kind.trim().to_ascii_lowercase().as_str(), n.as_slice()) {
        ("arx", [na, nb, nk]) => EstimatorSpec::arx(*na, *nb, *nk),
        ("oe", [nb, nf, nk]) => EstimatorSpec::oe(*nb, *nf, *nk),
        ("armax", [na, nb, nc, nk]) => EstimatorSpec::armax(*na, *nb, *nc, *nk),
        ("bj", [nb, nc, nd, nf, nk]) => EstimatorSpec::bj(*nb, *nc, *nd, *nf, *nk),
        _ => return Err(bad()),
    };
    spec.validate()?;
    Ok(spec)
}

/// Candidate list used when none is given: each structure at orders 1 to 3.
pub fn default_specs() -> Vec<EstimatorSpec> {
    let mut specs = Vec::new();
    for k in 1..=3 {
        specs.push(EstimatorSpec::arx(k, k, 1));
        specs.push(EstimatorSpec::oe(k, k, 1));
        specs.push(EstimatorSpec::armax(k, k, k, 1));
        specs.push(EstimatorSpec::bj(k, k, k, k, 1));
    }
    specs
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), io::format_number)
}

fn weighting_tag(w: Weighting) -> &'static str {
    w.as_str()
}

fn q_tag(q: RationalOrder) -> String {
    format!("q{}-{}", q.numerator(), q.denominator())
}

// ---------------------------------------------------------------------------
// identify-discrete

pub fn identify_discrete(data: &TimeSeries, specs: &[EstimatorSpec]) -> CliResult<Output> {
    if specs.is_empty() {
        return Err(CliError::validation("empty estimator list"));
    }
    let entries = sysid_time::structure_sweep(data, specs)?;
    let mut csv =
        String::from("rank,candidate,structure,spec,d,V,AIC,FPE,dc_gain,iterations,status\n");
    let mut text = String::new();
    let _ = writeln!(
        text,
        "structure sweep over {} candidates, N = {}",
        specs.len(),
        data.len()
    );
    let mut best: Option<&sysid_time::FitResult> = None;
    for (rank, e) in entries.iter().enumerate() {
        match &e.outcome {
            Ok(f) => {
                best.get_or_insert(f);
                let _ = writeln!(
                    csv,
                    "{},{},{},\"{}\",{},{},{},{},{},{},ok",
                    rank + 1,
                    e.index,
                    e.spec.structure.as_str(),
                    e.spec,
                    f.theta.len(),
                    io::format_number(f.v),
                    io::format_number(f.aic),
                    io::format_number(f.fpe),
                    io::format_number(f.model.dc_gain()),
                    f.loss_trace.len()
                );
                let _ = writeln!(
                    text,
                    "{:>3}  {:<40} AIC {:>12.5}  V {:.4e}  dc {:.6}",
                    rank + 1,
                    e.spec.to_string(),
                    f.aic,
                    f.v,
                    f.model.dc_gain()
                );
            }
            Err(err) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},\"{}\",{},,,,,,\"{}\"",
                    rank + 1,
                    e.index,
                    e.spec.structure.as_str(),
                    e.spec,
                    e.spec.param_count(),
                    err.to_string().replace('"', "'")
                );
                let _ = writeln!(
                    text,
                    "{:>3}  {:<40} failed: {err}",
                    rank + 1,
                    e.spec.to_string()
                );
            }
        }
    }
    let mut out = Output::default();
    let best = best.ok_or_else(|| CliError::Numerical("every candidate failed".into()))?;
    let _ = writeln!(text, "best: {}", best.spec);
    out.add("ranking.csv", csv);
    out.add("identify_discrete.txt", text);
    out.add(
        "best_model.json",
        Model::Discrete(best.model.clone()).to_json(),
    );
    out.add(
        "best_noise_model.json",
        Model::Discrete(best.noise_model.clone()).to_json(),
    );
    out.message = format!("best model {} (AIC {:.5})", best.spec, best.aic);
    Ok(out)
}

/// Step-back record of a discrete model (fixture drop fraction by default).
pub fn regen(model: &Named<DiscreteTf>, drop_fraction: f64, cfg: &RunConfig) -> CliResult<Output> {
    let rc = RegenConfig {
        drop_fraction,
        noise_std: cfg.identify.noise_std,
        seed: cfg.seed,
        ..RegenConfig::default()
    };
    let data = sysid_time::regenerate(&model.value, &rc)?;
    let mut out = Output::default();
    out.add(
        format!("regen_{}.csv", model.name),
        io::time_series_to_csv(&data),
    );
    out.message = format!("{} samples at Ts = {}", data.len(), data.ts());
    Ok(out)
}

// ---------------------------------------------------------------------------
// freqresp

pub fn freqresp(model: &Named<Model>, cfg: &RunConfig) -> CliResult<Output> {
    let data = match &model.value {
        Model::Discrete(m) => synth_freq_data(m, &cfg.grid.points(m.nyquist()))?,
        Model::Fo(m) => {
            sysid_freq::fo_response(m, &cfg.grid.points(std::f64::consts::PI / SAMPLE_TIME))?
        }
        Model::Controller(c) => {
            let tf = ctrl::controller_tf(c)?;
            sysid_freq::fo_response(&tf, &cfg.grid.points(std::f64::consts::PI / SAMPLE_TIME))?
        }
    };
    let mut out = Output::default();
    out.add(
        format!("freqresp_{}.csv", model.name),
        io::freq_response_to_csv(&data),
    );
    let mag: Vec<f64> = data
        .values()
        .iter()
        .map(|g| 20.0 * g.norm().log10())
        .collect();
    let logw: Vec<f64> = data.omegas().iter().map(|w| w.log10()).collect();
    out.add(
        format!("freqresp_{}.svg", model.name),
        svg::line_plot(
            &format!("{} magnitude", model.name),
            "log10 omega (rad/s)",
            "dB",
            &[Series {
                label: &model.name,
                x: &logw,
                y: &mag,
            }],
        ),
    );
    out.message = format!("{} frequencies", data.len());
    Ok(out)
}

// ---------------------------------------------------------------------------
// identify-fo

/// Which weightings to report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightingChoice {
    Uniform,
    Vinagre,
    Both,
}

impl WeightingChoice {
    fn keeps(self, w: Weighting) -> bool {
        matches!(
            (self, w),
            (WeightingChoice::Both, _)
                | (WeightingChoice::Uniform, Weighting::Uniform)
                | (WeightingChoice::Vinagre, Weighting::Vinagre)
        )
    }
}

/// Frequency data for identification: a fixture label (synthesised from its
/// discrete model on the configured grid) or a response CSV.
pub fn freq_data_from(
    bank: &FixtureBank,
    source: &str,
    cfg: &RunConfig,
) -> CliResult<Named<FrequencyResponse>> {
    let path = Path::new(source);
    if path.is_file() {
        let text = read_file(path)?;
        let data = in_file(path, io::freq_response_from_csv(&text))?;
        let name = path
            .file_stem()
            .map_or(source.to_string(), |s| s.to_string_lossy().into_owned());
        return Ok(Named { name, value: data });
    }
    let d = resolve_discrete(bank, source)?;
    let data = synth_freq_data(&d.value, &cfg.grid.points(d.value.nyquist()))?;
    Ok(Named {
        name: d.name,
        value: data,
    })
}

pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut csv = String::from("q,weighting,m,n,J,condition,degenerate,ill_conditioned,status\n");
    for c in cells {
        match &c.outcome {
            Ok(f) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},ok",
                    c.q,
                    weighting_tag(c.weighting),
                    c.m,
                    c.n,
                    io::format_number(f.j),
                    io::format_number(f.condition),
                    f.degenerate,
                    c.ill_conditioned()
                );
            }
            Err(e) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},,,,,\"{}\"",
                    c.q,
                    weighting_tag(c.weighting),
                    c.m,
                    c.n,
                    e.to_string().replace('"', "'")
                );
            }
        }
    }
    csv
}

fn distribution_csv(points: &[sysid_freq::OrderPoint]) -> String {
    let mut s = String::from("order,num,den\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{}",
            io::format_number(p.order),
            fmt_opt(p.num),
            fmt_opt(p.den)
        );
    }
    s
}

fn distribution_svg(title: &str, points: &[sysid_freq::OrderPoint]) -> String {
    let split = |f: fn(&sysid_freq::OrderPoint) -> Option<f64>| -> (Vec<f64>, Vec<f64>) {
        points
            .iter()
            .filter_map(|p| f(p).map(|v| (p.order, v)))
            .unzip()
    };
    let (xn, yn) = split(|p| p.num);
    let (xd, yd) = split(|p| p.den);
    svg::stem_plot(
        title,
        "order",
        "coefficient",
        &[
            Series {
                label: "numerator",
                x: &xn,
                y: &yn,
            },
            Series {
                label: "denominator",
                x: &xd,
                y: &yd,
            },
        ],
    )
}

pub fn identify_fo(
    data: &Named<FrequencyResponse>,
    qs: &[RationalOrder],
    top: RationalOrder,
    weighting: WeightingChoice,
    aggregation: Aggregation,
) -> CliResult<Output> {
    let cells = sysid_freq::q_sweep(&data.value, top, top, qs, aggregation)?;
    let cells: Vec<SweepCell> = cells
        .into_iter()
        .filter(|c| weighting.keeps(c.weighting))
        .collect();
    Ok(sweep_output(data, &cells))
}

/// Report files for already computed sweep cells.
pub fn sweep_output(data: &Named<FrequencyResponse>, cells: &[SweepCell]) -> Output {
    let mut out = Output::default();
    let mut text = format!(
        "commensurate-order sweep of {} ({} frequencies)\n",
        data.name,
        data.value.len()
    );
    for c in cells {
        let tag = format!("{}_{}", q_tag(c.q), weighting_tag(c.weighting));
        match &c.outcome {
            Ok(f) => {
                let _ = writeln!(
                    text,
                    "q = {:<6} {:<8} m = n = {:<4} J = {:.4e}  cond = {:.3e}{}{}",
                    c.q.to_string(),
                    weighting_tag(c.weighting),
                    c.n,
                    f.j,
                    f.condition,
                    if c.ill_conditioned() {
                        "  ill-conditioned"
                    } else {
                        ""
                    },
                    if f.degenerate { "  degenerate" } else { "" }
                );
                let dist = sysid_freq::order_distribution(f);
                out.add(
                    format!("models/{}_{tag}.json", data.name),
                    Model::Fo(f.model.clone()).to_json(),
                );
                out.add(
                    format!("order_distribution/{}_{tag}.csv", data.name),
                    distribution_csv(&dist),
                );
                out.add(
                    format!("order_distribution/{}_{tag}.svg", data.name),
                    distribution_svg(&format!("{} {tag}", data.name), &dist),
                );
            }
            Err(e) => {
                let _ = writeln!(
                    text,
                    "q = {:<6} {:<8} m = n = {:<4} failed: {e}",
                    c.q.to_string(),
                    weighting_tag(c.weighting),
                    c.n
                );
            }
        }
    }
    out.add(format!("sweep_{}.csv", data.name), sweep_csv(cells));
    out.add(format!("sweep_{}.txt", data.name), text);
    out.message = format!("{} sweep cells", cells.len());
    out
}

/// Fits randomly generated in-class models from their own responses.
pub fn identify_fo_self_test(seed: u64, trials: u64, cfg: &RunConfig) -> CliResult<Output> {
    let q = RationalOrder::reciprocal(4)?;
    let top = cfg.identify.top()?;
    let grid = cfg.grid.points(std::f64::consts::PI / SAMPLE_TIME);
    let mut csv = String::from("trial,m,n,J,condition,pass\n");
    let mut worst = 0.0f64;
    for t in 0..trials {
        let truth = sysid_freq::random_stable_model(seed.wrapping_add(t), q, top)?;
        let data = sysid_freq::fo_response(&truth, &grid)?;
        let (m, n) = (truth.num().len() - 1, truth.den().len() - 1);
        let fit = sysid_freq::solve_levy(&LevyProblem::new(data, m, n, q))?;
        worst = worst.max(fit.j);
        let _ = writeln!(
            csv,
            "{t},{m},{n},{},{},{}",
            io::format_number(fit.j),
            io::format_number(fit.condition),
            fit.j < 1e-10
        );
    }
    let pass = worst < 1e-10;
    let mut out = Output::default();
    out.add("self_test.csv", csv);
    out.message = format!(
        "self-test {}: worst J = {worst:.3e} over {trials} trials",
        if pass { "PASS" } else { "FAIL" }
    );
    if !pass {
        return Err(CliError::Numerical(out.message));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// analyze

pub fn pole_table(sets: &[(&str, &WPlanePoleSet)]) -> String {
    let mut s = String::from("model,kind,re,im,modulus,argument_deg,class,marginal\n");
    for (name, set) in sets {
        for p in &set.poles {
            let _ = writeln!(
                s,
                "{name},{},{},{},{},{},{},{}",
                "pole",
                io::format_number(p.root.re),
                io::format_number(p.root.im),
                io::format_number(p.modulus),
                io::format_number(p.argument_deg),
                p.class.as_str(),
                p.marginal
            );
        }
    }
    s
}

pub fn analyze(model: &Named<CommensurateFoTf>) -> CliResult<Output> {
    let tf = &model.value;
    let (stable, poles) = wplane::is_stable(tf)?;
    let zeros = wplane::zeros(tf)?;
    let q = tf.q();
    let mut text = format!(
        "{}: q = {q}, {} poles, {} zeros, {}\n",
        model.name,
        poles.len(),
        zeros.len(),
        if stable { "stable" } else { "NOT stable" }
    );
    let _ = writeln!(
        text,
        "stability cone |arg| > {} deg, hyper-damped |arg| > {} deg",
        90.0 * q.value(),
        180.0 * q.value()
    );
    for p in &poles.poles {
        let _ = writeln!(
            text,
            "pole  {:>+14.6e} {:>+14.6e}j  |w| {:>12.6e}  arg {:>+10.4} deg  {}{}",
            p.root.re,
            p.root.im,
            p.modulus,
            p.argument_deg,
            p.class.as_str(),
            if p.marginal { " (marginal)" } else { "" }
        );
    }
    for z in &zeros.poles {
        let _ = writeln!(
            text,
            "zero  {:>+14.6e} {:>+14.6e}j  |w| {:>12.6e}  arg {:>+10.4} deg",
            z.root.re, z.root.im, z.modulus, z.argument_deg
        );
    }
    let mut csv = pole_table(&[(&model.name, &poles)]);
    for z in &zeros.poles {
        let _ = writeln!(
            csv,
            "{},zero,{},{},{},{},,",
            model.name,
            io::format_number(z.root.re),
            io::format_number(z.root.im),
            io::format_number(z.modulus),
            io::format_number(z.argument_deg)
        );
    }
    let pts = |s: &WPlanePoleSet| {
        s.poles
            .iter()
            .map(|p| (p.root.re, p.root.im))
            .collect::<Vec<_>>()
    };
    let mut out = Output::default();
    out.add(format!("poles_{}.txt", model.name), text);
    out.add(format!("poles_{}.csv", model.name), csv);
    out.add(
        format!("polezero_{}.svg", model.name),
        svg::pole_zero_plot(
            &format!("{} w-plane", model.name),
            &pts(&poles),
            &pts(&zeros),
            q.value(),
        ),
    );
    let min = poles.min_abs_argument();
    out.message = format!(
        "{}: {} (minimum |arg| {min:.4} deg)",
        model.name,
        if stable { "stable" } else { "not stable" }
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// tune / verify

fn angle_table(names: &[String], rep: &TuningReport) -> String {
    let mut s = String::from("plant,min_angle_deg,stable,hyperdamped\n");
    for (i, name) in names.iter().enumerate() {
        let set = &rep.pole_sets[i];
        let edge = 180.0 * set.q.value() - ctrl::HYPERDAMPED_TOLERANCE;
        let hyper = set.poles.iter().all(|p| p.argument_deg.abs() >= edge);
        let _ = writeln!(
            s,
            "{name},{},{},{hyper}",
            io::format_number(rep.min_angles[i]),
            set.is_stable()
        );
    }
    s
}

fn report_text(title: &str, names: &[String], rep: &TuningReport) -> String {
    let mut s = format!("{title}\n");
    let q = rep.controller.q();
    let _ = writeln!(s, "controller q = {q}, gains (K_0 .. K_N):");
    for (i, g) in rep.controller.gains().iter().enumerate() {
        let _ = writeln!(s, "  K_{i:<2} = {}", io::format_number(*g));
    }
    let _ = writeln!(s, "objective = {}", io::format_number(rep.objective));
    for (i, name) in names.iter().enumerate() {
        let _ = writeln!(s, "{name:<10} min |arg| = {:>9.4} deg", rep.min_angles[i]);
    }
    let _ = writeln!(
        s,
        "minimum angle over all plants = {:.4} deg",
        rep.min_angle()
    );
    let _ = writeln!(s, "all strictly stable: {}", rep.stable);
    let _ = writeln!(s, "all hyper-damped: {}", rep.all_hyperdamped);
    s
}

pub fn verify(
    controller: &ContinuousOrderPid,
    plants: &[Named<CommensurateFoTf>],
) -> CliResult<Output> {
    let models: Vec<CommensurateFoTf> = plants.iter().map(|p| p.value.clone()).collect();
    let names: Vec<String> = plants.iter().map(|p| p.name.clone()).collect();
    let rep = ctrl::verify(controller, &models)?;
    let mut out = Output::default();
    out.add(
        "verify.txt",
        report_text("closed-loop verification", &names, &rep),
    );
    out.add("verify_angles.csv", angle_table(&names, &rep));
    let sets: Vec<(&str, &WPlanePoleSet)> = names
        .iter()
        .map(String::as_str)
        .zip(&rep.pole_sets)
        .collect();
    out.add("verify_poles.csv", pole_table(&sets));
    out.message = format!(
        "minimum angle {:.4} deg, stable {}, hyper-damped {}",
        rep.min_angle(),
        rep.stable,
        rep.all_hyperdamped
    );
    Ok(out)
}

pub fn tune(
    plants: &[Named<CommensurateFoTf>],
    q: RationalOrder,
    gain_count: usize,
    cfg: &RunConfig,
) -> CliResult<Output> {
    let models: Vec<CommensurateFoTf> = plants.iter().map(|p| p.value.clone()).collect();
    let names: Vec<String> = plants.iter().map(|p| p.name.clone()).collect();
    let mut problem = TuningProblem::new(models, q, gain_count);
    problem.restarts = cfg.tune.restarts;
    problem.seed = cfg.seed;
    problem.simplex.max_iterations = cfg.tune.max_iterations;
    if let Some(t) = cfg.tune.target_angle_deg {
        problem.target_angle_deg = t;
    }
    let rep = ctrl::tune(&problem)?;
    let mut out = Output::default();
    let mut text = report_text("multistart tuning", &names, &rep);
    let _ = writeln!(
        text,
        "restarts = {}, seed = {}, selected restart = {}, converged = {}",
        problem.restarts, problem.seed, rep.restart_index, rep.converged
    );
    for (i, f) in rep.restart_objectives.iter().enumerate() {
        let _ = writeln!(text, "  restart {i:<3} objective {}", io::format_number(*f));
    }
    out.add(
        "controller.json",
        Model::Controller(rep.controller.clone()).to_json(),
    );
    out.add("tuning.txt", text);
    out.add("tuning_angles.csv", angle_table(&names, &rep));
    out.add(
        "tuning_trace.csv",
        io::write_table(
            &["iteration", "objective"],
            rep.trace
                .iter()
                .enumerate()
                .map(|(i, f)| vec![i as f64, *f]),
        ),
    );
    out.message = format!(
        "objective {:.6e}, minimum angle {:.4} deg, hyper-damped {}",
        rep.objective,
        rep.min_angle(),
        rep.all_hyperdamped
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    Track,
    Disturb,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Track => "track",
            Scenario::Disturb => "disturb",
        }
    }
}

pub fn run_scenario(
    plant: &CommensurateFoTf,
    controller: &ContinuousOrderPid,
    scenario: Scenario,
    cfg: &RunConfig,
) -> CliResult<SimResult> {
    let sc = cfg.sim.sim_config()?;
    Ok(match scenario {
        Scenario::Track => sim::closed_loop_step(plant, controller, cfg.sim.amplitude, &sc)?,
        Scenario::Disturb => sim::disturbance_step(plant, controller, &sc)?,
    })
}

pub fn scenario_summary(name: &str, scenario: Scenario, r: &SimResult) -> String {
    let mut s = format!(
        "{name} {}: settling (2%) {} s, overshoot {}, peak deviation {}, final y {}\n",
        scenario.as_str(),
        io::format_number(sim::settling_time(r, 0.02)),
        io::format_number(r.overshoot()),
        io::format_number(r.peak_deviation()),
        io::format_number(*r.y.last().unwrap_or(&f64::NAN))
    );
    for w in &r.warnings {
        let _ = writeln!(s, "  warning: {w}");
    }
    s
}

pub fn scenario_svg(name: &str, scenario: Scenario, r: &SimResult) -> String {
    let target = vec![r.target; r.t.len()];
    svg::line_plot(
        &format!("{name} {}", scenario.as_str()),
        "t (s)",
        "output",
        &[
            Series {
                label: "y",
                x: &r.t,
                y: &r.y,
            },
            Series {
                label: "target",
                x: &r.t,
                y: &target,
            },
        ],
    )
}

pub fn simulate(
    plant: &Named<CommensurateFoTf>,
    controller: &ContinuousOrderPid,
    scenario: Scenario,
    cfg: &RunConfig,
) -> CliResult<Output> {
    let r = run_scenario(&plant.value, controller, scenario, cfg)?;
    let stem = format!("sim_{}_{}", plant.name, scenario.as_str());
    let mut out = Output::default();
    out.add(format!("{stem}.csv"), io::sim_result_to_csv(&r));
    out.add(
        format!("{stem}.svg"),
        scenario_svg(&plant.name, scenario, &r),
    );
    let summary = scenario_summary(&plant.name, scenario, &r);
    out.add(format!("{stem}.txt"), summary.clone());
    out.message = summary.trim_end().to_string();
    Ok(out)
}

// ---------------------------------------------------------------------------
// export-fixtures

pub fn export_fixtures(bank: &FixtureBank) -> CliResult<Output> {
    bank.verify_checksums()?;
    let mut out = Output::default();
    for f in &bank.fixtures {
        out.add(
            format!("fixtures/{}_discrete.json", f.label),
            Model::Discrete(f.discrete.clone()).to_json(),
        );
        out.add(
            format!("fixtures/{}_fo.json", f.label),
            Model::Fo(f.fo.clone()).to_json(),
        );
    }
    out.add(
        "fixtures/controller.json",
        Model::Controller(bank.controller.clone()).to_json(),
    );
    out.message = format!("{} fixture files", out.files.len());
    Ok(out)
}

/// Drop fraction implied by a fixture label, 0.3 otherwise.
pub fn drop_fraction_for(bank: &FixtureBank, name: &str) -> f64 {
    bank.get(name)
        .map_or(0.3, |f| f.drop_percent as f64 / 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        assert_eq!(
            parse_spec("arx:2,2,1").unwrap(),
            EstimatorSpec::arx(2, 2, 1)
        );
        assert_eq!(
            parse_spec("BJ:1,1,1,1,1").unwrap(),
            EstimatorSpec::bj(1, 1, 1, 1, 1)
        );
        assert!(parse_spec("arx:2,2").is_err());
        assert!(parse_spec("ss:1").is_err());
        assert!(parse_spec("arx").is_err());
    }

    #[test]
    fn empty_spec_list_is_rejected() {
        let d = TimeSeries::from_samples(vec![0.0, 1.0, 1.0], vec![0.0, 0.0, 1.0], 0.1).unwrap();
        assert!(matches!(
            identify_discrete(&d, &[]),
            Err(CliError::Validation(_))
        ));
    }
}
