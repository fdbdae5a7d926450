//! The reproduction bundle and its pass/fail checks.

use std::fmt::Write as _;

use rayon::prelude::*;

use fracid_core::ctrl;
use fracid_core::fixtures::{Fixture, FixtureBank};
use fracid_core::fotf::synth_freq_data;
use fracid_core::io;
use fracid_core::sim::{self, SimResult};
use fracid_core::sysid_freq::{self, Aggregation, SweepCell, Weighting};
use fracid_core::wplane;
use fracid_core::RationalOrder;

use crate::commands::{self, Named, Scenario};
use crate::config::RunConfig;
use crate::{CliResult, Output};

/// One line of the summary.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Tolerance on one fixture's published pole angles.
pub fn angle_tolerance(f: &Fixture) -> f64 {
    if f.typography_flag {
        0.5
    } else {
        0.1
    }
}

/// Computed pole arguments and the largest gap to the published column,
/// both lists sorted ascending.
pub fn angle_comparison(f: &Fixture) -> CliResult<(Vec<f64>, f64)> {
    let (_, poles) = wplane::is_stable(&f.fo)?;
    let mut got = poles.arguments_deg();
    let mut want = f.published_angles.to_vec();
    got.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    if got.len() != want.len() {
        return Ok((got, f64::INFINITY));
    }
    let gap = got
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((got, gap))
}

struct AngleStage {
    csv: String,
    checks: Vec<Check>,
}

fn angle_stage(bank: &FixtureBank) -> CliResult<AngleStage> {
    let mut csv =
        String::from("fixture,index,published_deg,computed_deg,difference_deg,tolerance_deg\n");
    let mut worst_fail = Vec::new();
    let mut min_arg = f64::INFINITY;
    for f in &bank.fixtures {
        let (got, gap) = angle_comparison(f)?;
        let mut want = f.published_angles.to_vec();
        want.sort_by(f64::total_cmp);
        let tol = angle_tolerance(f);
        for (i, (w, g)) in want.iter().zip(&got).enumerate() {
            let _ = writeln!(
                csv,
                "{},{i},{},{},{},{tol}",
                f.label,
                io::format_number(*w),
                io::format_number(*g),
                io::format_number(g - w)
            );
        }
        min_arg = got.iter().map(|a| a.abs()).fold(min_arg, f64::min);
        if !(gap <= tol) {
            worst_fail.push(format!("{} off by {gap:.4} deg (tol {tol})", f.label));
        }
    }
    let q = RationalOrder::reciprocal(4)?;
    let limit = 90.0 * q.value();
    let checks = vec![
        Check {
            name: "pole-angles".into(),
            pass: worst_fail.is_empty(),
            detail: if worst_fail.is_empty() {
                "all eight columns within tolerance".into()
            } else {
                worst_fail.join("; ")
            },
        },
        Check {
            name: "stability-screen".into(),
            pass: min_arg > limit,
            detail: format!("smallest open-loop |arg| {min_arg:.4} deg vs limit {limit} deg"),
        },
    ];
    Ok(AngleStage { csv, checks })
}

struct SweepStage {
    out: Output,
    check: Check,
}

fn cell_j(cells: &[SweepCell], q: RationalOrder, w: Weighting) -> Option<f64> {
    cells
        .iter()
        .find(|c| c.q == q && c.weighting == w)
        .and_then(|c| c.outcome.as_ref().ok())
        .map(|f| f.j)
}

fn sweep_stage(bank: &FixtureBank, cfg: &RunConfig) -> CliResult<SweepStage> {
    let f = &bank.fixtures[0];
    let data = synth_freq_data(&f.discrete, &cfg.grid.points(f.discrete.nyquist()))?;
    let named = Named {
        name: f.label.to_string(),
        value: data,
    };
    let qs = cfg.identify.orders()?;
    let top = cfg.identify.top()?;
    let cells = sysid_freq::q_sweep(&named.value, top, top, &qs, Aggregation::Stacked)?;
    let out = commands::sweep_output(&named, &cells);
    let (one, quarter) = (RationalOrder::ONE, RationalOrder::reciprocal(4)?);
    let mut pass = true;
    let mut detail = Vec::new();
    for w in [Weighting::Uniform, Weighting::Vinagre] {
        match (cell_j(&cells, one, w), cell_j(&cells, quarter, w)) {
            (Some(a), Some(b)) => {
                pass &= a >= 1e4 * b;
                detail.push(format!(
                    "{} J(1) {a:.4e} / J(1/4) {b:.4e} = {:.2e}",
                    w.as_str(),
                    a / b
                ));
            }
            _ => {
                pass = false;
                detail.push(format!("{} sweep lacks q = 1 or q = 1/4", w.as_str()));
            }
        }
    }
    Ok(SweepStage {
        out,
        check: Check {
            name: "q-sweep-trend".into(),
            pass,
            detail: detail.join("; "),
        },
    })
}

fn verify_stage(bank: &FixtureBank) -> CliResult<(Output, Check)> {
    let plants = commands::resolve_plants(bank, &[])?;
    let out = commands::verify(&bank.controller, &plants)?;
    let rep = ctrl::verify(&bank.controller, &bank.fo_models())?;
    let hyper = rep.min_angle() >= 45.0 - 0.5;
    let check = Check {
        name: "controller-verification".into(),
        pass: rep.stable,
        detail: format!(
            "minimum closed-loop angle {:.4} deg, strictly stable {}, hyper-damped within 0.5 deg {hyper}",
            rep.min_angle(),
            rep.stable
        ),
    };
    Ok((out, check))
}

fn self_test_stage(cfg: &RunConfig) -> Check {
    match commands::identify_fo_self_test(cfg.seed, 20, cfg) {
        Ok(out) => Check {
            name: "in-class-recovery".into(),
            pass: true,
            detail: out.message,
        },
        Err(e) => Check {
            name: "in-class-recovery".into(),
            pass: false,
            detail: e.to_string(),
        },
    }
}

struct SimRun {
    label: &'static str,
    scenario: Scenario,
    result: SimResult,
}

fn sim_stage(bank: &FixtureBank, cfg: &RunConfig) -> CliResult<(Output, Check)> {
    let jobs = [
        ("G30_100", Scenario::Track),
        ("G30_100", Scenario::Disturb),
        ("G50_100", Scenario::Track),
        ("G50_100", Scenario::Disturb),
    ];
    let runs = jobs
        .par_iter()
        .map(|(label, scenario)| {
            let f = bank.get(label)?;
            let result = commands::run_scenario(&f.fo, &bank.controller, *scenario, cfg)?;
            Ok(SimRun {
                label: f.label,
                scenario: *scenario,
                result,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut out = Output::default();
    let mut text = String::new();
    for r in &runs {
        let stem = format!("sim_{}_{}", r.label, r.scenario.as_str());
        out.add(format!("{stem}.csv"), io::sim_result_to_csv(&r.result));
        out.add(
            format!("{stem}.svg"),
            commands::scenario_svg(r.label, r.scenario, &r.result),
        );
        text.push_str(&commands::scenario_summary(r.label, r.scenario, &r.result));
    }
    out.add("simulations.txt", text);
    let settle = |i: usize| sim::settling_time(&runs[i].result, 0.02);
    let (t30, t50) = (settle(0), settle(2));
    let overshoot = runs[0].result.overshoot();
    let (d30, d50) = (settle(1), settle(3));
    let (p30, p50) = (
        runs[1].result.peak_deviation(),
        runs[3].result.peak_deviation(),
    );
    let pass = t30 <= 400.0
        && overshoot <= 0.02
        && t50 <= 1600.0
        && d30.is_finite()
        && d50.is_finite()
        && p30 > p50;
    let detail = format!(
        "G30_100 settles {t30:.2} s (overshoot {:.3}%), G50_100 settles {t50:.2} s, disturbance settles {d30:.1} / {d50:.1} s, peaks {p30:.3} > {p50:.3}",
        100.0 * overshoot
    );
    Ok((
        out,
        Check {
            name: "closed-loop-behaviour".into(),
            pass,
            detail,
        },
    ))
}

/// Checksums first (abort on mismatch), then the independent stages in
/// parallel, merged in a fixed order.
pub fn report(bank: &FixtureBank, cfg: &RunConfig) -> CliResult<Output> {
    bank.verify_checksums()?;
    cfg.validate()?;
    let ((t4, sweep), (verify, (selftest, sims))) = rayon::join(
        || rayon::join(|| angle_stage(bank), || sweep_stage(bank, cfg)),
        || {
            rayon::join(
                || verify_stage(bank),
                || rayon::join(|| self_test_stage(cfg), || sim_stage(bank, cfg)),
            )
        },
    );
    let (t4, sweep, (verify_out, verify_check), (sim_out, sim_check)) =
        (t4?, sweep?, verify?, sims?);

    let mut out = Output::default();
    out.add("pole_angles.csv", t4.csv);
    for (name, content) in sweep.out.files {
        out.add(format!("sweep/{name}"), content);
    }
    for (name, content) in verify_out.files {
        out.add(name, content);
    }
    for (name, content) in sim_out.files {
        out.add(name, content);
    }
    out.add(
        "controller.json",
        io::Model::Controller(bank.controller.clone()).to_json(),
    );

    let mut checks = t4.checks;
    checks.push(verify_check);
    checks.push(sweep.check);
    checks.push(selftest);
    checks.push(sim_check);
    let mut summary = String::from("reproduction summary\n");
    let _ = writeln!(summary, "seed {}", cfg.seed);
    for c in &checks {
        summary.push_str(&c.line());
        summary.push('\n');
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    let _ = writeln!(summary, "{passed}/{} checks passed", checks.len());
    out.message = summary.trim_end().to_string();
    out.add("summary.txt", summary);
    Ok(out)
}
