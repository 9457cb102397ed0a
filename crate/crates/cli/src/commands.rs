use std::time::Instant;

use feedback_core::limits::{asymptotic_limits, throughput, ThroughputMode};
use feedback_core::montecarlo::{
    design_codebook, ldp_rate_estimate, random_codebook, simulate_c_cdf, simulate_c_direct, simulate_c_spectral,
};
use feedback_core::ratefn::psi_star_zero;
use feedback_core::{mp_law, CodebookSource, Mode, RateContext, SimConfig};
use serde::Serialize;
use serde_json::Value;

use crate::args::*;
use crate::error::CliError;
use crate::record::{int, num, text, RunRecord, Table, VERSION};

fn record<P: Serialize>(
    command: &str,
    params: &P,
    seed: u64,
    start: Instant,
    payload: Table,
) -> Result<RunRecord, CliError> {
    Ok(RunRecord {
        command: command.into(),
        version: VERSION.into(),
        seed,
        params: serde_json::to_value(params)?,
        duration_secs: start.elapsed().as_secs_f64(),
        payload,
    })
}

pub fn run(cmd: &Command) -> Result<RunRecord, CliError> {
    match cmd {
        Command::Asymptotic(a) => asymptotic(a),
        Command::Sweep(a) => sweep(a),
        Command::Simulate(a) => simulate(a),
        Command::Design(a) => design(a),
        Command::Ldp(a) => ldp(a),
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

pub fn asymptotic(a: &AsymptoticArgs) -> Result<RunRecord, CliError> {
    let start = Instant::now();
    positive("beta", a.beta)?;
    positive("r", a.r)?;
    if let Some(s) = a.sigma2 {
        positive("sigma2", s)?;
    }
    let res = asymptotic_limits(a.beta, a.r)?;
    let mut columns = vec![
        "beta",
        "r",
        "x_r_minus",
        "x_r_plus",
        "c_min",
        "c_max",
        "r_min",
        "r_max",
        "branch_minus",
        "branch_plus",
        "residual_minus",
        "residual_plus",
    ];
    let mut row = vec![
        num(res.beta),
        num(res.r),
        num(res.x_r_minus),
        num(res.x_r_plus),
        num(res.c_min_limit),
        num(res.c_max_limit),
        res.r_min.map(num).unwrap_or(Value::Null),
        num(res.r_max),
        text(res.branch_minus.as_str()),
        text(res.branch_plus.as_str()),
        num(res.residuals[0]),
        num(res.residuals[1]),
    ];
    if let Some(s) = a.sigma2 {
        columns.extend(["throughput_min", "throughput_max"]);
        row.push(num(throughput(res.c_min_limit, s, ThroughputMode::CdmaMin)?));
        row.push(num(throughput(res.c_max_limit, s, ThroughputMode::MimoMax)?));
    }
    let mut t = Table::new(&columns);
    t.push(row);
    record("asymptotic", a, a.common.seed, start, t)
}

fn sweep_rates(a: &SweepArgs) -> Result<Vec<f64>, CliError> {
    let rates = if a.r_grid.is_empty() {
        a.r.clone()
    } else {
        let bad = || CliError::Usage("--r-grid takes START,STOP,COUNT".into());
        if a.r_grid.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = a.r_grid[0].parse().map_err(|_| bad())?;
        let hi: f64 = a.r_grid[1].parse().map_err(|_| bad())?;
        let count: usize = a.r_grid[2].parse().map_err(|_| bad())?;
        match count {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect(),
        }
    };
    if rates.is_empty() {
        return Err(CliError::Usage("the rate list is empty".into()));
    }
    for &r in &rates {
        positive("r", r)?;
    }
    Ok(rates)
}

pub fn sweep(a: &SweepArgs) -> Result<RunRecord, CliError> {
    let start = Instant::now();
    positive("beta", a.beta)?;
    let rates = sweep_rates(a)?;
    let (want_min, want_max) = match a.mode {
        SweepMode::Min => (true, false),
        SweepMode::Max => (false, true),
        SweepMode::Both => (true, true),
    };
    let mut columns = vec!["beta", "r"];
    if want_min {
        columns.extend(["x_minus", "c_min", "branch_minus"]);
    }
    if want_max {
        columns.extend(["x_plus", "c_max", "branch_plus"]);
    }
    let mut t = Table::new(&columns);
    for r in rates {
        let res = asymptotic_limits(a.beta, r)?;
        let mut row = vec![num(a.beta), num(r)];
        if want_min {
            row.extend([
                num(res.x_r_minus),
                num(res.c_min_limit),
                text(res.branch_minus.as_str()),
            ]);
        }
        if want_max {
            row.extend([num(res.x_r_plus), num(res.c_max_limit), text(res.branch_plus.as_str())]);
        }
        t.push(row);
    }
    record("sweep", a, a.common.seed, start, t)
}

/// Limit of `c` at `beta = n/m`, `r = R_fb/n`; `R_fb = 0` gives the mean `1/beta`.
fn asymptotic_value(n: usize, m: usize, r_fb: u32, mode: Mode) -> Result<f64, CliError> {
    let beta = n as f64 / m as f64;
    if r_fb == 0 {
        return Ok(1.0 / beta);
    }
    let res = asymptotic_limits(beta, r_fb as f64 / n as f64)?;
    Ok(match mode {
        Mode::Min => res.c_min_limit,
        Mode::Max => res.c_max_limit,
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<RunRecord, CliError> {
    let start = Instant::now();
    let mode = match a.mode {
        ModeArg::Min => Mode::Min,
        ModeArg::Max => Mode::Max,
    };
    let seed = a.common.seed;
    let cfg = SimConfig::new(a.n, a.m, a.r_fb, a.trials, seed, mode).with_budget(a.budget);
    cfg.validate()?;
    if a.codebook == CodebookArg::Designed && a.method != Method::Direct {
        return Err(CliError::Usage(
            "--codebook designed needs --method direct; the other methods average over random codebooks".into(),
        ));
    }
    let estimate = match a.method {
        Method::Direct => {
            let source = match a.codebook {
                CodebookArg::Random => CodebookSource::RandomPerTrial,
                CodebookArg::Designed => {
                    if a.r_fb > feedback_core::montecarlo::simulate::MAX_ENUMERATED_BITS {
                        return Err(CliError::Usage(format!("R_fb = {} is too large to design", a.r_fb)));
                    }
                    CodebookSource::Fixed(design_codebook(a.n, 1usize << a.r_fb, seed, a.iterations)?)
                }
            };
            simulate_c_direct(&cfg, &source)?
        }
        Method::Spectral => simulate_c_spectral(&cfg)?,
        Method::Cdf => simulate_c_cdf(&cfg, a.samples)?,
    };
    let limit = asymptotic_value(a.n, a.m, a.r_fb, mode)?;
    let mut t = Table::new(&[
        "n",
        "m",
        "R_fb",
        "trials",
        "mode",
        "method",
        "codebook",
        "mean",
        "stderr",
        "samples",
        "asymptotic",
        "rel_gap",
    ]);
    t.push(vec![
        int(a.n as u64),
        int(a.m as u64),
        int(a.r_fb as u64),
        int(a.trials as u64),
        text(mode.as_str()),
        serde_json::to_value(a.method)?,
        serde_json::to_value(a.codebook)?,
        num(estimate.mean),
        num(estimate.stderr),
        int(estimate.samples as u64),
        num(limit),
        num((estimate.mean - limit) / limit),
    ]);
    record("simulate", a, seed, start, t)
}

pub fn design(a: &DesignArgs) -> Result<RunRecord, CliError> {
    let start = Instant::now();
    let seed = a.common.seed;
    if a.n == 0 || a.k == 0 || a.iterations == 0 {
        return Err(CliError::Usage("--n, --K and --iterations must be positive".into()));
    }
    let cb = design_codebook(a.n, a.k, seed, a.iterations)?;
    let baseline = random_codebook(a.n, a.k, seed)?;
    std::fs::write(&a.codebook_out, cb.to_text())?;
    let mut t = Table::new(&[
        "n",
        "K",
        "iterations",
        "min_chordal",
        "random_min_chordal",
        "improvement",
        "file",
    ]);
    t.push(vec![
        int(a.n as u64),
        int(a.k as u64),
        int(a.iterations as u64),
        num(cb.min_chordal),
        num(baseline.min_chordal),
        num(cb.min_chordal - baseline.min_chordal),
        text(&a.codebook_out.display().to_string()),
    ]);
    record("design", a, seed, start, t)
}

pub fn ldp(a: &LdpArgs) -> Result<RunRecord, CliError> {
    let start = Instant::now();
    let seed = a.common.seed;
    positive("beta", a.beta)?;
    let law = mp_law(a.beta)?;
    if !(a.x > law.lambda_t_minus && a.x < law.lambda_plus) || a.x == 1.0 {
        return Err(CliError::Usage(format!(
            "--x must lie in ({}, 1) or (1, {}), got {}",
            law.lambda_t_minus, law.lambda_plus, a.x
        )));
    }
    if a.n_list.contains(&0) {
        return Err(CliError::Usage("--n-list entries must be positive".into()));
    }
    let limit = psi_star_zero(&RateContext::with_beta(a.beta, a.x)?)?.value;
    let points = ldp_rate_estimate(a.beta, a.x, &a.n_list, a.samples, seed)?;
    let mut t = Table::new(&["n", "m", "rate", "psi_star", "rel_error", "ess"]);
    for p in points {
        t.push(vec![
            int(p.n as u64),
            int(p.m as u64),
            num(p.rate),
            num(limit),
            num((p.rate - limit).abs() / limit),
            num(p.ess),
        ]);
    }
    record("ldp", a, seed, start, t)
}
