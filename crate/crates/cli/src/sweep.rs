//! Sweep execution and the CSV table.

use std::io::Write;

use fasaris::channel::{derive_params, DerivedParams};
use fasaris::corrmodel::{bdma_partition, BlockPartition};
use fasaris::ctrl::nb_transform;
use fasaris::mcsim::{mc_max_snr, McEstimate, SimMode};
use fasaris::outage::{outage_bdma, outage_iae};
use fasaris::ratemax::optimize_rate;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Engine, Point, RunConfig, SweepVar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub sweep_var: &'static str,
    pub sweep_value: f64,
    pub mode: &'static str,
    pub engine: &'static str,
    pub outage: f64,
    pub throughput: f64,
    pub std_err: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

/// An engine failure, tagged with where it happened.
#[derive(Debug)]
pub struct EngineError {
    pub module: &'static str,
    pub at: String,
    pub message: String,
}

impl std::fmt::Display for EngineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} failed at {}: {}", self.module, self.at, self.message)
    }
}

/// Parameters and partition of a resolved point.
pub fn prepare(p: &Point) -> Result<(DerivedParams, BlockPartition), (&'static str, String)> {
    let params = derive_params(&p.system).map_err(|e| ("channel", e.to_string()))?;
    let params = if p.n_bs == 1 {
        params
    } else {
        nb_transform(&params, &p.system, p.n_bs).map_err(|e| ("ctrl", e.to_string()))?
    };
    let part =
        bdma_partition(&p.system.correlation_spec()).map_err(|e| ("corrmodel", e.to_string()))?;
    Ok((params, part))
}

fn point_rows(cfg: &RunConfig, var: SweepVar, p: &Point) -> Result<Vec<Row>, EngineError> {
    let at = format!("{}={}", var.as_str(), p.value);
    let fail = |module: &'static str| {
        let at = at.clone();
        move |message: String| EngineError {
            module,
            at,
            message,
        }
    };
    let (params, part) = prepare(p).map_err(|(m, e)| fail(m)(e))?;
    let row = |mode: &'static str, engine: Engine, outage: f64, throughput: f64| Row {
        sweep_var: var.as_str(),
        sweep_value: p.value,
        mode,
        engine: engine.as_str(),
        outage,
        throughput,
        std_err: None,
        trials: None,
        seed: None,
    };
    let aris = SimMode::FasAris.as_str();
    let mut rows = Vec::new();
    for &engine in &cfg.engines {
        match engine {
            Engine::Mc => {
                for &mode in &cfg.modes {
                    let snr = mc_max_snr(&p.system, &params, &part, mode, cfg.trials, cfg.seed)
                        .map_err(|e| fail("mcsim")(e.to_string()))?;
                    let o = McEstimate::outage_from(&snr, p.rate);
                    let t = McEstimate::throughput_from(&snr, p.rate);
                    rows.push(Row {
                        std_err: Some(o.std_err),
                        trials: Some(o.trials),
                        seed: Some(cfg.seed),
                        ..row(mode.as_str(), engine, o.value, t.value)
                    });
                }
            }
            Engine::Bdma => {
                let o = outage_bdma(&p.system, &params, &part, p.rate, &cfg.quadrature)
                    .map_err(|e| fail("outage")(format!("bdma: {e}")))?;
                rows.push(row(aris, engine, o, p.rate * (1.0 - o)));
            }
            Engine::Iae => {
                let o = outage_iae(&p.system, &params, &part, p.rate, &cfg.quadrature)
                    .map_err(|e| fail("outage")(format!("iae: {e}")))?;
                rows.push(row(aris, engine, o, p.rate * (1.0 - o)));
            }
            Engine::Ratemax => {
                let opts = fasaris::ratemax::RateSearchOptions {
                    quad: cfg.quadrature,
                    ..cfg.ratemax
                };
                let r = optimize_rate(&p.system, &params, &part, &opts)
                    .map_err(|e| fail("ratemax")(e.to_string()))?;
                let o = outage_iae(&p.system, &params, &part, r.r_final, &cfg.quadrature)
                    .map_err(|e| fail("outage")(format!("iae: {e}")))?;
                rows.push(row(aris, engine, o, r.t_final));
            }
        }
    }
    Ok(rows)
}

/// Runs every point; rows come back in sweep order.
pub fn run_sweep(
    cfg: &RunConfig,
    var: SweepVar,
    points: &[Point],
) -> Result<Vec<Row>, EngineError> {
    let per_point: Vec<Result<Vec<Row>, EngineError>> =
        points.par_iter().map(|p| point_rows(cfg, var, p)).collect();
    let mut out = Vec::new();
    for r in per_point {
        out.extend(r?);
    }
    Ok(out)
}

pub fn write_csv<W: Write>(w: W, rows: &[Row]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    if rows.is_empty() {
        wr.write_record([
            "sweep_var",
            "sweep_value",
            "mode",
            "engine",
            "outage",
            "throughput",
            "std_err",
            "trials",
            "seed",
        ])?;
    }
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}
