//! Non-resolvable-collision probability versus intentional-delay spread.

use std::path::Path;

use anyhow::{Context, Result};

use alohacr_delay_design::{scan_spread, DelayModel, NaturalDelaySpread};

use crate::config::Prop1Config;
use crate::csv::Table;
use crate::plot::{Plot, Series};

pub fn model_from_config(config: &Prop1Config) -> Result<DelayModel> {
    let f_delta = match config.f_delta.as_str() {
        "dirac" => NaturalDelaySpread::Dirac,
        "gaussian" => NaturalDelaySpread::Gaussian {
            sigma: config.f_delta_param,
        },
        "uniform" => NaturalDelaySpread::Uniform {
            width: config.f_delta_param,
        },
        _ => unreachable!("validated"),
    };
    // work in units of the symbol interval
    DelayModel::new(1.0, 1.0, config.delta, f_delta).context("invalid delay model")
}

pub fn run(config: &Prop1Config, out_dir: &Path) -> Result<Table> {
    config.validate()?;
    let model = model_from_config(config)?;
    let scan = scan_spread(&model, &config.t_grid)?;

    let nearest_ts = scan
        .points
        .iter()
        .map(|pt| pt.spread)
        .min_by(|a, b| {
            (a - 1.0).abs().partial_cmp(&(b - 1.0).abs()).unwrap()
        })
        .unwrap();

    let mut table = Table::new("prop1-scan", vec!["t", "p_c", "is_local_min_at_ts"]);
    for pt in &scan.points {
        let flag = pt.spread == nearest_ts && scan.local_min_at_ts;
        table.push(vec![pt.spread.into(), pt.probability.into(), flag.into()]);
    }

    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("prop1_scan.csv"), table.to_csv())?;

    let plot = Plot {
        title: format!(
            "Non-resolvable collision probability vs delay spread ({})",
            config.f_delta
        ),
        x_label: "intentional-delay spread T / Ts".into(),
        y_label: "P_c".into(),
        log_y: false,
        series: vec![Series {
            label: "P_c(T)".into(),
            points: scan.points.iter().map(|p| (p.spread, p.probability)).collect(),
            dashed: false,
        }],
    };
    std::fs::write(out_dir.join("prop1_scan.svg"), plot.render())?;
    Ok(table)
}
