//! Closed-form model evaluation over (r, p) grids, no simulation.

use std::path::Path;

use anyhow::Result;

use alohacr_mac_analytic::{
    active_probability, approx_throughput, asymptotic_throughput, optimal_contention,
    service_delay, stability_profile, total_delay, DelayPrediction,
};

use crate::config::AnalyticConfig;
use crate::csv::{Field, Table};

pub fn run(config: &AnalyticConfig, out_dir: &Path) -> Result<Table> {
    config.validate()?;
    let probs = config.probs.link_probs()?;
    let optimum = optimal_contention(config.users, &probs)?;
    let asymptotic = asymptotic_throughput(&probs)?;

    let mut table = Table::new(
        "analytic",
        vec![
            "j",
            "r",
            "p",
            "p_star",
            "f_max",
            "p_min",
            "p_max",
            "q",
            "tput",
            "dtot",
            "dsrv",
            "stable",
            "asymptotic_c",
        ],
    );
    for &r in &config.r_grid {
        for &p in &config.p_grid {
            let profile = stability_profile(config.users, r, p, &probs)?;
            let dtot: Field = match total_delay(config.users, r, p, &probs)? {
                DelayPrediction::Finite(d) => d.into(),
                DelayPrediction::Unbounded => Field::Inf,
            };
            table.push(vec![
                config.users.into(),
                r.into(),
                p.into(),
                optimum.p_star.into(),
                profile.f_max.into(),
                profile.p_min.map_or(Field::Inf, Field::from),
                profile.p_max.map_or(Field::Inf, Field::from),
                active_probability(&profile, p).into(),
                approx_throughput(config.users, r, p, &probs)?.into(),
                dtot,
                service_delay(config.users, r, p, &probs)?.into(),
                profile.stable.into(),
                asymptotic.into(),
            ]);
        }
    }

    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("analytic.csv"), table.to_csv())?;
    Ok(table)
}
