//! Buffered-ALOHA sweep: measured statistics side by side with the
//! closed-form predictions.

use std::path::Path;

use anyhow::Result;

use alohacr_mac_analytic::{
    active_probability, approx_throughput, service_delay, stability_profile, total_delay,
    DelayPrediction,
};
use alohacr_mac_sim::{sweep, OutcomeMode, PhySimConfig, SimConfig};

use crate::config::MacSweepConfig;
use crate::csv::{Field, Table};
use crate::plot::{Plot, Series};

pub fn run(config: &MacSweepConfig, out_dir: &Path) -> Result<Table> {
    config.validate()?;
    let probs = config.probs.link_probs()?;
    let mut base = SimConfig::abstract_mode(config.users, 0.0, 0.5, probs, config.seed);
    base.warmup_slots = config.warmup_slots;
    base.measure_slots = config.measure_slots();
    if config.mode == "phy" {
        base.mode = OutcomeMode::Phy;
        base.phy = Some(PhySimConfig::standard(config.snr_db.unwrap_or(25.0)));
    }

    let rows = sweep(&base, &config.r_grid, &config.p_grid);

    let mut table = Table::new(
        "mac-sweep",
        vec![
            "r",
            "p",
            "q_sim",
            "q_analytic",
            "tput_sim",
            "tput_analytic",
            "dtot_sim",
            "dtot_analytic",
            "dsrv_sim",
            "dsrv_analytic",
            "stable",
        ],
    );
    for row in &rows {
        let (r, p) = (row.arrival_rate, row.contention);
        let profile = stability_profile(config.users, r, p, &probs)?;
        let q_pred = active_probability(&profile, p);
        let tput_pred = approx_throughput(config.users, r, p, &probs)?;
        let dtot_pred: Field = match total_delay(config.users, r, p, &probs)? {
            DelayPrediction::Finite(d) => d.into(),
            DelayPrediction::Unbounded => Field::Inf,
        };
        let dsrv_pred = service_delay(config.users, r, p, &probs)?;
        table.push(vec![
            r.into(),
            p.into(),
            row.stats.q_measured.into(),
            q_pred.into(),
            row.stats.throughput.into(),
            tput_pred.into(),
            row.stats.mean_total_delay.map_or(Field::Inf, Field::from),
            dtot_pred,
            row.stats.mean_service_delay.map_or(Field::Inf, Field::from),
            dsrv_pred.into(),
            profile.stable.into(),
        ]);
    }

    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("mac_sweep.csv"), table.to_csv())?;

    for (sim_col, ana_col, stem, label) in [
        ("q_sim", "q_analytic", "mac_sweep_q", "active probability"),
        ("tput_sim", "tput_analytic", "mac_sweep_tput", "throughput (packets/slot)"),
        ("dtot_sim", "dtot_analytic", "mac_sweep_dtot", "total delay (slots)"),
        ("dsrv_sim", "dsrv_analytic", "mac_sweep_dsrv", "service delay (slots)"),
    ] {
        let ps = table.column_values("p");
        let rs = table.column_values("r");
        let sim = table.column_values(sim_col);
        let ana = table.column_values(ana_col);
        let mut series = Vec::new();
        for &r in &config.r_grid {
            let pick = |vals: &[f64]| -> Vec<(f64, f64)> {
                ps.iter()
                    .zip(vals.iter())
                    .zip(rs.iter())
                    .filter(|(_, row_r)| (**row_r - r).abs() < 1e-12)
                    .map(|((x, y), _)| (*x, *y))
                    .collect()
            };
            series.push(Series {
                label: format!("r={r} sim"),
                points: pick(&sim),
                dashed: false,
            });
            series.push(Series {
                label: format!("r={r} model"),
                points: pick(&ana),
                dashed: true,
            });
        }
        let plot = Plot {
            title: format!("{label} vs contention probability"),
            x_label: "contention probability p".into(),
            y_label: label.into(),
            log_y: false,
            series,
        };
        std::fs::write(out_dir.join(format!("{stem}.svg")), plot.render())?;
    }
    Ok(table)
}
