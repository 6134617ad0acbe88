//! Raw-BER comparison of the separation schemes over two-user slots.

use std::path::Path;

use anyhow::Result;

use alohacr_phy_core::CodeBook;
use alohacr_phy_receiver::{ReceiveMode, ReceiverConfig};

use crate::config::BerSweepConfig;
use crate::csv::Table;
use crate::measure::{measure_ber_point, SlotScenario};
use crate::plot::{Plot, Series};

fn parse_mode(name: &str) -> ReceiveMode {
    match name {
        "blind" => ReceiveMode::Blind,
        "training" => ReceiveMode::Training,
        "sic_only" => ReceiveMode::SicOnly,
        _ => unreachable!("validated"),
    }
}

pub fn run(config: &BerSweepConfig, out_dir: &Path) -> Result<Table> {
    config.validate()?;
    let receiver = ReceiverConfig::standard();
    let book = CodeBook::standard(4)?;

    let mut table = Table::new(
        "ber-sweep",
        vec!["snr_db", "mode", "ber", "packets", "successes"],
    );
    for &snr in &config.snr_db {
        for (mode_idx, mode_name) in config.modes.iter().enumerate() {
            let scenario = SlotScenario {
                snr_db: snr,
                cfo_max_frac: config.cfo_max_frac,
                natural_delay_sigma: config.natural_delay_sigma,
                intentional_delays: true,
                delay_filter: config.delay_filter,
            };
            // one deterministic stream per (snr, mode) point
            let point_seed = config
                .seed
                .wrapping_mul(1_000_003)
                .wrapping_add((snr * 8.0) as u64)
                .wrapping_add(mode_idx as u64 * 101);
            let tally = measure_ber_point(
                &book,
                &receiver,
                parse_mode(mode_name),
                &scenario,
                config.packets_per_point,
                point_seed,
            );
            table.push(vec![
                snr.into(),
                mode_name.as_str().into(),
                tally.raw_ber().into(),
                tally.packets.into(),
                tally.exact_packets.into(),
            ]);
        }
    }

    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("ber_sweep.csv"), table.to_csv())?;

    let snrs = table.column_values("snr_db");
    let bers = table.column_values("ber");
    let modes = table.column_texts("mode");
    let series = config
        .modes
        .iter()
        .map(|m| Series {
            label: m.clone(),
            points: snrs
                .iter()
                .zip(bers.iter())
                .zip(modes.iter())
                .filter(|(_, row_mode)| *row_mode == m)
                .map(|((x, y), _)| (*x, *y))
                .collect(),
            dashed: false,
        })
        .collect();
    let plot = Plot {
        title: "Raw BER vs SNR".into(),
        x_label: "SNR (dB)".into(),
        y_label: "raw BER".into(),
        log_y: true,
        series,
    };
    std::fs::write(out_dir.join("ber_sweep.svg"), plot.render())?;
    Ok(table)
}
