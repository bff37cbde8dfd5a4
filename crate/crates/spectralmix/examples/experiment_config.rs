//! Driving an experiment from a configuration file, as the command-line tool
//! does, and reading the report rows back.
//!
//! The same run from the shell:
//!
//! ```bash
//! cargo run --release -- sft-bench crates/spectralmix/examples/configs/sft_bench.toml --trials 4
//! cargo run --release --example experiment_config
//! ```

use spectralmix::cli::config::{parse, SftBenchConfig};
use spectralmix::cli::run::{sft_bench, RunOptions};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let text = include_str!("configs/sft_bench.toml");
    let cfg: SftBenchConfig = parse(text).map_err(|e| e.to_string())?;
    let out = sft_bench(&cfg, &RunOptions { trials: Some(4), ..Default::default() }).map_err(|e| e.to_string())?;
    println!("{}", out.table.header);
    for line in &out.table.lines {
        println!("{line}");
    }
    println!("resolved durations: {}", out.meta.config["durations"]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
