//! Writes the two synthetic datasets as CSV files:
//!
//! ```text
//! cargo run -p pidcmp-core --example synthetic_data -- DIR [UNITS] [SEED]
//! ```
//!
//! `DIR/trials.csv` holds basal-dominant trials for `UNITS` units (default
//! 15), `DIR/grid.csv` the 31 x 21 toy grid.

use std::fs::File;
use std::path::PathBuf;

use pidcmp::{ingest, synthetic};

fn main() -> pidcmp::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let units = args.next().map_or(15, |s| s.parse().expect("UNITS must be a number"));
    let seed = args.next().map_or(1, |s| s.parse().expect("SEED must be a number"));
    std::fs::create_dir_all(&dir)?;
    ingest::write_trials_to(
        File::create(dir.join("trials.csv"))?,
        &synthetic::basal_dominant_trials(units, seed),
    )?;
    ingest::write_grid_to(File::create(dir.join("grid.csv"))?, &synthetic::shai_like_grid())?;
    Ok(())
}
