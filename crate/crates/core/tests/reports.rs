//! Reports survive a JSON round trip byte for byte, and identical runs write
//! identical files.

use pidcmp::analysis::{run_conditions, run_sweep, ConditionsConfig, ConditionsReport, Family, SweepReport, SweepSpec};
use pidcmp::ingest::BinningConfig;
use pidcmp::report::{from_json, to_json, write_sweep};
use pidcmp::{synthetic, Method};

fn sweep() -> SweepReport {
    let spec = SweepSpec {
        basal_ranges: ["0-140", "0-150"].iter().map(|r| r.parse().unwrap()).collect(),
        apical_ranges: ["0-100", "0-200"].iter().map(|r| r.parse().unwrap()).collect(),
        output_categories: "0,1-2,3-4".parse().unwrap(),
        methods: Method::ALL.to_vec(),
        normalize: true,
    };
    run_sweep(&synthetic::shai_like_grid(), &spec, true).unwrap()
}

#[test]
fn sweep_report_round_trips() {
    let text = to_json(&sweep()).unwrap();
    let back: SweepReport = from_json(&text).unwrap();
    assert_eq!(to_json(&back).unwrap(), text);
}

#[test]
fn conditions_report_round_trips() {
    let cfg = ConditionsConfig {
        binning: BinningConfig::new(4, "0,1,2+".parse().unwrap()).unwrap(),
        methods: vec![Method::Ipm, Method::Isx, Method::Ibroja],
        omit_silent: false,
        families: vec![Family::Uia, Family::Components],
    };
    let mut r = run_conditions(&synthetic::basal_dominant_trials(4, 3), &cfg, true).unwrap();
    let text = to_json(&r).unwrap();
    let back: ConditionsReport = from_json(&text).unwrap();
    // Ledgers are written as their own CSV files, not into the JSON.
    for u in &mut r.units {
        u.control.decomposed.ledgers.clear();
        u.treatment.decomposed.ledgers.clear();
    }
    assert_eq!(back, r);
    assert_eq!(to_json(&back).unwrap(), text);
}

#[test]
fn repeated_sweeps_write_identical_files() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        write_sweep(&sweep(), d.path()).unwrap();
    }
    let list = |p: &std::path::Path| {
        let mut v: Vec<_> = walk(p).into_iter().map(|f| f.strip_prefix(p).unwrap().to_path_buf()).collect();
        v.sort();
        v
    };
    let files = list(dirs[0].path());
    assert_eq!(files, list(dirs[1].path()));
    assert!(files.iter().any(|f| f.starts_with("ledgers")));
    for f in files {
        let a = std::fs::read(dirs[0].path().join(&f)).unwrap();
        let b = std::fs::read(dirs[1].path().join(&f)).unwrap();
        assert!(a == b, "{} differs", f.display());
    }
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}
