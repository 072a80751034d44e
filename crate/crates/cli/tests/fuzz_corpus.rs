//! Every checked-in fuzz seed is a valid input for its decoder.

use std::fs;
use std::path::PathBuf;

use amphough_cli::JobConfig;
use amphough_core::io::{
    read_amph, read_detection_report, read_grid_csv, read_heatmap_scale, read_pgm, read_sinogram_csv, write_amph,
};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).unwrap()
}

#[test]
fn pgm_seeds_decode() {
    for (name, bytes) in seeds("pgm_read") {
        read_pgm(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn amph_seeds_round_trip() {
    for (name, bytes) in seeds("amph_read") {
        let acc = read_amph(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(write_amph(&acc), bytes, "{name}");
    }
}

#[test]
fn config_seeds_parse() {
    for (name, bytes) in seeds("config_parse") {
        JobConfig::parse(text(&bytes)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn table_seeds_parse() {
    for (name, bytes) in seeds("grid_csv_read") {
        read_grid_csv(text(&bytes)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, bytes) in seeds("sinogram_csv_read") {
        read_sinogram_csv(text(&bytes)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, bytes) in seeds("detection_report_read") {
        let t = text(&bytes);
        assert!(
            read_detection_report(t).is_ok() || read_heatmap_scale(t).is_ok(),
            "{name}"
        );
    }
}

mod mutated {
    use super::*;
    use proptest::prelude::*;

    fn all_seeds() -> Vec<Vec<u8>> {
        [
            "pgm_read",
            "amph_read",
            "config_parse",
            "grid_csv_read",
            "sinogram_csv_read",
            "detection_report_read",
        ]
        .iter()
        .flat_map(|t| seeds(t).into_iter().map(|(_, b)| b))
        .collect()
    }

    fn feed(bytes: &[u8]) {
        let _ = read_pgm(bytes);
        let _ = read_amph(bytes);
        if let Ok(t) = std::str::from_utf8(bytes) {
            let _ = JobConfig::parse(t);
            let _ = read_grid_csv(t);
            let _ = read_sinogram_csv(t);
            let _ = read_detection_report(t);
            let _ = read_heatmap_scale(t);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn decoders_survive_mutation(
            pick in any::<prop::sample::Index>(),
            edits in prop::collection::vec((any::<prop::sample::Index>(), any::<u8>(), 0u8..3), 1..8),
        ) {
            let seeds = all_seeds();
            let mut bytes = pick.get(&seeds).clone();
            for (at, byte, op) in edits {
                let k = if bytes.is_empty() { 0 } else { at.index(bytes.len()) };
                match op {
                    0 if !bytes.is_empty() => bytes[k] = byte,
                    1 if !bytes.is_empty() => { bytes.truncate(k); }
                    _ => bytes.insert(k, byte),
                }
            }
            feed(&bytes);
        }

        #[test]
        fn decoders_survive_noise(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
            feed(&bytes);
        }
    }
}
