#![no_main]

use amphough_core::io::{read_detection_report, read_heatmap_scale};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = read_detection_report(text);
    let _ = read_heatmap_scale(text);
});
