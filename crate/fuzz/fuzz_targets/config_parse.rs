#![no_main]

use amphough_cli::synth::Scene;
use amphough_cli::JobConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = JobConfig::parse(text) {
        let _ = Scene::from_config(&cfg);
    }
});
