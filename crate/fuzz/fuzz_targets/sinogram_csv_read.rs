#![no_main]

use amphough_core::io::read_sinogram_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = read_sinogram_csv(text);
    }
});
