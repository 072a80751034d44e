#![no_main]

use amphough_core::io::{read_pgm, write_pgm, PgmEncoding};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Anything that decodes must survive a re-encode at 16 bits.
    if let Ok(g) = read_pgm(data) {
        let bytes = write_pgm(&g, 65535, PgmEncoding::Binary).unwrap();
        let back = read_pgm(&bytes).unwrap();
        assert_eq!((back.width(), back.height()), (g.width(), g.height()));
    }
});
