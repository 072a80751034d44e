#![no_main]

use amphough_core::io::{read_amph, write_amph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(acc) = read_amph(data) {
        let again = write_amph(&acc);
        assert_eq!(read_amph(&again).unwrap().lattice(), acc.lattice());
    }
});
