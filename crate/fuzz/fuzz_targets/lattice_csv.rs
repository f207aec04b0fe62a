#![no_main]
use hdisk::io::{lattice_csv, parse_lattice};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(p) = parse_lattice(data) {
        let back = parse_lattice(lattice_csv(&p).as_bytes()).unwrap();
        assert!(back.iter().zip(&p).all(|(a, b)| a.z() == b.z()));
    }
});
