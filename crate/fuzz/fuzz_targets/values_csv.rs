#![no_main]
use hdisk::io::{parse_values, values_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(v) = parse_values(data) {
        assert_eq!(parse_values(values_csv(&v).as_bytes()).unwrap(), v);
    }
});
