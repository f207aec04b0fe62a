#![no_main]
use hdisk::quadrature::Region;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = serde_json::from_slice::<Region>(data);
});
