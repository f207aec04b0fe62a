#![no_main]
use hdisk::io::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(c) = RunConfig::from_json(data) {
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(text.as_bytes()).unwrap(), c);
    }
});
