#![no_main]
use hdisk::io::parse_spectral;
use hdisk::transform::{build_spectral_grid, SpectralGrid, C_P};
use libfuzzer_sys::fuzz_target;
use std::sync::{Arc, OnceLock};

static GRID: OnceLock<Arc<SpectralGrid>> = OnceLock::new();

fuzz_target!(|data: &[u8]| {
    let grid = GRID.get_or_init(|| Arc::new(build_spectral_grid(4.0, 16, 8, C_P).unwrap()));
    let _ = parse_spectral(data, grid);
});
