#![no_main]
use hdisk::io::parse_spatial;
use hdisk::transform::{build_spatial_grid, SpatialGrid};
use libfuzzer_sys::fuzz_target;
use std::sync::{Arc, OnceLock};

static GRID: OnceLock<Arc<SpatialGrid>> = OnceLock::new();

fuzz_target!(|data: &[u8]| {
    let grid = GRID.get_or_init(|| Arc::new(build_spatial_grid(2.0, 16, 8).unwrap()));
    let _ = parse_spatial(data, grid);
});
