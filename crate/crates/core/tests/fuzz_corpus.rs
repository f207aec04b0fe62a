use hdisk::io::*;
use hdisk::quadrature::Region;
use hdisk::transform::{build_spatial_grid, build_spectral_grid, C_P};
use std::path::{Path, PathBuf};
use std::sync::Arc;

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, Vec<u8>)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let b = std::fs::read(&p).unwrap();
            (p, b)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds_parse_and_round_trip() {
    for (p, b) in seeds("config") {
        let c = RunConfig::from_json(&b).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        c.validate().unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(text.as_bytes()).unwrap(), c);
    }
}

#[test]
fn region_seeds_parse() {
    for (p, b) in seeds("region") {
        serde_json::from_slice::<Region>(&b).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn csv_seeds_parse() {
    for (p, b) in seeds("detect_csv") {
        detect_csv(&b).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (_, b) in seeds("values_csv") {
        let v = parse_values(&b).unwrap();
        assert_eq!(parse_values(values_csv(&v).as_bytes()).unwrap(), v);
    }
    for (_, b) in seeds("lattice_csv") {
        let l = parse_lattice(&b).unwrap();
        assert_eq!(lattice_csv(&l).as_bytes(), &b[..]);
    }
    let spatial = Arc::new(build_spatial_grid(2.0, 16, 8).unwrap());
    for (_, b) in seeds("spatial_csv") {
        let f = parse_spatial(&b, &spatial).unwrap();
        assert_eq!(spatial_csv(&f).as_bytes(), &b[..]);
    }
    let spectral = Arc::new(build_spectral_grid(4.0, 16, 8, C_P).unwrap());
    for (_, b) in seeds("spectral_csv") {
        let f = parse_spectral(&b, &spectral).unwrap();
        assert_eq!(spectral_csv(&f).as_bytes(), &b[..]);
    }
}
