use hdisk::geometry::DiskPoint;
use hdisk::io::*;
use hdisk::transform::{
    build_spatial_grid, build_spectral_grid, SpatialFunction, SpatialGrid, SpectralFunction, SpectralGrid,
};
use hdisk::Complex64;
use proptest::prelude::*;
use std::sync::{Arc, OnceLock};

fn spectral_grid() -> Arc<SpectralGrid> {
    static G: OnceLock<Arc<SpectralGrid>> = OnceLock::new();
    G.get_or_init(|| Arc::new(build_spectral_grid(4.0, 16, 8, 0.15915494309189535).unwrap())).clone()
}

fn spatial_grid() -> Arc<SpatialGrid> {
    static G: OnceLock<Arc<SpatialGrid>> = OnceLock::new();
    G.get_or_init(|| Arc::new(build_spatial_grid(2.0, 16, 8).unwrap())).clone()
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1e6f64..1e6, prop_oneof![Just(0.0), -1e-300f64..1e-300, -1e3f64..1e3]).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_csv_round_trip(v in proptest::collection::vec(complex(), 128)) {
        let f = SpectralFunction::new(spectral_grid(), v).unwrap();
        let text = spectral_csv(&f);
        prop_assert_eq!(detect_csv(text.as_bytes()).unwrap(), CsvKind::Spectral);
        let back = parse_spectral(text.as_bytes(), &spectral_grid()).unwrap();
        prop_assert_eq!(back.values, f.values);
    }

    #[test]
    fn spatial_csv_round_trip(v in proptest::collection::vec(complex(), 128)) {
        let f = SpatialFunction::new(spatial_grid(), v).unwrap();
        let text = spatial_csv(&f);
        prop_assert_eq!(detect_csv(text.as_bytes()).unwrap(), CsvKind::Spatial);
        let back = parse_spatial(text.as_bytes(), &spatial_grid()).unwrap();
        prop_assert_eq!(back.values, f.values);
    }

    #[test]
    fn values_csv_round_trip(v in proptest::collection::vec(complex(), 0..40)) {
        let text = values_csv(&v);
        prop_assert_eq!(detect_csv(text.as_bytes()).unwrap(), CsvKind::Values);
        prop_assert_eq!(parse_values(text.as_bytes()).unwrap(), v);
    }

    #[test]
    fn lattice_csv_round_trip(pts in proptest::collection::vec((0.0f64..0.99, 0.0f64..std::f64::consts::TAU), 1..40)) {
        let points: Vec<DiskPoint> = pts.iter().map(|&(r, t)| DiskPoint::from_xy(r * t.cos(), r * t.sin()).unwrap()).collect();
        let text = lattice_csv(&points);
        prop_assert_eq!(detect_csv(text.as_bytes()).unwrap(), CsvKind::Lattice);
        let back = parse_lattice(text.as_bytes()).unwrap();
        prop_assert_eq!(back.len(), points.len());
        for (a, b) in back.iter().zip(&points) {
            prop_assert_eq!(a.z(), b.z());
        }
    }

    #[test]
    fn config_json_round_trip(omega in 0.5f64..16.0, seed in any::<u64>(), tol in 1e-12f64..1e-2, n in 1usize..6) {
        let mut c = RunConfig::default();
        c.omega = omega;
        c.seed = seed;
        c.tol = tol;
        c.omegas = (1..=n).map(|k| k as f64).collect();
        let text = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(RunConfig::from_json(text.as_bytes()).unwrap(), c);
    }

    #[test]
    fn parsers_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        let _ = detect_csv(&bytes);
        let _ = parse_values(&bytes);
        let _ = parse_lattice(&bytes);
        let _ = parse_spectral(&bytes, &spectral_grid());
        let _ = parse_spatial(&bytes, &spatial_grid());
        let _ = RunConfig::from_json(&bytes);
    }
}

#[test]
fn shuffled_rows_are_rejected() {
    let f = SpectralFunction::new(spectral_grid(), vec![Complex64::new(1.0, 0.0); 128]).unwrap();
    let text = spectral_csv(&f);
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(1, 2);
    assert!(parse_spectral((lines.join("\n") + "\n").as_bytes(), &spectral_grid()).is_err());
    assert!(parse_values(b"id,re,im\n1,0.0,0.0\n").is_err());
    assert!(parse_values(b"id,re,im\n0,NaN,0.0\n").is_err());
    assert!(parse_lattice(b"id,x,y\n").is_err());
    assert!(parse_lattice(b"id,x,y\n0,1.0,0.0\n").is_err());
}
