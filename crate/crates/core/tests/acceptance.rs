use hdisk::io::RunConfig;
use hdisk::suite::{run, Level, Status};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

fn main() -> ExitCode {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("config/reference.json");
    let cfg = match RunConfig::load(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let t = Instant::now();
    let results = run(Level::All, &cfg, |r| println!("{}", r.line()));
    let count = |s: Status| results.iter().filter(|r| r.status == s).count();
    println!(
        "acceptance: {} passed, {} failed, {} known failures in {:.0} s",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::KnownFail),
        t.elapsed().as_secs_f64()
    );
    if count(Status::Fail) == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
