// A small seeded batch across both algorithms, printed as CSV.

use covnet::batch::{self, RunSpec};
use covnet::oracle::OracleLimits;
use covnet::Result;

pub fn run_example() -> Result<()> {
    let spec = RunSpec::parse(
        r#"{"families": [
            {"spec": {"kind": "laminar", "n": 6, "m": 9, "g": 3, "seed": 100}, "count": 4},
            {"spec": {"kind": "sunflower", "n": 8, "m": 11, "g": 3, "seed": 200}, "count": 4,
             "bound": "oracle"}
        ]}"#,
    )?;
    let summary = batch::run(&spec, &OracleLimits::default());
    print!("{}", summary.to_csv()?);
    assert_eq!(summary.failures(), 0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
