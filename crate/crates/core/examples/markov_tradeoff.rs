// Statistical parity against predictive parity along `Z -> Y -> Yhat`.
//
// Equalized odds holds at every point, so the two gaps always add up to
// `I(Z;Y)`. Writes the trajectory as CSV to stdout.

use std::io;

use fairpid::dist::Units;
use fairpid::pid::SolverConfig;
use fairpid::report::run_sweep;
use fairpid::scenario::{ScenarioKind, ScenarioSpec};

pub fn run_example() -> fairpid::Result<()> {
    let spec = ScenarioSpec::new(ScenarioKind::MarkovSweep).with_param("points", 11.0);
    let rows = run_sweep(&spec, &SolverConfig::default(), Units::Bits, io::stdout().lock())?;
    let worst = rows
        .iter()
        .map(|r| (r.audit.gaps.sp_gap + r.audit.gaps.pp_gap - r.audit.gaps.dataset_mi).abs())
        .fold(0.0, f64::max);
    eprintln!("max |sp + pp - I(Z;Y)| = {worst:.1e}");
    Ok(())
}

fn main() -> fairpid::Result<()> {
    run_example()
}
