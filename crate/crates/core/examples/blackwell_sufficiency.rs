// Blackwell sufficiency as a linear feasibility problem, next to the
// unique information it mirrors.

use fairpid::dist::{Units, Var};
use fairpid::pid::SolverConfig;
use fairpid::report::run_blackwell;
use fairpid::scenario::{example1, example2, example4};

pub fn run_example() -> fairpid::Result<()> {
    let cfg = SolverConfig::default();
    let cases = [
        ("example1", example1(), Var::Y),
        ("example2", example2(0.9)?, Var::Y),
        ("example4", example4(0.9)?, Var::Y),
        ("example4", example4(0.9)?, Var::Yhat),
    ];
    for (name, dist, candidate) in cases {
        let r = run_blackwell(&dist, candidate, &cfg, Units::Bits, name)?;
        println!(
            "{name}: {} sufficient for {}? {:<5}  Uni(Z:{}|{}) = {}",
            r.sufficient, r.degraded, r.feasible, r.degraded, r.sufficient, r.unique_of_degraded
        );
        for row in r.channel.iter().flatten() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            println!("  [{}]", cells.join(", "));
        }
    }
    Ok(())
}

fn main() -> fairpid::Result<()> {
    run_example()
}
