// The four textbook fairness scenarios and their decompositions.
//
// ```bash
// cargo run --example canonical_examples
// ```

use fairpid::fairness::audit;
use fairpid::pid::SolverConfig;
use fairpid::scenario::{example1, example2, example3, example4};

pub fn run_example() -> fairpid::Result<()> {
    let cfg = SolverConfig::default();
    let cases = [
        ("example1: Yhat = Z", example1()),
        ("example2: Yhat = Y, P(Y=Z) = 0.9", example2(0.9)?),
        ("example3: Yhat = Z xnor Y", example3()),
        ("example4: Yhat independent", example4(0.9)?),
    ];
    println!(
        "{:<36}{:>9}{:>9}{:>9}{:>11}{:>9}{:>9}{:>11}",
        "", "sp", "eo", "pp", "uni_pred", "red", "syn", "uni_label"
    );
    for (name, dist) in cases {
        let a = audit(&dist, &cfg)?;
        let (g, p) = (&a.gaps, &a.pid);
        println!(
            "{name:<36}{:>9.4}{:>9.4}{:>9.4}{:>11.4}{:>9.4}{:>9.4}{:>11.4}",
            g.sp_gap, g.eo_gap, g.pp_gap, p.uni_a, p.red, p.syn, p.uni_b
        );
        for (k, v) in a.theorems.iter() {
            if v.premise {
                print!("  {k}:{}", v.status());
            }
        }
        println!();
    }
    Ok(())
}

fn main() -> fairpid::Result<()> {
    run_example()
}
