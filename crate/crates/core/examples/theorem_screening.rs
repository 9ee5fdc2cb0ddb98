// Screens random joints that satisfy statistical parity: on every one,
// the predictive parity gap is at least the equalized odds gap.

use fairpid::fairness::audit;
use fairpid::pid::SolverConfig;
use fairpid::scenario::{generate_scenario, ScenarioKind, ScenarioSpec};

pub fn run_example() -> fairpid::Result<()> {
    let spec = ScenarioSpec::new(ScenarioKind::SpZeroFamily).with_param("samples", 20.0).with_seed(11);
    let cfg = SolverConfig::default();
    let mut tightest = f64::INFINITY;
    for p in generate_scenario(&spec)? {
        let a = audit(&p.dist, &cfg)?;
        let slack = a.gaps.pp_gap - a.gaps.eo_gap;
        tightest = tightest.min(slack);
        println!(
            "shape {:?}  sp {:.1e}  eo {:.4}  pp {:.4}  t3 {}",
            p.dist.shape(),
            a.gaps.sp_gap,
            a.gaps.eo_gap,
            a.gaps.pp_gap,
            a.theorems.t3.status()
        );
    }
    println!("smallest pp - eo: {tightest:.6}");
    Ok(())
}

fn main() -> fairpid::Result<()> {
    run_example()
}
