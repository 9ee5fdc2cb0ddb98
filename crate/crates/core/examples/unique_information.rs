// Solving for unique information directly and checking the answer
// against an exhaustive grid.

use fairpid::dist::{mutual_information, Var};
use fairpid::pid::{brute_force_unique, construct_q0, unique_information, MarginalPolytope, SolverConfig};
use fairpid::scenario::markov_chain;

pub fn run_example() -> fairpid::Result<()> {
    let dist = markov_chain(0.8, 0.3)?;
    let poly = MarginalPolytope::from_dist(&dist, Var::Z)?;

    let q0 = construct_q0(&dist, Var::Z)?;
    println!("start: I_Q0(Yhat; Y) = {:.6}", mutual_information(&q0, Var::Yhat, Var::Y)?);

    let res = unique_information(&poly, &SolverConfig::default())?;
    println!(
        "Uni(Z: Yhat | Y) = {:.9}  gap {:.1e}  iterations {}  converged {}",
        res.objective, res.certified_gap, res.iterations, res.converged
    );
    println!("objective per stage: {:?}", res.trace);

    let grid = brute_force_unique(&poly, 1001)?;
    println!("grid minimum       = {grid:.9}");

    let swapped = unique_information(&poly.swapped(), &SolverConfig::default())?;
    println!("Uni(Z: Y | Yhat) = {:.9}", swapped.objective);
    Ok(())
}

fn main() -> fairpid::Result<()> {
    run_example()
}
