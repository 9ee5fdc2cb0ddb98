// Three bits split evenly into unique, redundant and synergistic parts.
//
// `Z = (Z1, Z2, Z3)`, `A = (Z1, Z2, Z3 xor N)`, `B = (Z2, N)`.

use std::time::Instant;

use fairpid::dist::Var;
use fairpid::pid::{decompose, SolverConfig};
use fairpid::scenario::motivational;

pub fn run_example() -> fairpid::Result<()> {
    let dist = motivational();
    let start = Instant::now();
    let pid = decompose(&dist, Var::Z, &SolverConfig::default())?;
    println!("I(Z; A, B)   = {:.6}", pid.total);
    println!("Uni(Z: A\\B)  = {:.6}", pid.uni_a);
    println!("Uni(Z: B\\A)  = {:.6}", pid.uni_b);
    println!("Red(Z: A, B) = {:.6}", pid.red);
    println!("Syn(Z: A, B) = {:.6}", pid.syn);
    println!(
        "{} iterations, certified gap {:.1e}, {:.2?}",
        pid.iterations(),
        pid.max_gap(),
        start.elapsed()
    );
    Ok(())
}

fn main() -> fairpid::Result<()> {
    run_example()
}
