// Entropy, mutual information and plug-in estimation on a small joint.

use fairpid::dist::{
    conditional_mutual_information, entropy, from_samples, joint_mutual_information, mutual_information, SampleRecord,
    Var,
};
use fairpid::scenario::example2;

pub fn run_example() -> fairpid::Result<()> {
    println!("H(0.9, 0.1) = {:.4} bits", entropy(&[0.9, 0.1]));

    let dist = example2(0.9)?;
    println!("I(Z;Yhat)   = {:.6}", mutual_information(&dist, Var::Z, Var::Yhat)?);
    println!("I(Z;Y)      = {:.6}", mutual_information(&dist, Var::Z, Var::Y)?);
    println!("I(Z;Yhat|Y) = {:.6}", conditional_mutual_information(&dist, Var::Z, Var::Yhat, Var::Y)?);
    println!("I(Z;Yhat,Y) = {:.6}", joint_mutual_information(&dist, Var::Z)?);

    let p_zy = dist.marginal(&[Var::Z, Var::Y])?;
    println!("P(Z, Y) =\n{p_zy:.3}");

    // Records are (z, y, yhat); alphabets come out sorted.
    let records: Vec<SampleRecord> = [("f", "1", "1"), ("m", "0", "1"), ("f", "0", "0"), ("m", "1", "1")]
        .into_iter()
        .map(|(z, y, yh)| SampleRecord::new(z, y, yh))
        .collect();
    let est = from_samples(&records, 0.5)?;
    println!("Z alphabet {:?}, P(f, 1, 1) = {:.4}", est.alphabet(Var::Z).symbols(), est.prob_of("f", "1", "1"));
    Ok(())
}

fn main() -> fairpid::Result<()> {
    run_example()
}
