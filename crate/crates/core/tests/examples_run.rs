// Every runnable example doubles as a smoke test.
#![allow(dead_code)]

macro_rules! example {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(information_measures, "information_measures.rs");
example!(canonical_examples, "canonical_examples.rs");
example!(motivational_pid, "motivational_pid.rs");
example!(unique_information, "unique_information.rs");
example!(blackwell_sufficiency, "blackwell_sufficiency.rs");
example!(markov_tradeoff, "markov_tradeoff.rs");
example!(csv_audit, "csv_audit.rs");
example!(theorem_screening, "theorem_screening.rs");

#[test]
fn information_measures_runs() {
    information_measures::run_example().unwrap();
}

#[test]
fn canonical_examples_runs() {
    canonical_examples::run_example().unwrap();
}

#[test]
fn motivational_pid_runs() {
    motivational_pid::run_example().unwrap();
}

#[test]
fn unique_information_runs() {
    unique_information::run_example().unwrap();
}

#[test]
fn blackwell_sufficiency_runs() {
    blackwell_sufficiency::run_example().unwrap();
}

#[test]
fn markov_tradeoff_runs() {
    markov_tradeoff::run_example().unwrap();
}

#[test]
fn csv_audit_runs() {
    csv_audit::run_example().unwrap();
}

#[test]
fn theorem_screening_runs() {
    theorem_screening::run_example().unwrap();
}
