use clap::Parser;
use hodgekit::cli::{execute, Cli, Outcome};
use serde_json::Value;

fn run(args: &[&str], inputs: &[String]) -> Outcome {
    let mut argv = vec!["hodgekit"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv).expect("arguments parse");
    execute(&cli, inputs)
}

fn generate(args: &[&str]) -> String {
    let mut a = vec!["generate"];
    a.extend_from_slice(args);
    let out = run(&a, &[]);
    assert_eq!(out.code, 0, "{}", out.output);
    out.output
}

fn report(o: &Outcome) -> Value {
    serde_json::from_str(&o.output).expect("reports are json")
}

#[test]
fn generated_hodge_complexes_validate() {
    for seed in 0..5 {
        let s = seed.to_string();
        let bundle = generate(&["hodge-complex", "--seed", &s]);
        let out = run(&["validate", "-"], &[bundle]);
        assert_eq!(out.code, 0, "{}", out.output);
        assert_eq!(report(&out)["passed"], Value::Bool(true));
    }
}

#[test]
fn degeneration_pages_are_bounded() {
    let bundle = generate(&["hodge-complex", "--seed", "11"]);
    let out = run(&["degeneration", "-"], &[bundle]);
    assert_eq!(out.code, 0, "{}", out.output);
    let v = report(&out);
    assert!(v["W"].as_u64().unwrap() <= 2);
    assert_eq!(v["F"].as_u64(), Some(1));
    assert_eq!(v["Fbar"].as_u64(), Some(1));
}

#[test]
fn invalid_instances_fail_with_a_witness() {
    for defect in ["not-strict-f", "not-strict-fbar", "not-opposed", "wrong-weight", "not-a-complex"] {
        let bundle = generate(&["invalid-hodge-complex", "--seed", "2", "--defect", defect]);
        let out = run(&["validate", "-"], &[bundle]);
        assert_eq!(out.code, 1, "{defect}: {}", out.output);
        let v = report(&out);
        assert_eq!(v["passed"], Value::Bool(false));
        let witness = v["failure"]["witness"].as_array().expect("witness present");
        assert!(!witness.is_empty(), "{defect}");
    }
}

#[test]
fn control_fails_validation() {
    let bundle = generate(&["nondegenerate-control"]);
    assert_eq!(run(&["validate", "-"], &[bundle.clone()]).code, 1);
    let out = run(&["pages", "-"], &[bundle]);
    assert_eq!(out.code, 0, "{}", out.output);
}

#[test]
fn malformed_input_exits_two() {
    for text in ["", "{", "{\"schema\": 1}", "[1, 2]"] {
        let out = run(&["validate", "-"], &[text.to_string()]);
        assert_eq!(out.code, 2, "{text:?}");
        assert!(report(&out)["error"].is_string());
    }
    let poset = generate(&["poset", "--seed", "1"]);
    assert_eq!(run(&["validate", "-"], &[poset]).code, 2);
}

#[test]
fn same_seed_same_bytes() {
    for kind in ["hodge-complex", "invalid-hodge-complex", "stratified-sheaf", "blow-down", "row"] {
        let a = generate(&[kind, "--seed", "42"]);
        let b = generate(&[kind, "--seed", "42"]);
        assert_eq!(a, b, "{kind}");
    }
}

#[test]
fn mayer_vietoris_on_the_example() {
    let bundle = generate(&["blow-down-example"]);
    let out = run(&["mv-check", "-"], &[bundle]);
    assert_eq!(out.code, 0, "{}", out.output);
    assert_eq!(report(&out)["passed"], Value::Bool(true));
}

#[test]
fn circle_cohomology() {
    let bundle = generate(&["circle"]);
    let out = run(&["cohomology", "-"], &[bundle]);
    assert_eq!(out.code, 0, "{}", out.output);
    let v = report(&out);
    let dims: Vec<u64> = v["dims"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap()).collect();
    assert_eq!(dims, vec![1, 1]);
}

#[test]
fn resolution_pipeline() {
    let poset = generate(&["poset", "--seed", "5", "--size", "4"]);
    let res = run(&["resolve", "-", "--degree-bound", "2"], &[poset]);
    assert_eq!(res.code, 0, "{}", res.output);
    let out = run(&["hypercover-check", "-"], &[res.output.clone()]);
    assert_eq!(out.code, 0, "{}", out.output);
    let row = generate(&["row", "--seed", "5"]);
    assert_eq!(run(&["descent-check", "-"], &[row.clone()]).code, 0);
    assert_eq!(run(&["assemble", "-"], &[row]).code, 0);
}

#[test]
fn bar_check_on_generated_sheaf() {
    let bundle = generate(&["stratified-sheaf", "--seed", "9"]);
    let out = run(&["bar-check", "-"], &[bundle]);
    assert_eq!(out.code, 0, "{}", out.output);
}
