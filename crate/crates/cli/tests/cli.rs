use fission_cli::run;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["fission"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const BIG: &str = "[(1, x^(3/2)+x), (1, x^(3/2)+2*x), (1, x^(1/3)), (1, 2*x^(1/3))]";

#[test]
fn worked_levels() {
    assert_eq!(call(&["levels", "x^(3)+x^(5/2)+x^(3/2)+x^(1/3)"]), (0, "5/2 1/3\n".into(), String::new()));
}

#[test]
fn equiv_exit_codes() {
    assert_eq!(call(&["equiv", "<x^(1/2)>", "<2*x^(1/2)>"]).0, 0);
    assert_eq!(call(&["equiv", "<x^(1/2)>", "<x^(1/3)>"]).0, 3);
    assert_eq!(call(&["equiv", "<x^(1/2)>"]).0, 2);
}

#[test]
fn domain_errors_are_json() {
    let (code, out, err) = call(&["tree", "<x^(0)>"]);
    assert_eq!((code, out.as_str()), (1, ""));
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "NonPositiveExponent");
    assert!(v["message"].is_string());

    let (code, _, err) = call(&["tree", "--file", "/nonexistent/input.txt"]);
    assert_eq!(code, 1);
    assert_eq!(serde_json::from_str::<Value>(err.trim()).unwrap()["error"], "IoError");
}

#[test]
fn usage_errors() {
    assert_eq!(call(&[]).0, 2);
    assert_eq!(call(&["tree", "--katz", "one", "<0>"]).0, 2);
    assert_eq!(call(&["census"]).0, 2);
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("census"));
}

#[test]
fn big_example_reports() {
    let (code, out, _) = call(&["config", BIG]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "dim 8"));
    assert!(out.lines().any(|l| l == "special dim 7"));
    let (_, out, _) = call(&["moduli", BIG]);
    assert_eq!(out, "mu 8\n");
    let (_, json, _) = call(&["tree", "--labelled", "--format", "json", BIG]);
    let (_, text, _) = call(&["tree", "--labelled", &json]);
    assert_eq!(text, call(&["tree", "--labelled", BIG]).1);
}

#[test]
fn outputs_are_repeatable() {
    for args in [&["census", "--max-rank", "3", "--format", "json"][..], &["config", "--seed", "5", BIG], &["oracle", BIG]] {
        assert_eq!(call(args), call(args));
    }
}

#[test]
fn sampled_types_realise_the_tree() {
    let (_, out, _) = call(&["config", "--seed", "9", BIG]);
    let sample = out.lines().find_map(|l| l.strip_prefix("sample ")).unwrap();
    assert_eq!(call(&["equiv", "--labelled", sample, BIG]).0, 0);
}
