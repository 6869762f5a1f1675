use effk_cli::{parse_label, run};
use std::path::PathBuf;

fn input(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "inputs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn effk(args: &[&str]) -> (i32, String) {
    let out = run(std::iter::once("effk").chain(args.iter().copied()));
    (out.code, out.text)
}

/// Value of `key=` in the machine block.
fn machine(text: &str, key: &str) -> Option<String> {
    let block = text.split("[machine]\n").nth(1)?;
    block.lines().find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

#[test]
fn k0_rat_of_the_unit() {
    let (code, text) = effk(&["k0", "rat", "p(0,1)"]);
    assert_eq!(code, 0, "{text}");
    assert_eq!(machine(&text, "value").as_deref(), Some("1"));
    let (_, text) = effk(&["k0", "rat", "p(1,1) - p(3,2)", "--cert", &input("dyadic.cert")]);
    assert_eq!(machine(&text, "value").as_deref(), Some("1/4"));
}

#[test]
fn trace_of_a_minimal_projection() {
    let (code, text) = effk(&["trace", "E(3,1,1)", "-k", "10"]);
    assert_eq!(code, 0);
    assert_eq!(machine(&text, "center").as_deref(), Some("1/8"));
    assert_eq!(machine(&text, "lo").as_deref(), Some("253/2048"));
    assert_eq!(machine(&text, "hi").as_deref(), Some("259/2048"));
}

#[test]
fn iso_sends_one_to_one() {
    let (code, text) = effk(&["iso", "--a", &input("dyadic.cert"), "--b", &input("quaternary.cert"), "--pt", "1", "-k", "8"]);
    assert_eq!(code, 0, "{text}");
    assert_eq!(machine(&text, "image is 1").as_deref(), Some("yes"));
    let (_, text) = effk(&["iso", "--a", "dims powers 2", "--b", "dims powers 4", "--pt", "E(3,1,1)", "-k", "8"]);
    assert_eq!(machine(&text, "image trace").as_deref(), Some("1/8"));
    assert_eq!(machine(&text, "k_seq").as_deref(), Some("0,1,2,4"));
}

#[test]
fn norm_and_classify() {
    let (_, text) = effk(&["norm", "E(1,1,2) + E(1,2,1)", "-k", "12"]);
    assert_eq!(machine(&text, "hi").as_deref(), Some("1"));
    let (_, text) = effk(&["proj", "classify", "E(2,1,1) + E(2,3,3)"]);
    assert_eq!(machine(&text, "projection").as_deref(), Some("yes"));
    assert_eq!(machine(&text, "label").as_deref(), Some("p(2,2)"));
    let (_, text) = effk(&["proj", "classify", "E(1,1,2)"]);
    assert_eq!(machine(&text, "projection").as_deref(), Some("no"));
}

#[test]
fn k0_equality_and_cone() {
    let (_, text) = effk(&["k0", "eq", "p(1,1)*p(1,1)", "p(0,1)"]);
    assert_eq!(machine(&text, "equal").as_deref(), Some("yes"));
    let (_, text) = effk(&["k0", "eq", "p(1,1)", "p(0,1)"]);
    assert_eq!(machine(&text, "equal").as_deref(), Some("no"));
    let (_, text) = effk(&["k0", "pos", "p(0,1) - p(1,1)"]);
    assert_eq!(machine(&text, "positive").as_deref(), Some("yes"));
    let (_, text) = effk(&["k0", "pos", "p(1,1) - p(0,1)"]);
    assert_eq!(machine(&text, "positive").as_deref(), Some("no"));
    // an Unknown answer reports the fuel it spent
    let (_, text) = effk(&["k0", "pos", "p(0,1) - p(1,1)", "--fuel", "0"]);
    assert_eq!(machine(&text, "status").as_deref(), Some("unknown"));
    assert!(machine(&text, "fuel").is_some());
}

#[test]
fn supernatural_files() {
    let (code, text) = effk(&["sn", "parse", &input("mixed.sn")]);
    assert_eq!(code, 0, "{text}");
    assert_eq!(machine(&text, "exponent 2").as_deref(), Some("inf"));
    assert_eq!(machine(&text, "n_1").as_deref(), Some("6"));
    let (_, printed) = effk(&["sn", "print", &input("mixed.sn")]);
    assert!(printed.starts_with("verb: sn print\n2 inf\n3 2\n5 1\n"));
    let (code, text) = effk(&["build", "--sn", &input("hard.sn")]);
    assert_eq!(code, 0, "{text}");
    assert_eq!(machine(&text, "n_0").as_deref(), Some("1"));
}

#[test]
fn extraction_and_k1() {
    let (code, text) = effk(&["extract-cert", "--pres", &input("dyadic.pres"), "--stages", "3"]);
    assert_eq!(code, 0, "{text}");
    assert_eq!(machine(&text, "dims").as_deref(), Some("2,4,8"));
    assert_eq!(machine(&text, "complete").as_deref(), Some("true"));
    let (_, text) = effk(&["k1", "smoke", "--fuel", "100000"]);
    assert_eq!(machine(&text, "confirmed").as_deref(), Some("5"));
}

#[test]
fn errors_carry_positions() {
    let (code, text) = effk(&["k0", "rat", "p(1,x"]);
    assert_eq!(code, 1);
    assert_eq!(machine(&text, "line").as_deref(), Some("1"));
    assert_eq!(machine(&text, "col").as_deref(), Some("5"));
    let (code, text) = effk(&["norm", "E(1,1,"]);
    assert_eq!(code, 1);
    assert_eq!(machine(&text, "status").as_deref(), Some("error"));
    let (code, _) = effk(&["trace", "E(1,3,1)"]);
    assert_eq!(code, 1);
    let (code, _) = effk(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["iso", "--a", "dims powers 2", "--b", "dims powers 4", "--pt", "E(2,1,2) + E(1,2,2)", "-k", "6"],
        vec!["k0", "pos", "p(2,3) - p(1,1)"],
        vec!["extract-cert", "--pres", "PRES", "--stages", "2"],
    ] {
        let pres = input("m3.pres");
        let args: Vec<&str> = args.into_iter().map(|a| if a == "PRES" { pres.as_str() } else { a }).collect();
        assert_eq!(effk(&args), effk(&args));
    }
}

#[test]
fn label_grammar() {
    assert!(parse_label("x0*x3 - x2").is_ok());
    assert!(parse_label("-p(1,1,2) + p(0,1)").is_ok());
    assert!(parse_label("p(1,1,0)").is_err());
    assert!(parse_label("x1 x2").is_err());
}
