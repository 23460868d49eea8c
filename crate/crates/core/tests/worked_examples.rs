use std::path::PathBuf;

use chorcheck_core::checker::{entails, replay, satisfies_naive, Checker};
use chorcheck_core::semantics::{reachable, step, Configuration};
use chorcheck_core::syntax::{parse_document, Document};

fn model(name: &str) -> Document {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    parse_document(&text, Some(&path)).unwrap()
}

fn config(doc: &Document, chor: &str) -> Configuration {
    Configuration::new(
        doc.state().cloned().unwrap_or_default(),
        doc.choreography(chor).unwrap().clone(),
    )
}

fn verdict(cfg: &Configuration, formula_file: &str, name: &str) -> bool {
    let f = model(formula_file).formula(name).unwrap().clone();
    let v = Checker::new().prove(cfg, &f).unwrap();
    assert_eq!(v.holds, satisfies_naive(cfg, &f).unwrap(), "oracle disagrees on {name}");
    if let Some(p) = &v.witness {
        replay(cfg, &f, p).unwrap();
    }
    v.holds
}

#[test]
fn online_booking_runs_to_completion() {
    let cfg = config(&model("ob.gc"), "ob");
    assert_eq!(reachable(&cfg, None).unwrap().len(), 8);
    let mut cur = cfg;
    let mut labels = 0;
    while let Some(t) = step(&cur).into_iter().next() {
        cur = t.target;
        labels += 1;
    }
    assert_eq!(labels, 7);
    assert_eq!(cur.chor, chorcheck_core::ast::Choreography::Inaction);
}

#[test]
fn online_booking_availability_usage_coupling() {
    let cfg = config(&model("ob.gc"), "ob");
    assert!(verdict(&cfg, "availability.gl", "availability"));
    assert!(verdict(&cfg, "usage.gl", "usage"));
    assert!(verdict(&cfg, "coupling.gl", "coupling"));
}

#[test]
fn online_booking_is_not_connected() {
    // init(Cust, AC) is followed by com(Cust, AC), which does not start at AC.
    let cfg = config(&model("ob.gc"), "ob");
    assert!(!verdict(&cfg, "connectedness.gl", "connectedness"));
}

#[test]
fn connected_chain_is_connected() {
    let doc = parse_document("chor c = A -> B : k<1, x>. B -> C : j<2, y>. 0;", None).unwrap();
    let cfg = config(&doc, "c");
    assert!(verdict(&cfg, "connectedness.gl", "connectedness"));
}

#[test]
fn response_abstraction() {
    let doc = model("response.gc");
    assert!(verdict(&config(&doc, "option1"), "response.gl", "response"));
    assert!(verdict(&config(&doc, "option2"), "response.gl", "response"));
    assert!(!verdict(&config(&doc, "option2_wrong"), "response.gl", "response"));
}

#[test]
fn response_needs_x_at_d() {
    let doc = model("response.gc");
    let cfg = Configuration::empty(doc.choreography("option1").unwrap().clone());
    let f = model("response.gl").formula("response").unwrap().clone();
    assert!(!entails(&cfg, &f).unwrap().holds);
}
