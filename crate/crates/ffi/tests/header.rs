#[test]
fn committed_header_matches_generated() {
    let generated = include_str!(concat!(env!("OUT_DIR"), "/teledist.h"));
    let committed = include_str!("../include/teledist.h");
    assert!(
        generated == committed,
        "include/teledist.h is stale; copy the generated header from {}",
        env!("OUT_DIR")
    );
}
