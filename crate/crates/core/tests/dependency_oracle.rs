mod common;

#[test]
fn dependency_analysis_matches_brute_force() {
    let m = common::toy();
    let specs = common::dependency_specs();
    assert!(specs.len() >= 20);
    let errors: Vec<String> = specs.iter().filter_map(|s| common::dependency_agrees(&m, s).err()).collect();
    assert!(errors.is_empty(), "{}", errors.join("\n\n"));
}
