mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{cfg, id_of, rec, registry, v};
use rufscope::predicate::{parse_predicate, RufConfiguration};
use rufscope::registry::{PackageId, RegistryIndex};
use rufscope::resolver::{
    dependents, generate_edg, read_edg, resolve, resolve_with_cap, DependencyTree, EdgError, EdgOptions, KindSet,
    ResolveError, VirtualPackConfig,
};

fn versions_of(reg: &RegistryIndex, tree: &DependencyTree) -> BTreeSet<String> {
    tree.nodes().keys().map(|id| reg.get(*id).unwrap().label()).collect()
}

fn labels(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn reselection_fixture() -> RegistryIndex {
    registry(vec![
        rec("a", "0.1.0", &["c ^0.1"], &[]),
        rec("b", "0.1.0", &["c =0.1.3"], &[]),
        rec("c", "0.1.3", &[], &[]),
        rec("c", "0.1.9", &["d ^1"], &[]),
        rec("d", "1.0.0", &[], &[]),
        rec("app", "1.0.0", &["a ^0.1"], &[]),
        rec("app", "2.0.0", &["a ^0.1", "b ^0.1"], &[]),
    ])
}

#[test]
fn lone_requirement_picks_newest() {
    let reg = reselection_fixture();
    let tree = resolve(&reg, &cfg("app", "1.0.0")).unwrap();
    assert_eq!(versions_of(&reg, &tree), labels(&["app-1.0.0", "a-0.1.0", "c-0.1.9", "d-1.0.0"]));
}

#[test]
fn later_obligation_forces_reselection() {
    let reg = reselection_fixture();
    let tree = resolve(&reg, &cfg("app", "2.0.0")).unwrap();
    // c-0.1.9 pulled in d; dropping it must drop d too
    assert_eq!(versions_of(&reg, &tree), labels(&["app-2.0.0", "a-0.1.0", "b-0.1.0", "c-0.1.3"]));
    let c = id_of(&reg, "c", "0.1.3");
    assert!(tree.is_direct(id_of(&reg, "a", "0.1.0"), c));
    assert!(tree.is_direct(id_of(&reg, "b", "0.1.0"), c));
}

#[test]
fn edg_does_not_assume_transitivity() {
    let reg = reselection_fixture();
    let cfgs = reg.iter().map(|p| VirtualPackConfig::for_id(&reg, p.id).unwrap());
    let edg = generate_edg(&reg, cfgs, &EdgOptions::default());
    let (app2, a, c3, c9) = (id_of(&reg, "app", "2.0.0"), id_of(&reg, "a", "0.1.0"), id_of(&reg, "c", "0.1.3"), id_of(&reg, "c", "0.1.9"));
    assert!(edg.edge(a, c9).unwrap().direct);
    assert!(edg.edge(app2, a).unwrap().direct);
    assert!(!edg.edge(app2, c3).unwrap().direct);
    assert!(edg.edge(app2, c9).is_none());
    assert!(edg.edge(a, c3).is_none());
}

#[test]
fn root_without_deps() {
    let reg = registry(vec![rec("solo", "1.0.0", &[], &[])]);
    let tree = resolve(&reg, &cfg("solo", "1.0.0")).unwrap();
    assert_eq!(tree.len(), 1);
    assert!(tree.edges().is_empty());
}

#[test]
fn major_versions_coexist() {
    let reg = registry(vec![
        rec("root", "1.0.0", &["x ^1", "y ^1"], &[]),
        rec("y", "1.0.0", &["x ^2"], &[]),
        rec("x", "1.4.0", &[], &[]),
        rec("x", "2.1.0", &[], &[]),
    ]);
    let tree = resolve(&reg, &cfg("root", "1.0.0")).unwrap();
    assert_eq!(versions_of(&reg, &tree), labels(&["root-1.0.0", "x-1.4.0", "x-2.1.0", "y-1.0.0"]));
}

#[test]
fn zero_minor_buckets_are_separate() {
    let reg = registry(vec![
        rec("root", "1.0.0", &["x ^0.1", "x ^0.2"], &[]),
        rec("x", "0.1.5", &[], &[]),
        rec("x", "0.2.0", &[], &[]),
    ]);
    let tree = resolve(&reg, &cfg("root", "1.0.0")).unwrap();
    assert_eq!(tree.len(), 3);
}

#[test]
fn chain_edg() {
    let reg = registry(vec![rec("a", "1.0.0", &["b ^1"], &[]), rec("b", "1.0.0", &["c ^1"], &[]), rec("c", "1.0.0", &[], &[])]);
    let cfgs = reg.iter().map(|p| VirtualPackConfig::for_id(&reg, p.id).unwrap());
    let edg = generate_edg(&reg, cfgs, &EdgOptions::default());
    let (a, b, c) = (PackageId(0), PackageId(1), PackageId(2));
    let got: Vec<(PackageId, PackageId, bool)> = edg.edges().iter().map(|(k, e)| (k.0, k.1, e.direct)).collect();
    assert_eq!(got, vec![(a, b, true), (a, c, false), (b, c, true)]);
    assert_eq!(dependents(&edg, c).unwrap(), BTreeSet::from([a, b]));
    assert_eq!(dependents(&edg, a).unwrap(), BTreeSet::new());
    assert_eq!(dependents(&edg, PackageId(3)).unwrap_err(), EdgError::UnknownId(PackageId(3)));
    assert_eq!(edg.to_csv(), "edg-v1 3\n0,1,1,-\n0,2,0,-\n1,2,1,-\n");
}

#[test]
fn conflicting_exact_requirements() {
    let reg = registry(vec![
        rec("root", "1.0.0", &["p =0.1.3", "q ^1"], &[]),
        rec("q", "1.0.0", &["p =0.1.9"], &[]),
        rec("p", "0.1.3", &[], &[]),
        rec("p", "0.1.9", &[], &[]),
    ]);
    match resolve(&reg, &cfg("root", "1.0.0")) {
        Err(ResolveError::UnsatisfiableRequirement { name, reqs, .. }) => {
            assert_eq!(name, "p");
            assert_eq!(reqs, vec!["=0.1.3".to_string(), "=0.1.9".to_string()]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_root_and_package() {
    let reg = registry(vec![rec("root", "1.0.0", &["ghost ^1"], &[]), rec("sad", "1.0.0", &["root ^9"], &[])]);
    assert!(matches!(resolve(&reg, &cfg("root", "9.0.0")), Err(ResolveError::UnknownRoot(..))));
    assert!(matches!(resolve(&reg, &cfg("root", "1.0.0")), Err(ResolveError::MissingPackage(n)) if n == "ghost"));
    assert!(matches!(resolve(&reg, &cfg("sad", "1.0.0")), Err(ResolveError::UnsatisfiableRequirement { .. })));
}

#[test]
fn dev_deps_skipped_build_and_target_kept() {
    let reg = registry(vec![
        rec("root", "1.0.0", &["t ^1 dev", "b ^1 build", "w ^1 target=cfg(windows)", "x ^1 target=x86_64-pc-windows-msvc"], &[]),
        rec("t", "1.0.0", &[], &[]),
        rec("b", "1.0.0", &[], &[]),
        rec("w", "1.0.0", &[], &[]),
        rec("x", "1.0.0", &[], &[]),
    ]);
    let tree = resolve(&reg, &cfg("root", "1.0.0")).unwrap();
    assert_eq!(versions_of(&reg, &tree), labels(&["root-1.0.0", "b-1.0.0", "w-1.0.0", "x-1.0.0"]));
    let w = &tree.edges()[&(id_of(&reg, "root", "1.0.0"), id_of(&reg, "w", "1.0.0"))];
    assert_eq!(w.target, Some(parse_predicate("windows").unwrap()));

    let mut narrow = cfg("root", "1.0.0");
    narrow.include_target = false;
    narrow.included_kinds = KindSet { normal: true, build: false };
    assert_eq!(versions_of(&reg, &resolve(&reg, &narrow).unwrap()), labels(&["root-1.0.0"]));
}

fn featured() -> RegistryIndex {
    registry(vec![
        rec("root", "1.0.0", &["p ^1 feat=pf"], &[]),
        rec("root", "2.0.0", &["p ^1"], &[]),
        rec("root", "3.0.0", &["p ^1 nodefault"], &[]),
        rec("root", "4.0.0", &["p ^1 nodefault", "q ^1"], &[]),
        rec("q", "1.0.0", &["p ^1"], &[]),
        rec("p", "1.0.0", &["rand ^0.1.2 opt", "log ^1 opt"], &[("pf", &["dep:rand"]), ("default", &["std"]), ("std", &[])]),
        rec("rand", "0.1.9", &[], &[]),
        rec("log", "1.0.0", &[], &[]),
    ])
}

#[test]
fn package_features_gate_optional_deps() {
    let reg = featured();
    let p = id_of(&reg, "p", "1.0.0");
    let t1 = resolve(&reg, &cfg("root", "1.0.0")).unwrap();
    assert_eq!(versions_of(&reg, &t1), labels(&["root-1.0.0", "p-1.0.0", "rand-0.1.9"]));
    assert_eq!(t1.features(p).unwrap(), &labels(&["default", "pf", "std"]));

    let t2 = resolve(&reg, &cfg("root", "2.0.0")).unwrap();
    assert_eq!(versions_of(&reg, &t2), labels(&["root-2.0.0", "p-1.0.0"]));
    assert_eq!(t2.features(p).unwrap(), &labels(&["default", "std"]));

    let t3 = resolve(&reg, &cfg("root", "3.0.0")).unwrap();
    assert!(t3.features(p).unwrap().is_empty());

    // another edge still asks for default features
    let t4 = resolve(&reg, &cfg("root", "4.0.0")).unwrap();
    assert_eq!(t4.features(p).unwrap(), &labels(&["default", "std"]));
}

#[test]
fn root_enables_all_features_by_default() {
    let reg = featured();
    let tree = resolve(&reg, &cfg("p", "1.0.0")).unwrap();
    assert_eq!(versions_of(&reg, &tree), labels(&["p-1.0.0", "rand-0.1.9", "log-1.0.0"]));
    let p = id_of(&reg, "p", "1.0.0");
    assert_eq!(tree.features(p).unwrap(), &labels(&["default", "log", "pf", "std"]));

    let only_std = resolve(&reg, &cfg("p", "1.0.0").with_features(["std"])).unwrap();
    assert_eq!(only_std.len(), 1);
    let mut no_opt = cfg("p", "1.0.0");
    no_opt.include_optional = false;
    assert_eq!(resolve(&reg, &no_opt).unwrap().len(), 1);
}

#[test]
fn dep_features_unify_across_edges() {
    let reg = registry(vec![
        rec("root", "1.0.0", &["p ^1 feat=a", "q ^1"], &[("x", &["p/c"])]),
        rec("q", "1.0.0", &["p ^1 feat=b"], &[]),
        rec("p", "1.0.0", &[], &[("a", &[]), ("b", &[]), ("c", &[])]),
    ]);
    let tree = resolve(&reg, &cfg("root", "1.0.0")).unwrap();
    assert_eq!(tree.features(id_of(&reg, "p", "1.0.0")).unwrap(), &labels(&["a", "b", "c"]));
}

#[test]
fn package_cycles_resolve() {
    let reg = registry(vec![rec("a", "1.0.0", &["b ^1"], &[]), rec("b", "1.0.0", &["a ^1"], &[])]);
    let tree = resolve(&reg, &cfg("a", "1.0.0")).unwrap();
    assert_eq!(tree.len(), 2);
    assert!(tree.is_direct(PackageId(1), PackageId(0)));
}

#[test]
fn feature_errors_surface() {
    let reg = registry(vec![
        rec("root", "1.0.0", &["p ^1 feat=nope"], &[]),
        rec("p", "1.0.0", &[], &[]),
        rec("cyc", "1.0.0", &[], &[("a", &["b"]), ("b", &["a"])]),
    ]);
    assert!(matches!(resolve(&reg, &cfg("root", "1.0.0")), Err(ResolveError::UnknownFeature { .. })));
    assert!(matches!(resolve(&reg, &cfg("cyc", "1.0.0")), Err(ResolveError::FeatureCycle { .. })));
}

#[test]
fn step_cap_reports_non_convergence() {
    let reg = reselection_fixture();
    assert!(matches!(resolve_with_cap(&reg, &cfg("app", "2.0.0"), Some(2)), Err(ResolveError::NonConvergence { .. })));
}

fn two_pass_fixture() -> RegistryIndex {
    let mut reg = registry(vec![
        rec("user", "1.0.0", &["lib ^0.1 feat=pf"], &[]),
        rec("plain", "1.0.0", &["lib ^0.1"], &[]),
        rec("lib", "0.1.0", &["rand ^0.1.2 opt"], &[("pf", &["dep:rand"])]),
        rec("rand", "0.1.2", &[], &[]),
    ]);
    let lib = id_of(&reg, "lib", "0.1.0");
    let gated = RufConfiguration::new("box_syntax", Some(parse_predicate("feature = \"pf\"").unwrap())).unwrap();
    reg.attach_ruf_configs(lib, vec![gated]);
    reg
}

#[test]
fn second_pass_attaches_feature_sets() {
    let reg = two_pass_fixture();
    let cfgs: Vec<_> = reg.iter().map(|p| VirtualPackConfig::for_id(&reg, p.id).unwrap()).collect();
    let edg = generate_edg(&reg, cfgs, &EdgOptions::default());
    let (user, plain, lib, rand) =
        (id_of(&reg, "user", "1.0.0"), id_of(&reg, "plain", "1.0.0"), id_of(&reg, "lib", "0.1.0"), id_of(&reg, "rand", "0.1.2"));
    assert_eq!(edg.edge(user, lib).unwrap().attrs.as_ref().unwrap().enabled_features, labels(&["pf"]));
    assert!(edg.edge(plain, lib).unwrap().attrs.as_ref().unwrap().enabled_features.is_empty());
    assert!(edg.edge(user, rand).unwrap().attrs.is_none());
    assert_eq!(edg.root_attrs(lib).unwrap().enabled_features, labels(&["pf"]));

    let text = edg.to_csv();
    assert!(text.contains(&format!("{user},{lib},1,pf\n")));
    assert!(text.contains(&format!("{plain},{lib},1,\n")));
    let back = read_edg(&text, &EdgOptions::default().host).unwrap();
    assert_eq!(back.edges(), edg.edges());
}

#[test]
fn unresolved_roots_are_listed_not_linked() {
    let reg = registry(vec![rec("ok", "1.0.0", &["bad ^1"], &[]), rec("bad", "1.0.0", &["ghost ^1"], &[])]);
    let cfgs: Vec<_> = reg.iter().map(|p| VirtualPackConfig::for_id(&reg, p.id).unwrap()).collect();
    let edg = generate_edg(&reg, cfgs, &EdgOptions::default());
    assert!(edg.edges().is_empty());
    assert_eq!(edg.unresolved().len(), 2);
    assert_eq!(edg.unresolved_csv(), "id,error_kind\n0,missing_package\n1,missing_package\n");
}

#[test]
fn read_edg_rejects_garbage() {
    let host = BTreeMap::new();
    assert!(read_edg("edg-v2 3\n", &host).is_err());
    assert!(read_edg("edg-v1 2\n0,5,1,-\n", &host).is_err());
    assert!(read_edg("edg-v1 2\n0,1,2,-\n", &host).is_err());
    assert_eq!(read_edg("edg-v1 2\n0,1,1,-\n", &host).unwrap().edges().len(), 1);
}

#[test]
fn resolution_is_deterministic() {
    let reg = reselection_fixture();
    let cfgs: Vec<_> = reg.iter().map(|p| VirtualPackConfig::for_id(&reg, p.id).unwrap()).collect();
    let a = generate_edg(&reg, cfgs.clone(), &EdgOptions::default()).to_csv();
    let b = generate_edg(&reg, cfgs, &EdgOptions::default()).to_csv();
    assert_eq!(a, b);
    assert_eq!(v("0.1.3").bucket(), v("0.1.9").bucket());
}
