//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rufscope::eval::{evaluate_registry, generate_registry, metrics, GenParams, OracleOptions, TreeComparison};
use rufscope::impact::{direct_impact, transitive_impact, RufUsageSet};
use rufscope::lifetime::{
    build_lifetimes, parse_language_features, parse_library_features, transition_kinds, CompilerRelease, LifetimeStore,
    RufStatus,
};
use rufscope::mitigation::{compatible_compiler, recovery_rate, RufCheck, VerdictReason};
use rufscope::predicate::{
    extract_ruf_configs, render_ruf_configs, to_dnf, Atom, CfgPredicate, DepEdgeAttrs, RufConfiguration,
};
use rufscope::registry::{DepKind, IndexDep, IndexRecord, PackageId, RecordSource, RegistryIndex, SemVer};
use rufscope::resolver::{generate_edg, resolve, Edg, EdgEdge, EdgOptions, VirtualPackConfig};
use rufscope_cli::sources::configs_to_jsonl;
use rufscope_cli::{cmd_analyze, RunConfig};

const C1_SEEDS: u64 = 200;
const C1_LIMIT: Duration = Duration::from_secs(120);
const C2_PREDICATES: usize = 1000;
const C2_MAX_ATOMS: usize = 6;
const C2_MAX_DEPTH: usize = 4;
const C2_LIMIT: Duration = Duration::from_secs(10);
const C4_GRAPHS: usize = 100;
const C4_MAX_NODES: usize = 50;
const C4_LIMIT: Duration = Duration::from_secs(30);
const C6_TOLERANCE: f64 = 1e-9;
const C7_FILES: usize = 500;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn v(s: &str) -> SemVer {
    SemVer::parse(s).unwrap()
}

fn timed(limit: Duration, started: Instant, detail: String) -> Verdict {
    let took = started.elapsed();
    if took <= limit {
        Ok(format!("{detail}; {:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs()))
    } else {
        Err(format!("{detail}; took {:.2}s, limit {}s", took.as_secs_f64(), limit.as_secs()))
    }
}

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond { Ok(()) } else { Err(what.into()) }
}

fn c1_resolver_oracle() -> Verdict {
    let started = Instant::now();
    let params = GenParams::default();
    let mut comparisons = Vec::new();
    let (mut optional, mut targeted, mut featured, mut both_failed) = (0, 0, 0, 0);
    for seed in 0..C1_SEEDS {
        let reg = generate_registry(seed, &params);
        check(reg.package_names().count() <= 25, format!("seed {seed} has too many packages"))?;
        for p in reg.iter() {
            optional += p.deps.iter().filter(|d| d.optional).count();
            targeted += p.deps.iter().filter(|d| d.target.is_some()).count();
            featured += p.features.len();
        }
        for o in evaluate_registry(&reg, &resolve, &OracleOptions::default()) {
            let label = reg.get(o.root).unwrap().label();
            match (&o.resolver_error, &o.oracle_error) {
                (Some(_), Some(_)) => both_failed += 1,
                (None, None) => {
                    check(o.feature_mismatches.is_empty(), format!("seed {seed} {label}: feature sets differ"))?;
                    comparisons.push(o.comparison.unwrap());
                }
                (a, b) => return Err(format!("seed {seed} {label}: resolver {a:?}, oracle {b:?}")),
            }
        }
    }
    check(optional > 0 && targeted > 0 && featured > 0, "generator produced no optional/target/feature deps")?;
    let m = metrics(&comparisons).map_err(|e| e.to_string())?;
    let perfect = m.tree_accuracy == 1.0 && [m.precision, m.recall, m.f1].iter().all(|x| *x == Some(1.0));
    check(perfect, format!("metrics {m:?}"))?;
    timed(
        C1_LIMIT,
        started,
        format!(
            "{C1_SEEDS} registries, {} roots compared, {both_failed} rejected by both; accuracy/P/R/F1 = 1.0",
            m.n
        ),
    )
}

fn atom_pool() -> Vec<Atom> {
    vec![
        Atom::feature("a"),
        Atom::feature("b"),
        Atom::flag("unix"),
        Atom::pair("target_os", "linux"),
        Atom::flag("debug_assertions"),
        Atom::pair("target_pointer_width", "64"),
    ]
}

fn random_predicate(rng: &mut ChaCha8Rng, pool: &[Atom], depth: usize) -> CfgPredicate {
    if depth == 1 || rng.gen_bool(0.3) {
        return CfgPredicate::Atom(pool.choose(rng).unwrap().clone());
    }
    let n = rng.gen_range(1..=3);
    match rng.gen_range(0..3) {
        0 => CfgPredicate::All((0..n).map(|_| random_predicate(rng, pool, depth - 1)).collect()),
        1 => CfgPredicate::Any((0..n).map(|_| random_predicate(rng, pool, depth - 1)).collect()),
        _ => CfgPredicate::not(random_predicate(rng, pool, depth - 1)),
    }
}

fn c2_dnf() -> Verdict {
    let started = Instant::now();
    let pool = atom_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..C2_PREDICATES {
        let p = random_predicate(&mut rng, &pool, C2_MAX_DEPTH);
        let atoms: BTreeSet<&Atom> = p.atoms().into_iter().collect();
        check(atoms.len() <= C2_MAX_ATOMS && p.depth() <= C2_MAX_DEPTH, format!("predicate {i} out of bounds"))?;
        let dnf = to_dnf(&p).map_err(|e| format!("{p}: {e}"))?;
        for mask in 0u32..(1 << pool.len()) {
            let truth = |a: &Atom| pool.iter().position(|x| x == a).is_some_and(|k| mask & (1 << k) != 0);
            let by_dnf = dnf.iter().any(|c| c.literals().all(|l| truth(&l.atom) != l.negated));
            check(by_dnf == p.eval(truth), format!("{p} differs from its DNF at {mask:06b}"))?;
        }
    }
    let (a, b, c) = (CfgPredicate::atom("A"), CfgPredicate::atom("B"), CfgPredicate::atom("C"));
    let example = CfgPredicate::All(vec![CfgPredicate::Any(vec![a, b]), c]);
    let clauses: Vec<Vec<String>> = to_dnf(&example)
        .unwrap()
        .iter()
        .map(|cl| cl.literals().map(|l| l.to_string()).collect())
        .collect();
    let want = vec![vec!["A".to_string(), "C".to_string()], vec!["B".to_string(), "C".to_string()]];
    check(clauses == want, format!("ALL(ANY(A,B),C) gave {clauses:?}"))?;
    timed(C2_LIMIT, started, format!("{C2_PREDICATES} predicates match on all 64 assignments; ALL(ANY(A,B),C) -> [AC, BC]"))
}

fn three_releases() -> LifetimeStore {
    use RufStatus::*;
    build_lifetimes(vec![
        CompilerRelease::new(v("1.50.0"), [("A", Active), ("B", Accepted), ("C", Active)]),
        CompilerRelease::new(v("1.57.0"), [("A", Accepted), ("B", Accepted), ("C", Accepted)]),
        CompilerRelease::new(v("1.63.0"), [("A", Removed), ("B", Accepted)]),
    ])
    .unwrap()
}

fn c3_three_releases() -> Verdict {
    use RufStatus::*;
    let lt = three_releases();
    let rufs: BTreeSet<String> = ["A", "B", "C"].map(String::from).into();
    let all = compatible_compiler(&rufs, &lt, lt.releases());
    check(all.release == Some(v("1.57.0")), format!("selected {:?}", all.release))?;
    check(all.per_ruf.values().all(|c| *c == RufCheck { status: Accepted, ok: true }), "1.57.0 cells not all Accepted")?;
    let newest = compatible_compiler(&rufs, &lt, &[v("1.63.0")]);
    check(newest.reason == VerdictReason::NoReleaseCoversAll, "1.63.0 alone should fail")?;
    let cells: Vec<RufStatus> = newest.per_ruf.values().map(|c| c.status).collect();
    check(cells == [Removed, Accepted, Unknown], format!("1.63.0 cells {cells:?}"))?;
    let at_150: Vec<RufStatus> = ["A", "B", "C"].iter().map(|r| lt.status_at(r, &v("1.50.0")).unwrap()).collect();
    check(at_150 == [Active, Accepted, Active], format!("1.50.0 cells {at_150:?}"))?;
    Ok("1.57.0 selected; {1.63.0} alone -> NoReleaseCoversAll; all nine cells match".into())
}

fn attrs_for(rng: &mut ChaCha8Rng) -> DepEdgeAttrs {
    let mut attrs = DepEdgeAttrs::with_features(["pf", "a", "b"].into_iter().filter(|_| rng.gen_bool(0.5)));
    if rng.gen_bool(0.5) {
        attrs = attrs.target("target_os", "linux").target("target_family", "unix");
    }
    attrs
}

fn holds(attrs: &DepEdgeAttrs, atom: &Atom) -> bool {
    match (atom.key.as_str(), atom.value.as_deref()) {
        ("feature", Some(f)) => attrs.enabled_features.contains(f),
        ("unix", None) => attrs.target_env.get("target_family").is_some_and(|f| f == "unix"),
        (k, Some(val)) => attrs.target_env.get(k).is_some_and(|x| x == val),
        _ => false,
    }
}

fn c4_impact() -> Verdict {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pool = vec![Atom::feature("pf"), Atom::feature("a"), Atom::feature("b"), Atom::flag("unix"), Atom::pair("target_os", "linux")];
    let rufs = ["r0", "r1", "r2"];
    let mut conditional = 0;
    for g in 0..C4_GRAPHS {
        let n = rng.gen_range(2..=C4_MAX_NODES);
        let mut edg = Edg::new(n);
        for _ in 0..rng.gen_range(0..n * 3) {
            let (a, b) = (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32));
            if a != b {
                let attrs = attrs_for(&mut rng);
                edg.insert(PackageId(a), PackageId(b), EdgEdge { direct: rng.gen_bool(0.5), attrs: Some(attrs) });
            }
        }
        let mut entries = Vec::new();
        for _ in 0..rng.gen_range(0..=n / 2 + 1) {
            let pred = rng.gen_bool(0.7).then(|| random_predicate(&mut rng, &pool, 3));
            conditional += usize::from(pred.is_some());
            entries.push((PackageId(rng.gen_range(0..n as u32)), RufConfiguration::new(*rufs.choose(&mut rng).unwrap(), pred).unwrap()));
        }
        let t = RufUsageSet::new(entries.clone());
        for ruf in rufs {
            let direct_want: BTreeSet<PackageId> = entries.iter().filter(|(_, c)| c.ruf() == ruf).map(|(id, _)| *id).collect();
            check(direct_impact(&t, ruf) == direct_want, format!("graph {g}: direct impact of {ruf}"))?;
            let mut transitive_want = BTreeSet::new();
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    let Some(e) = edg.edge(PackageId(a), PackageId(b)) else { continue };
                    let attrs = e.attrs.as_ref().unwrap();
                    let enabled = entries.iter().any(|(id, c)| {
                        *id == PackageId(b) && c.ruf() == ruf && c.predicate().is_none_or(|p| p.eval(|x| holds(attrs, x)))
                    });
                    if enabled {
                        transitive_want.insert(PackageId(a));
                    }
                }
            }
            let got = transitive_impact(&edg, &t, ruf).map_err(|e| e.to_string())?;
            check(got == transitive_want, format!("graph {g}: transitive impact of {ruf}: {got:?} vs {transitive_want:?}"))?;
        }
    }

    // a gated configuration only reaches the dependent that enables the feature
    let gated = RufConfiguration::new("box_syntax", Some(CfgPredicate::feature("pf"))).unwrap();
    let t = RufUsageSet::new(vec![(PackageId(2), gated)]);
    let mut edg = Edg::new(3);
    edg.insert(PackageId(0), PackageId(2), EdgEdge { direct: true, attrs: Some(DepEdgeAttrs::default()) });
    edg.insert(PackageId(1), PackageId(2), EdgEdge { direct: true, attrs: Some(DepEdgeAttrs::with_features(["pf"])) });
    let got = transitive_impact(&edg, &t, "box_syntax").map_err(|e| e.to_string())?;
    check(got == BTreeSet::from([PackageId(1)]), format!("pf gating: {got:?}"))?;
    timed(C4_LIMIT, started, format!("{C4_GRAPHS} graphs, {conditional} conditional configurations; pf gating honoured"))
}

const LANG_FIXTURE: &str = r#"
declare_features! (
    /// allows `box` expressions
    (active, box_syntax, "1.0.0", Some(49733), None),
    (accepted, if_let, "1.0.0", None),
    (
        incomplete,
        generic_const_exprs,
        "1.56.0",
        Some(76560),
        None
    ),
    (active, specialization, "1.7.0", Some(31844), None), // incomplete
    (removed, managed_boxes, "1.0.0", None, None, None),
    ("llvm_asm", "1.26.0", None, Removed),
    ("const_fn", "1.61.0", Some(57563), Accepted),
);
"#;

const LIB_FIXTURE: &str = r#"
// #[unstable(feature = "commented_out", issue = "1")]
#[stable(feature = "rust1", since = "1.0.0")]
pub fn len() {}

#[unstable(
    feature = "ptr_metadata",
    issue = "81513",
)]
pub fn metadata() {}

#[rustc_const_unstable(feature = "const_thing", issue = "2")]
#[unstable(feature = "str_split_remainder", reason = "new", issue = "77998")]
pub fn remainder() {}
"#;

fn c5_lifetimes() -> Verdict {
    use RufStatus::*;
    let lang: BTreeMap<String, RufStatus> =
        parse_language_features(LANG_FIXTURE).map_err(|e| e.to_string())?.into_iter().collect();
    let want_lang: BTreeMap<String, RufStatus> = [
        ("box_syntax", Active),
        ("if_let", Accepted),
        ("generic_const_exprs", Incomplete),
        ("specialization", Incomplete),
        ("managed_boxes", Removed),
        ("llvm_asm", Removed),
        ("const_fn", Accepted),
    ]
    .into_iter()
    .map(|(n, s)| (n.to_string(), s))
    .collect();
    check(lang == want_lang, format!("language table parsed as {lang:?}"))?;

    let lib: BTreeMap<String, RufStatus> =
        parse_library_features(LIB_FIXTURE).map_err(|e| e.to_string())?.into_iter().collect();
    let want_lib: BTreeMap<String, RufStatus> = [("rust1", Accepted), ("ptr_metadata", Active), ("str_split_remainder", Active)]
        .into_iter()
        .map(|(n, s)| (n.to_string(), s))
        .collect();
    check(lib == want_lib, format!("library attributes parsed as {lib:?}"))?;

    let mut flagged = 0;
    for from in RufStatus::ALL {
        for to in RufStatus::ALL {
            let expected = (from == Accepted && to != Accepted)
                || (from == Removed && matches!(to, Accepted | Active | Incomplete))
                || (from != Unknown && to == Unknown);
            let got = !transition_kinds(from, to).is_empty();
            check(got == expected, format!("{from} -> {to}: abnormal = {got}"))?;
            flagged += usize::from(got);
        }
    }
    Ok(format!("{} language and {} library features parsed; {flagged}/25 matrix cells abnormal as expected", lang.len(), lib.len()))
}

fn c6_metrics() -> Verdict {
    let m = metrics(&[TreeComparison::new(3, 1, 1, 1)]).map_err(|e| e.to_string())?;
    let close = |x: Option<f64>, want: f64| x.is_some_and(|x| (x - want).abs() <= C6_TOLERANCE);
    check(close(m.precision, 0.6) && close(m.recall, 0.75), format!("P/R {m:?}"))?;
    check(close(m.f1, 2.0 * 0.6 * 0.75 / 1.35), format!("F1 {:?}", m.f1))?;
    check(m.tree_accuracy == 0.0, "tree accuracy of an imperfect tree")?;
    let perfect = metrics(&[TreeComparison::new(5, 0, 0, 0), TreeComparison::new(2, 0, 0, 0)]).map_err(|e| e.to_string())?;
    check(
        perfect.tree_accuracy == 1.0 && [perfect.precision, perfect.recall, perfect.f1].iter().all(|x| *x == Some(1.0)),
        format!("perfect case {perfect:?}"),
    )?;
    Ok(format!("(3,1,1,1) -> P 0.6, R 0.75, F1 {:.4} (tol {C6_TOLERANCE:e}); perfect case all 1.0", m.f1.unwrap()))
}

fn pairs(src: &str) -> Result<Vec<(String, Option<String>)>, String> {
    Ok(extract_ruf_configs(src)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|c| (c.ruf().to_string(), c.predicate().map(ToString::to_string)))
        .collect())
}

fn c7_extraction() -> Verdict {
    let plain_file = "#![feature(box_syntax)]\nfn main() {\n    let x = box 1;\n}\n";
    check(pairs(plain_file)? == [("box_syntax".to_string(), None)], "box_syntax file")?;
    let gated_file = "#![cfg_attr(feature = \"pf\",\n    feature(box_syntax))]\n#[cfg(feature = \"pf\")]\npub fn get_box() -> usize {\n    return box rand()\n}\n";
    check(pairs(gated_file)? == [("box_syntax".to_string(), Some("feature = \"pf\"".to_string()))], "pf-gated file")?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pool = atom_pool();
    let names = ["box_syntax", "llvm_asm", "specialization", "never_type", "try_blocks", "const_fn"];
    let mut injected = 0;
    for file in 0..C7_FILES {
        let configs: Vec<RufConfiguration> = (0..rng.gen_range(0..6))
            .map(|_| {
                let pred = rng.gen_bool(0.6).then(|| random_predicate(&mut rng, &pool, 4));
                RufConfiguration::new(*names.choose(&mut rng).unwrap(), pred).unwrap()
            })
            .collect();
        injected += configs.len();
        let mut src = String::from("//! crate docs, #![feature(not_real)] in a comment\n#![allow(unused)]\n");
        src.push_str(&render_ruf_configs(&configs));
        src.push_str("\nfn helper() -> &'static str { \"#![feature(inside_string)]\" }\n");
        let got = extract_ruf_configs(&src).map_err(|e| format!("file {file}: {e}"))?;
        check(got == configs, format!("file {file}: recovered {got:?}"))?;
    }
    Ok(format!("both fixture files exact; {C7_FILES} rendered files, {injected}/{injected} configurations recovered"))
}

fn dep(name: &str, req: &str) -> IndexDep {
    IndexDep {
        name: name.into(),
        req: req.into(),
        kind: DepKind::Normal,
        optional: false,
        target: None,
        features: vec![],
        default_features: true,
    }
}

fn record(name: &str, vers: &str, deps: Vec<IndexDep>) -> IndexRecord {
    IndexRecord { name: name.into(), vers: vers.into(), deps, features: BTreeMap::new() }
}

fn write_releases(root: &Path, store: &LifetimeStore) {
    for rel in store.to_releases() {
        let features: Vec<(&str, RufStatus)> = rel.table.iter().map(|(n, s)| (n.as_str(), *s)).collect();
        common::write_release(root, &rel.version.to_string(), &features);
    }
}

fn c8_determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let reg = generate_registry(8, &GenParams::default());
    reg.write_dir(&dir.path().join("registry")).map_err(|e| e.to_string())?;
    write_releases(&dir.path().join("releases"), &three_releases());
    let configs_dir = dir.path().join("configs");
    fs::create_dir_all(&configs_dir).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for p in reg.iter() {
        if !rng.gen_bool(0.3) {
            continue;
        }
        let pred = rng.gen_bool(0.5).then(|| CfgPredicate::feature("f0"));
        let c = [RufConfiguration::new(*["A", "B", "C"].choose(&mut rng).unwrap(), pred).unwrap()];
        fs::write(configs_dir.join(format!("{}.jsonl", p.label())), configs_to_jsonl(&c)).map_err(|e| e.to_string())?;
    }
    let outputs = ["edg.csv", "unresolved.csv", "impact.json", "impact.txt", "super_spreaders.csv"];
    let mut runs = Vec::new();
    for (i, workers) in [None, Some(1)].into_iter().enumerate() {
        let cfg = RunConfig {
            registry: Some(dir.path().join("registry")),
            releases: Some(dir.path().join("releases")),
            configs: Some(configs_dir.clone()),
            out: dir.path().join(format!("out{i}")),
            workers,
            ..RunConfig::default()
        };
        let ran = common::call(|s| cmd_analyze(&cfg, s));
        check(ran.code == 0, format!("analyze exit {}: {}", ran.code, ran.err))?;
        let files: Vec<Vec<u8>> = outputs.iter().map(|f| fs::read(cfg.out.join(f)).unwrap_or_default()).collect();
        runs.push((ran.out, files));
    }
    check(runs[0] == runs[1], "analyze outputs differ between runs")?;
    let bytes: usize = runs[0].1.iter().map(Vec::len).sum();
    Ok(format!("two analyze runs produced byte-identical {} files ({bytes} bytes) and reports", outputs.len()))
}

fn c9_recovery() -> Verdict {
    use RufStatus::*;
    let lt = build_lifetimes(vec![
        CompilerRelease::new(v("1.0.0"), [("gone", Active), ("early", Active), ("fine", Accepted)]),
        CompilerRelease::new(v("1.1.0"), [("gone", Active), ("early", Removed), ("late", Active), ("fine", Accepted)]),
        CompilerRelease::new(v("1.2.0"), [("gone", Removed), ("early", Removed), ("late", Accepted), ("fine", Accepted)]),
    ])
    .map_err(|e| e.to_string())?;
    let mut records = vec![
        record("g", "1.0.0", vec![]),
        record("bad", "1.0.0", vec![]),
        record("ok", "1.0.0", vec![]),
        record("win_only", "1.0.0", vec![]),
        record("h", "1.0.0", vec![dep("win_only", "^1"), dep("ok", "^1")]),
    ];
    // d1..d8 reach g directly or through d1
    records.extend((1..=8).map(|i| record(&format!("d{i}"), "1.0.0", vec![dep(if i % 2 == 1 && i > 1 { "d1" } else { "g" }, "^1")])));
    let mut reg = RegistryIndex::from_records(records.into_iter().map(|r| (RecordSource::new("c9", 1), r))).map_err(|e| e.to_string())?;
    let attach = |reg: &mut RegistryIndex, name: &str, configs: Vec<RufConfiguration>| {
        let id = reg.find(name, &v("1.0.0")).unwrap().id;
        reg.attach_ruf_configs(id, configs);
    };
    attach(&mut reg, "g", vec![RufConfiguration::unconditional("gone")]);
    attach(&mut reg, "bad", vec![RufConfiguration::unconditional("early"), RufConfiguration::unconditional("late")]);
    attach(&mut reg, "ok", vec![RufConfiguration::unconditional("late"), RufConfiguration::unconditional("fine")]);
    attach(&mut reg, "win_only", vec![RufConfiguration::new("gone", Some(CfgPredicate::atom("windows"))).unwrap()]);
    let cfgs: Vec<VirtualPackConfig> = reg.iter().filter_map(|p| VirtualPackConfig::for_id(&reg, p.id)).collect();
    let edg = generate_edg(&reg, cfgs, &EdgOptions::default());
    check(edg.unresolved().is_empty(), "fixture roots failed to resolve")?;
    let stats = recovery_rate(&edg, &RufUsageSet::from_registry(&reg), &lt, &v("1.2.0")).map_err(|e| e.to_string())?;
    check((stats.failing, stats.recovered) == (10, 9), format!("got {stats:?}"))?;
    Ok(format!("{} versions: failing {}, recovered {}", reg.len(), stats.failing, stats.recovered))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("resolver-oracle equivalence", c1_resolver_oracle),
        ("DNF semantic equivalence", c2_dnf),
        ("compatible compiler on the three-release table", c3_three_releases),
        ("impact equations vs brute force", c4_impact),
        ("lifetime parsing and abnormal transitions", c5_lifetimes),
        ("metrics formulas", c6_metrics),
        ("extraction scanner", c7_extraction),
        ("end-to-end determinism", c8_determinism),
        ("recovery rate fixture", c9_recovery),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
