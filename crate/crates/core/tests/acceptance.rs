//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use phylomemy::config::{BuildConfig, Lambdas};
use phylomemy::matching::{
    brute_force_oracle, build_kinship_graph, KinshipLink, MatchConfig, MatchPolicy,
    DEFAULT_ORACLE_CAP,
};
use phylomemy::pipeline::{build, run_build, Reconstruction};
use phylomemy::sea_level::{branch_quality, foliation_slice, initial_continent, rise, TermStats};
use phylomemy::synthetic::TopicSpec;
use phylomemy::{Group, GroupId, KinshipGraph, PeriodId, PhyloExport, Phylomemy, TermId, TermSet};

const ORACLE_INSTANCES: usize = 50;
const ORACLE_MAX_GROUPS: usize = 30;
const ORACLE_BUDGET: Duration = Duration::from_secs(5);
const PLANTED_BUDGET: Duration = Duration::from_secs(10);
const DESK_BUDGET: Duration = Duration::from_secs(120);
const DOUBLING_RATIO: f64 = 4.5;
const QUALITY_TOLERANCE: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_groups(rng: &mut ChaCha8Rng, n: usize, periods: usize, vocab: u32) -> Vec<Group> {
    let mut groups: Vec<Group> = (0..n)
        .map(|_| {
            let size = rng.gen_range(1..=4);
            let terms: TermSet = (0..size).map(|_| TermId(rng.gen_range(0..vocab))).collect();
            Group {
                id: GroupId(0),
                period: PeriodId(rng.gen_range(0..periods)),
                terms,
                support: 1,
            }
        })
        .collect();
    groups.sort_by(|a, b| (a.period, &a.terms).cmp(&(b.period, &b.terms)));
    for (i, g) in groups.iter_mut().enumerate() {
        g.id = GroupId(i as u32);
    }
    groups
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let started = Instant::now();
    let mut mismatches = 0;
    let mut links = 0;
    for i in 0..ORACLE_INSTANCES {
        let n = rng.gen_range(2..=ORACLE_MAX_GROUPS);
        let periods = rng.gen_range(2..=6);
        let groups = random_groups(&mut rng, n, periods, 12);
        let config = MatchConfig {
            window: rng.gen_range(1..=2),
            policy: if i % 2 == 0 {
                MatchPolicy::Best
            } else {
                MatchPolicy::AllAboveFloor
            },
            ..MatchConfig::default()
        };
        let fast = build_kinship_graph(groups.clone(), periods, &config);
        let slow =
            brute_force_oracle(groups, periods, &config, DEFAULT_ORACLE_CAP).expect("within cap");
        links += fast.links.len();
        if fast.links != slow.links {
            mismatches += 1;
        }
    }
    let elapsed = started.elapsed();
    outcome(
        mismatches == 0 && elapsed < ORACLE_BUDGET,
        format!("{ORACLE_INSTANCES} instances, {links} links, {mismatches} mismatching, {elapsed:.2?} (< {ORACLE_BUDGET:?})"),
    )
}

/// Random kinship graph: chains of groups with private vocabularies joined
/// by links of random weight.
fn random_kinship(rng: &mut ChaCha8Rng) -> KinshipGraph {
    let chains = rng.gen_range(2..8u32);
    let periods = rng.gen_range(2..6u32);
    let mut groups = Vec::new();
    let mut links = Vec::new();
    for c in 0..chains {
        for p in 0..periods {
            let id = c * periods + p;
            let terms: TermSet = (0..3)
                .map(|j| TermId(c * 4 + j + (p % 2) * rng.gen_range(0..2)))
                .collect();
            groups.push(Group {
                id: GroupId(id),
                period: PeriodId(p as usize),
                terms,
                support: 1,
            });
            if p > 0 {
                links.push(KinshipLink {
                    parent: GroupId(id - 1),
                    child: GroupId(id),
                    weight: rng.gen_range(5..=10) as f64 / 10.0,
                });
            }
        }
    }
    for _ in 0..chains {
        let (a, b) = (rng.gen_range(0..chains), rng.gen_range(0..chains));
        let p = rng.gen_range(1..periods);
        if a != b {
            links.push(KinshipLink {
                parent: GroupId(a * periods + p - 1),
                child: GroupId(b * periods + p),
                weight: rng.gen_range(1..=6) as f64 / 10.0,
            });
        }
    }
    links.sort_by_key(|l| (l.child, l.parent));
    links.dedup_by_key(|l| (l.child, l.parent));
    KinshipGraph {
        groups,
        links,
        window: 1,
        period_count: periods as usize,
        extensions: Vec::new(),
    }
}

/// Phylomemies used by the structural criteria: the planted and a noisy
/// synthetic corpus at three levels, plus random kinship graphs.
fn test_phylomemies(noisy: &Reconstruction, planted: &Reconstruction) -> Vec<Phylomemy> {
    let mut out = Vec::new();
    for rec in [noisy, planted] {
        for lambda in [0.0, 0.5, 1.0] {
            out.push(rec.phylomemy(lambda).expect("rise"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..60 {
        let graph = random_kinship(&mut rng);
        let lambda = (i % 5) as f64 / 4.0;
        out.push(rise(&initial_continent(&graph), &graph, lambda).expect("rise"));
    }
    out
}

fn refines(fine: &[Vec<GroupId>], coarse: &[Vec<GroupId>]) -> (usize, usize) {
    let block_of: HashMap<GroupId, usize> = coarse
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.iter().map(move |&g| (g, i)))
        .collect();
    let nested = fine
        .iter()
        .filter(|b| b.iter().map(|g| block_of[g]).collect::<BTreeSet<_>>().len() == 1)
        .count();
    (nested, fine.len())
}

fn foliation_refinement(phylos: &[Phylomemy]) -> Outcome {
    let (mut nested, mut blocks, mut pairs) = (0, 0, 0);
    for p in phylos {
        let mut levels = vec![0.0];
        levels.extend(p.committed_levels());
        levels.push(1.0);
        for w in levels.windows(2) {
            let (n, b) = refines(&foliation_slice(p, w[1]), &foliation_slice(p, w[0]));
            nested += n;
            blocks += b;
            pairs += 1;
        }
    }
    outcome(
        nested == blocks,
        format!(
            "{} phylomemies, {pairs} level pairs, {nested}/{blocks} blocks nest",
            phylos.len()
        ),
    )
}

fn ghost_bound(phylos: &[Phylomemy]) -> Outcome {
    let (mut ghosts, mut violations) = (0, 0);
    for p in phylos {
        let leaf = p.tree.leaf_of();
        let elevation: HashMap<_, f64> = p
            .tree
            .leaves()
            .map(|l| (l.id.clone(), l.elevation))
            .collect();
        for g in &p.ghost_links {
            ghosts += 1;
            let bound = elevation[&leaf[&g.child]].min(elevation[&leaf[&g.parent]]);
            if !(g.weight < g.cut_level && g.cut_level <= bound)
                || leaf[&g.child] == leaf[&g.parent]
            {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{ghosts} ghost links, {violations} violations"),
    )
}

fn lambda_monotonicity(noisy: &Reconstruction) -> Outcome {
    let counts: Vec<usize> = [0.0, 0.5, 1.0]
        .iter()
        .map(|&l| noisy.phylomemy(l).expect("rise").tree.leaves().count())
        .collect();
    let components = noisy.continent.nodes().len();
    outcome(
        counts[0] <= counts[1] && counts[1] <= counts[2] && counts[0] == components,
        format!(
            "leaf branches at λ=0/0.5/1: {}/{}/{}, weakly connected components {components}",
            counts[0], counts[1], counts[2]
        ),
    )
}

fn planted_recovery(dir: &Path) -> Outcome {
    let spec = TopicSpec::planted();
    let corpus = spec.generate();
    let started = Instant::now();
    let (corpus_path, roots_path) = corpus.write(dir).expect("write fixture");
    let mut config = BuildConfig::new(corpus_path, roots_path, dir.join("planted.json"));
    config.sea_level.lambda = Lambdas::One(0.5);
    config.projection.min_periods = 2;
    let (_, outputs) = build(&config).expect("planted build");
    let elapsed = started.elapsed();
    let export = &outputs[0].export;

    let topic_of_group: HashMap<GroupId, BTreeSet<usize>> = export
        .groups
        .iter()
        .map(|g| {
            (
                g.id,
                g.terms
                    .iter()
                    .map(|t| corpus.topic_of_root[t.id.0 as usize])
                    .collect(),
            )
        })
        .collect();
    let mut branch_topics: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut total = 0;
    for b in &export.branches {
        let topics = branch_topics.entry(b.id.to_string()).or_default();
        for g in &b.groups {
            topics.extend(&topic_of_group[g]);
            total += 1;
        }
    }
    // A group agrees when its branch holds exactly one topic and no other
    // branch holds that topic.
    let owners: BTreeMap<usize, usize> =
        branch_topics
            .values()
            .flatten()
            .fold(BTreeMap::new(), |mut m, &t| {
                *m.entry(t).or_default() += 1;
                m
            });
    let agreeing: usize = export
        .branches
        .iter()
        .filter(|b| {
            let topics = &branch_topics[&b.id.to_string()];
            topics.len() == 1 && owners[topics.iter().next().unwrap()] == 1
        })
        .map(|b| b.groups.len())
        .sum();
    let agreement = if total == 0 {
        0.0
    } else {
        agreeing as f64 / total as f64
    };
    outcome(
        export.branches.len() == spec.topics && agreement == 1.0 && elapsed < PLANTED_BUDGET,
        format!(
            "{} branches (want {}), agreement {:.1}%, {elapsed:.2?} (< {PLANTED_BUDGET:?})",
            export.branches.len(),
            spec.topics,
            agreement * 100.0
        ),
    )
}

fn quality_endpoints() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let sets: Vec<TermSet> = (0..rng.gen_range(1..40))
            .map(|_| {
                (0..rng.gen_range(1..6))
                    .map(|_| TermId(rng.gen_range(0..15)))
                    .collect()
            })
            .collect();
        let stats = TermStats::from_term_sets(&sets);
        let refs: Vec<&TermSet> = sets.iter().collect();
        let one = branch_quality(std::slice::from_ref(&refs), 0.0, &stats).expect("quality");
        let singles: Vec<Vec<&TermSet>> = refs.iter().map(|s| vec![*s]).collect();
        let many = branch_quality(&singles, 1.0, &stats).expect("quality");
        worst = worst.max((one - 1.0).abs()).max((many - 1.0).abs());
    }
    outcome(
        worst <= QUALITY_TOLERANCE,
        format!("100 random partitions, max |F - 1| = {worst:.1e} (≤ {QUALITY_TOLERANCE:e})"),
    )
}

fn sha(path: &Path) -> String {
    let bytes = std::fs::read(path).expect("export written");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn determinism(dir: &Path) -> Outcome {
    let spec = TopicSpec {
        cross_topic: 0.2,
        stagger: 2,
        topics: 8,
        ..TopicSpec::planted()
    };
    let (corpus, roots) = spec.generate().write(dir).expect("write fixture");
    let config_for = |name: &str| {
        let mut c = BuildConfig::new(&corpus, &roots, dir.join(name).join("phylo.json"));
        c.sea_level.lambda = Lambdas::Many(vec![0.0, 0.5, 1.0]);
        c.projection.min_periods = 1;
        c
    };
    let hashes = |config: &BuildConfig| -> Vec<String> {
        run_build(config)
            .expect("build")
            .iter()
            .map(|p| sha(p))
            .collect()
    };
    let sequential = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool")
        .install(|| hashes(&config_for("single")));
    let concurrent: Vec<Vec<String>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..3)
            .map(|i| {
                let config = config_for(&format!("run{i}"));
                s.spawn(move || hashes(&config))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("build thread"))
            .collect()
    });
    let identical = concurrent.iter().all(|h| *h == sequential);
    outcome(
        identical,
        format!(
            "{} exports × 4 builds (1 single-threaded, 3 concurrent multi-threaded), {}",
            sequential.len(),
            if identical {
                "all hashes equal"
            } else {
                "hashes differ"
            }
        ),
    )
}

fn desk_scale(dir: &Path) -> (Outcome, Option<PhyloExport>) {
    let spec = TopicSpec::desk_scale();
    let started = Instant::now();
    let (corpus, roots) = spec.generate().write(dir).expect("write fixture");
    let mut config = BuildConfig::new(corpus, roots, dir.join("desk.json"));
    config.sea_level.lambda = Lambdas::One(0.5);
    let result = run_build(&config).and_then(|paths| PhyloExport::read(&paths[0]));
    let elapsed = started.elapsed();
    match result {
        Ok(export) => (
            outcome(
                elapsed < DESK_BUDGET,
                format!(
                    "{} documents, {} roots, {} periods, {} groups: {elapsed:.2?} (< {DESK_BUDGET:?})",
                    export.metadata.counts.documents,
                    spec.generate().roots.len(),
                    export.metadata.counts.periods,
                    export.metadata.counts.groups
                ),
            ),
            Some(export),
        ),
        Err(e) => (outcome(false, format!("build failed: {e}")), None),
    }
}

/// Matching time on the desk corpus and on one with twice the topics.
fn matching_growth() -> Outcome {
    let base = TopicSpec::desk_scale();
    let time = |spec: &TopicSpec| -> (usize, Duration) {
        let corpus = spec.generate();
        let docs = corpus.document_set().expect("documents");
        let roots = corpus.root_list().expect("roots");
        let config = BuildConfig::new("", "", "");
        let rec = Reconstruction::from_documents(docs, roots, &config).expect("reconstruction");
        let groups = rec.graph.groups.clone();
        let best = (0..3)
            .map(|_| {
                let started = Instant::now();
                let g = build_kinship_graph(groups.clone(), rec.periods.len(), &config.matching);
                let elapsed = started.elapsed();
                assert!(!g.links.is_empty());
                elapsed
            })
            .min()
            .expect("runs");
        (groups.len(), best)
    };
    let (n1, t1) = time(&base);
    let (n2, t2) = time(&base.scaled(2));
    let ratio = t2.as_secs_f64() / t1.as_secs_f64().max(1e-9);
    let group_ratio = n2 as f64 / n1 as f64;
    outcome(
        ratio <= DOUBLING_RATIO,
        format!("{n1} → {n2} groups (×{group_ratio:.2}): {t1:.2?} → {t2:.2?}, time ×{ratio:.2} (≤ {DOUBLING_RATIO})"),
    )
}

fn export_contract(dir: &Path, exports: &[(&str, &PhyloExport)]) -> Outcome {
    let mut failures = Vec::new();
    for (name, export) in exports {
        let path = dir.join(format!("{name}.roundtrip.json"));
        export.write(&path).expect("write export");
        match PhyloExport::read(&path) {
            Ok(back) if &back == *export => {}
            _ => failures.push(format!("{name}: round trip differs")),
        }
        let large = export.groups.len() > phylomemy::projection::LARGE_PHYLOMEMY;
        if export.metadata.large_phylomemy_warning != large {
            failures.push(format!(
                "{name}: warning flag {} for {} groups",
                export.metadata.large_phylomemy_warning,
                export.groups.len()
            ));
        }
    }
    let flagged = exports
        .iter()
        .filter(|(_, e)| e.metadata.large_phylomemy_warning)
        .count();
    let sizes: Vec<String> = exports
        .iter()
        .map(|(n, e)| format!("{n}={}", e.groups.len()))
        .collect();
    outcome(
        failures.is_empty() && flagged > 0,
        if failures.is_empty() {
            format!(
                "{} fixtures round-trip ({}), {flagged} flagged > 1000 groups",
                exports.len(),
                sizes.join(", ")
            )
        } else {
            failures.join("; ")
        },
    )
}

/// One export with more than 1000 groups: 600 private two-period chains.
fn large_export(dir: &Path) -> PhyloExport {
    let mut csv = String::from("id,date,title\n");
    let mut roots = String::new();
    for t in 0..600 {
        roots.push_str(&format!("topic{t}\n"));
        for year in [2000, 2001] {
            csv.push_str(&format!("d{t}y{year},{year}-02-01,topic{t}\n"));
        }
    }
    std::fs::write(dir.join("large.csv"), csv).expect("write");
    std::fs::write(dir.join("large.txt"), roots).expect("write");
    let mut config = BuildConfig::new(
        dir.join("large.csv"),
        dir.join("large.txt"),
        dir.join("large.json"),
    );
    config.fields.keep_singletons = true;
    let (_, mut outputs) = build(&config).expect("large build");
    outputs.remove(0).export
}

fn main() -> ExitCode {
    let root = tempfile::tempdir().expect("temp dir");
    let sub = |name: &str| {
        let p = root.path().join(name);
        std::fs::create_dir_all(&p).expect("mkdir");
        p
    };
    let rec_for = |spec: TopicSpec| {
        let corpus = spec.generate();
        Reconstruction::from_documents(
            corpus.document_set().expect("documents"),
            corpus.root_list().expect("roots"),
            &BuildConfig::new("", "", ""),
        )
        .expect("reconstruction")
    };
    let noisy = rec_for(TopicSpec {
        topics: 8,
        cross_topic: 0.2,
        stagger: 2,
        seed: 3,
        ..TopicSpec::planted()
    });
    let planted = rec_for(TopicSpec::planted());
    let phylos = test_phylomemies(&noisy, &planted);

    let (desk, desk_export) = desk_scale(&sub("desk"));
    let large = large_export(&sub("large"));
    let planted_export = {
        let dir = sub("planted-export");
        let (c, r) = TopicSpec::planted().generate().write(&dir).expect("write");
        let (_, mut outputs) = build(&BuildConfig::new(c, r, dir.join("p.json"))).expect("build");
        outputs.remove(0).export
    };
    let mut fixtures: Vec<(&str, &PhyloExport)> =
        vec![("planted", &planted_export), ("large", &large)];
    if let Some(e) = &desk_export {
        fixtures.push(("desk", e));
    }

    let results: Vec<(&str, Outcome)> = vec![
        ("oracle equivalence", oracle_equivalence()),
        ("foliation refinement", foliation_refinement(&phylos)),
        ("ghost-line bound", ghost_bound(&phylos)),
        ("λ shape monotonicity", lambda_monotonicity(&noisy)),
        (
            "planted-lineage recovery",
            planted_recovery(&sub("planted")),
        ),
        ("quality endpoints", quality_endpoints()),
        ("determinism", determinism(&sub("determinism"))),
        ("desk-scale runtime", desk),
        ("matching growth on doubling", matching_growth()),
        (
            "export contract",
            export_contract(&sub("contract"), &fixtures),
        ),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
