//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when a criterion outside `KNOWN_FAILURES` fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use common::*;
use monitor_core::corpus::{
    builtin_registry, expand_probes, filter_paraphrases, parse_registry, sentence_bleu,
    write_manifest, ExpandOptions, ProbeKind, TemplateRegistry,
};
use monitor_core::metrics::{
    anchor_histogram, compute_ird, compute_monitor, compute_pfd, exact_match, numerator_term,
    pearson, probe_cost, score, AccuracyStats, Alphas, AnchorSet, ScoreConfig, ScoreRow,
    TokenProbs, TripletTerm,
};
use monitor_core::mocklm::mock_score;
use monitor_core::report::{aggregate, emit_plot_data, AggregateOptions, ModelMeta, PlotKind};
use monitor_core::rng::SplitMix64;

/// Criteria that cannot hold against the published numbers; analysed in the
/// project's decision notes.
const KNOWN_FAILURES: &[&str] = &["aggregation-mean"];

const PROPERTY_CASES: u32 = 10_000;

type Check = Result<String, String>;

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pearson_fixture() -> Check {
    let xs: Vec<f64> = OVERALL.iter().map(|r| r.2).collect();
    let ys: Vec<f64> = OVERALL.iter().map(|r| r.3).collect();
    let p = pearson(&xs, &ys).map_err(|e| e.to_string())?;
    let detail = format!("r={:.5} p={:.6}", p.r, p.p_value);
    ensure((p.r - -0.846).abs() <= 0.003 && p.p_value <= 0.005, || {
        detail.clone()
    })?;
    Ok(detail)
}

fn closed_form_single() -> Check {
    let direct = compute_monitor(
        &[TripletTerm {
            pfd: 0.2,
            ird: 0.2,
            primary_mean_prob: 0.5,
        }],
        Alphas::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure((direct - 0.397995).abs() <= 1e-6, || {
        format!("direct {direct}")
    })?;
    // Through the mock pipeline at the same ratio d / prob = 0.4: the primary
    // must clear the top-1 threshold, so p = 0.75 with d = 0.3.
    let piped = pipeline_monitor(0.75, 0.6, 1.0, 0.4, 1)?;
    ensure((piped - 0.397995).abs() <= 1e-6, || {
        format!("pipeline {piped}")
    })?;
    Ok(format!("direct={direct:.6} pipeline={piped:.6}"))
}

fn two_frame_registry() -> TemplateRegistry {
    parse_registry(
        r#"
[[relation]]
id = "R1"
label = "country"
object_type = "country"
base_statement = "[X] is located in [Y]."
qa_frames = ["Which country is the location of [X]?", "Where is [X]?"]
wp_frame = "[X] is located in _"
fc_frame = "Statement: [X] is located in [Y]. The statement is True or False?"
"#,
    )
    .expect("registry")
}

fn pipeline_monitor(p: f64, f: f64, b: f64, q: f64, split: usize) -> Result<f64, String> {
    let triplets = single_relation_triplets("R1", 2);
    let manifest = expand_probes(
        "sweep",
        &triplets,
        &two_frame_registry(),
        ExpandOptions::new(1, 0),
    )
    .map_err(|e| e.to_string())?;
    let results = mock_score(&manifest.probes, &uniform_profile(p, f, b, q, split))
        .map_err(|e| e.to_string())?;
    let out =
        score(&manifest.probes, &results, &ScoreConfig::default()).map_err(|e| e.to_string())?;
    Ok(out.relations[0].monitor)
}

fn mock_sweep() -> Check {
    let mut rng = SplitMix64::new(2024);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 1000 {
        let p = rng.next_f64();
        let f = 1.5 * rng.next_f64();
        let q = rng.next_f64();
        let b = 1.0 + 2.0 * rng.next_f64();
        let primary = (p * b).min(1.0);
        if primary <= 0.5 {
            continue;
        }
        let pfd = (primary - (p * f).min(1.0)).abs();
        let ird = (primary - p * (1.0 - q)).abs();
        let expected = (0.33 * (pfd * pfd + ird * ird + pfd * ird)).sqrt() / primary;
        let split = 1 + n % 3;
        let got = pipeline_monitor(p, f, b, q, split)?;
        worst = worst.max((got - expected).abs());
        ensure(worst <= 1e-9, || {
            format!("p={p} f={f} b={b} q={q}: {got} vs {expected}")
        })?;
        n += 1;
    }
    Ok(format!("1000 profiles, max |err|={worst:.2e}"))
}

fn brute_force_oracle() -> Check {
    let triplets: Vec<_> = single_relation_triplets("P17", 200)
        .into_iter()
        .enumerate()
        .map(|(i, mut t)| {
            t.object = format!("Land {}", i % 40);
            t
        })
        .collect();
    let registry = builtin_registry();
    ensure(
        registry.require("P17").map(|r| r.qa_frames.len()).ok() == Some(7),
        || "P17 frames".into(),
    )?;
    let manifest = expand_probes("oracle", &triplets, &registry, ExpandOptions::new(5, 11))
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut scored = 0;
    for seed in [1u64, 2, 3] {
        let profile = random_profile(&triplets, seed, 3);
        let results = mock_score(&manifest.probes, &profile).map_err(|e| e.to_string())?;
        let out = score(&manifest.probes, &results, &ScoreConfig::default())
            .map_err(|e| e.to_string())?;
        let rel = &out.relations[0];
        let oracle = oracle_triplets(&manifest.probes, &results);
        ensure(oracle.len() == rel.per_triplet.len(), || {
            format!(
                "scored {} vs oracle {}",
                rel.per_triplet.len(),
                oracle.len()
            )
        })?;
        for t in &rel.per_triplet {
            let o = &oracle[&t.triplet_id];
            for d in [t.pfd - o.pfd, t.ird - o.ird, t.primary_mean_prob - o.prob] {
                worst = worst.max(d.abs());
            }
        }
        worst = worst.max((rel.monitor - oracle_monitor(&oracle, (0.33, 0.33, 0.33))).abs());
        scored += oracle.len();
    }
    ensure(worst <= 1e-9, || format!("max |err|={worst:e}"))?;
    Ok(format!(
        "3 profiles, {scored} scored triplets, max |err|={worst:.2e}"
    ))
}

fn probe_cost_formula() -> Check {
    let c = probe_cost(7, 5).map_err(|e| e.to_string())?;
    ensure((c.accuracy_probes, c.monitor_probes) == (35, 13), || {
        format!("{c:?}")
    })?;
    for r in 1..=50 {
        for m in 1..=50 {
            let c = probe_cost(r, m).map_err(|e| e.to_string())?;
            ensure(
                c.accuracy_probes == r * m && c.monitor_probes == r + 1 + m,
                || format!("R={r} M={m}: {c:?}"),
            )?;
        }
    }
    Ok("7x5 -> 35 vs 13; 2500 (R, M) pairs".into())
}

fn dummy_accuracy() -> AccuracyStats {
    AccuracyStats::from_percentages(vec![("QA_BASE".into(), 50.0)]).expect("stats")
}

fn aggregation_mean() -> Check {
    let checked = [
        "BLOOMZ-560m",
        "BLOOMZ-1b1",
        "BLOOMZ-3b",
        "BLOOMZ-7b1",
        "Vicuna-7b",
        "Vicuna-13b",
    ];
    let mut scores = Vec::new();
    let mut accs = BTreeMap::new();
    for (col, (model, ..)) in OVERALL.iter().enumerate() {
        if !checked.contains(model) {
            continue;
        }
        for (rel, values) in &PER_RELATION {
            scores.push(ScoreRow {
                model_id: model.to_string(),
                relation_id: rel.to_string(),
                monitor: values[col],
                pfd_mean: 0.0,
                ird_mean: 0.0,
                avg_anchor_prob: 0.5,
                excluded_count: 0,
                scored_count: 1,
            });
            accs.insert((model.to_string(), rel.to_string()), dummy_accuracy());
        }
    }
    let report =
        aggregate(&scores, &accs, &AggregateOptions::default()).map_err(|e| e.to_string())?;
    let published: BTreeMap<&str, f64> = OVERALL.iter().map(|r| (r.0, r.2)).collect();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for o in &report.overall {
        let target = published[o.model_id.as_str()];
        worst = worst.max((o.monitor - target).abs());
        let sum = o.monitor * 20.0;
        lines.push(format!(
            "{} mean={:.4} sum/21={:.4} published={:.3}",
            o.model_id,
            o.monitor,
            sum / 21.0,
            target
        ));
    }
    let detail = format!("max |mean - published|={worst:.4}; {}", lines.join("; "));
    ensure(worst <= 0.002, || detail.clone())?;
    Ok(detail)
}

fn scale_curve() -> Check {
    let bloomz: Vec<_> = OVERALL
        .iter()
        .filter(|r| r.0.starts_with("BLOOMZ"))
        .collect();
    let scores: Vec<ScoreRow> = bloomz
        .iter()
        .map(|r| ScoreRow {
            model_id: r.0.into(),
            relation_id: "ALL".into(),
            monitor: r.2,
            pfd_mean: 0.0,
            ird_mean: 0.0,
            avg_anchor_prob: 0.5,
            excluded_count: 0,
            scored_count: 1,
        })
        .collect();
    let accs = bloomz
        .iter()
        .map(|r| ((r.0.to_string(), "ALL".to_string()), dummy_accuracy()))
        .collect();
    let options = AggregateOptions {
        // Deliberately out of size order.
        models: bloomz
            .iter()
            .rev()
            .map(|r| ModelMeta {
                model_id: r.0.into(),
                size_billions: Some(r.1),
                instruction_tuned: Some(true),
            })
            .collect(),
        ..Default::default()
    };
    let report = aggregate(&scores, &accs, &options).map_err(|e| e.to_string())?;
    let csv = emit_plot_data(&report, PlotKind::ScaleCurve).map_err(|e| e.to_string())?;
    let monitors: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    ensure(monitors == [0.701, 0.692, 0.686, 0.632], || {
        format!("{monitors:?}")
    })?;
    ensure(monitors.windows(2).all(|w| w[0] > w[1]), || {
        format!("not decreasing {monitors:?}")
    })?;
    Ok(format!("{monitors:?}"))
}

fn histogram_fixture() -> Check {
    let mut out = Vec::new();
    for (above, n) in [(59usize, 100usize), (85, 100), (590, 1000)] {
        let probs: Vec<f64> = (0..n)
            .map(|i| {
                if i < above {
                    0.8 + 0.2 * (i as f64 + 1.0) / (above as f64 + 1.0)
                } else {
                    0.8 * i as f64 / n as f64
                }
            })
            .collect();
        let h = anchor_histogram(&probs, 0.1, 0.8).map_err(|e| e.to_string())?;
        let expected = above as f64 / n as f64;
        ensure((h.solid_fraction - expected).abs() <= 1e-9, || {
            format!("{} vs {expected}", h.solid_fraction)
        })?;
        ensure(h.counts.iter().sum::<usize>() == n, || {
            "counts do not sum to n".into()
        })?;
        out.push(format!("{:.2}", h.solid_fraction));
    }
    Ok(format!("solid fractions {}", out.join(", ")))
}

fn corpus_properties() -> Check {
    let triplets = synthetic_triplets(1000, 5);
    let registry = builtin_registry();
    let m = 5;
    let opts = ExpandOptions::new(m, 42);
    let a = expand_probes("synthetic", &triplets, &registry, opts).map_err(|e| e.to_string())?;
    let b = expand_probes("synthetic", &triplets, &registry, opts).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (pa, pb) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    write_manifest(&a, &pa).map_err(|e| e.to_string())?;
    write_manifest(&b, &pb).map_err(|e| e.to_string())?;
    ensure(
        std::fs::read(&pa).unwrap() == std::fs::read(&pb).unwrap(),
        || "manifests differ".into(),
    )?;

    // Per triplet: R reframed frames, the base frame, WP, FC_POS,
    // QA_POS_PRIMED and m each of FC_NEG and QA_NEG_PRIMED.
    let mut per_triplet: BTreeMap<&str, usize> = BTreeMap::new();
    for p in &a.probes {
        *per_triplet.entry(&p.triplet_id).or_default() += 1;
    }
    let deduped: Vec<_> = triplets
        .iter()
        .filter(|t| per_triplet.contains_key(t.triplet_id.as_str()))
        .collect();
    for t in &deduped {
        let r = registry.require(&t.relation_id).unwrap().qa_frames.len() - 1;
        let got = per_triplet[t.triplet_id.as_str()];
        ensure(got == r + 2 * m + 4, || {
            format!("{}: {got} probes, expected {}", t.triplet_id, r + 2 * m + 4)
        })?;
    }

    let mut negatives = 0;
    for p in &a.probes {
        if matches!(p.kind, ProbeKind::FcNeg | ProbeKind::QaNegPrimed) {
            let e = p.prime_entity.as_deref().ok_or("negative without entity")?;
            ensure(!exact_match(e, &p.gold_object, &p.gold_aliases), || {
                format!("{} admits {e}", p.probe_id)
            })?;
            negatives += 1;
        }
    }

    let mut sets = 0;
    let mut check_set = |base: &str, candidates: &[String]| -> Result<(), String> {
        let kept = filter_paraphrases(base, candidates, 0.7).map_err(|e| e.to_string())?;
        let mut all = vec![base.to_string()];
        all.extend(kept);
        for (i, x) in all.iter().enumerate() {
            for y in &all[i + 1..] {
                for (c, r) in [(x, y), (y, x)] {
                    let s = sentence_bleu(c, r, 4).map_err(|e| e.to_string())?;
                    ensure(s < 0.7, || format!("BLEU({c:?}, {r:?}) = {s}"))?;
                }
            }
        }
        sets += 1;
        Ok(())
    };
    for rel in registry.iter() {
        check_set(&rel.qa_frames[0], &rel.qa_frames[1..])?;
    }
    let words = [
        "which", "country", "is", "the", "location", "of", "x", "where", "found", "situated",
    ];
    let mut rng = SplitMix64::new(9);
    for _ in 0..200 {
        let candidates: Vec<String> = (0..8)
            .map(|_| {
                let n = 3 + rng.below(6);
                (0..n)
                    .map(|_| words[rng.below(words.len())])
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        check_set("which country is the location of x", &candidates)?;
    }
    Ok(format!(
        "{} triplets, {} probes, {negatives} negative primes, {sets} paraphrase sets",
        deduped.len(),
        a.probes.len()
    ))
}

fn runner() -> TestRunner {
    let config = Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn term() -> impl Strategy<Value = TripletTerm> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.01..=1.0f64).prop_map(|(pfd, ird, p)| TripletTerm {
        pfd,
        ird,
        primary_mean_prob: p,
    })
}

fn metric_properties() -> Check {
    let anchors = (1usize..6).prop_flat_map(|l| {
        let v = || prop::collection::vec(0.0..=1.0f64, l);
        (
            v(),
            prop::collection::vec(v(), 1..8),
            prop::collection::vec(v(), 1..6),
        )
    });
    runner()
        .run(&anchors, |(primary, framed, negatives)| {
            let tokens: Vec<String> = (0..primary.len()).map(|i| format!("t{i}")).collect();
            let tp = |p: Vec<f64>| TokenProbs::new(tokens.clone(), p).unwrap();
            let set = AnchorSet::new(
                "t",
                tp(primary),
                framed.into_iter().map(tp).collect(),
                negatives.into_iter().map(tp).collect(),
            )
            .unwrap();
            let pfd = compute_pfd(&set).unwrap();
            let ird = compute_ird(&set).unwrap();
            prop_assert!((0.0..=1.0).contains(&pfd) && (0.0..=1.0).contains(&ird));
            prop_assert!(numerator_term(pfd, ird, Alphas::default()) >= 0.0);
            Ok(())
        })
        .map_err(|e| format!("bounds: {e}"))?;

    runner()
        .run(&prop::collection::vec(term(), 1..20), |terms| {
            let a = Alphas::default();
            let m = compute_monitor(&terms, a).unwrap();
            prop_assert!(m >= 0.0);
            let doubled: Vec<_> = terms.iter().chain(&terms).copied().collect();
            let d = compute_monitor(&doubled, a).unwrap();
            prop_assert!((m - d).abs() <= 1e-12 * m.max(1.0));
            if m > 0.0 {
                let mut more = terms.clone();
                more.push(TripletTerm {
                    pfd: 0.0,
                    ird: 0.0,
                    primary_mean_prob: 0.5,
                });
                prop_assert!(compute_monitor(&more, a).unwrap() < m);
            }
            Ok(())
        })
        .map_err(|e| format!("duplication: {e}"))?;

    let weights =
        (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(a, b, c)| Alphas::new(a, b, c));
    runner()
        .run(
            &(weights, prop::collection::vec(term(), 1..20)),
            |(a, terms)| {
                let swapped: Vec<_> = terms
                    .iter()
                    .map(|t| TripletTerm {
                        pfd: t.ird,
                        ird: t.pfd,
                        primary_mean_prob: t.primary_mean_prob,
                    })
                    .collect();
                let m = compute_monitor(&terms, a).unwrap();
                let s =
                    compute_monitor(&swapped, Alphas::new(a.ird, a.pfd, a.interaction)).unwrap();
                prop_assert!((m - s).abs() <= 1e-12 * m.max(1.0));
                Ok(())
            },
        )
        .map_err(|e| format!("exchange symmetry: {e}"))?;
    Ok(format!(
        "bounds, duplication, exchange symmetry: {PROPERTY_CASES} cases each"
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            name: "pearson-fixture",
            limit: Duration::from_secs(1),
            run: pearson_fixture,
        },
        Criterion {
            name: "closed-form",
            limit: Duration::from_secs(1),
            run: closed_form_single,
        },
        Criterion {
            name: "mock-closed-form-sweep",
            limit: Duration::from_secs(10),
            run: mock_sweep,
        },
        Criterion {
            name: "brute-force-oracle",
            limit: Duration::from_secs(30),
            run: brute_force_oracle,
        },
        Criterion {
            name: "probe-cost",
            limit: Duration::from_secs(1),
            run: probe_cost_formula,
        },
        Criterion {
            name: "aggregation-mean",
            limit: Duration::from_secs(1),
            run: aggregation_mean,
        },
        Criterion {
            name: "scale-curve",
            limit: Duration::from_secs(1),
            run: scale_curve,
        },
        Criterion {
            name: "histogram-fixture",
            limit: Duration::from_secs(1),
            run: histogram_fixture,
        },
        Criterion {
            name: "corpus-properties",
            limit: Duration::from_secs(10),
            run: corpus_properties,
        },
        Criterion {
            name: "metric-properties",
            limit: Duration::from_secs(60),
            run: metric_properties,
        },
    ];
    let mut unexpected = 0;
    for c in criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; exceeded {:?}", c.limit)),
            Err(d) => (false, d),
        };
        let known = KNOWN_FAILURES.contains(&c.name);
        let tag = match (pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{tag} {} [{:.2?}] {detail}", c.name, elapsed);
        if pass == known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected acceptance outcome(s)");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
