#![allow(dead_code)]

use std::collections::BTreeMap;

use monitor_core::corpus::{FactTriplet, ProbeKind, ProbeRecord};
use monitor_core::metrics::ProbeResult;
use monitor_core::mocklm::{Knowledge, MockProfile};
use monitor_core::rng::SplitMix64;

/// (model, size in billions, overall MONITOR, average accuracy).
pub const OVERALL: [(&str, f64, f64, f64); 12] = [
    ("BLOOMZ-560m", 0.56, 0.701, 27.770),
    ("BLOOMZ-1b1", 1.1, 0.692, 30.055),
    ("Galactica-1b3", 1.3, 0.747, 22.936),
    ("OPT-2b7", 2.7, 0.637, 25.599),
    ("BLOOMZ-3b", 3.0, 0.686, 30.638),
    ("Vicuna-7b", 7.0, 0.504, 38.194),
    ("BLOOMZ-7b1", 7.1, 0.632, 36.232),
    ("Flan-T5-XXL", 11.0, 0.630, 32.968),
    ("Vicuna-13b", 13.0, 0.484, 44.882),
    ("WizardLM-13b", 13.0, 0.560, 51.477),
    ("Flan-UL2", 20.0, 0.684, 32.723),
    ("LLaMa-30b-ins.", 30.0, 0.479, 50.798),
];

/// Per-relation MONITOR, columns in the order of `OVERALL`.
pub const PER_RELATION: [(&str, [f64; 12]); 20] = [
    (
        "P17",
        [
            0.782, 0.780, 0.852, 0.541, 0.785, 0.523, 0.714, 0.690, 0.544, 0.602, 0.788, 0.395,
        ],
    ),
    (
        "P19",
        [
            0.866, 0.927, 0.914, 0.858, 0.898, 0.719, 0.873, 0.882, 0.629, 0.752, 0.918, 0.817,
        ],
    ),
    (
        "P20",
        [
            0.810, 0.926, 0.942, 0.849, 0.921, 0.671, 0.873, 0.888, 0.667, 0.725, 0.893, 0.803,
        ],
    ),
    (
        "P27",
        [
            0.704, 0.746, 0.868, 0.597, 0.706, 0.460, 0.724, 0.674, 0.489, 0.573, 0.786, 0.490,
        ],
    ),
    (
        "P30",
        [
            0.809, 0.839, 0.801, 0.748, 0.887, 0.652, 0.546, 0.670, 0.611, 0.680, 0.815, 0.617,
        ],
    ),
    (
        "P37",
        [
            0.669, 0.662, 0.639, 0.471, 0.570, 0.432, 0.462, 0.650, 0.311, 0.467, 0.575, 0.411,
        ],
    ),
    (
        "P101",
        [
            0.899, 0.822, 0.919, 0.888, 0.877, 0.816, 0.838, 0.879, 0.823, 0.927, 0.858, 0.857,
        ],
    ),
    (
        "P103",
        [
            0.512, 0.515, 0.671, 0.468, 0.457, 0.424, 0.451, 0.599, 0.296, 0.506, 0.561, 0.410,
        ],
    ),
    (
        "P108",
        [
            0.947, 0.853, 0.876, 0.739, 0.858, 0.620, 0.770, 0.676, 0.632, 0.626, 0.844, 0.522,
        ],
    ),
    (
        "P127",
        [
            0.522, 0.613, 0.676, 0.627, 0.712, 0.547, 0.545, 0.437, 0.382, 0.438, 0.621, 0.346,
        ],
    ),
    (
        "P159",
        [
            0.829, 0.851, 0.858, 0.755, 0.800, 0.523, 0.751, 0.731, 0.478, 0.479, 0.758, 0.454,
        ],
    ),
    (
        "P176",
        [
            0.684, 0.461, 0.457, 0.527, 0.609, 0.244, 0.632, 0.290, 0.437, 0.467, 0.518, 0.322,
        ],
    ),
    (
        "P178",
        [
            0.594, 0.492, 0.595, 0.470, 0.624, 0.339, 0.492, 0.368, 0.327, 0.411, 0.613, 0.180,
        ],
    ),
    (
        "P264",
        [
            0.887, 0.923, 0.916, 0.863, 0.748, 0.678, 0.887, 0.883, 0.606, 0.661, 0.799, 0.560,
        ],
    ),
    (
        "P276",
        [
            0.707, 0.699, 0.751, 0.650, 0.737, 0.535, 0.674, 0.639, 0.489, 0.557, 0.664, 0.515,
        ],
    ),
    (
        "P364",
        [
            0.756, 0.762, 0.850, 0.662, 0.780, 0.576, 0.751, 0.786, 0.619, 0.714, 0.774, 0.599,
        ],
    ),
    (
        "P495",
        [
            0.802, 0.834, 0.868, 0.661, 0.695, 0.413, 0.715, 0.716, 0.476, 0.530, 0.790, 0.499,
        ],
    ),
    (
        "P740",
        [
            0.941, 0.961, 0.961, 0.858, 0.931, 0.689, 0.905, 0.837, 0.646, 0.669, 0.882, 0.647,
        ],
    ),
    (
        "P1376",
        [
            0.505, 0.451, 0.606, 0.602, 0.352, 0.299, 0.202, 0.158, 0.501, 0.555, 0.202, 0.079,
        ],
    ),
    (
        "P1412",
        [
            0.490, 0.426, 0.659, 0.536, 0.456, 0.427, 0.472, 0.772, 0.190, 0.425, 0.706, 0.543,
        ],
    ),
];

pub const RELATIONS: [&str; 5] = ["P17", "P19", "P37", "P103", "P1412"];

/// `n` facts spread over `RELATIONS`, each relation drawing objects from a
/// pool of 30. Every seventh fact carries an alias that collides with
/// another pool object under case folding.
pub fn synthetic_triplets(n: usize, seed: u64) -> Vec<FactTriplet> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|i| {
            let rel = RELATIONS[i % RELATIONS.len()];
            let obj = rng.below(30);
            let mut aliases = vec![format!("{rel} obj {obj} alt")];
            if i % 7 == 0 {
                aliases.push(format!("{rel} OBJ {}", (obj + 1) % 30).to_lowercase());
            }
            FactTriplet {
                triplet_id: format!("t{i:05}"),
                relation_id: rel.to_string(),
                subject: format!("Subject {i}"),
                object: format!("{rel} Obj {obj}"),
                object_aliases: aliases,
            }
        })
        .collect()
}

/// Triplets of a single relation with distinct objects.
pub fn single_relation_triplets(relation: &str, n: usize) -> Vec<FactTriplet> {
    (0..n)
        .map(|i| FactTriplet {
            triplet_id: format!("t{i:04}"),
            relation_id: relation.to_string(),
            subject: format!("Place {i}"),
            object: format!("Land {i}"),
            object_aliases: vec![],
        })
        .collect()
}

pub fn uniform_profile(p: f64, f: f64, b: f64, q: f64, token_split: usize) -> MockProfile {
    MockProfile {
        model_id: "mock".into(),
        knowledge: BTreeMap::new(),
        default: Some(Knowledge {
            known: true,
            base_prob: p,
        }),
        framing_sensitivity: f,
        prime_boost: b,
        prime_susceptibility: q,
        seed: 3,
        token_split,
    }
}

/// Random per-triplet knowledge, roughly a fifth of it unknown.
pub fn random_profile(triplets: &[FactTriplet], seed: u64, token_split: usize) -> MockProfile {
    let mut rng = SplitMix64::new(seed);
    let knowledge = triplets
        .iter()
        .map(|t| {
            let k = Knowledge {
                known: rng.next_f64() > 0.2,
                base_prob: rng.next_f64(),
            };
            (t.triplet_id.clone(), k)
        })
        .collect();
    MockProfile {
        model_id: format!("rand-{seed}"),
        knowledge,
        default: None,
        framing_sensitivity: 0.5 + rng.next_f64(),
        prime_boost: 1.0 + rng.next_f64(),
        prime_susceptibility: rng.next_f64(),
        seed,
        token_split,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTriplet {
    pub pfd: f64,
    pub ird: f64,
    pub prob: f64,
}

fn mean_abs(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Straight-line recomputation from raw records: primary anchor from the
/// base-frame positively primed result, PFD over reframed QA results, IRD
/// over negatively primed results. Single model, single relation assumed.
pub fn oracle_triplets(
    probes: &[ProbeRecord],
    results: &[ProbeResult],
) -> BTreeMap<String, OracleTriplet> {
    let probs: BTreeMap<&str, &ProbeResult> =
        results.iter().map(|r| (r.probe_id.as_str(), r)).collect();
    let mut by_triplet: BTreeMap<&str, Vec<&ProbeRecord>> = BTreeMap::new();
    for p in probes {
        by_triplet.entry(&p.triplet_id).or_default().push(p);
    }
    let mut out = BTreeMap::new();
    for (tid, ps) in by_triplet {
        let get = |kind: ProbeKind| -> Vec<&ProbeResult> {
            ps.iter()
                .filter(|p| {
                    p.kind == kind && (kind != ProbeKind::QaPosPrimed || p.frame_index == 0)
                })
                .map(|p| probs[p.probe_id.as_str()])
                .collect()
        };
        let pos = get(ProbeKind::QaPosPrimed);
        let gold = &ps[0].gold_object;
        let aliases = &ps[0].gold_aliases;
        let top = pos[0].top1_text.trim().to_lowercase();
        if top != gold.to_lowercase() && !aliases.iter().any(|a| a.to_lowercase() == top) {
            continue;
        }
        let primary = &pos[0].anchor_token_probs.probs;
        let framed = get(ProbeKind::QaFrame);
        let negs = get(ProbeKind::QaNegPrimed);
        let pfd = mean(
            &framed
                .iter()
                .map(|r| mean_abs(primary, &r.anchor_token_probs.probs))
                .collect::<Vec<_>>(),
        );
        let ird = mean(
            &negs
                .iter()
                .map(|r| mean_abs(primary, &r.anchor_token_probs.probs))
                .collect::<Vec<_>>(),
        );
        out.insert(
            tid.to_string(),
            OracleTriplet {
                pfd,
                ird,
                prob: mean(primary),
            },
        );
    }
    out
}

pub fn oracle_monitor(triplets: &BTreeMap<String, OracleTriplet>, a: (f64, f64, f64)) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for t in triplets.values() {
        num += (a.0 * t.pfd * t.pfd + a.1 * t.ird * t.ird + a.2 * t.pfd * t.ird).sqrt();
        den += t.prob;
    }
    num / den
}
