use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use srpf::encoder::{guaranteed_distance, OpenKind};
use srpf::engine::{Context, Registry};
use srpf::oracle::enumerate_all;
use srpf::pareto::Triple;
use srpf::pathfinder::{
    dclc, ext_dominates, solve, solve_with, tight_dominates, DiversityMode, LabelKey, NoPruning,
    Query, Solutions,
};
use srpf::topo::{generate_random, RandomSpec};

fn instance(n: usize, seed: u64) -> Context {
    let spec = RandomSpec::new(n, 2.5f64.min(n as f64 - 0.5), seed);
    Context::new(generate_random(&spec).unwrap())
}

fn triples(sols: &Solutions) -> Vec<(usize, Vec<Triple>)> {
    sols.iter()
        .map(|(&d, v)| {
            (
                d,
                v.iter()
                    .map(|s| s.triple())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
            )
        })
        .collect()
}

fn key_strategy() -> impl Strategy<Value = LabelKey> {
    (0u64..4, 0u64..4, 0u32..4, 0usize..3, 0u8..3).prop_map(|(cost, delay, nsegs, open_src, k)| {
        LabelKey {
            cost,
            delay,
            nsegs,
            open_src,
            open: match k {
                0 => OpenKind::Empty,
                1 => OpenKind::Node,
                _ => OpenKind::Adjacency(open_src),
            },
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Dropping all pruning changes nothing but the amount of work.
    #[test]
    fn pruning_is_safe(n in 2usize..=6, seed: u64, msd in 1u32..=3, bound in proptest::option::of(1u64..40)) {
        let ctx = instance(n, seed);
        for s in 0..n {
            let q = Query::new(s, None).with_msd(msd).with_bound(bound);
            let all = solve_with(&ctx.db, &ctx.topo, &q, &NoPruning);
            prop_assert_eq!(triples(&solve(&ctx.db, &ctx.topo, &q)), triples(&all));
        }
    }

    /// Delay-bounded queries agree across every engine.
    #[test]
    fn bounded_queries_agree(n in 2usize..=7, seed: u64, msd in 1u32..=4, bound in 1u64..60) {
        let ctx = instance(n, seed);
        let reg = Registry::with_defaults();
        for s in 0..n {
            let q = Query::new(s, None).with_msd(msd).with_bound(Some(bound));
            let want = triples(&enumerate_all(&ctx.db, &ctx.topo, s, msd, Some(bound)));
            for name in ["routourne", "routourne-ext", "clique"] {
                let e = reg.get(name).unwrap();
                e.prepare(&ctx);
                prop_assert_eq!(&triples(&e.run(&ctx, &q).solutions), &want, "{}", name);
            }
        }
    }

    /// Max-diversity output has the same triples, lists every standard
    /// list, and each list delivers its triple exactly.
    #[test]
    fn diversity_lists_are_exact(n in 2usize..=7, seed: u64, msd in 1u32..=4) {
        let ctx = instance(n, seed);
        for s in 0..n {
            let q = Query::new(s, None).with_msd(msd);
            let std = solve(&ctx.db, &ctx.topo, &q);
            let div = solve(&ctx.db, &ctx.topo, &q.clone().with_diversity(DiversityMode::MaxDiversity));
            prop_assert_eq!(triples(&std), triples(&div));
            for (d, sols) in &div {
                for p in sols {
                    let got = guaranteed_distance(&ctx.db, &ctx.topo, &p.list, s).unwrap();
                    prop_assert_eq!((got.0, got.1, p.list.len() as u32), p.triple());
                }
                let lists: HashSet<_> = sols.iter().map(|p| p.list.clone()).collect();
                prop_assert_eq!(lists.len(), sols.len());
                prop_assert!(std[d].iter().all(|p| lists.contains(&p.list)));
            }
        }
    }

    /// dclc picks the cheapest bounded triple of the brute-force front.
    #[test]
    fn dclc_matches_oracle(n in 2usize..=7, seed: u64, bound in 1u64..60) {
        let ctx = instance(n, seed);
        for s in 0..n {
            let all = enumerate_all(&ctx.db, &ctx.topo, s, 4, Some(bound));
            for d in 0..n {
                let q = Query::new(s, Some(d)).with_msd(4).with_bound(Some(bound));
                let want = all.get(&d).and_then(|v| v.iter().map(|p| p.triple()).min());
                prop_assert_eq!(dclc(&ctx.db, &ctx.topo, &q).map(|p| p.triple()), want);
            }
        }
    }

    /// The tight relation prunes everything EXT-DOM prunes.
    #[test]
    fn tight_contains_extended(a in key_strategy(), b in key_strategy()) {
        prop_assert!(!ext_dominates(&a, &b) || tight_dominates(&a, &b));
    }
}
