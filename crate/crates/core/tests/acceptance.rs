//! End-to-end acceptance run: one PASS/FAIL line per criterion, all exact.
//! Runs without the libtest harness so the lines always reach the output.
//!
//! Every expected value below is either produced by an independent oracle
//! (brute-force enumeration, colouring sums, assignment listing) or is one of
//! the small hand-checkable examples.

use std::cell::RefCell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use upoly_core::canon::{canonicalize_free, is_isomorphic, subtree_codes, CanonicalCode};
use upoly_core::census::{run_census, CensusMode, CensusParams};
use upoly_core::forest::{assignment_count_oracle, build_stages, procedure3_count, ContainmentForest, HostTree};
use upoly_core::generate::{enumerate_trees, random_encodable_tree, random_weighted_tree};
use upoly_core::goodclass::{check_good, good_decode, good_encode};
use upoly_core::hanging::hanging_subtrees;
use upoly_core::partitions::{count_nonshaped_oracle, count_shaped_oracle, u_polynomial, UMode};
use upoly_core::potts::{eval_br, eval_m, EvalMode};
use upoly_core::procedure1::{reconstruct_from_census, shape_census, Procedure1};
use upoly_core::situations::{
    enumerate_situations, m_count_with_stats, occurrence_count_oracle_with_stats, ContainmentTable, Host, Situation,
};
use upoly_core::{Expression, RootedWeightedTree, Weight, WeightedTree};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn w(x: u64) -> Weight {
    Weight::from(x)
}

fn free_trees(range: std::ops::RangeInclusive<usize>) -> Vec<WeightedTree> {
    range.flat_map(|n| enumerate_trees(n).unwrap()).collect()
}

fn spider_3x3() -> WeightedTree {
    let edges = vec![(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (0, 7), (7, 8), (8, 9)];
    WeightedTree::with_unit_weights(10, edges).unwrap()
}

/// All free trees up to 7 vertices plus 100 seeded random trees with weights at most 2.
fn pipeline_corpus() -> Vec<WeightedTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut v = free_trees(1..=7);
    for _ in 0..100 {
        let n = rng.gen_range(2..=7);
        v.push(random_weighted_tree(&mut rng, n, 2));
    }
    v
}

#[derive(Default)]
struct Invariants {
    forests_checked: usize,
    forest_violations: Vec<String>,
    pairs_checked: usize,
    nesting_violations: usize,
}

fn check_stage_invariants(s: &Situation, inv: &mut Invariants) {
    let k = s.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    for mask in 1u32..1 << pairs.len() {
        let f: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect();
        match build_stages(&f, s) {
            Ok(Ok(stages)) => {
                inv.forests_checked += 1;
                for v in stages.w3.invariant_violations(k, Some(s)) {
                    inv.forest_violations.push(format!("{s} {f:?}: {v}"));
                }
            }
            Ok(Err(_)) => {}
            Err(e) => inv.forest_violations.push(format!("{s} {f:?}: {e}")),
        }
    }
}

fn u_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut trees = free_trees(1..=9);
    let free = trees.len();
    for _ in 0..200 {
        let n = rng.gen_range(1..=9);
        trees.push(random_weighted_tree(&mut rng, n, 8));
    }
    for t in &trees {
        let dp = u_polynomial(t, UMode::Dp).map_err(|e| e.to_string())?;
        let brute = u_polynomial(t, UMode::Brute).map_err(|e| e.to_string())?;
        ensure!(dp == brute, "dp and brute tables differ on {t:?}");
    }
    Ok(format!("{free} free trees + 200 random trees, full tables equal"))
}

fn stanley_census() -> Outcome {
    let r = run_census(&CensusParams { max_n: 10, mode: CensusMode::Stanley, ..Default::default() })
        .map_err(|e| e.to_string())?;
    ensure!(r.collisions.is_empty(), "{} collisions", r.collisions.len());
    ensure!(r.distinct_fingerprints == r.trees, "{} fingerprints for {} trees", r.distinct_fingerprints, r.trees);
    Ok(format!("{} trees, {} fingerprints, 0 collisions", r.trees, r.distinct_fingerprints))
}

fn encoding_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sources: Vec<WeightedTree> = (0..500)
        .map(|_| {
            let n = rng.gen_range(3..=8);
            random_encodable_tree(&mut rng, n, 8)
        })
        .collect();
    let (mut relabelled, mut distinct_pairs) = (0, 0);
    for (i, t) in sources.iter().enumerate() {
        let g = good_encode(t).map_err(|e| e.to_string())?;
        let back = good_decode(&g).map_err(|e| e.to_string())?;
        ensure!(is_isomorphic(&back, t), "decode(encode(t)) is not t for {t:?}");

        let mut perm: Vec<usize> = (0..t.n()).collect();
        perm.shuffle(&mut rng);
        let moved = t.relabel(&perm).map_err(|e| e.to_string())?;
        let g2 = good_encode(&moved).map_err(|e| e.to_string())?;
        ensure!(is_isomorphic(&g.t_prime, &g2.t_prime), "relabelled copy encodes differently: {t:?}");
        relabelled += 1;

        let other = &sources[(i + 1) % sources.len()];
        let go = good_encode(other).map_err(|e| e.to_string())?;
        let same_source = is_isomorphic(t, other);
        ensure!(
            same_source == is_isomorphic(&g.t_prime, &go.t_prime),
            "isomorphism not transferred between {t:?} and {other:?}"
        );
        distinct_pairs += usize::from(!same_source);
    }
    Ok(format!("500 round trips, {relabelled} relabellings, {distinct_pairs} non-isomorphic pairs"))
}

fn goodness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut encoded = Vec::new();
    for _ in 0..60 {
        let n = rng.gen_range(3..=7);
        encoded.push(good_encode(&random_encodable_tree(&mut rng, n, 8)).map_err(|e| e.to_string())?.t_prime);
    }
    let r = check_good(&encoded);
    ensure!(r.structure_holds(), "leaf-structure property fails");
    ensure!(r.leaf_weights_hold(), "leaf-weight property fails");
    ensure!(r.shapes_hold(), "shape property fails: {:?}", r.shape_violation);
    Ok(format!("{} trees, {} shapes compared", encoded.len(), r.shapes_checked))
}

fn occurrence_counts(inv: &mut Invariants) -> Outcome {
    let spider = spider_3x3();
    let s: Situation = "1(1);1(1)".parse().unwrap();
    let tbl = ContainmentTable::for_situation(&spider, &s).unwrap();
    let (m, stats) = m_count_with_stats(&spider, &s, &tbl).map_err(|e| e.to_string())?;
    let overlap = &stats.lambda0 - &m;
    ensure!(
        (stats.lambda0.clone(), m.clone(), overlap.clone()) == (9u32.into(), 6u32.into(), 3u32.into()),
        "spider gave {}/{m}/{overlap}",
        stats.lambda0
    );

    let mut checked = 0usize;
    for t in pipeline_corpus() {
        let tw = t.total_weight();
        let tbl = ContainmentTable::for_tree(&t).map_err(|e| e.to_string())?;
        let mut target = w(2);
        while &target * 2u32 <= tw {
            for s in enumerate_situations(&t, &target).map_err(|e| e.to_string())? {
                if s.len() > 3 {
                    continue;
                }
                let (fast, _) = m_count_with_stats(&t, &s, &tbl).map_err(|e| format!("{s} in {t:?}: {e}"))?;
                let (slow, ostats) = occurrence_count_oracle_with_stats(&t, &s).map_err(|e| e.to_string())?;
                ensure!(fast == slow, "m_count {fast} != oracle {slow} for {s} in {t:?}");
                inv.pairs_checked += ostats.pairs_checked;
                inv.nesting_violations += ostats.nesting_violations;
                check_stage_invariants(&s, inv);
                checked += 1;
            }
            target += 1u32;
        }
    }
    Ok(format!("spider 9/6/3, {checked} situations equal to the oracle"))
}

fn shaped_counts() -> Outcome {
    let p5 = WeightedTree::unit_path(5);
    let mut p = Procedure1::new(&p5).map_err(|e| e.to_string())?;
    for (j, e, want) in [(3u64, [2u64, 2, 1], (6u32, 2u32, 4u32)), (2, [3, 1, 1], (3, 1, 2))] {
        let c = p.counts(&w(j), &Expression::from_u64(&e).unwrap()).map_err(|e| e.to_string())?;
        let got = (c.designated, c.nonshaped, c.shaped);
        ensure!(got == (want.0.into(), want.1.into(), want.2.into()), "5-path j={j} E={e:?}: {got:?}");
    }

    let mut queries = 0usize;
    for t in pipeline_corpus() {
        let tw = t.total_weight();
        let mut p = Procedure1::new(&t).map_err(|e| e.to_string())?;
        let exprs: Vec<Expression> = p.u_table().iter_desc().map(|(e, _)| e.clone()).collect();
        for e in exprs {
            let mut parts = e.parts().to_vec();
            parts.dedup();
            // every j with a (w(T) - j)-part, up to half the total weight
            for part in parts.into_iter().filter(|a| *a < tw && a * 2u32 >= tw) {
                let j = &tw - &part;
                let c = p.counts(&j, &e).map_err(|err| format!("j={j} E={e} in {t:?}: {err}"))?;
                let shaped = count_shaped_oracle(&t, &j, &e).map_err(|e| e.to_string())?;
                let nonshaped = count_nonshaped_oracle(&t, &j, &e).map_err(|e| e.to_string())?;
                ensure!(
                    c.shaped == shaped && c.nonshaped == nonshaped,
                    "j={j} E={e} in {t:?}: got {}/{}, oracle {shaped}/{nonshaped}",
                    c.shaped,
                    c.nonshaped
                );
                queries += 1;
            }
        }
    }
    Ok(format!("5-path triples, {queries} (j, E) queries with j <= w(T)/2 equal to the oracle"))
}

/// A random arborescence forest on up to four nodes with classes drawn from
/// `classes`. Child classes usually come from inside the parent's class, so
/// most instances have a non-zero count.
fn random_forest(rng: &mut ChaCha8Rng, classes: &[CanonicalCode]) -> ContainmentForest {
    let k = rng.gen_range(1..=4);
    let mut node_class = vec![None; k];
    let mut arcs = Vec::new();
    for x in (0..k).rev() {
        let parent = if x + 1 < k && rng.gen_bool(0.6) { Some(rng.gen_range(x + 1..k)) } else { None };
        let class = match parent {
            None => classes.choose(rng).unwrap().clone(),
            Some(p) => {
                arcs.push((x, p));
                let host: &CanonicalCode = node_class[p].as_ref().unwrap();
                let r = host.to_rooted_tree().unwrap();
                if rng.gen_bool(0.8) {
                    subtree_codes(r.tree(), r.root()).choose(rng).unwrap().clone()
                } else {
                    classes.choose(rng).unwrap().clone()
                }
            }
        };
        node_class[x] = Some(class);
    }
    ContainmentForest::from_parts(node_class.into_iter().map(Option::unwrap).collect(), arcs)
}

fn procedure3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut nonzero = 0usize;
    for i in 0..200 {
        let n = rng.gen_range(2..=9);
        let t = random_weighted_tree(&mut rng, n, 2);
        let classes: Vec<CanonicalCode> = hanging_subtrees(&t).into_iter().map(|h| h.code).collect();
        let mut forest = random_forest(&mut rng, &classes);
        let mut all = classes.clone();
        all.extend(forest.nodes.iter().map(|x| x.class.clone()));
        let tbl = ContainmentTable::for_classes(&t, &all).map_err(|e| e.to_string())?;
        let (host, expected) = if i % 2 == 0 {
            (Host::Tree, assignment_count_oracle(HostTree::Free(&t), &forest))
        } else {
            let hc = classes.choose(&mut rng).unwrap().clone();
            let h: RootedWeightedTree = hc.to_rooted_tree().unwrap();
            // rebuild so that every class fits the class host's table rows
            forest = random_forest(&mut rng, std::slice::from_ref(&hc));
            let mut all = all.clone();
            all.extend(forest.nodes.iter().map(|x| x.class.clone()));
            let tbl = ContainmentTable::for_classes(&t, &all).map_err(|e| e.to_string())?;
            let got = procedure3_count(&Host::Class(hc.clone()), &forest, &tbl).map_err(|e| e.to_string())?;
            let want = assignment_count_oracle(HostTree::Rooted(&h), &forest);
            ensure!(got == want, "class host {hc}: procedure {got} != oracle {want}");
            nonzero += usize::from(!want.is_zero());
            continue;
        };
        let got = procedure3_count(&host, &forest, &tbl).map_err(|e| e.to_string())?;
        ensure!(got == expected, "tree host {t:?}: procedure {got} != oracle {expected}");
        nonzero += usize::from(!expected.is_zero());
    }
    Ok(format!("200 instances ({nonzero} with a non-zero count)"))
}

fn potts() -> Outcome {
    let p2 = WeightedTree::unit_path(2);
    let hand = [
        (eval_m(&p2, 2, 2, EvalMode::Subsets), 4),
        (eval_br(&p2, 1, 1, 2, 2, EvalMode::Subsets), 8),
        (eval_br(&p2, 0, 2, 2, 2, EvalMode::Subsets), 36),
    ];
    for (got, want) in hand {
        let got = got.map_err(|e| e.to_string())?;
        ensure!(got == want.into(), "hand value {want} came out as {got}");
    }
    let mut evaluations = 0usize;
    for t in free_trees(1..=6) {
        for k in 1..=3 {
            for q in [2, 3] {
                let a = eval_m(&t, k, q, EvalMode::Subsets).map_err(|e| e.to_string())?;
                let b = eval_m(&t, k, q, EvalMode::Colourings).map_err(|e| e.to_string())?;
                ensure!(a == b, "M differs on {t:?} k={k} q={q}: {a} vs {b}");
                for x in 0..=2 {
                    let a = eval_br(&t, x, k, q, 2, EvalMode::Subsets).map_err(|e| e.to_string())?;
                    let b = eval_br(&t, x, k, q, 2, EvalMode::Colourings).map_err(|e| e.to_string())?;
                    ensure!(a == b, "Br differs on {t:?} k={k} q={q} x={x}: {a} vs {b}");
                }
                evaluations += 4;
            }
        }
    }
    Ok(format!("hand values, {evaluations} subset/colouring pairs equal"))
}

fn reconstruction() -> Outcome {
    for t in [WeightedTree::unit_path(5), WeightedTree::unit_path(4), WeightedTree::unit_star(4)] {
        let back = reconstruct_from_census(&shape_census(&t), t.n()).map_err(|e| e.to_string())?;
        ensure!(is_isomorphic(&back, &t), "worked example {t:?} rebuilt as {back:?}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut sources = free_trees(3..=6);
    for _ in 0..60 {
        let n = rng.gen_range(3..=6);
        sources.push(random_encodable_tree(&mut rng, n, 8));
    }
    for s in &sources {
        let g = good_encode(s).map_err(|e| e.to_string())?.t_prime;
        let back = reconstruct_from_census(&shape_census(&g), g.n()).map_err(|e| format!("{s:?}: {e}"))?;
        ensure!(is_isomorphic(&back, &g), "encoding of {s:?} rebuilt wrongly");
    }

    let unit = free_trees(1..=9);
    let mut applied = 0usize;
    for t in &unit {
        if let Ok(back) = reconstruct_from_census(&shape_census(t), t.n()) {
            ensure!(canonicalize_free(&back) == canonicalize_free(t), "descent rebuilt {t:?} as {back:?}");
            applied += 1;
        }
    }
    Ok(format!("3 examples, {} encodings, {applied} of {} unit trees where the descent applies", sources.len(), unit.len()))
}

fn main() {
    let invariants = RefCell::new(Invariants::default());
    let criteria: Vec<Criterion<'_>> = vec![
        ("u-polynomial dp equals brute force", Box::new(u_oracle_equivalence)),
        ("fingerprint census separates trees up to 10 vertices", Box::new(stanley_census)),
        ("good-class encoding round trip", Box::new(encoding_round_trip)),
        ("encodings form a good set", Box::new(goodness)),
        ("occurrence counts equal the oracle", Box::new(|| occurrence_counts(&mut invariants.borrow_mut()))),
        ("shaped counts equal the oracle", Box::new(shaped_counts)),
        ("forest assignment counts equal the oracle", Box::new(procedure3)),
        ("potts evaluators agree across modes", Box::new(potts)),
        ("reconstruction from shape census", Box::new(reconstruction)),
        (
            "forest and nesting invariants",
            Box::new(|| {
                let inv = invariants.borrow();
                ensure!(inv.forests_checked > 0, "no forests were built");
                ensure!(inv.forest_violations.is_empty(), "{}", inv.forest_violations.join("\n"));
                ensure!(inv.nesting_violations == 0, "{} overlapping pairs", inv.nesting_violations);
                Ok(format!("{} forests, {} subtree pairs, 0 violations", inv.forests_checked, inv.pairs_checked))
            }),
        ),
    ];

    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
