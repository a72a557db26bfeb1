//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.
//! Tests take a shared lock so that the timing criteria run alone.

mod common;

use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use streamdecomp::cli::{run_graph_job, run_hyper_job, GraphAlgorithm, GraphJob, HyperAlgorithm, HyperJob};
use streamdecomp::freight::{run_freight, FreightConfig, Objective, SortedBlocks};
use streamdecomp::generate;
use streamdecomp::heistream::ModelKind;
use streamdecomp::metrics;
use streamdecomp::multisection::{run_oms, DistanceCode, HierarchySpec, MultisectionTree, OmsConfig};
use streamdecomp::onepass::{run_onepass, FennelParams, OnePassAlgorithm, OnePassConfig};
use streamdecomp::{BlockId, CsrGraph, Hypergraph};

static LOCK: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn graph_set() -> &'static [(&'static str, CsrGraph)] {
    static SET: OnceLock<Vec<(&'static str, CsrGraph)>> = OnceLock::new();
    SET.get_or_init(|| {
        vec![
            ("rgg2d", generate::rgg::<2>(1 << 15, 8.0, 1)),
            ("rgg3d", generate::rgg::<3>(1 << 15, 8.0, 2)),
            ("tri2d", generate::grid2d(181, 181, true)),
            ("grid2d", generate::grid2d(181, 181, false)),
            ("grid3d", generate::grid3d(32, 32, 32)),
            ("ba", generate::barabasi_albert(1 << 15, 4, 3)),
        ]
    })
}

fn hypergraph_set() -> &'static [(&'static str, Hypergraph)] {
    static SET: OnceLock<Vec<(&'static str, Hypergraph)>> = OnceLock::new();
    SET.get_or_init(|| {
        vec![
            ("stencil5", generate::stencil2d_rownet(200, 200, false).unwrap()),
            ("stencil9", generate::stencil2d_rownet(200, 200, true).unwrap()),
            ("stencil7", generate::stencil3d_rownet(35, 35, 35).unwrap()),
            ("banded", generate::banded_rownet(40_000, 3, 2, 4).unwrap()),
            ("banded-sparse", generate::banded_rownet(50_000, 1, 4, 5).unwrap()),
        ]
    })
}

fn edge_cut(g: &CsrGraph, job: &GraphJob) -> u64 {
    let part = run_graph_job(&mut g.stream(), job, None).unwrap().state.assignment;
    common::edge_cut(g, &part)
}

#[test]
fn criterion_01_freight_matches_naive_argmax() {
    let _guard = serial();
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(101);
    let mut mismatches = Vec::new();
    let mut runs = 0;
    for i in 0..100 {
        let n = r.gen_range(2..=200);
        let m = r.gen_range(1..=300);
        let h = generate::random_hypergraph(n, m, 5, r.gen()).unwrap();
        assert!(h.pins() <= 1500);
        let k = if i % 2 == 0 { 4 } else { 16 };
        let alpha = common::classic_alpha(h.n(), h.m(), k);
        for (objective, cut) in [(Objective::Connectivity, false), (Objective::CutNet, true)] {
            let config = FreightConfig {
                alpha: Some(alpha),
                ..FreightConfig::new(objective, k)
            };
            let fast = run_freight(&mut h.stream(), &config).unwrap().state.assignment;
            runs += 1;
            if fast != common::freight(&h, k, alpha, cut) {
                mismatches.push((i, objective));
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        mismatches.is_empty() && elapsed < Duration::from_secs(10),
        format!("{} of {runs} runs differ, {:.2} s", mismatches.len(), elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_02_sorted_blocks_stay_sorted() {
    let _guard = serial();
    let k = 1024u32;
    let mut r = ChaCha8Rng::seed_from_u64(202);
    let mut s = SortedBlocks::new(k);
    let mut count = vec![0u64; k as usize];
    let mut violations = 0;
    let mut checks = 0;
    for step in 1..=100_000 {
        // half uniform, half concentrated on a few blocks
        let d = if r.gen_bool(0.5) { r.gen_range(0..k) } else { r.gen_range(0..8) * 97 };
        s.increment(d);
        count[d as usize] += 1;
        if step % 1000 == 0 {
            checks += 1;
            let mut resorted = count.clone();
            resorted.sort_unstable();
            let sorted = s.order().windows(2).all(|w| count[w[0] as usize] <= count[w[1] as usize]);
            let ok = s.check().is_ok()
                && sorted
                && s.min_cardinality() == resorted[0]
                && count[s.min_block() as usize] == resorted[0]
                && (0..k).all(|b| s.cardinality(b) == count[b as usize]);
            violations += !ok as u32;
        }
    }
    verdict(2, violations == 0, format!("{violations} violations in {checks} checks"));
}

#[test]
fn criterion_03_contracted_gain_is_additive() {
    let _guard = serial();
    let mut r = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0f64;
    for _ in 0..50 {
        let n = r.gen_range(3..=80);
        let k = r.gen_range(2..=16);
        let seed = r.gen();
        let (g, part, u, v) = common::gain::weighted_model(n, k, seed);
        let params = FennelParams {
            gamma: 1.5,
            alpha: r.gen_range(0.01..2.0),
            hard_balance: true,
        };
        worst = worst.max(common::gain::pair_gain_error(&g, &part, k, u, v, &params));
    }
    verdict(3, worst <= 1e-9, format!("max deviation {worst:.3e}"));
}

#[test]
fn criterion_04_oms_single_pass_equals_restreaming() {
    let _guard = serial();
    let mut trees = vec![MultisectionTree::build_from_spec(&HierarchySpec::parse("2:2:2", "1:10:100").unwrap())];
    for k in [5, 8, 12] {
        for b in [2, 4] {
            trees.push(MultisectionTree::build_hierarchy(k, b));
        }
    }
    let mut r = ChaCha8Rng::seed_from_u64(404);
    let mut mismatches = 0;
    let mut runs = 0;
    for _ in 0..50 {
        let n = r.gen_range(2..=500);
        let g = generate::gnm(n, n * r.gen_range(1..=4), r.gen());
        for tree in &trees {
            let alpha = common::classic_alpha(g.n(), g.m(), tree.k());
            let config = OmsConfig {
                alpha: Some(alpha),
                ..OmsConfig::default()
            };
            let single = run_oms(&mut g.stream(), tree, &config).unwrap().state.assignment;
            runs += 1;
            mismatches += (single != common::oms_layered(&g, tree, alpha, 0)) as u32;
        }
    }
    verdict(4, mismatches == 0, format!("{mismatches} of {runs} runs differ"));
}

#[test]
fn criterion_05_every_partition_is_balanced() {
    let _guard = serial();
    let mut failures = Vec::new();
    let mut runs = 0;
    for k in [2u32, 8, 32, 128] {
        for (name, g) in graph_set() {
            let l_max = common::lmax_3pct(g.n() as u64, k);
            for alg in [
                GraphAlgorithm::Hashing,
                GraphAlgorithm::Ldg,
                GraphAlgorithm::Fennel,
                GraphAlgorithm::Heistream,
                GraphAlgorithm::Oms,
            ] {
                let part = run_graph_job(&mut g.stream(), &GraphJob::new(alg, k), None).unwrap().state.assignment;
                let w = common::block_weights(|_| 1, g.n(), &part, k);
                runs += 1;
                if *w.iter().max().unwrap() > l_max {
                    failures.push(format!("{name}/{}/{k}", alg.name()));
                }
            }
        }
        for (name, h) in hypergraph_set() {
            let l_max = common::lmax_3pct(h.n() as u64, k);
            for (alg, obj) in [
                (HyperAlgorithm::Hashing, Objective::Connectivity),
                (HyperAlgorithm::Freight, Objective::Connectivity),
                (HyperAlgorithm::Freight, Objective::CutNet),
            ] {
                let job = HyperJob::new(alg, obj, k);
                let part = run_hyper_job(&mut h.stream(), &job).unwrap().state.assignment;
                let w = common::block_weights(|_| 1, h.n(), &part, k);
                runs += 1;
                if *w.iter().max().unwrap() > l_max {
                    failures.push(format!("{name}/{}/{k}", job.name()));
                }
            }
        }
    }
    verdict(5, failures.is_empty(), format!("{} of {runs} partitions over L_max {failures:?}", failures.len()));
}

#[test]
fn criterion_06_graph_quality_ordering() {
    let _guard = serial();
    let k = 32;
    let (mut fennel_wins, mut heistream_wins, mut restream_wins) = (0, 0, 0);
    let mut rows = Vec::new();
    for (name, g) in graph_set() {
        assert!((10_000..=1_000_000).contains(&g.m()), "{name} has {} edges", g.m());
        let hashing = edge_cut(g, &GraphJob::new(GraphAlgorithm::Hashing, k));
        let fennel = edge_cut(g, &GraphJob::new(GraphAlgorithm::Fennel, k));
        let heistream = GraphJob {
            delta: 1 << 15,
            model: ModelKind::Extended,
            ..GraphJob::new(GraphAlgorithm::Heistream, k)
        };
        let one = edge_cut(g, &heistream);
        let two = edge_cut(g, &GraphJob { passes: 2, ..heistream });
        fennel_wins += (fennel < hashing) as usize;
        heistream_wins += (one <= fennel) as usize;
        restream_wins += (two <= one) as usize;
        rows.push(format!("{name}: hashing {hashing} fennel {fennel} heistream {one} 2-pass {two}"));
    }
    let total = graph_set().len();
    let pass = fennel_wins == total && heistream_wins * 10 >= total * 6 && restream_wins * 10 >= total * 8;
    verdict(
        6,
        pass,
        format!(
            "fennel<hashing {fennel_wins}/{total}, heistream<=fennel {heistream_wins}/{total}, \
             2-pass<=1-pass {restream_wins}/{total} [{}]",
            rows.join("; ")
        ),
    );
}

#[test]
fn criterion_07_hypergraph_quality_ordering() {
    let _guard = serial();
    let k = 512;
    let (mut con_wins, mut cut_wins) = (0, 0);
    let mut rows = Vec::new();
    for (name, h) in hypergraph_set() {
        let run = |alg, obj| {
            let part = run_hyper_job(&mut h.stream(), &HyperJob::new(alg, obj, k)).unwrap().state.assignment;
            common::cut_and_lambda(h, &part)
        };
        let (hash_cut, hash_con) = run(HyperAlgorithm::Hashing, Objective::Connectivity);
        let (_, con) = run(HyperAlgorithm::Freight, Objective::Connectivity);
        let (cut, _) = run(HyperAlgorithm::Freight, Objective::CutNet);
        con_wins += (con < hash_con) as usize;
        cut_wins += (cut <= hash_cut) as usize;
        rows.push(format!("{name}: con {con} vs {hash_con}, cut {cut} vs {hash_cut}"));
    }
    let total = hypergraph_set().len();
    verdict(
        7,
        total >= 5 && con_wins == total && cut_wins == total,
        format!("con {con_wins}/{total}, cut {cut_wins}/{total} [{}]", rows.join("; ")),
    );
}

#[test]
fn criterion_08_mapping_beats_identity() {
    let _guard = serial();
    let spec = HierarchySpec::parse("4:16:2", "1:10:100").unwrap();
    let k = spec.k();
    let mut wins = 0;
    let mut rows = Vec::new();
    for (name, g) in graph_set() {
        let cost = |alg| {
            let job = GraphJob::new(alg, k);
            let part = run_graph_job(&mut g.stream(), &job, Some(&spec)).unwrap().state.assignment;
            metrics::graph_report(&mut g.stream(), &part, k, 0.03, Some(&spec)).unwrap().comm_cost.unwrap()
        };
        let oms = cost(GraphAlgorithm::Oms);
        let fennel = cost(GraphAlgorithm::Fennel);
        wins += (oms < fennel) as usize;
        rows.push(format!("{name}: {oms} vs {fennel}"));
    }
    let total = graph_set().len();
    verdict(
        8,
        wins * 10 >= total * 7,
        format!("oms<fennel {wins}/{total} [{}]", rows.join("; ")),
    );
}

fn best_of(repeats: usize, mut f: impl FnMut()) -> f64 {
    (0..repeats)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn criterion_09_freight_runtime_is_independent_of_k() {
    let _guard = serial();
    let h = generate::stencil3d_rownet(56, 56, 56).unwrap();
    assert!(h.pins() >= 1_000_000);
    let g = h.clique_expansion();
    let freight = |k| {
        best_of(3, || {
            let config = FreightConfig::new(Objective::Connectivity, k);
            run_freight(&mut h.stream(), &config).unwrap();
        })
    };
    let fennel = |k| {
        best_of(2, || {
            let config = OnePassConfig::new(OnePassAlgorithm::Fennel, k);
            run_onepass(&mut g.stream(), &config).unwrap();
        })
    };
    let (f512, f2560) = (freight(512), freight(2560));
    let (n512, n2560) = (fennel(512), fennel(2560));
    let freight_ratio = f2560 / f512;
    let fennel_ratio = n2560 / n512;
    verdict(
        9,
        freight_ratio <= 1.5 && fennel_ratio >= 5.0,
        format!(
            "{} pins; freight {:.3}s -> {:.3}s ({freight_ratio:.2}x), \
             fennel on clique expansion {:.3}s -> {:.3}s ({fennel_ratio:.2}x)",
            h.pins(),
            f512,
            f2560,
            n512,
            n2560
        ),
    );
}

#[test]
fn criterion_10_freight_on_graphs_is_fennel() {
    let _guard = serial();
    let mut r = ChaCha8Rng::seed_from_u64(1010);
    let mut mismatches = 0;
    for _ in 0..20 {
        let n = r.gen_range(10..=2000);
        let g = generate::gnm(n, n * r.gen_range(1..=5), r.gen());
        let k = r.gen_range(2..=64);
        let fennel: Vec<BlockId> = run_onepass(&mut g.stream(), &OnePassConfig::new(OnePassAlgorithm::Fennel, k))
            .unwrap()
            .state
            .assignment;
        let h = Hypergraph::from_graph(&g);
        let freight = run_freight(&mut h.stream(), &FreightConfig::new(Objective::Connectivity, k))
            .unwrap()
            .state
            .assignment;
        mismatches += (fennel != freight) as u32;
    }
    verdict(10, mismatches == 0, format!("{mismatches} of 20 graphs differ"));
}

fn random_hierarchy(r: &mut ChaCha8Rng) -> HierarchySpec {
    loop {
        let layers = r.gen_range(1..=5);
        let fanouts: Vec<u32> = (0..layers).map(|_| r.gen_range(1..=16)).collect();
        let k: u64 = fanouts.iter().map(|&f| f as u64).product();
        if k > 4096 || k < 2 {
            continue;
        }
        let mut distances: Vec<u64> = (0..layers).map(|_| r.gen_range(1..=1000)).collect();
        distances.sort_unstable();
        return HierarchySpec::new(fanouts, distances).unwrap();
    }
}

#[test]
fn criterion_11_distance_matches_division() {
    let _guard = serial();
    let mut r = ChaCha8Rng::seed_from_u64(1111);
    let mut specs = vec![HierarchySpec::parse("4:16:64", "1:10:100").unwrap()];
    while specs.len() < 20 {
        specs.push(random_hierarchy(&mut r));
    }
    let start = Instant::now();
    let mut mismatches = 0u64;
    let mut pairs = 0u64;
    for spec in &specs {
        let code = DistanceCode::new(spec);
        for a in 0..spec.k() {
            for b in 0..spec.k() {
                pairs += 1;
                mismatches += (code.distance(a, b) != common::division_distance(spec.fanouts(), spec.distances(), a, b)) as u64;
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        11,
        mismatches == 0 && elapsed < Duration::from_secs(5),
        format!("{mismatches} mismatches in {pairs} pairs, {:.2} s", elapsed.as_secs_f64()),
    );
}
