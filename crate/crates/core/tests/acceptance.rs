//! Acceptance suite: one line per criterion, then a single overall assertion.
//!
//! Criteria that need the 1997 US airport network run only when the
//! `ARCWALK_USAIR97` environment variable points at its Pajek file; otherwise
//! they are reported as SKIP.

use std::collections::BTreeSet;

use arcwalk::classical::normalized_stationary;
use arcwalk::community::{self, AverageSource, CommunityPartition, DEFAULT_MARGINAL_BAND};
use arcwalk::datasets::{self, KARATE_ADMINISTRATOR_GROUP, KARATE_INSTRUCTOR_GROUP};
use arcwalk::evolution::{finite_time_matrix, AveragingWindow, TransitionMatrix, WalkState};
use arcwalk::loaders::load_pajek;
use arcwalk::operators::{verify_shift_equivalence, DEFAULT_DENSE_CAP};
use arcwalk::spectral::{self, DegeneracyReport, SpectralDecomposition, DEFAULT_DEGENERACY_TOL};
use arcwalk::{CoinKind, Graph, WalkOperator};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn decompose(graph: &Graph, coin: CoinKind) -> SpectralDecomposition {
    spectral::decompose_walk(graph, coin, DEFAULT_DENSE_CAP, DEFAULT_DEGENERACY_TOL).expect("decomposition")
}

fn grover_counts(graph: &Graph) -> DegeneracyReport {
    spectral::degeneracy_report(&decompose(graph, CoinKind::Grover), graph).unwrap()
}

fn infinite(graph: &Graph, coin: CoinKind) -> TransitionMatrix {
    spectral::infinite_time_matrix(&decompose(graph, coin), graph).unwrap()
}

fn finite(graph: &Graph, coin: CoinKind, steps: usize) -> TransitionMatrix {
    finite_time_matrix(&WalkOperator::new(graph, coin), AveragingWindow::new(steps)).unwrap()
}

fn one_based(nodes: &[usize]) -> BTreeSet<usize> {
    nodes.iter().map(|n| n + 1).collect()
}

fn builtin_graphs() -> Vec<(&'static str, Graph)> {
    [
        "three_community",
        "karate",
        "house",
        "cycle(3)",
        "cycle(4)",
        "cycle(7)",
        "path(2)",
        "path(5)",
        "complete(4)",
        "complete(5)",
    ]
    .into_iter()
    .map(|name| (name, datasets::builtin(name).unwrap()))
    .collect()
}

fn airport() -> Option<Graph> {
    let path = std::env::var_os("ARCWALK_USAIR97")?;
    let text = std::fs::read_to_string(&path).expect("ARCWALK_USAIR97 is readable");
    Some(load_pajek(&text).expect("ARCWALK_USAIR97 parses as Pajek"))
}

fn criterion_1(airport: Option<&Graph>) -> Outcome {
    let three = grover_counts(&datasets::three_community());
    let karate = grover_counts(&datasets::karate());
    let mut detail = format!(
        "three_community (+1,-1)=({},{}) want (20,18); karate ({},{}) want (46,44)",
        three.plus_one, three.minus_one, karate.plus_one, karate.minus_one
    );
    let mut ok = (three.plus_one, three.minus_one) == (20, 18) && (karate.plus_one, karate.minus_one) == (46, 44);
    match airport {
        Some(g) => {
            let a = grover_counts(g);
            detail += &format!("; USAir97 ({},{}) want (1796,1794)", a.plus_one, a.minus_one);
            ok &= (a.plus_one, a.minus_one) == (1796, 1794);
        }
        None => detail += "; USAir97 not supplied",
    }
    check(ok, detail)
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let graphs = builtin_graphs();
    for (name, g) in &graphs {
        let r = grover_counts(g);
        if !r.matches_prediction() {
            failures.push(format!(
                "{name}: observed ({},{}) predicted ({},{})",
                r.plus_one, r.minus_one, r.predicted_plus_one, r.predicted_minus_one
            ));
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} builtin graphs match (b1+1, b1±1)", graphs.len())
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_3() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, g) in [("three_community", datasets::three_community()), ("karate", datasets::karate())] {
        let dec = decompose(&g, CoinKind::Fourier);
        let largest = dec.groups().iter().map(Vec::len).max().unwrap();
        let mut args = dec.arguments().to_vec();
        args.sort_by(f64::total_cmp);
        let gap = args.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        ok &= largest == 1;
        parts.push(format!("{name}: largest group {largest}, min argument gap {gap:.2e}"));
    }
    check(ok, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let g = datasets::three_community();
    let m = infinite(&g, CoinKind::Fourier);
    let p = community::detect(&m, &g, 1.0 / 78.0, AverageSource::InfiniteTime).unwrap();
    let got: Vec<BTreeSet<usize>> = p.communities().iter().map(|c| one_based(c)).collect();
    let want: Vec<BTreeSet<usize>> = vec![(1..=7).collect(), (8..=14).collect(), (15..=21).collect()];
    let hubs = one_based(&p.hubs);
    check(
        got == want && hubs == BTreeSet::from([1, 13, 21]),
        format!("hubs {:?}, communities {:?}", hubs, got),
    )
}

fn karate_partition() -> (Graph, TransitionMatrix, CommunityPartition) {
    let g = datasets::karate();
    let m = infinite(&g, CoinKind::Fourier);
    let p = community::detect(&m, &g, 1.0 / 156.0, AverageSource::InfiniteTime).unwrap();
    (g, m, p)
}

fn criterion_5() -> Outcome {
    let (_, m, p) = karate_partition();
    let report = community::margin_report(&p, &m, DEFAULT_MARGINAL_BAND);
    let hubs = one_based(&p.hubs);
    let faction = |node: usize| {
        if KARATE_INSTRUCTOR_GROUP.contains(&node) {
            1
        } else {
            34
        }
    };
    let mut mismatched = Vec::new();
    for node in 1..=34 {
        let hub = p.hubs[p.assignment[node - 1]] + 1;
        if hub != faction(node) {
            mismatched.push(node);
        }
    }
    let flagged: Vec<usize> = report.iter().filter(|r| r.is_marginal()).map(|r| r.node + 1).collect();
    let unexplained: Vec<usize> = mismatched.iter().copied().filter(|n| ![3, 20].contains(n)).collect();
    let ok = hubs == BTreeSet::from([1, 34])
        && p.len() == 2
        && unexplained.is_empty()
        && flagged.contains(&3)
        && flagged.contains(&20)
        && KARATE_ADMINISTRATOR_GROUP.len() + KARATE_INSTRUCTOR_GROUP.len() == 34;
    check(
        ok,
        format!(
            "hubs {hubs:?}, sizes {:?}, nodes off their faction {mismatched:?}, marginal {flagged:?}",
            p.sizes()
        ),
    )
}

fn criterion_6() -> Outcome {
    let (_, m, _) = karate_partition();
    let q = 1.0 / 156.0;
    let a = m.get(0, 19);
    let b = m.get(33, 19);
    let within = |x: f64, quoted: f64| ((x - quoted) / quoted).abs() <= 0.15;
    let magnitudes = within(a, 0.007062) && within(b, 0.006451) && within(q, 0.006410);
    check(
        a > b && b > q,
        format!(
            "P(1->20)={a:.6} > P(34->20)={b:.6} > q={q:.6}; magnitudes within 15% of quoted: {magnitudes}"
        ),
    )
}

fn criterion_7(airport: Option<&Graph>) -> Outcome {
    let Some(g) = airport else {
        return Outcome::Skip("USAir97 not supplied (set ARCWALK_USAIR97)".into());
    };
    if (g.node_count(), g.arc_count()) != (332, 4252) {
        return Outcome::Fail(format!("airport file has N={}, D={}, want 332/4252", g.node_count(), g.arc_count()));
    }
    let m = infinite(g, CoinKind::Fourier);
    let qs = [0.0002351834, 0.0002354634, 0.0002355834];
    let want: [&[usize]; 3] = [&[260, 72], &[147, 151, 34], &[109, 111, 51, 44, 17]];
    let sweep = community::sweep(&m, g, &qs, AverageSource::InfiniteTime).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (entry, want) in sweep.entries.iter().zip(want) {
        let sizes_ok =
            entry.sizes.len() == want.len() && entry.sizes.iter().zip(want).all(|(a, b)| a.abs_diff(*b) <= 3);
        ok &= sizes_ok;
        parts.push(format!("q={} sizes {:?} want {:?}", entry.threshold, entry.sizes, want));
    }
    check(ok, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let g = datasets::three_community();
    let inf = infinite(&g, CoinKind::Fourier);
    let fin = finite(&g, CoinKind::Fourier, 20_000);
    let diff = inf.max_normalized_difference(&fin);
    check(diff < 2e-3, format!("max |P_inf - P_T=20000| = {diff:.3e} (tol 2e-3)"))
}

fn criterion_9() -> Outcome {
    let g = datasets::three_community();
    let inf = infinite(&g, CoinKind::Fourier);
    let fin = finite(&g, CoinKind::Fourier, 100);
    let diff = inf.max_normalized_difference(&fin);
    let max = inf.max_normalized();
    check(
        diff < 0.1 * max,
        format!("max deviation {diff:.4e} vs 10% of max entry {:.4e}", 0.1 * max),
    )
}

fn criterion_10() -> Outcome {
    let g = datasets::three_community();
    let fin = finite(&g, CoinKind::Grover, 100);
    let off: Vec<usize> = (0..g.node_count())
        .filter(|&i| {
            let row = fin.normalized_row(i);
            row.iter().enumerate().any(|(l, &v)| l != i && v >= row[i])
        })
        .map(|i| i + 1)
        .collect();
    check(off.is_empty(), format!("rows whose maximum is not on the diagonal: {off:?}"))
}

fn criterion_11() -> Outcome {
    let mut worst = 0.0_f64;
    for (_, g) in builtin_graphs() {
        let d = g.arc_count() as f64;
        for v in normalized_stationary(&g).unwrap() {
            worst = worst.max((v - 1.0 / d).abs());
        }
    }
    let g = datasets::three_community();
    let m = infinite(&g, CoinKind::Fourier);
    let q = 1.0 / 78.0;
    let mut best = (0.0_f64, 0, 0);
    for i in 0..21 {
        for l in 0..21 {
            if i != l && i / 7 == l / 7 {
                let rel = (m.get(i, l) - q).abs() / q;
                if rel > best.0 {
                    best = (rel, i + 1, l + 1);
                }
            }
        }
    }
    check(
        worst <= 1e-12 && best.0 > 0.2,
        format!(
            "classical max |P*-1/D| = {worst:.1e}; quantum intra-community max |P-1/D|/(1/D) = {:.3} at ({},{})",
            best.0, best.1, best.2
        ),
    )
}

fn criterion_12() -> Outcome {
    let mut drift = 0.0_f64;
    let mut row_err = 0.0_f64;
    let mut asym = 0.0_f64;
    for g in [datasets::three_community(), datasets::karate()] {
        for coin in [CoinKind::Fourier, CoinKind::Grover] {
            let op = WalkOperator::new(&g, coin);
            let mut state = WalkState::basis(&g, 0, 0).unwrap();
            for _ in 0..1000 {
                state = op.apply(&state).unwrap();
            }
            drift = drift.max((state.norm() - 1.0).abs());
            let mut state = WalkState::uniform(&g);
            for _ in 0..1000 {
                state = op.apply(&state).unwrap();
            }
            drift = drift.max((state.norm() - 1.0).abs());
            let inf = infinite(&g, coin);
            row_err = row_err.max(inf.row_sum_error());
            row_err = row_err.max(finite(&g, coin, 100).row_sum_error());
            asym = asym.max(inf.asymmetry());
        }
    }
    check(
        drift < 1e-10 && row_err < 1e-10 && asym < 1e-10,
        format!("norm drift {drift:.1e}, row-sum error {row_err:.1e}, asymmetry {asym:.1e} (tol 1e-10)"),
    )
}

fn criterion_13() -> Outcome {
    let shifts: Vec<bool> = [3, 4, 10]
        .into_iter()
        .map(|n| verify_shift_equivalence(n).unwrap().holds())
        .collect();
    let g = datasets::three_community();
    let triangle = spectral::loop_eigenvectors(&g, &[0, 1, 2], None).unwrap();
    let square = spectral::loop_eigenvectors(&datasets::cycle(4).unwrap(), &[0, 1, 2, 3], None).unwrap();
    let has = |found: &[spectral::LoopEigenvector], lambda: i8| found.iter().any(|v| v.eigenvalue == lambda);
    let ok = shifts.iter().all(|&b| b)
        && has(&triangle, 1)
        && !has(&triangle, -1)
        && has(&square, 1)
        && has(&square, -1);
    check(
        ok,
        format!(
            "shift equivalence n=3,4,10: {shifts:?}; triangle +1: {}, -1: {}; square +1: {}, -1: {}",
            has(&triangle, 1),
            has(&triangle, -1),
            has(&square, 1),
            has(&square, -1)
        ),
    )
}

#[test]
fn acceptance() {
    let airport = airport();
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("1 Grover +/-1 multiplicities", Box::new(|| criterion_1(airport.as_ref()))),
        ("2 Betti consistency on builtins", Box::new(criterion_2)),
        ("3 Fourier non-degeneracy", Box::new(criterion_3)),
        ("4 three-community detection", Box::new(criterion_4)),
        ("5 karate detection", Box::new(criterion_5)),
        ("6 karate marginal ordering", Box::new(criterion_6)),
        ("7 airport hierarchy", Box::new(|| criterion_7(airport.as_ref()))),
        ("8 Cesaro oracle T=20000", Box::new(criterion_8)),
        ("9 finite T=100 vs infinite", Box::new(criterion_9)),
        ("10 Grover self-localization", Box::new(criterion_10)),
        ("11 classical baseline", Box::new(criterion_11)),
        ("12 conservation suite", Box::new(criterion_12)),
        ("13 shift equivalence and loop eigenvectors", Box::new(criterion_13)),
    ];
    println!();
    let mut failed = Vec::new();
    for (name, run) in &criteria {
        match run() {
            Outcome::Pass(detail) => println!("[PASS] {name}: {detail}"),
            Outcome::Skip(detail) => println!("[SKIP] {name}: {detail}"),
            Outcome::Fail(detail) => {
                println!("[FAIL] {name}: {detail}");
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
