//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness.
mod common;

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use approxcat::affcat::{hom_space, is_isomorphic, verify_certificate, AffineSubspace, Verdict};
use approxcat::cfi::{build_cfi_default, functor_dims, predicted_ranks, rank_distinguisher, BaseGraph};
use approxcat::ffla::{op_count, primes_between, reset_op_count, Fp, FpSubspace};
use approxcat::functors::affine_dual;
use approxcat::graph::{all_graphs, ColoredGraph};
use approxcat::hopf::{compose, counit, RingModel};
use approxcat::logic::{close, compiled_table, random_formula, Formula, Structure};
use approxcat::modiso::{modules_isomorphic, MatrixTupleModule, ModuleVerdict};
use approxcat::oracle::{graph_iso_search, hom_space_bruteforce, FunctionSpaceModel};
use approxcat::rep::{instantiate, RepExpr, Representation};
use approxcat::sym_model::{all_permutations, compose_perm, Backend, SymRingModel};
use approxcat::torus_model::{TorusRingModel, WeightRep};
use approxcat::wl::wl_refine_joint;
use common::{action_bounded, coideal_contained, hom_monotone, permute_object, random_affine, random_functor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {elapsed:.2?}, limit {limit:?}"))
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Torus worked example at p = 7 and the isomorphism certificate at p = 31.
fn torus_example() -> Check {
    let start = Instant::now();
    let weights = WeightRep::new(vec![3, 5]);
    let m = TorusRingModel::new(5, 7).map_err(e2s)?;
    let f = m.field();
    let rep = m.weight_rep(&weights).map_err(e2s)?;
    let x1 = AffineSubspace::point(f, vec![1, 1]);
    let point = AffineSubspace::point(f, vec![2, 1]);
    let diagonal = AffineSubspace::linear(FpSubspace::span(f, 2, &[vec![1, 1]]).map_err(e2s)?);
    let to_point = hom_space(&m, &rep, &x1, &point).map_err(e2s)?.dim();
    let to_diag = hom_space(&m, &rep, &x1, &diagonal).map_err(e2s)?.dim();
    let elapsed = start.elapsed();
    ensure((to_point, to_diag) == (0, 2), || format!("p=7 dims ({to_point}, {to_diag}), expected (0, 2)"))?;
    within(elapsed, Duration::from_secs(1), "p=7 example")?;

    let m = TorusRingModel::new(5, 31).map_err(e2s)?;
    let f = m.field();
    let rep = m.weight_rep(&weights).map_err(e2s)?;
    let (y1, y2) = (AffineSubspace::point(f, vec![1, 1]), AffineSubspace::point(f, vec![2, 1]));
    let hom = hom_space(&m, &rep, &y1, &y2).map_err(e2s)?;
    ensure(hom.dim() == 1, || format!("p=31 Hom dimension {}", hom.dim()))?;
    let out = is_isomorphic(&m, &rep, &y1, &y2, 10, 31).map_err(e2s)?;
    let Verdict::Isomorphic { certificate } = out.verdict else {
        return Err(format!("p=31 verdict {}", out.verdict.label()));
    };
    ensure(verify_certificate(&m, &rep, &y1, &y2, &certificate).map_err(e2s)?, || "certificate rejected".into())?;
    // Hom is one-dimensional, so the certificate is the evaluation at t = 4
    let eval = m.eval_functional(4);
    let phi = &certificate.phi[0];
    let proportional = certificate.phi[1..].iter().all(|c| c.iter().all(|&x| x == 0))
        && (1..f.p()).any(|c| eval.iter().map(|&x| f.mul(c, x)).eq(phi.iter().copied()));
    ensure(proportional, || "certificate is not a multiple of evaluation at t = 4".into())?;
    Ok(format!("dims (0, 2) at p=7 in {elapsed:.2?}; p=31 certified by t=4"))
}

/// Rank law of the lower adjacency block on fixed and random bases.
fn rank_law() -> Check {
    let mut bases = vec![BaseGraph::k4(), BaseGraph::k33(), BaseGraph::cube()];
    for seed in 0..10 {
        let n = 4 + (seed as usize % 5);
        bases.push(BaseGraph::random_connected(n, 0.3, seed).map_err(e2s)?);
    }
    let mut slowest = Duration::ZERO;
    for q in &bases {
        let start = Instant::now();
        let pair = build_cfi_default(q).map_err(e2s)?;
        let ranks = rank_distinguisher(&pair);
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        ensure(ranks == predicted_ranks(q), || {
            format!("{}: ranks {ranks:?}, predicted {:?}", q.name(), predicted_ranks(q))
        })?;
        within(elapsed, Duration::from_secs(1), q.name())?;
    }
    Ok(format!("{} bases, slowest {slowest:.2?}", bases.len()))
}

fn k4_pipeline() -> Check {
    let start = Instant::now();
    let pair = build_cfi_default(&BaseGraph::k4()).map_err(e2s)?;
    let dims = functor_dims(&pair, Fp::new(2).map_err(e2s)?).map_err(e2s)?;
    let ranks = rank_distinguisher(&pair);
    ensure(dims == (Some(20), Some(21)), || format!("functor dims {dims:?}"))?;
    ensure(dims == (Some(ranks.0), Some(ranks.1)), || format!("ranks {ranks:?} differ from {dims:?}"))?;
    ensure(graph_iso_search(&pair.untwisted, &pair.twisted).is_none(), || "search found an isomorphism".into())?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30), "K4 pipeline")?;
    Ok(format!("dims (20, 21), search finds none, {elapsed:.2?}"))
}

fn k33_pipeline() -> Check {
    let start = Instant::now();
    let pair = build_cfi_default(&BaseGraph::k33()).map_err(e2s)?;
    let stable = wl_refine_joint(&[&pair.untwisted, &pair.twisted], 1).map_err(e2s)?;
    ensure(stable[0].histogram == stable[1].histogram, || "1-WL histograms differ".into())?;
    let dims = functor_dims(&pair, Fp::new(2).map_err(e2s)?).map_err(e2s)?;
    ensure(dims.0.is_some() && dims.0 != dims.1, || format!("functor dims {dims:?} do not separate"))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5), "K33 pipeline")?;
    Ok(format!("1-WL blind, functor dims {dims:?}, {elapsed:.2?}"))
}

fn graph_shape(n: usize) -> RepExpr {
    RepExpr::Sum(vec![RepExpr::tensor_power(n, 2), RepExpr::Trivial])
}

fn encoding_point(g: &ColoredGraph, f: Fp) -> Result<AffineSubspace, String> {
    let classes: BTreeSet<usize> = [0].into();
    Ok(AffineSubspace::point(f, g.encode(&classes).map_err(e2s)?.vector))
}

/// One representative per isomorphism class.
fn class_representatives(graphs: &[ColoredGraph]) -> Vec<ColoredGraph> {
    let mut reps: Vec<ColoredGraph> = Vec::new();
    for g in graphs {
        if !reps.iter().any(|r| graph_iso_search(g, r).is_some()) {
            reps.push(g.clone());
        }
    }
    reps
}

fn oracle_and_soundness() -> Check {
    let start = Instant::now();
    let graphs = class_representatives(&all_graphs(4));
    ensure(graphs.len() == 11, || format!("{} graphs on 4 vertices", graphs.len()))?;
    let m = SymRingModel::build(4, 2, 5, Backend::Exact).map_err(e2s)?;
    let fs = FunctionSpaceModel::build(4, 2, 5).map_err(e2s)?;
    let f = m.field();
    let shape = graph_shape(4);
    let rep = instantiate(&m, &shape).map_err(e2s)?;
    for (i, a) in graphs.iter().enumerate() {
        for (j, b) in graphs.iter().enumerate() {
            let (x1, x2) = (encoding_point(a, f)?, encoding_point(b, f)?);
            let ours = hom_space(&m, &rep, &x1, &x2).map_err(e2s)?.dim();
            let brute = hom_space_bruteforce(&fs, &shape, &x1, &x2).map_err(e2s)?.dim;
            ensure(ours == brute, || format!("pair ({i}, {j}): {ours} vs brute force {brute}"))?;
        }
    }

    let mut calls = 0;
    let mut inconclusive = 0;
    for n in 1..=5 {
        let labeled = all_graphs(n);
        let reps = class_representatives(&labeled);
        let rep_of: Vec<&ColoredGraph> = labeled
            .iter()
            .map(|g| reps.iter().find(|r| graph_iso_search(g, r).is_some()).expect("every graph has a class"))
            .collect();
        for d in [2, 3] {
            for p in [5, 7] {
                let m = SymRingModel::build(n, d, p, Backend::Exact).map_err(e2s)?;
                let f = m.field();
                let rep = instantiate(&m, &graph_shape(n)).map_err(e2s)?;
                for (k, (g, r)) in labeled.iter().zip(&rep_of).enumerate() {
                    let out = is_isomorphic(&m, &rep, &encoding_point(g, f)?, &encoding_point(r, f)?, 10, k as u64)
                        .map_err(e2s)?;
                    calls += 1;
                    match out.verdict {
                        Verdict::NotIsomorphic { reason } => {
                            return Err(format!("n={n} d={d} p={p} graph {k}: refuted by {reason:?}"))
                        }
                        Verdict::Inconclusive => inconclusive += 1,
                        Verdict::Isomorphic { .. } => {}
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(600), "oracle and soundness")?;
    Ok(format!("121 Hom dims match; {calls} isomorphic pairs never refuted ({inconclusive} inconclusive), {elapsed:.2?}"))
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> ColoredGraph {
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(0.5)).collect();
    ColoredGraph::uncolored(n, &edges).unwrap()
}

/// Formulas with two variables separating the pair, through compiled tables.
fn formulas_separate(family: &[Formula], g1: &ColoredGraph, g2: &ColoredGraph, f: Fp) -> Result<bool, String> {
    let classes: BTreeSet<usize> = [0].into();
    let (s1, s2) = (Structure::from_graph(g1, &classes), Structure::from_graph(g2, &classes));
    for phi in family {
        let t1 = compiled_table(&s1, phi, 2, f).map_err(e2s)?;
        let t2 = compiled_table(&s2, phi, 2, f).map_err(e2s)?;
        if t1.iter().zip(&t2).any(|(&a, &b)| (a == 0) != (b == 0)) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn logic_implies_separation() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let arities = [2usize];
    let families: Vec<Vec<Formula>> = (0..=5)
        .map(|n| (0..40).map(|_| close(random_formula(&mut rng, &arities, 2, 3, n))).collect())
        .collect();
    let mut models: HashMap<(usize, u64), (SymRingModel, Representation)> = HashMap::new();
    let (mut pairs, mut separated) = (0, 0);
    while pairs < 200 {
        let n = rng.gen_range(2..=5);
        let (g1, g2) = (random_graph(&mut rng, n), random_graph(&mut rng, n));
        if graph_iso_search(&g1, &g2).is_some() {
            continue;
        }
        pairs += 1;
        let primes = primes_between(n as u64, 2 * n as u64);
        if !formulas_separate(&families[n], &g1, &g2, Fp::new(primes[0]).map_err(e2s)?)? {
            continue;
        }
        separated += 1;
        let mut refuted = false;
        for &p in &primes {
            if !models.contains_key(&(n, p)) {
                let m = SymRingModel::build(n, 4, p, Backend::Exact).map_err(e2s)?;
                let rep = instantiate(&m, &graph_shape(n)).map_err(e2s)?;
                models.insert((n, p), (m, rep));
            }
            let (m, rep) = &models[&(n, p)];
            let f = m.field();
            let out = is_isomorphic(m, rep, &encoding_point(&g1, f)?, &encoding_point(&g2, f)?, 10, pairs as u64)
                .map_err(e2s)?;
            if out.verdict.is_not_isomorphic() {
                refuted = true;
                break;
            }
        }
        ensure(refuted, || format!("pair {pairs} on {n} vertices: formulas separate, degree 4 does not"))?;
    }
    Ok(format!("{pairs} pairs, {separated} separated by formulas, all refuted, {:.2?}", start.elapsed()))
}

fn sampled_properties() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = SymRingModel::build(4, 2, 5, Backend::Exact).map_err(e2s)?;
    let f = m.field();
    let shape = RepExpr::tensor_power(4, 2);
    let rep = instantiate(&m, &shape).map_err(e2s)?;
    let perms = all_permutations(4);
    let hom = |a: &AffineSubspace, b: &AffineSubspace| hom_space(&m, &rep, a, b).map_err(e2s);

    for case in 0..100 {
        let x1 = random_affine(&mut rng, f, 16, 2, 0.05);
        let x2 = permute_object(&shape, &perms[rng.gen_range(0..24)], &x1, f);
        let x3 = if rng.gen_bool(0.6) {
            permute_object(&shape, &perms[rng.gen_range(0..24)], &x2, f)
        } else {
            random_affine(&mut rng, f, 16, 2, 0.05)
        };
        let (h12, h23, h13) = (hom(&x1, &x2)?, hom(&x2, &x3)?, hom(&x1, &x3)?);
        ensure(coideal_contained(&m, &h13, &h23, &h12), || format!("coideal containment, case {case}"))?;
        ensure(action_bounded(&m, &rep, &h12), || format!("action bound, case {case}"))?;
    }

    let eps = counit(&m);
    for case in 0..100 {
        let (g, h) = (&perms[rng.gen_range(0..24)], &perms[rng.gen_range(0..24)]);
        let lhs = compose(&m, &m.eval_functional(h), &m.eval_functional(g));
        ensure(lhs == m.eval_functional(&compose_perm(h, g)), || format!("evaluation composition, case {case}"))?;
        let phi: Vec<u32> = (0..m.dim()).map(|_| rng.gen_range(0..f.p())).collect();
        ensure(compose(&m, &eps, &phi) == phi && compose(&m, &phi, &eps) == phi, || {
            format!("counit law, case {case}")
        })?;
    }

    for case in 0..100 {
        let p = [2u64, 3, 5, 7][case % 4];
        let g = Fp::new(p).map_err(e2s)?;
        let dim = rng.gen_range(1..=6);
        let x = random_affine(&mut rng, g, dim, 3, 0.0);
        let dual = affine_dual(&x, g).map_err(e2s)?;
        let ok = if x.contains_zero() { dual.is_empty() } else { affine_dual(&dual, g).map_err(e2s)? == x };
        ensure(ok, || format!("double dual, case {case}"))?;
    }

    let m3 = SymRingModel::build(4, 3, 5, Backend::Exact).map_err(e2s)?;
    let std3 = instantiate(&m3, &RepExpr::Std(4)).map_err(e2s)?;
    for case in 0..100 {
        let (text, functor) = random_functor(&mut rng, &RepExpr::Std(4), 3, 3);
        let x1 = random_affine(&mut rng, f, 4, 2, 0.05);
        let x2 = if rng.gen_bool(0.5) {
            permute_object(&RepExpr::Std(4), &perms[rng.gen_range(0..24)], &x1, f)
        } else {
            random_affine(&mut rng, f, 4, 2, 0.05)
        };
        ensure(hom_monotone(&m3, &std3, &functor, &x1, &x2)? , || format!("Hom monotonicity of {text}, case {case}"))?;
    }

    for case in 0..100u64 {
        let g = Fp::new([2u64, 3][case as usize % 2]).map_err(e2s)?;
        let n = rng.gen_range(1..=3);
        let mats: Vec<_> = (0..2)
            .map(|_| approxcat::ffla::FpMatrix::from_fn(g, n, n, |_, _| rng.gen_range(0..g.p())))
            .collect();
        let a = MatrixTupleModule::new(n, mats).map_err(e2s)?;
        let conj = loop {
            let c = approxcat::ffla::FpMatrix::from_fn(g, n, n, |_, _| rng.gen_range(0..g.p()));
            if c.inverse().is_some() {
                break c;
            }
        };
        let b = a.conjugate(&conj).map_err(e2s)?;
        match modules_isomorphic(&a, &b, 20, case).map_err(e2s)? {
            ModuleVerdict::Isomorphic { certificate } => {
                ensure(certificate.verify(&a, &b).map_err(e2s)?, || format!("module certificate, case {case}"))?
            }
            ModuleVerdict::NotIsomorphic { .. } => return Err(format!("conjugate modules refuted, case {case}")),
            ModuleVerdict::Inconclusive { .. } => {}
        }
    }
    Ok(format!("6 families x 100 samples, {:.2?}", start.elapsed()))
}

/// Least-squares slope of log(ops) against log(vertex count).
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn op_scaling() -> Check {
    let f = Fp::new(2).map_err(e2s)?;
    let mut bases = vec![BaseGraph::k4()];
    for n in 4..=8 {
        bases.push(BaseGraph::cycle(n).map_err(e2s)?);
    }
    let mut points = Vec::new();
    for q in &bases {
        let pair = build_cfi_default(q).map_err(e2s)?;
        reset_op_count();
        functor_dims(&pair, f).map_err(e2s)?;
        points.push((pair.n() as f64, op_count() as f64));
    }
    let slope = log_log_slope(&points);
    ensure(slope < 6.0, || format!("slope {slope:.2}"))?;
    let listed: Vec<String> = points.iter().map(|(n, ops)| format!("{n}:{ops}")).collect();
    Ok(format!("slope {slope:.2} over n:ops {}", listed.join(" ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("1 torus worked example", torus_example),
        ("2 CFI rank law", rank_law),
        ("3 K4 functor pipeline", k4_pipeline),
        ("4 K33 beyond color refinement", k33_pipeline),
        ("5 brute-force Hom and soundness", oracle_and_soundness),
        ("6 formulas imply degree-4 separation", logic_implies_separation),
        ("7 sampled invariants", sampled_properties),
        ("8 operation count scaling", op_scaling),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{elapsed:.2?}]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{elapsed:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
