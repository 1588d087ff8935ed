use approxcat::affcat::{hom_space, AffineSubspace};
use approxcat::cfi::{build_cfi_default, BaseGraph};
use approxcat::ffla::{Fp, FpMatrix};
use approxcat::graph::{all_graphs, ColoredGraph};
use approxcat::modiso::{modules_isomorphic, MatrixTupleModule, ModuleVerdict};
use approxcat::oracle::{graph_iso_search, module_iso_bruteforce};
use approxcat::torus_model::{TorusRingModel, WeightRep};
use approxcat::wl::{wl_distinguishes, wl_refine_joint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut impl Rng, f: Fp, n: usize, density: f64) -> FpMatrix {
    FpMatrix::from_fn(f, n, n, |_, _| if rng.gen_bool(density) { rng.gen_range(0..f.p()) } else { 0 })
}

fn random_invertible(rng: &mut impl Rng, f: Fp, n: usize) -> FpMatrix {
    loop {
        let m = random_matrix(rng, f, n, 0.7);
        if m.inverse().is_some() {
            return m;
        }
    }
}

fn verdict_kind(v: &ModuleVerdict) -> &'static str {
    match v {
        ModuleVerdict::Isomorphic { .. } => "iso",
        ModuleVerdict::NotIsomorphic { .. } => "not",
        ModuleVerdict::Inconclusive { .. } => "?",
    }
}

#[test]
fn module_verdicts_are_certified_symmetric_and_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..150 {
        let f = Fp::new([2, 3][case % 2]).unwrap();
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=2);
        let mats: Vec<FpMatrix> = (0..k).map(|_| random_matrix(&mut rng, f, n, 0.5)).collect();
        let m = MatrixTupleModule::new(n, mats).unwrap();
        let other = if rng.gen_bool(0.5) {
            m.conjugate(&random_invertible(&mut rng, f, n)).unwrap()
        } else {
            MatrixTupleModule::new(n, (0..k).map(|_| random_matrix(&mut rng, f, n, 0.5)).collect()).unwrap()
        };
        let forward = modules_isomorphic(&m, &other, 20, case as u64).unwrap();
        let backward = modules_isomorphic(&other, &m, 20, case as u64).unwrap();
        for (v, a, b) in [(&forward, &m, &other), (&backward, &other, &m)] {
            if let ModuleVerdict::Isomorphic { certificate } = v {
                assert!(certificate.verify(a, b).unwrap(), "case {case}");
            }
        }
        if verdict_kind(&forward) != "?" && verdict_kind(&backward) != "?" {
            assert_eq!(verdict_kind(&forward), verdict_kind(&backward), "case {case}");
        }
        let brute = module_iso_bruteforce(&m, &other).unwrap();
        match verdict_kind(&forward) {
            "iso" => assert!(brute.is_some(), "case {case}"),
            "not" => assert!(brute.is_none(), "case {case}"),
            _ => {}
        }
    }
}

#[test]
fn color_refinement_never_separates_relabelings() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=6 {
        for g in all_graphs(n) {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let h = g.relabel(&perm).unwrap();
            assert!(!wl_distinguishes(&g, &h, 1).unwrap());
            if n <= 4 || rng.gen_bool(0.01) {
                assert!(!wl_distinguishes(&g, &h, 2).unwrap());
            }
        }
    }
}

#[test]
fn higher_wl_dimensions_refine_lower_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let graphs: Vec<ColoredGraph> = all_graphs(6);
    let mut separated = [0usize; 3];
    for _ in 0..120 {
        let a = &graphs[rng.gen_range(0..graphs.len())];
        let b = &graphs[rng.gen_range(0..graphs.len())];
        if a.edges().len() != b.edges().len() {
            continue;
        }
        let by_k: Vec<bool> = (1..=3).map(|k| wl_distinguishes(a, b, k).unwrap()).collect();
        for k in 0..2 {
            if by_k[k] {
                assert!(by_k[k + 1]);
            }
        }
        for k in 0..3 {
            separated[k] += by_k[k] as usize;
        }
        if by_k[2] {
            assert!(graph_iso_search(a, b).is_none());
        }
    }
    assert!(separated[0] > 0);
}

#[test]
fn twists_are_invisible_to_degrees_and_color_refinement() {
    for q in [BaseGraph::k33(), BaseGraph::cube()] {
        let pair = build_cfi_default(&q).unwrap();
        let degrees = |g: &ColoredGraph| {
            let mut d: Vec<(usize, usize)> = (0..g.n()).map(|v| (g.colors()[v], g.degree(v))).collect();
            d.sort();
            d
        };
        assert_eq!(degrees(&pair.untwisted), degrees(&pair.twisted), "{}", q.name());
        let stable = wl_refine_joint(&[&pair.untwisted, &pair.twisted], 1).unwrap();
        assert_eq!(stable[0].histogram, stable[1].histogram, "{}", q.name());
        let diff = (0..pair.n())
            .flat_map(|a| (0..pair.n()).map(move |b| (a, b)))
            .filter(|&(a, b)| pair.untwisted.has_edge(a, b) != pair.twisted.has_edge(a, b))
            .count();
        assert_eq!(diff, 8);
    }
}

/// Same orbit under t ↦ (t³x, t⁵y) over the algebraic closure.
fn same_torus_orbit(f: Fp, v1: [u32; 2], v2: [u32; 2]) -> bool {
    if (v1[0] == 0) != (v2[0] == 0) || (v1[1] == 0) != (v2[1] == 0) {
        return false;
    }
    if v1[0] == 0 || v1[1] == 0 {
        // a single nonzero coordinate: every ratio has a root in the closure
        return true;
    }
    let a = f.mul(v2[0], f.inv(v1[0]));
    let b = f.mul(v2[1], f.inv(v1[1]));
    // t³ = a and t⁵ = b force t = a²/b
    let t = f.mul(f.mul(a, a), f.inv(b));
    f.pow(t, 3) == a
}

#[test]
fn torus_hom_spaces_detect_orbits_at_degree_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let weights = WeightRep::new(vec![3, 5]);
    for p in [7u64, 11, 13] {
        let m = TorusRingModel::new(5, p).unwrap();
        let rep = m.weight_rep(&weights).unwrap();
        let f = Fp::new(p).unwrap();
        for _ in 0..80 {
            let draw = |rng: &mut ChaCha8Rng| -> [u32; 2] {
                [0, 1].map(|_| if rng.gen_bool(0.15) { 0 } else { rng.gen_range(1..p as u32) })
            };
            let v1 = draw(&mut rng);
            let v2 = if rng.gen_bool(0.4) {
                let t = rng.gen_range(1..p as u32);
                [f.mul(f.pow(t, 3), v1[0]), f.mul(f.pow(t, 5), v1[1])]
            } else {
                draw(&mut rng)
            };
            let hom = hom_space(&m, &rep, &AffineSubspace::point(f, v1.to_vec()), &AffineSubspace::point(f, v2.to_vec()))
                .unwrap();
            assert_eq!(hom.dim() != 0, same_torus_orbit(f, v1, v2), "p={p} {v1:?} {v2:?}");
        }
    }
}
