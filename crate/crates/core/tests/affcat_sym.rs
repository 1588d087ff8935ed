use approxcat::affcat::{is_isomorphic, verify_certificate, AffineSubspace, Verdict};
use approxcat::hopf::RingModel;
use approxcat::sym_model::{Backend, SymRingModel};

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<u32> {
    let mut v = vec![0; n * n];
    for &(a, b) in edges {
        v[a * n + b] = 1;
        v[b * n + a] = 1;
    }
    v
}

#[test]
fn relabelled_paths_are_isomorphic() {
    let m = SymRingModel::build(4, 2, 5, Backend::Exact).unwrap();
    let rep = m.conjugation_rep().unwrap();
    let f = m.field();
    let x1 = AffineSubspace::point(f, adjacency(4, &[(0, 1), (1, 2), (2, 3)]));
    let x2 = AffineSubspace::point(f, adjacency(4, &[(2, 0), (0, 3), (3, 1)]));
    let out = is_isomorphic(&m, &rep, &x1, &x2, 20, 7).unwrap();
    let Verdict::Isomorphic { certificate } = &out.verdict else {
        panic!("{:?}", out.verdict);
    };
    assert!(verify_certificate(&m, &rep, &x1, &x2, certificate).unwrap());
}

#[test]
fn path_and_triangle_plus_point_are_separated() {
    let m = SymRingModel::build(4, 2, 5, Backend::Exact).unwrap();
    let rep = m.conjugation_rep().unwrap();
    let f = m.field();
    let x1 = AffineSubspace::point(f, adjacency(4, &[(0, 1), (1, 2), (2, 3)]));
    let x2 = AffineSubspace::point(f, adjacency(4, &[(0, 1), (1, 2), (0, 2)]));
    let out = is_isomorphic(&m, &rep, &x1, &x2, 20, 7).unwrap();
    assert!(out.verdict.is_not_isomorphic(), "{:?}", out);
}
