//! Generators and checks shared by the property suites and the acceptance
//! target.
#![allow(dead_code)]

use approxcat::affcat::{hom_space, AffineSubspace, HomSpace};
use approxcat::ffla::{Fp, FpMatrix, FpSubspace};
use approxcat::functors::{parse_functor, FunctorExpr, Variance};
use approxcat::hopf::{antipode_matrix, coproduct_matrix, RingModel};
use approxcat::rep::{instantiate, RepExpr, RepSource, Representation};
use rand::Rng;

/// A random affine subspace: sparse point plus up to `max_dirs` sparse
/// directions; empty with probability `p_empty`.
pub fn random_affine(rng: &mut impl Rng, f: Fp, dim: usize, max_dirs: usize, p_empty: f64) -> AffineSubspace {
    if rng.gen_bool(p_empty) {
        return AffineSubspace::empty(dim);
    }
    let k = if max_dirs == 0 { 0 } else { rng.gen_range(0..=max_dirs) };
    let mut sparse = || -> Vec<u32> {
        (0..dim)
            .map(|_| if rng.gen_bool(0.3) { rng.gen_range(0..f.p()) } else { 0 })
            .collect()
    };
    let point = sparse();
    let dirs: Vec<Vec<u32>> = (0..k).map(|_| sparse()).collect();
    AffineSubspace::new(point, FpSubspace::span(f, dim, &dirs).unwrap()).unwrap()
}

pub fn random_subspace(rng: &mut impl Rng, f: Fp, dim: usize, max_gens: usize) -> FpSubspace {
    let k = rng.gen_range(0..=max_gens);
    let gens: Vec<Vec<u32>> = (0..k)
        .map(|_| (0..dim).map(|_| if rng.gen_bool(0.4) { rng.gen_range(0..f.p()) } else { 0 }).collect())
        .collect();
    FpSubspace::span(f, dim, &gens).unwrap()
}

/// Image of an affine subspace under the coordinate permutation of `g`.
pub fn permute_object(shape: &RepExpr, g: &[usize], x: &AffineSubspace, f: Fp) -> AffineSubspace {
    match x.parts() {
        None => x.clone(),
        Some((v, z)) => {
            let dirs: Vec<Vec<u32>> = z.vectors().iter().map(|w| shape.act_permutation(g, w).unwrap()).collect();
            AffineSubspace::new(
                shape.act_permutation(g, v).unwrap(),
                FpSubspace::span(f, shape.dim(), &dirs).unwrap(),
            )
            .unwrap()
        }
    }
}

/// Random functor text over a permutation source; not every draw is well
/// typed, see [`random_functor`].
fn functor_text(rng: &mut impl Rng, depth: usize, permutation_source: bool) -> String {
    let leaves: &[&str] = if permutation_source {
        &["id", "id", "diag", "full:U", "zero:U", "point:1", "point:2", "empty:k", "neg"]
    } else {
        &["id", "id", "point:1", "point:3", "zero:k", "full:k", "neg"]
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return leaves[rng.gen_range(0..leaves.len())].to_string();
    }
    let mut sub = || functor_text(rng, depth - 1, permutation_source);
    let (a, b) = (sub(), sub());
    let ops: &[&str] = if permutation_source {
        &["tensor", "dsum", "sum", "meet", "dual", "p0", "p1", "add", "contract", "transpose", "diag", "neg"]
    } else {
        &["tensor", "dsum", "sum", "meet", "dual", "p0", "p1", "add", "neg"]
    };
    match ops[rng.gen_range(0..ops.len())] {
        op @ ("tensor" | "dsum" | "sum" | "meet") => format!("{op}({a}, {b})"),
        op => format!("{op}({a})"),
    }
}

/// A well-typed random functor tree within budget `d` with at least
/// `depth - 1` operator nodes, by rejection.
pub fn random_functor(rng: &mut impl Rng, source: &RepExpr, d: usize, depth: usize) -> (String, FunctorExpr) {
    let permutation_source = matches!(source, RepExpr::Std(_) | RepExpr::Tensor(..));
    loop {
        let text = functor_text(rng, depth, permutation_source);
        if text.matches('(').count() + 1 < depth {
            continue;
        }
        if let Ok(e) = parse_functor(&text, source, d) {
            return (text, e);
        }
    }
}

/// `phi . iota` in coordinates.
pub fn twist_by_antipode<M: RingModel>(m: &M, phi: &[u32]) -> Vec<u32> {
    antipode_matrix(m).mul_vec(phi).unwrap()
}

/// Checks `Hom_d(X1, X2) ⊆ Hom_d(F X1, F X2)`, or for contravariant `F`
/// that `phi . iota` lands in `Hom_d(F X2, F X1)`.
pub fn hom_monotone<M: RepSource>(
    m: &M,
    rep: &Representation,
    functor: &FunctorExpr,
    x1: &AffineSubspace,
    x2: &AffineSubspace,
) -> Result<bool, String> {
    let f = m.field();
    let hom = hom_space(m, rep, x1, x2).map_err(|e| e.to_string())?;
    let (y1, y2) = (functor.eval(f, x1).map_err(|e| e.to_string())?, functor.eval(f, x2).map_err(|e| e.to_string())?);
    let out_rep = instantiate(m, &functor.target).map_err(|e| e.to_string())?;
    let contra = functor.variance == Variance::Contra;
    let image = if contra {
        hom_space(m, &out_rep, &y2, &y1)
    } else {
        hom_space(m, &out_rep, &y1, &y2)
    }
    .map_err(|e| e.to_string())?;
    for phi in hom.basis.vectors() {
        let psi = if contra { twist_by_antipode(m, &phi) } else { phi };
        if !image.contains(&psi).map_err(|e| e.to_string())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Δ(I(X1,X3)) ⊆ I(X2,X3) ⊗ R + R ⊗ I(X1,X2)`, tested against the
/// annihilators: every `psi ⊗ phi` with psi ∈ Hom(X2,X3), phi ∈ Hom(X1,X2)
/// must kill `Δ(f)` for f ∈ I(X1,X3).
pub fn coideal_contained<M: RingModel>(m: &M, h13: &HomSpace, h23: &HomSpace, h12: &HomSpace) -> bool {
    let f = m.field();
    let delta = coproduct_matrix(m);
    let n = m.dim();
    let psis = h23.basis.vectors();
    let phis = h12.basis.vectors();
    for ideal_vec in h13.ideal.span.vectors() {
        // Δ(f) as a dense n x n matrix
        let mut t = FpMatrix::zeros(f, n, n);
        for (i, &c) in ideal_vec.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &(x, y, e) in &delta[i] {
                t.set(x, y, f.add(t.get(x, y), f.mul(c, e)));
            }
        }
        for psi in &psis {
            let row = t.vec_mul(psi).unwrap();
            for phi in &phis {
                let s = row.iter().zip(phi).fold(0u32, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
                if s != 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Lemma-style action bound: `f . w ∈ f(1) v2 + Z2` for basis morphisms f and
/// spanning points w of X1.
pub fn action_bounded<M: RingModel>(m: &M, rep: &Representation, hom: &HomSpace) -> bool {
    let f = m.field();
    let (Some((v2, z2)), Some(_)) = (hom.target.parts(), hom.source.parts()) else {
        return true;
    };
    let one = m.one();
    for phi in hom.basis.vectors() {
        let at_one = one.iter().zip(&phi).fold(0u32, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
        for w in hom.source.spanning_points() {
            let fw = rep.act(f, &phi, &w).unwrap();
            let diff: Vec<u32> = fw.iter().zip(v2).map(|(&a, &b)| f.sub(a, f.mul(at_one, b))).collect();
            if !z2.contains(&diff).unwrap() {
                return false;
            }
        }
    }
    true
}
