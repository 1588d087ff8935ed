//! The approximate category C_d(V): affine subspaces as objects, Hom_d as
//! the dual of R_d modulo the truncated ideal of "g X1 ⊆ X2", composition
//! through the coproduct, and a certified isomorphism test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::ffla::{solve, ExtField, FieldSpec, Fp, FpMatrix, FpSubspace};
use crate::hopf::{closure, compose, compose_extended, counit, extend_to_spans, RingModel, TruncatedIdeal};
use crate::rep::Representation;

/// An element of Aff(V): empty, or `point + directions` with the point
/// reduced modulo the directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSubspace {
    Empty { ambient: usize },
    Flat { point: Vec<u32>, directions: FpSubspace },
}

impl AffineSubspace {
    pub fn empty(ambient: usize) -> Self {
        AffineSubspace::Empty { ambient }
    }

    pub fn new(point: Vec<u32>, directions: FpSubspace) -> Result<Self> {
        let point = directions.reduce(&point)?;
        Ok(AffineSubspace::Flat { point, directions })
    }

    pub fn point(f: Fp, point: Vec<u32>) -> Self {
        let n = point.len();
        AffineSubspace::new(point, FpSubspace::zero(f, n)).expect("matching length")
    }

    /// The linear subspace Z viewed as an affine one.
    pub fn linear(directions: FpSubspace) -> Self {
        let n = directions.ambient();
        AffineSubspace::Flat {
            point: vec![0; n],
            directions,
        }
    }

    /// Affine span of a nonempty list of points.
    pub fn affine_span(f: Fp, points: &[Vec<u32>]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Input("affine span of no points".into()))?;
        let dirs: Vec<Vec<u32>> = points[1..]
            .iter()
            .map(|q| q.iter().zip(first).map(|(&a, &b)| f.sub(a, b)).collect())
            .collect();
        AffineSubspace::new(first.clone(), FpSubspace::span(f, first.len(), &dirs)?)
    }

    pub fn ambient(&self) -> usize {
        match self {
            AffineSubspace::Empty { ambient } => *ambient,
            AffineSubspace::Flat { point, .. } => point.len(),
        }
    }

    /// `None` stands for dim ∅ = -∞.
    pub fn dim(&self) -> Option<usize> {
        match self {
            AffineSubspace::Empty { .. } => None,
            AffineSubspace::Flat { directions, .. } => Some(directions.dim()),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, AffineSubspace::Empty { .. })
    }

    pub fn contains(&self, v: &[u32]) -> Result<bool> {
        match self {
            AffineSubspace::Empty { .. } => Ok(false),
            AffineSubspace::Flat { point, directions } => {
                check_dim("vector length", point.len(), v.len())?;
                Ok(directions.reduce(v)? == *point)
            }
        }
    }

    pub fn contains_zero(&self) -> bool {
        match self {
            AffineSubspace::Empty { .. } => false,
            AffineSubspace::Flat { point, .. } => point.iter().all(|&x| x == 0),
        }
    }

    /// The point followed by the direction basis.
    pub fn parts(&self) -> Option<(&[u32], &FpSubspace)> {
        match self {
            AffineSubspace::Empty { .. } => None,
            AffineSubspace::Flat { point, directions } => Some((point, directions)),
        }
    }

    /// Affine points spanning the subspace: `v` and `v + z_i`.
    pub fn spanning_points(&self) -> Vec<Vec<u32>> {
        match self {
            AffineSubspace::Empty { .. } => Vec::new(),
            AffineSubspace::Flat { point, directions } => {
                let f = directions.field();
                let mut out = vec![point.clone()];
                for z in directions.vectors() {
                    out.push(point.iter().zip(&z).map(|(&a, &b)| f.add(a, b)).collect());
                }
                out
            }
        }
    }
}

pub fn dim_label(d: Option<usize>) -> String {
    d.map_or_else(|| "-inf".to_string(), |x| x.to_string())
}

/// `(f (x) id) mu(w)` for a functional f on V.
fn pair_coaction(f: Fp, rep: &Representation, functional: &[u32], w: &[u32]) -> Result<Vec<u32>> {
    let mu = rep.coaction(f, w)?;
    let mut out = vec![0u32; rep.ring_dim()];
    for (a, ring) in mu.iter().enumerate() {
        if functional[a] == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(ring) {
            *o = f.add(*o, f.mul(functional[a], x));
        }
    }
    Ok(out)
}

/// S(X1, X2): the span of `(f (x) id) mu(w) - f(v2) 1` over f in Z2^⊥ and w in
/// X1, computed from the point of X1 and its direction basis.
pub fn generating_space<M: RingModel + ?Sized>(
    m: &M,
    rep: &Representation,
    x1: &AffineSubspace,
    x2: &AffineSubspace,
) -> Result<FpSubspace> {
    let f = m.field();
    check_dim("ring dimension", m.dim(), rep.ring_dim())?;
    check_dim("source ambient", rep.dim(), x1.ambient())?;
    check_dim("target ambient", rep.dim(), x2.ambient())?;
    if rep.ell() > m.d() {
        return Err(Error::Budget(format!("representation needs degree {} > {}", rep.ell(), m.d())));
    }
    let n = m.dim();
    let (v1, z1) = match x1.parts() {
        None => return Ok(FpSubspace::zero(f, n)),
        Some(p) => p,
    };
    let (v2, z2) = match x2.parts() {
        None => return FpSubspace::span(f, n, &[m.one()]),
        Some(p) => p,
    };
    let one = m.one();
    let mut gens = Vec::new();
    let dirs = z1.vectors();
    for func in z2.annihilator().vectors() {
        let fv2 = v2.iter().zip(&func).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
        let mut g = pair_coaction(f, rep, &func, v1)?;
        for (x, &u) in g.iter_mut().zip(&one) {
            *x = f.sub(*x, f.mul(fv2, u));
        }
        gens.push(g);
        for z in &dirs {
            gens.push(pair_coaction(f, rep, &func, z)?);
        }
    }
    FpSubspace::span(f, n, &gens)
}

/// Hom_d(X1, X2) = annihilator of I_d(X1, X2) in R_d*.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSpace {
    pub d: usize,
    pub source: AffineSubspace,
    pub target: AffineSubspace,
    pub ideal: TruncatedIdeal,
    pub basis: FpSubspace,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn contains(&self, functional: &[u32]) -> Result<bool> {
        self.basis.contains(functional)
    }
}

pub fn hom_space<M: RingModel + ?Sized>(
    m: &M,
    rep: &Representation,
    x1: &AffineSubspace,
    x2: &AffineSubspace,
) -> Result<HomSpace> {
    let s = generating_space(m, rep, x1, x2)?;
    let ideal = closure(m, &s);
    let basis = ideal.span.annihilator();
    Ok(HomSpace {
        d: m.d(),
        source: x1.clone(),
        target: x2.clone(),
        ideal,
        basis,
    })
}

/// A functional in Hom_d(source, target).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub functional: Vec<u32>,
    pub source: AffineSubspace,
    pub target: AffineSubspace,
}

impl Morphism {
    pub fn new(hom: &HomSpace, functional: Vec<u32>) -> Result<Self> {
        if !hom.contains(&functional)? {
            return Err(Error::Input("functional does not annihilate the truncated ideal".into()));
        }
        Ok(Morphism {
            functional,
            source: hom.source.clone(),
            target: hom.target.clone(),
        })
    }
}

/// The counit as the identity of X; checked against Hom_d(X, X).
pub fn identity<M: RingModel + ?Sized>(m: &M, hom: &HomSpace) -> Result<Morphism> {
    if hom.source != hom.target {
        return Err(Error::Input("identity needs equal source and target".into()));
    }
    Morphism::new(hom, counit(m))
}

/// `psi <> phi`, defined when phi ends where psi starts.
pub fn compose_morphisms<M: RingModel + ?Sized>(m: &M, psi: &Morphism, phi: &Morphism) -> Result<Morphism> {
    if phi.target != psi.source {
        return Err(Error::Input("composition of morphisms with mismatched middle object".into()));
    }
    Ok(Morphism {
        functional: compose(m, &psi.functional, &phi.functional),
        source: phi.source.clone(),
        target: psi.target.clone(),
    })
}

/// `f . w = (id (x) f) mu(w)`.
pub fn act<M: RingModel + ?Sized>(m: &M, rep: &Representation, functional: &[u32], w: &[u32]) -> Result<Vec<u32>> {
    rep.act(m.field(), functional, w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomDims {
    pub forward: usize,
    pub backward: usize,
    pub source_end: usize,
    pub target_end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NotIsoReason {
    ObjectDimension { source: Option<usize>, target: Option<usize> },
    HomDimensions(HomDims),
    /// A sampled φ generates Hom(X1, X2) as a module over End(X2) yet has no
    /// two-sided inverse, which rules out any isomorphism.
    GeneratorNotInvertible { trial: usize },
}

/// φ and γ over F_{p^k}, each stored as k component functionals
/// (`φ = sum_j a^j φ_j`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoCertificate {
    pub field: FieldSpec,
    pub modulus: Vec<u32>,
    pub phi: Vec<Vec<u32>>,
    pub gamma: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Isomorphic { certificate: IsoCertificate },
    NotIsomorphic { reason: NotIsoReason },
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Isomorphic { .. } => "isomorphic",
            Verdict::NotIsomorphic { .. } => "not-isomorphic",
            Verdict::Inconclusive => "inconclusive",
        }
    }
    pub fn is_not_isomorphic(&self) -> bool {
        matches!(self, Verdict::NotIsomorphic { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoOutcome {
    pub verdict: Verdict,
    /// Field in which φ was sampled; its degree is the extension used.
    pub field: FieldSpec,
    pub trials_used: usize,
    pub hom_dims: Option<HomDims>,
}

/// Composition of F_{p^k}-functionals given as components.
fn compose_ext<M: RingModel + ?Sized>(m: &M, ext: &ExtField, psi: &[Vec<u32>], phi: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let f = m.field();
    let k = ext.degree();
    let pw = ext.powers(2 * k);
    let psi_s: Vec<Vec<u32>> = psi.iter().map(|c| extend_to_spans(m, c)).collect();
    let phi_s: Vec<Vec<u32>> = phi.iter().map(|c| extend_to_spans(m, c)).collect();
    let mut out = vec![vec![0u32; m.dim()]; k];
    for (i, a) in psi_s.iter().enumerate() {
        for (j, b) in phi_s.iter().enumerate() {
            let c = compose_extended(m, a, b);
            for (comp, &coef) in out.iter_mut().zip(&pw[i + j]) {
                if coef == 0 {
                    continue;
                }
                for (o, &x) in comp.iter_mut().zip(&c) {
                    *o = f.add(*o, f.mul(coef, x));
                }
            }
        }
    }
    out
}

fn is_counit(eps: &[u32], v: &[Vec<u32>]) -> bool {
    v[0] == eps && v[1..].iter().all(|c| c.iter().all(|&x| x == 0))
}

/// Re-checks a certificate from scratch: φ ∈ Hom(X1,X2), γ ∈ Hom(X2,X1),
/// γ⋄φ = ε and φ⋄γ = ε.
pub fn verify_certificate<M: RingModel + ?Sized>(
    m: &M,
    rep: &Representation,
    x1: &AffineSubspace,
    x2: &AffineSubspace,
    cert: &IsoCertificate,
) -> Result<bool> {
    let ext = ExtField::with_modulus(m.field(), cert.modulus.clone())?;
    let k = ext.degree();
    if cert.phi.len() != k || cert.gamma.len() != k {
        return Ok(false);
    }
    let h12 = hom_space(m, rep, x1, x2)?;
    let h21 = hom_space(m, rep, x2, x1)?;
    for c in &cert.phi {
        if !h12.contains(c)? {
            return Ok(false);
        }
    }
    for c in &cert.gamma {
        if !h21.contains(c)? {
            return Ok(false);
        }
    }
    let eps = counit(m);
    Ok(is_counit(&eps, &compose_ext(m, &ext, &cert.gamma, &cert.phi))
        && is_counit(&eps, &compose_ext(m, &ext, &cert.phi, &cert.gamma)))
}

fn counit_certificate<M: RingModel + ?Sized>(m: &M) -> IsoCertificate {
    IsoCertificate {
        field: FieldSpec {
            p: m.field().p(),
            k: 1,
        },
        modulus: vec![0, 1],
        phi: vec![counit(m)],
        gamma: vec![counit(m)],
    }
}

/// Decides X1 ≅_d X2 in C_d(V).
///
/// Each trial samples φ from Hom(X1, X2) over a field with more than
/// `2 dim Hom` elements and tests whether `τ -> τ⋄φ` maps End(X2) onto
/// Hom(X1, X2). A generator is an isomorphism exactly when the category
/// objects are isomorphic, so a non-invertible generator is a disproof;
/// a non-generator says nothing and the next trial runs.
pub fn is_isomorphic<M: RingModel + ?Sized>(
    m: &M,
    rep: &Representation,
    x1: &AffineSubspace,
    x2: &AffineSubspace,
    trials: usize,
    seed: u64,
) -> Result<IsoOutcome> {
    let f = m.field();
    let prime_field = FieldSpec { p: f.p(), k: 1 };
    let outcome = |verdict, field, trials_used, hom_dims| IsoOutcome {
        verdict,
        field,
        trials_used,
        hom_dims,
    };
    if x1.dim() != x2.dim() {
        return Ok(outcome(
            Verdict::NotIsomorphic {
                reason: NotIsoReason::ObjectDimension {
                    source: x1.dim(),
                    target: x2.dim(),
                },
            },
            prime_field,
            0,
            None,
        ));
    }
    let h12 = hom_space(m, rep, x1, x2)?;
    if x1 == x2 {
        let cert = counit_certificate(m);
        if !h12.contains(&cert.phi[0])? {
            return Err(Error::Capability("counit fails to annihilate I_d(X, X)".into()));
        }
        let dims = HomDims {
            forward: h12.dim(),
            backward: h12.dim(),
            source_end: h12.dim(),
            target_end: h12.dim(),
        };
        return Ok(outcome(Verdict::Isomorphic { certificate: cert }, prime_field, 0, Some(dims)));
    }
    let h21 = hom_space(m, rep, x2, x1)?;
    let h11 = hom_space(m, rep, x1, x1)?;
    let h22 = hom_space(m, rep, x2, x2)?;
    let dims = HomDims {
        forward: h12.dim(),
        backward: h21.dim(),
        source_end: h11.dim(),
        target_end: h22.dim(),
    };
    let md = dims.forward;
    if dims.backward != md || dims.source_end != md || dims.target_end != md || md == 0 {
        return Ok(outcome(
            Verdict::NotIsomorphic {
                reason: NotIsoReason::HomDimensions(dims),
            },
            prime_field,
            0,
            Some(dims),
        ));
    }

    let spec = FieldSpec::exceeding(f.p() as u64, 2 * md as u64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ext = ExtField::random(spec, &mut rng);
    let k = ext.degree();
    let n = m.dim();
    let eps = counit(m);

    let hs = h12.basis.vectors();
    let gs = h21.basis.vectors();
    let ts = h22.basis.vectors();
    let ext_h: Vec<Vec<u32>> = hs.iter().map(|h| extend_to_spans(m, h)).collect();
    // tau_a <> h_i in coordinates of Hom(X1, X2)
    let mut action = vec![vec![Vec::new(); md]; md];
    for (a, t) in ts.iter().enumerate() {
        let et = extend_to_spans(m, t);
        for (i, eh) in ext_h.iter().enumerate() {
            let c = compose_extended(m, &et, eh);
            action[a][i] = h12
                .basis
                .coordinates(&c)?
                .ok_or_else(|| Error::Capability("composition left Hom(X1, X2)".into()))?;
        }
    }
    // g_b <> h_i as functionals
    let mut left = vec![vec![Vec::new(); md]; md];
    for (b, g) in gs.iter().enumerate() {
        let eg = extend_to_spans(m, g);
        for (i, eh) in ext_h.iter().enumerate() {
            left[b][i] = compose_extended(m, &eg, eh);
        }
    }

    for trial in 1..=trials {
        // c[i][j]: component j of the coefficient of h_i
        let c: Vec<Vec<u32>> = (0..md)
            .map(|_| (0..k).map(|_| rng.gen_range(0..f.p())).collect())
            .collect();
        let combine = |cols: &dyn Fn(usize, usize) -> Vec<u32>, rows: usize| -> Result<FpMatrix> {
            let comps: Vec<FpMatrix> = (0..k)
                .map(|j| {
                    let mut mat = FpMatrix::zeros(f, rows, md);
                    for col in 0..md {
                        for (i, ci) in c.iter().enumerate() {
                            if ci[j] == 0 {
                                continue;
                            }
                            for (r, &x) in cols(col, i).iter().enumerate() {
                                if x != 0 {
                                    mat.set(r, col, f.add(mat.get(r, col), f.mul(ci[j], x)));
                                }
                            }
                        }
                    }
                    mat
                })
                .collect();
            ext.realize(&comps)
        };
        let gen_map = combine(&|a, i| action[a][i].clone(), md)?;
        if gen_map.rank() < k * md {
            continue;
        }
        let phi: Vec<Vec<u32>> = (0..k)
            .map(|j| {
                let coeffs: Vec<u32> = c.iter().map(|ci| ci[j]).collect();
                h12.basis.combine(&coeffs).expect("coefficients")
            })
            .collect();
        let sys = combine(&|b, i| left[b][i].clone(), n)?;
        let mut rhs = vec![0u32; k * n];
        rhs[..n].copy_from_slice(&eps);
        let not_iso = outcome(
            Verdict::NotIsomorphic {
                reason: NotIsoReason::GeneratorNotInvertible { trial },
            },
            spec,
            trial,
            Some(dims),
        );
        let Some(y) = solve(&sys, &rhs)? else {
            return Ok(not_iso);
        };
        let gamma: Vec<Vec<u32>> = ext
            .split_vector(&y)
            .iter()
            .map(|yc| h21.basis.combine(yc).expect("coefficients"))
            .collect();
        if !is_counit(&eps, &compose_ext(m, &ext, &phi, &gamma)) {
            return Ok(not_iso);
        }
        let certificate = IsoCertificate {
            field: spec,
            modulus: ext.modulus().to_vec(),
            phi,
            gamma,
        };
        return Ok(outcome(Verdict::Isomorphic { certificate }, spec, trial, Some(dims)));
    }
    Ok(outcome(Verdict::Inconclusive, spec, trials, Some(dims)))
}
