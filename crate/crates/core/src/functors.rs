//! Constructible functors and equivariants: expression trees evaluated on
//! affine subspaces, checked against the degree budget when built.

use std::fmt;

use crate::affcat::AffineSubspace;
use crate::error::{check_dim, Error, Result};
use crate::ffla::{solve, Fp, FpMatrix, FpSubspace};
use crate::rep::RepExpr;

/// Sparse linear map with integer coefficients, reduced into the field when
/// applied. `columns[c]` lists `(row, coefficient)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl LinearMap {
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Result<Self> {
        for col in &columns {
            if let Some(&(r, _)) = col.iter().find(|&&(r, _)| r >= rows) {
                return Err(Error::Input(format!("row {r} outside a map with {rows} rows")));
            }
        }
        Ok(LinearMap {
            rows,
            cols: columns.len(),
            columns,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize) -> Vec<(usize, i64)>) -> Self {
        LinearMap::from_columns(rows, (0..cols).map(f).collect()).expect("rows in range")
    }

    pub fn identity(n: usize) -> Self {
        LinearMap::from_fn(n, n, |c| vec![(c, 1)])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn scaled(&self, c: i64) -> Self {
        LinearMap {
            rows: self.rows,
            cols: self.cols,
            columns: self
                .columns
                .iter()
                .map(|col| col.iter().map(|&(r, x)| (r, x * c)).collect())
                .collect(),
        }
    }

    pub fn apply(&self, f: Fp, v: &[u32]) -> Result<Vec<u32>> {
        check_dim("linear map source", self.cols, v.len())?;
        let mut out = vec![0u32; self.rows];
        for (c, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for &(r, a) in &self.columns[c] {
                out[r] = f.add(out[r], f.mul(f.from_i64(a), x));
            }
        }
        crate::ffla::count_ops(self.columns.iter().map(Vec::len).sum::<usize>() as u64);
        Ok(out)
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &LinearMap) -> LinearMap {
        LinearMap::from_fn(self.rows, inner.cols, |c| {
            let mut acc: std::collections::BTreeMap<usize, i64> = std::collections::BTreeMap::new();
            for &(mid, a) in &inner.columns[c] {
                for &(r, b) in &self.columns[mid] {
                    *acc.entry(r).or_insert(0) += a * b;
                }
            }
            acc.into_iter().filter(|&(_, x)| x != 0).collect()
        })
    }

    pub fn plus(&self, other: &LinearMap) -> Result<LinearMap> {
        check_dim("summand rows", self.rows, other.rows)?;
        check_dim("summand columns", self.cols, other.cols)?;
        Ok(LinearMap::from_fn(self.rows, self.cols, |c| {
            let mut col = self.columns[c].clone();
            col.extend_from_slice(&other.columns[c]);
            col
        }))
    }

    pub fn to_matrix(&self, f: Fp) -> FpMatrix {
        let mut m = FpMatrix::zeros(f, self.rows, self.cols);
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, a) in col {
                m.set(r, c, f.add(m.get(r, c), f.from_i64(a)));
            }
        }
        m
    }
}

/// Standard equivariant maps between permutation-type shapes.
pub mod maps {
    use super::LinearMap;

    /// Projection of `V_1 ⊕ ... ⊕ V_s` onto block i (block sizes given).
    pub fn project(sizes: &[usize], i: usize) -> LinearMap {
        let off: usize = sizes[..i].iter().sum();
        let total: usize = sizes.iter().sum();
        LinearMap::from_fn(sizes[i], total, |c| {
            if c >= off && c < off + sizes[i] {
                vec![(c - off, 1)]
            } else {
                Vec::new()
            }
        })
    }

    pub fn inject(sizes: &[usize], i: usize) -> LinearMap {
        let off: usize = sizes[..i].iter().sum();
        let total: usize = sizes.iter().sum();
        LinearMap::from_fn(total, sizes[i], |c| vec![(c + off, 1)])
    }

    /// `W ⊕ W -> W`.
    pub fn add(dim: usize) -> LinearMap {
        LinearMap::from_fn(dim, 2 * dim, |c| vec![(c % dim, 1)])
    }

    /// `δ(e_x) = e_x ⊗ e_x`.
    pub fn diagonal(n: usize) -> LinearMap {
        LinearMap::from_fn(n * n, n, |c| vec![(c * n + c, 1)])
    }

    /// `(x ⊗ y) ⊗ z -> <y, z> x`, i.e. End(U) ⊗ U -> U.
    pub fn contract(n: usize) -> LinearMap {
        LinearMap::from_fn(n, n * n * n, |c| {
            let (a, b, z) = (c / (n * n), (c / n) % n, c % n);
            if b == z {
                vec![(a, 1)]
            } else {
                Vec::new()
            }
        })
    }

    /// `x ⊗ y -> y ⊗ x`.
    pub fn transpose(n: usize) -> LinearMap {
        LinearMap::from_fn(n * n, n * n, |c| vec![((c % n) * n + c / n, 1)])
    }

    /// `e_s ⊗ e_t -> [s = t] e_s` on `U^{⊗m} ⊗ U^{⊗m}`; composed with the
    /// pairing this is the entrywise product ⋆.
    pub fn diagonal_extract(dim: usize) -> LinearMap {
        LinearMap::from_fn(dim, dim * dim, |c| {
            let (s, t) = (c / dim, c % dim);
            if s == t {
                vec![(s, 1)]
            } else {
                Vec::new()
            }
        })
    }
}

/// X⁺ = {f : f(x) = 1 on X}, in dual coordinates.
pub fn affine_dual(x: &AffineSubspace, f: Fp) -> Result<AffineSubspace> {
    let n = x.ambient();
    let Some((v, z)) = x.parts() else {
        return Ok(AffineSubspace::linear(FpSubspace::full(f, n)));
    };
    if x.contains_zero() {
        return Ok(AffineSubspace::empty(n));
    }
    let ann = z.annihilator();
    let w = ann
        .vectors()
        .into_iter()
        .find(|w| dot(f, w, v) != 0)
        .expect("v lies outside Z when 0 is not in X");
    let s = f.inv(dot(f, &w, v));
    let u: Vec<u32> = w.iter().map(|&x| f.mul(x, s)).collect();
    let mut gens = z.vectors();
    gens.push(v.to_vec());
    let dirs = FpSubspace::span(f, n, &gens)?.annihilator();
    AffineSubspace::new(u, dirs)
}

fn dot(f: Fp, a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

fn kron(f: Fp, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; a.len() * b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i * b.len() + j] = f.mul(x, y);
        }
    }
    out
}

/// Affine hull of `{x ⊗ x'}`: `v⊗v' + Z⊗Z' + kv⊗Z' + Z⊗kv'`; ∅ absorbs.
pub fn affine_tensor(a: &AffineSubspace, b: &AffineSubspace, f: Fp) -> Result<AffineSubspace> {
    let ambient = a.ambient() * b.ambient();
    let (Some((v, z)), Some((w, y))) = (a.parts(), b.parts()) else {
        return Ok(AffineSubspace::empty(ambient));
    };
    let zs = z.vectors();
    let ys = y.vectors();
    let mut gens = Vec::with_capacity(zs.len() * ys.len() + zs.len() + ys.len());
    for zi in &zs {
        for yj in &ys {
            gens.push(kron(f, zi, yj));
        }
        gens.push(kron(f, zi, w));
    }
    for yj in &ys {
        gens.push(kron(f, v, yj));
    }
    AffineSubspace::new(kron(f, v, w), FpSubspace::span(f, ambient, &gens)?)
}

pub fn affine_direct_sum(a: &AffineSubspace, b: &AffineSubspace, f: Fp) -> Result<AffineSubspace> {
    let ambient = a.ambient() + b.ambient();
    let (Some((v, z)), Some((w, y))) = (a.parts(), b.parts()) else {
        return Ok(AffineSubspace::empty(ambient));
    };
    let mut point = v.to_vec();
    point.extend_from_slice(w);
    let mut gens = Vec::new();
    for zi in z.vectors() {
        let mut g = zi;
        g.resize(ambient, 0);
        gens.push(g);
    }
    for yj in y.vectors() {
        let mut g = vec![0u32; a.ambient()];
        g.extend(yj);
        gens.push(g);
    }
    AffineSubspace::new(point, FpSubspace::span(f, ambient, &gens)?)
}

/// `{a + b}`.
pub fn affine_sum(a: &AffineSubspace, b: &AffineSubspace, f: Fp) -> Result<AffineSubspace> {
    check_dim("summand ambient", a.ambient(), b.ambient())?;
    let (Some((v, z)), Some((w, y))) = (a.parts(), b.parts()) else {
        return Ok(AffineSubspace::empty(a.ambient()));
    };
    let point = v.iter().zip(w).map(|(&x, &y)| f.add(x, y)).collect();
    AffineSubspace::new(point, z.sum(y)?)
}

pub fn affine_image(map: &LinearMap, x: &AffineSubspace, f: Fp) -> Result<AffineSubspace> {
    let Some((v, z)) = x.parts() else {
        return Ok(AffineSubspace::empty(map.rows()));
    };
    let point = map.apply(f, v)?;
    let gens = z.vectors().iter().map(|r| map.apply(f, r)).collect::<Result<Vec<_>>>()?;
    AffineSubspace::new(point, FpSubspace::span(f, map.rows(), &gens)?)
}

/// Direct affine intersection by solving `v + z = w + y`.
pub fn affine_intersect_direct(a: &AffineSubspace, b: &AffineSubspace, f: Fp) -> Result<AffineSubspace> {
    check_dim("intersection ambient", a.ambient(), b.ambient())?;
    let n = a.ambient();
    let (Some((v, z)), Some((w, y))) = (a.parts(), b.parts()) else {
        return Ok(AffineSubspace::empty(n));
    };
    let zs = z.vectors();
    let ys = y.vectors();
    // columns: z_i and -y_j; rhs w - v
    let cols = zs.len() + ys.len();
    let m = FpMatrix::from_fn(f, n, cols, |r, c| {
        if c < zs.len() {
            zs[c][r]
        } else {
            f.neg(ys[c - zs.len()][r])
        }
    });
    let rhs: Vec<u32> = w.iter().zip(v).map(|(&x, &y)| f.sub(x, y)).collect();
    match solve(&m, &rhs)? {
        None => Ok(AffineSubspace::empty(n)),
        Some(sol) => {
            let mut point = v.to_vec();
            for (i, zi) in zs.iter().enumerate() {
                for (p, &x) in point.iter_mut().zip(zi) {
                    *p = f.add(*p, f.mul(sol[i], x));
                }
            }
            AffineSubspace::new(point, z.intersect(y)?)
        }
    }
}

/// `P ∘ D(D(I X) + D(I X') - D(I X'))` with `I X = X × {1}` and P dropping
/// the last coordinate. The negated copy turns the second summand into the
/// direction space of `D(I X')`, so the outer dual meets `I X` with the span
/// of `I X'` and no factor of 2 appears.
pub fn affine_intersect_by_duals(a: &AffineSubspace, b: &AffineSubspace, f: Fp) -> Result<AffineSubspace> {
    check_dim("intersection ambient", a.ambient(), b.ambient())?;
    let n = a.ambient();
    let one = AffineSubspace::point(f, vec![1]);
    let la = affine_dual(&affine_direct_sum(a, &one, f)?, f)?;
    let lb = affine_dual(&affine_direct_sum(b, &one, f)?, f)?;
    let neg = affine_image(&LinearMap::identity(n + 1).scaled(-1), &lb, f)?;
    let back = affine_dual(&affine_sum(&affine_sum(&la, &lb, f)?, &neg, f)?, f)?;
    affine_image(&maps::project(&[n, 1], 0), &back, f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Co,
    Contra,
    /// Constant functors are both.
    Any,
}

impl Variance {
    fn flip(self) -> Self {
        match self {
            Variance::Co => Variance::Contra,
            Variance::Contra => Variance::Co,
            Variance::Any => Variance::Any,
        }
    }

    fn join(self, other: Self) -> Result<Self> {
        match (self, other) {
            (Variance::Any, x) | (x, Variance::Any) => Ok(x),
            (x, y) if x == y => Ok(x),
            _ => Err(Error::Input("cannot combine a covariant and a contravariant functor".into())),
        }
    }

    fn compose(outer: Self, inner: Self) -> Self {
        match (outer, inner) {
            (Variance::Any, _) | (_, Variance::Any) => Variance::Any,
            (x, y) if x == y => Variance::Co,
            _ => Variance::Contra,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorNode {
    Identity,
    ConstEmpty,
    ConstZero,
    ConstFull,
    ConstPoint(Vec<u32>),
    Linear { name: String, map: LinearMap },
    DirectSum(Box<FunctorExpr>, Box<FunctorExpr>),
    Tensor(Box<FunctorExpr>, Box<FunctorExpr>),
    Dual(Box<FunctorExpr>),
    Intersect(Box<FunctorExpr>, Box<FunctorExpr>),
    Sum(Box<FunctorExpr>, Box<FunctorExpr>),
    /// `outer ∘ inner`.
    Compose(Box<FunctorExpr>, Box<FunctorExpr>),
}

/// A d-constructible functor `C_d(source) -> C_d(target)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorExpr {
    pub node: FunctorNode,
    pub source: RepExpr,
    pub target: RepExpr,
    pub variance: Variance,
    pub d: usize,
}

fn budget(shape: &RepExpr, d: usize) -> Result<()> {
    if shape.ell() > d {
        return Err(Error::Budget(format!("{shape} has complexity {} > {d}", shape.ell())));
    }
    Ok(())
}

fn same_source(a: &FunctorExpr, b: &FunctorExpr) -> Result<()> {
    if a.source != b.source || a.d != b.d {
        return Err(Error::Input(format!(
            "functors start at {} (d = {}) and {} (d = {})",
            a.source, a.d, b.source, b.d
        )));
    }
    Ok(())
}

/// One evaluated node: its label and the dimension of its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub label: String,
    pub dim: Option<usize>,
}

impl FunctorExpr {
    fn leaf(node: FunctorNode, source: RepExpr, target: RepExpr, variance: Variance, d: usize) -> Result<Self> {
        budget(&source, d)?;
        budget(&target, d)?;
        Ok(FunctorExpr {
            node,
            source,
            target,
            variance,
            d,
        })
    }

    pub fn identity(source: RepExpr, d: usize) -> Result<Self> {
        Self::leaf(FunctorNode::Identity, source.clone(), source, Variance::Co, d)
    }
    pub fn const_empty(source: RepExpr, target: RepExpr, d: usize) -> Result<Self> {
        Self::leaf(FunctorNode::ConstEmpty, source, target, Variance::Any, d)
    }
    pub fn const_zero(source: RepExpr, target: RepExpr, d: usize) -> Result<Self> {
        Self::leaf(FunctorNode::ConstZero, source, target, Variance::Any, d)
    }
    pub fn const_full(source: RepExpr, target: RepExpr, d: usize) -> Result<Self> {
        Self::leaf(FunctorNode::ConstFull, source, target, Variance::Any, d)
    }
    /// The constant `{λ}` in `k`.
    pub fn const_point(source: RepExpr, lambda: u32, d: usize) -> Result<Self> {
        Self::leaf(FunctorNode::ConstPoint(vec![lambda]), source, RepExpr::Trivial, Variance::Any, d)
    }
    /// `X -> f(X)` for an equivariant linear `f`.
    pub fn linear(source: RepExpr, target: RepExpr, name: &str, map: LinearMap, d: usize) -> Result<Self> {
        check_dim("linear map source", source.dim(), map.cols())?;
        check_dim("linear map target", target.dim(), map.rows())?;
        Self::leaf(
            FunctorNode::Linear {
                name: name.to_string(),
                map,
            },
            source,
            target,
            Variance::Co,
            d,
        )
    }

    pub fn direct_sum(a: FunctorExpr, b: FunctorExpr) -> Result<Self> {
        same_source(&a, &b)?;
        let target = RepExpr::Sum(vec![a.target.clone(), b.target.clone()]);
        budget(&target, a.d)?;
        Ok(FunctorExpr {
            variance: a.variance.join(b.variance)?,
            source: a.source.clone(),
            d: a.d,
            target,
            node: FunctorNode::DirectSum(Box::new(a), Box::new(b)),
        })
    }

    /// Needs `ℓ(V') + ℓ(V'') ≤ d`.
    pub fn tensor(a: FunctorExpr, b: FunctorExpr) -> Result<Self> {
        same_source(&a, &b)?;
        let (la, lb) = (a.target.ell(), b.target.ell());
        if la + lb > a.d {
            return Err(Error::Budget(format!(
                "tensor of {} and {} needs {} > {}",
                a.target,
                b.target,
                la + lb,
                a.d
            )));
        }
        Ok(FunctorExpr {
            variance: a.variance.join(b.variance)?,
            source: a.source.clone(),
            d: a.d,
            target: RepExpr::Tensor(Box::new(a.target.clone()), Box::new(b.target.clone())),
            node: FunctorNode::Tensor(Box::new(a), Box::new(b)),
        })
    }

    pub fn dual(a: FunctorExpr) -> Result<Self> {
        Ok(FunctorExpr {
            variance: a.variance.flip(),
            source: a.source.clone(),
            d: a.d,
            target: RepExpr::Dual(Box::new(a.target.clone())),
            node: FunctorNode::Dual(Box::new(a)),
        })
    }

    fn same_target(a: &FunctorExpr, b: &FunctorExpr) -> Result<()> {
        same_source(a, b)?;
        if a.target != b.target {
            return Err(Error::Input(format!("targets {} and {} differ", a.target, b.target)));
        }
        Ok(())
    }

    pub fn intersect(a: FunctorExpr, b: FunctorExpr) -> Result<Self> {
        Self::same_target(&a, &b)?;
        Ok(FunctorExpr {
            variance: a.variance.join(b.variance)?,
            source: a.source.clone(),
            target: a.target.clone(),
            d: a.d,
            node: FunctorNode::Intersect(Box::new(a), Box::new(b)),
        })
    }

    pub fn sum(a: FunctorExpr, b: FunctorExpr) -> Result<Self> {
        Self::same_target(&a, &b)?;
        Ok(FunctorExpr {
            variance: a.variance.join(b.variance)?,
            source: a.source.clone(),
            target: a.target.clone(),
            d: a.d,
            node: FunctorNode::Sum(Box::new(a), Box::new(b)),
        })
    }

    pub fn compose(outer: FunctorExpr, inner: FunctorExpr) -> Result<Self> {
        if outer.source != inner.target || outer.d != inner.d {
            return Err(Error::Input(format!(
                "cannot feed {} into a functor on {}",
                inner.target, outer.source
            )));
        }
        Ok(FunctorExpr {
            variance: Variance::compose(outer.variance, inner.variance),
            source: inner.source.clone(),
            target: outer.target.clone(),
            d: outer.d,
            node: FunctorNode::Compose(Box::new(outer), Box::new(inner)),
        })
    }

    pub fn eval(&self, f: Fp, x: &AffineSubspace) -> Result<AffineSubspace> {
        self.eval_inner(f, x, &mut None)
    }

    /// Evaluation together with the value dimension at every node, in
    /// post-order.
    pub fn eval_traced(&self, f: Fp, x: &AffineSubspace) -> Result<(AffineSubspace, Vec<TraceStep>)> {
        let mut trace = Some(Vec::new());
        let out = self.eval_inner(f, x, &mut trace)?;
        Ok((out, trace.unwrap_or_default()))
    }

    fn eval_inner(&self, f: Fp, x: &AffineSubspace, trace: &mut Option<Vec<TraceStep>>) -> Result<AffineSubspace> {
        check_dim("functor input", self.source.dim(), x.ambient())?;
        let n = self.target.dim();
        let out = match &self.node {
            FunctorNode::Identity => x.clone(),
            FunctorNode::ConstEmpty => AffineSubspace::empty(n),
            FunctorNode::ConstZero => AffineSubspace::point(f, vec![0; n]),
            FunctorNode::ConstFull => AffineSubspace::linear(FpSubspace::full(f, n)),
            FunctorNode::ConstPoint(v) => AffineSubspace::point(f, v.iter().map(|&a| a % f.p()).collect()),
            FunctorNode::Linear { map, .. } => affine_image(map, x, f)?,
            FunctorNode::DirectSum(a, b) => {
                affine_direct_sum(&a.eval_inner(f, x, trace)?, &b.eval_inner(f, x, trace)?, f)?
            }
            FunctorNode::Tensor(a, b) => affine_tensor(&a.eval_inner(f, x, trace)?, &b.eval_inner(f, x, trace)?, f)?,
            FunctorNode::Dual(a) => affine_dual(&a.eval_inner(f, x, trace)?, f)?,
            FunctorNode::Sum(a, b) => affine_sum(&a.eval_inner(f, x, trace)?, &b.eval_inner(f, x, trace)?, f)?,
            FunctorNode::Intersect(a, b) => {
                let (ya, yb) = (a.eval_inner(f, x, trace)?, b.eval_inner(f, x, trace)?);
                let by_duals = affine_intersect_by_duals(&ya, &yb, f)?;
                if by_duals != affine_intersect_direct(&ya, &yb, f)? {
                    return Err(Error::Capability("dual-formula intersection disagrees with direct intersection".into()));
                }
                by_duals
            }
            FunctorNode::Compose(outer, inner) => {
                let mid = inner.eval_inner(f, x, trace)?;
                outer.eval_inner(f, &mid, trace)?
            }
        };
        if let Some(t) = trace.as_mut() {
            t.push(TraceStep {
                label: self.label(),
                dim: out.dim(),
            });
        }
        Ok(out)
    }

    fn label(&self) -> String {
        match &self.node {
            FunctorNode::Identity => "id".into(),
            FunctorNode::ConstEmpty => format!("empty:{}", self.target),
            FunctorNode::ConstZero => format!("zero:{}", self.target),
            FunctorNode::ConstFull => format!("full:{}", self.target),
            FunctorNode::ConstPoint(v) => format!("point:{}", v[0]),
            FunctorNode::Linear { name, .. } => name.clone(),
            FunctorNode::DirectSum(..) => "dsum".into(),
            FunctorNode::Tensor(..) => "tensor".into(),
            FunctorNode::Dual(..) => "dual".into(),
            FunctorNode::Intersect(..) => "meet".into(),
            FunctorNode::Sum(..) => "sum".into(),
            FunctorNode::Compose(..) => "comp".into(),
        }
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            FunctorNode::DirectSum(a, b) => write!(f, "dsum({a}, {b})"),
            FunctorNode::Tensor(a, b) => write!(f, "tensor({a}, {b})"),
            FunctorNode::Dual(a) => write!(f, "dual({a})"),
            FunctorNode::Intersect(a, b) => write!(f, "meet({a}, {b})"),
            FunctorNode::Sum(a, b) => write!(f, "sum({a}, {b})"),
            FunctorNode::Compose(outer, inner) => match &outer.node {
                FunctorNode::Linear { name, .. } => write!(f, "{name}({inner})"),
                _ => write!(f, "comp({outer}, {inner})"),
            },
            _ => write!(f, "{}", self.label()),
        }
    }
}

/// `F` distinguishes X1, X2 when the dimensions of their images differ
/// (∅ counts as -∞).
pub fn distinguishes(expr: &FunctorExpr, f: Fp, x1: &AffineSubspace, x2: &AffineSubspace) -> Result<bool> {
    Ok(expr.eval(f, x1)?.dim() != expr.eval(f, x2)?.dim())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivNode {
    Linear(LinearMap),
    /// `sum c_i f_i`.
    Combo(Vec<(i64, EquivariantExpr)>),
    /// `v -> f1(v) ⊗ f2(v)`.
    Pair(Box<EquivariantExpr>, Box<EquivariantExpr>),
    /// `outer ∘ inner`.
    Compose(Box<EquivariantExpr>, Box<EquivariantExpr>),
}

/// A d-constructible equivariant `source -> target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantExpr {
    pub node: EquivNode,
    pub source: RepExpr,
    pub target: RepExpr,
    pub d: usize,
}

impl EquivariantExpr {
    pub fn linear(source: RepExpr, target: RepExpr, map: LinearMap, d: usize) -> Result<Self> {
        check_dim("linear map source", source.dim(), map.cols())?;
        check_dim("linear map target", target.dim(), map.rows())?;
        budget(&source, d)?;
        budget(&target, d)?;
        Ok(EquivariantExpr {
            node: EquivNode::Linear(map),
            source,
            target,
            d,
        })
    }

    pub fn combo(terms: Vec<(i64, EquivariantExpr)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Input("empty linear combination".into()))?
            .1
            .clone();
        for (_, t) in &terms {
            if t.source != first.source || t.target != first.target || t.d != first.d {
                return Err(Error::Input("combination of equivariants with different shapes".into()));
            }
        }
        Ok(EquivariantExpr {
            source: first.source,
            target: first.target,
            d: first.d,
            node: EquivNode::Combo(terms),
        })
    }

    pub fn pair(a: EquivariantExpr, b: EquivariantExpr) -> Result<Self> {
        if a.source != b.source || a.d != b.d {
            return Err(Error::Input("paired equivariants need a common source".into()));
        }
        let need = a.target.ell() + b.target.ell();
        if need > a.d {
            return Err(Error::Budget(format!("pairing needs {need} > {}", a.d)));
        }
        Ok(EquivariantExpr {
            source: a.source.clone(),
            target: RepExpr::Tensor(Box::new(a.target.clone()), Box::new(b.target.clone())),
            d: a.d,
            node: EquivNode::Pair(Box::new(a), Box::new(b)),
        })
    }

    pub fn compose(outer: EquivariantExpr, inner: EquivariantExpr) -> Result<Self> {
        if outer.source != inner.target || outer.d != inner.d {
            return Err(Error::Input(format!(
                "cannot feed {} into an equivariant on {}",
                inner.target, outer.source
            )));
        }
        Ok(EquivariantExpr {
            source: inner.source.clone(),
            target: outer.target.clone(),
            d: outer.d,
            node: EquivNode::Compose(Box::new(outer), Box::new(inner)),
        })
    }

    /// Same map with a larger budget.
    pub fn with_budget(&self, d: usize) -> Result<Self> {
        match &self.node {
            EquivNode::Linear(m) => Self::linear(self.source.clone(), self.target.clone(), m.clone(), d),
            EquivNode::Combo(ts) => Self::combo(ts.iter().map(|(c, t)| Ok((*c, t.with_budget(d)?))).collect::<Result<_>>()?),
            EquivNode::Pair(a, b) => Self::pair(a.with_budget(d)?, b.with_budget(d)?),
            EquivNode::Compose(a, b) => Self::compose(a.with_budget(d)?, b.with_budget(d)?),
        }
    }

    pub fn eval(&self, f: Fp, v: &[u32]) -> Result<Vec<u32>> {
        check_dim("equivariant input", self.source.dim(), v.len())?;
        match &self.node {
            EquivNode::Linear(m) => m.apply(f, v),
            EquivNode::Combo(terms) => {
                let mut out = vec![0u32; self.target.dim()];
                for (c, t) in terms {
                    let c = f.from_i64(*c);
                    for (o, x) in out.iter_mut().zip(t.eval(f, v)?) {
                        *o = f.add(*o, f.mul(c, x));
                    }
                }
                Ok(out)
            }
            EquivNode::Pair(a, b) => Ok(kron(f, &a.eval(f, v)?, &b.eval(f, v)?)),
            EquivNode::Compose(outer, inner) => outer.eval(f, &inner.eval(f, v)?),
        }
    }

    /// Number of nodes, for reporting.
    pub fn size(&self) -> usize {
        1 + match &self.node {
            EquivNode::Linear(_) => 0,
            EquivNode::Combo(ts) => ts.iter().map(|(_, t)| t.size()).sum(),
            EquivNode::Pair(a, b) | EquivNode::Compose(a, b) => a.size() + b.size(),
        }
    }
}

/// A functor with `F({v}) = {e(v)}`.
pub fn lift_equivariant(e: &EquivariantExpr) -> Result<FunctorExpr> {
    match &e.node {
        EquivNode::Linear(m) => FunctorExpr::linear(e.source.clone(), e.target.clone(), "lin", m.clone(), e.d),
        EquivNode::Combo(terms) => {
            let mut acc: Option<FunctorExpr> = None;
            for (c, t) in terms {
                let scale = FunctorExpr::linear(
                    t.target.clone(),
                    t.target.clone(),
                    &format!("scale:{c}"),
                    LinearMap::identity(t.target.dim()).scaled(*c),
                    e.d,
                )?;
                let term = FunctorExpr::compose(scale, lift_equivariant(t)?)?;
                acc = Some(match acc {
                    None => term,
                    Some(prev) => FunctorExpr::sum(prev, term)?,
                });
            }
            acc.ok_or_else(|| Error::Input("empty linear combination".into()))
        }
        EquivNode::Pair(a, b) => FunctorExpr::tensor(lift_equivariant(a)?, lift_equivariant(b)?),
        EquivNode::Compose(outer, inner) => FunctorExpr::compose(lift_equivariant(outer)?, lift_equivariant(inner)?),
    }
}

/// Parses the functor text syntax against a source shape:
///
/// ```text
/// expr  := id | empty:SHAPE | zero:SHAPE | full:SHAPE | point:INT
///        | NAME | NAME(expr) | lin:NAME | lin:NAME(expr)
///        | dual(expr) | tensor(expr, expr) | dsum(expr, expr)
///        | sum(expr, expr) | meet(expr, expr) | comp(expr, expr)
/// SHAPE := k | U | U2 | U3
/// NAME  := q | adj | p0 | p1 | ... | diag | contract | transpose | add | neg
/// ```
///
/// `NAME(e)` applies the linear map to the value of `e`; a bare `NAME`
/// applies it to the input. `pI` projects a direct sum onto block I (`q` and
/// `adj` are `p0`), `diag` is `U -> U⊗U`, `contract` is
/// `(x⊗y)⊗z -> <y,z> x`, `add` is `W⊕W -> W`. In `comp(a, b)` the functor `a`
/// is read with source the target of `b`.
pub fn parse_functor(text: &str, source: &RepExpr, d: usize) -> Result<FunctorExpr> {
    let mut p = FunctorParser { chars: text.chars().collect(), pos: 0, d, n: first_degree(source) };
    let e = p.expr(source)?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

fn first_degree(shape: &RepExpr) -> Option<usize> {
    match shape {
        RepExpr::Std(n) => Some(*n),
        RepExpr::Sum(parts) => parts.iter().find_map(first_degree),
        RepExpr::Tensor(a, b) => first_degree(a).or_else(|| first_degree(b)),
        RepExpr::Dual(a) => first_degree(a),
        RepExpr::Trivial | RepExpr::Weight(_) => None,
    }
}

/// Blocks of a direct sum, with an outer dual pushed onto each block.
fn sum_parts(shape: &RepExpr) -> Option<Vec<RepExpr>> {
    match shape {
        RepExpr::Sum(parts) => Some(parts.clone()),
        RepExpr::Dual(inner) => {
            let parts = sum_parts(inner)?;
            Some(
                parts
                    .into_iter()
                    .map(|p| match p {
                        RepExpr::Dual(x) => *x,
                        other => RepExpr::Dual(Box::new(other)),
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

fn strip_duals(shape: &RepExpr) -> RepExpr {
    match shape {
        RepExpr::Dual(a) => strip_duals(a),
        RepExpr::Sum(parts) => RepExpr::Sum(parts.iter().map(strip_duals).collect()),
        RepExpr::Tensor(a, b) => RepExpr::Tensor(Box::new(strip_duals(a)), Box::new(strip_duals(b))),
        other => other.clone(),
    }
}

struct FunctorParser {
    chars: Vec<char>,
    pos: usize,
    d: usize,
    n: Option<usize>,
}

impl FunctorParser {
    fn error(&self, msg: impl Into<String>) -> Error {
        let before = &self.chars[..self.pos.min(self.chars.len())];
        let line = 1 + before.iter().filter(|&&c| c == '\n').count();
        let col = 1 + before.iter().rev().take_while(|&&c| c != '\n').count();
        Error::Parse { line, col, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_' || self.chars[self.pos] == '-') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn degree(&self) -> Result<usize> {
        self.n.ok_or_else(|| self.error("the source has no permutation factor"))
    }

    fn shape(&mut self) -> Result<RepExpr> {
        let w = self.word();
        match w.as_str() {
            "k" => Ok(RepExpr::Trivial),
            "U" => Ok(RepExpr::Std(self.degree()?)),
            _ => match w.strip_prefix('U').and_then(|m| m.parse::<usize>().ok()) {
                Some(m) => Ok(RepExpr::tensor_power(self.degree()?, m)),
                None => Err(self.error(format!("unknown shape {w:?}"))),
            },
        }
    }

    fn two(&mut self, source: &RepExpr) -> Result<(FunctorExpr, FunctorExpr)> {
        self.expect('(')?;
        let a = self.expr(source)?;
        self.expect(',')?;
        let b = self.expr(source)?;
        self.expect(')')?;
        Ok((a, b))
    }

    fn expr(&mut self, source: &RepExpr) -> Result<FunctorExpr> {
        let start = self.pos;
        let w = self.word();
        let wrap = |e: Error, this: &Self| match e {
            Error::Parse { .. } => e,
            other => {
                let mut at = FunctorParser { chars: this.chars.clone(), pos: start, d: this.d, n: this.n };
                at.skip_ws();
                at.error(other.to_string())
            }
        };
        let d = self.d;
        let out = match w.as_str() {
            "" => return Err(self.error("expected a functor")),
            "id" => FunctorExpr::identity(source.clone(), d),
            "empty" | "zero" | "full" => {
                self.expect(':')?;
                let t = self.shape()?;
                match w.as_str() {
                    "empty" => FunctorExpr::const_empty(source.clone(), t, d),
                    "zero" => FunctorExpr::const_zero(source.clone(), t, d),
                    _ => FunctorExpr::const_full(source.clone(), t, d),
                }
            }
            "point" => {
                self.expect(':')?;
                let v = self.word();
                let lambda: u32 = v.parse().map_err(|_| self.error(format!("expected a scalar, got {v:?}")))?;
                FunctorExpr::const_point(source.clone(), lambda, d)
            }
            "dual" => {
                self.expect('(')?;
                let a = self.expr(source)?;
                self.expect(')')?;
                FunctorExpr::dual(a)
            }
            "tensor" | "dsum" | "sum" | "meet" => {
                let (a, b) = self.two(source)?;
                match w.as_str() {
                    "tensor" => FunctorExpr::tensor(a, b),
                    "dsum" => FunctorExpr::direct_sum(a, b),
                    "sum" => FunctorExpr::sum(a, b),
                    _ => FunctorExpr::intersect(a, b),
                }
            }
            "comp" => {
                self.expect('(')?;
                let save = self.pos;
                // parse the inner functor first to learn the outer source
                let mut depth = 0usize;
                while self.pos < self.chars.len() {
                    match self.chars[self.pos] {
                        '(' => depth += 1,
                        ')' if depth > 0 => depth -= 1,
                        ',' if depth == 0 => break,
                        _ => {}
                    }
                    self.pos += 1;
                }
                self.expect(',')?;
                let inner = self.expr(source)?;
                self.expect(')')?;
                let end = self.pos;
                self.pos = save;
                let outer = self.expr(&inner.target)?;
                self.expect(',')?;
                self.pos = end;
                FunctorExpr::compose(outer, inner)
            }
            name => {
                let name = if name == "lin" {
                    self.expect(':')?;
                    self.word()
                } else {
                    name.to_string()
                };
                let inner = if self.eat('(') {
                    let e = self.expr(source)?;
                    self.expect(')')?;
                    e
                } else {
                    FunctorExpr::identity(source.clone(), d).map_err(|e| wrap(e, self))?
                };
                let lin = self
                    .named_map(&name, &inner.target)
                    .map_err(|e| wrap(e, self))?;
                match inner.node {
                    FunctorNode::Identity => Ok(lin),
                    _ => FunctorExpr::compose(lin, inner),
                }
            }
        };
        out.map_err(|e| wrap(e, self))
    }

    fn named_map(&self, name: &str, input: &RepExpr) -> Result<FunctorExpr> {
        let d = self.d;
        let plain = strip_duals(input);
        let lin = |target: RepExpr, map: LinearMap| FunctorExpr::linear(input.clone(), target, name, map, d);
        let mismatch = || Error::Input(format!("{name} cannot act on {input}"));
        let parts = sum_parts(input);
        let block = |i: usize| -> Result<FunctorExpr> {
            let Some(parts) = &parts else { return Err(mismatch()) };
            if i >= parts.len() {
                return Err(Error::Input(format!("{input} has {} blocks, asked for block {i}", parts.len())));
            }
            let sizes: Vec<usize> = parts.iter().map(RepExpr::dim).collect();
            lin(parts[i].clone(), maps::project(&sizes, i))
        };
        match name {
            "q" | "adj" => block(0),
            "diag" => match plain {
                RepExpr::Std(n) => lin(RepExpr::tensor_power(n, 2), maps::diagonal(n)),
                _ => Err(mismatch()),
            },
            "transpose" => match &plain {
                RepExpr::Tensor(a, b) if matches!((&**a, &**b), (RepExpr::Std(x), RepExpr::Std(y)) if x == y) => {
                    lin(plain.clone(), maps::transpose(a.dim()))
                }
                _ => Err(mismatch()),
            },
            "contract" => match &plain {
                RepExpr::Tensor(ab, c) => match (&**ab, &**c) {
                    (RepExpr::Tensor(a, b), RepExpr::Std(n))
                        if **a == RepExpr::Std(*n) && **b == RepExpr::Std(*n) =>
                    {
                        lin(RepExpr::Std(*n), maps::contract(*n))
                    }
                    _ => Err(mismatch()),
                },
                _ => Err(mismatch()),
            },
            "add" => match &parts {
                Some(parts) if parts.len() == 2 && parts[0] == parts[1] => {
                    lin(parts[0].clone(), maps::add(parts[0].dim()))
                }
                _ => Err(mismatch()),
            },
            "neg" => lin(input.clone(), LinearMap::identity(input.dim()).scaled(-1)),
            other => match other.strip_prefix('p').and_then(|i| i.parse::<usize>().ok()) {
                Some(i) => block(i),
                None => Err(Error::Input(format!("unknown linear map {other:?}"))),
            },
        }
    }
}
