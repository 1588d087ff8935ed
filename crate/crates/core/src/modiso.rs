//! Isomorphism of modules given by matrix tuples: is there an invertible C
//! with `C A_i = B_i C` for all i?

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::ffla::{kernel, ExtField, FieldSpec, Fp, FpMatrix, FpSubspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixTupleModule {
    n: usize,
    mats: Vec<FpMatrix>,
}

impl MatrixTupleModule {
    pub fn new(n: usize, mats: Vec<FpMatrix>) -> Result<Self> {
        for a in &mats {
            check_dim("matrix rows", n, a.rows())?;
            check_dim("matrix columns", n, a.cols())?;
        }
        Ok(MatrixTupleModule { n, mats })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn mats(&self) -> &[FpMatrix] {
        &self.mats
    }

    /// The tuple `(g A_i g^-1)`.
    pub fn conjugate(&self, g: &FpMatrix) -> Result<Self> {
        let ginv = g
            .inverse()
            .ok_or_else(|| Error::Input("conjugating matrix is singular".into()))?;
        let mats = self
            .mats
            .iter()
            .map(|a| g.mul(a)?.mul(&ginv))
            .collect::<Result<Vec<_>>>()?;
        MatrixTupleModule::new(self.n, mats)
    }
}

/// A finite-dimensional algebra presented by a basis of n x n matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub basis: Vec<FpMatrix>,
    pub unit: usize,
}

/// Flattened `C` (row-major) for every `C` with `C A_i = B_i C`.
pub fn intertwiner_space(m: &MatrixTupleModule, nmod: &MatrixTupleModule) -> Result<FpSubspace> {
    check_dim("module dimension", m.n, nmod.n)?;
    check_dim("tuple length", m.mats.len(), nmod.mats.len())?;
    let n = m.n;
    let f = match m.mats.first() {
        Some(a) => a.field(),
        None => return Err(Error::Input("empty matrix tuple".into())),
    };
    let mut rows = Vec::new();
    for (a, b) in m.mats.iter().zip(&nmod.mats) {
        for r in 0..n {
            for s in 0..n {
                // (C A - B C)[r][s]
                let mut eq = vec![0u32; n * n];
                for t in 0..n {
                    let x = &mut eq[r * n + t];
                    *x = f.add(*x, a.get(t, s));
                    let y = &mut eq[t * n + s];
                    *y = f.sub(*y, b.get(r, t));
                }
                rows.push(eq);
            }
        }
    }
    Ok(kernel(&FpMatrix::from_rows(f, n * n, &rows)?))
}

fn unflatten(f: Fp, n: usize, v: &[u32]) -> FpMatrix {
    FpMatrix::from_fn(f, n, n, |r, c| v[r * n + c])
}

/// C over F_{p^k} as components `C = sum_j a^j C_j`, with its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleIsoCertificate {
    pub field: FieldSpec,
    pub modulus: Vec<u32>,
    pub components: Vec<Vec<Vec<u32>>>,
    pub inverse: Vec<Vec<Vec<u32>>>,
}

impl ModuleIsoCertificate {
    fn matrices(f: Fp, comps: &[Vec<Vec<u32>>]) -> Result<Vec<FpMatrix>> {
        comps
            .iter()
            .map(|rows| FpMatrix::from_rows(f, rows.len(), rows))
            .collect()
    }

    /// Checks every intertwining equation and `C C^-1 = C^-1 C = 1`.
    pub fn verify(&self, m: &MatrixTupleModule, nmod: &MatrixTupleModule) -> Result<bool> {
        let f = Fp::new(self.field.p as u64)?;
        let ext = ExtField::with_modulus(f, self.modulus.clone())?;
        let c = Self::matrices(f, &self.components)?;
        let cinv = Self::matrices(f, &self.inverse)?;
        if c.len() != ext.degree() || cinv.len() != ext.degree() {
            return Ok(false);
        }
        for cj in &c {
            if cj.rows() != m.n || cj.cols() != m.n {
                return Ok(false);
            }
            for (a, b) in m.mats.iter().zip(&nmod.mats) {
                if cj.mul(a)? != b.mul(cj)? {
                    return Ok(false);
                }
            }
        }
        let rc = ext.realize(&c)?;
        let ri = ext.realize(&cinv)?;
        let id = FpMatrix::identity(f, rc.rows());
        Ok(rc.mul(&ri)? == id && ri.mul(&rc)? == id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModuleObstruction {
    NoIntertwiners,
    /// dim Hom(M, N) differs from dim End(N) or dim Hom(N, M) from dim End(M).
    HomDimensions { forward: usize, backward: usize, source_end: usize, target_end: usize },
    /// All intertwiners have columns (or rows) inside a proper subspace.
    JointRank { column_rank: usize, row_rank: usize },
    /// A sampled intertwiner generates Hom(M, N) over End(N) but is singular.
    SingularGenerator { trial: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ModuleVerdict {
    Isomorphic { certificate: ModuleIsoCertificate },
    NotIsomorphic { obstruction: ModuleObstruction },
    Inconclusive { trials: usize, field: FieldSpec },
}

fn certificate_over_base(f: Fp, c: &FpMatrix) -> Option<ModuleIsoCertificate> {
    let inv = c.inverse()?;
    Some(ModuleIsoCertificate {
        field: FieldSpec { p: f.p(), k: 1 },
        modulus: vec![0, 1],
        components: vec![c.to_rows()],
        inverse: vec![inv.to_rows()],
    })
}

/// Randomised search for an invertible intertwiner with exact certificates.
/// Tries the identity and each basis intertwiner first, then random
/// combinations over F_{p^k} with `p^k > 2n`.
pub fn modules_isomorphic(
    m: &MatrixTupleModule,
    nmod: &MatrixTupleModule,
    trials: usize,
    seed: u64,
) -> Result<ModuleVerdict> {
    let hom = intertwiner_space(m, nmod)?;
    let n = m.n;
    let f = hom.field();
    let not_iso = |obstruction| Ok(ModuleVerdict::NotIsomorphic { obstruction });
    if hom.is_zero() {
        return not_iso(ModuleObstruction::NoIntertwiners);
    }
    let back = intertwiner_space(nmod, m)?;
    let end_m = intertwiner_space(m, m)?;
    let end_n = intertwiner_space(nmod, nmod)?;
    if hom.dim() != end_n.dim() || back.dim() != end_m.dim() {
        return not_iso(ModuleObstruction::HomDimensions {
            forward: hom.dim(),
            backward: back.dim(),
            source_end: end_m.dim(),
            target_end: end_n.dim(),
        });
    }
    let basis: Vec<FpMatrix> = hom.vectors().iter().map(|v| unflatten(f, n, v)).collect();
    let mut cols = FpMatrix::zeros(f, n, 0);
    let mut rows = FpMatrix::zeros(f, 0, n);
    for c in &basis {
        cols = cols.hstack(c)?;
        rows = rows.vstack(c)?;
    }
    let (column_rank, row_rank) = (cols.rank(), rows.rank());
    if column_rank < n || row_rank < n {
        return not_iso(ModuleObstruction::JointRank { column_rank, row_rank });
    }

    let identity = FpMatrix::identity(f, n);
    let mut candidates = Vec::new();
    if hom.contains(identity.data())? {
        candidates.push(identity);
    }
    candidates.extend(basis.iter().cloned());
    for c in &candidates {
        if let Some(cert) = certificate_over_base(f, c) {
            return Ok(ModuleVerdict::Isomorphic { certificate: cert });
        }
    }

    let spec = FieldSpec::exceeding(f.p() as u64, 2 * n.max(hom.dim()) as u64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ext = ExtField::random(spec, &mut rng);
    let k = ext.degree();
    let t_basis: Vec<FpMatrix> = end_n.vectors().iter().map(|v| unflatten(f, n, v)).collect();
    for trial in 1..=trials {
        let coeffs: Vec<Vec<u32>> = (0..basis.len())
            .map(|_| (0..k).map(|_| rng.gen_range(0..f.p())).collect())
            .collect();
        let comps: Vec<FpMatrix> = (0..k)
            .map(|j| {
                basis
                    .iter()
                    .zip(&coeffs)
                    .fold(FpMatrix::zeros(f, n, n), |acc, (b, c)| acc.add(&b.scaled(c[j])).expect("shape"))
            })
            .collect();
        let realized = ext.realize(&comps)?;
        if let Some(inv) = realized.inverse() {
            let inverse = ext.components(&inv);
            return Ok(ModuleVerdict::Isomorphic {
                certificate: ModuleIsoCertificate {
                    field: spec,
                    modulus: ext.modulus().to_vec(),
                    components: comps.iter().map(FpMatrix::to_rows).collect(),
                    inverse: inverse.iter().map(FpMatrix::to_rows).collect(),
                },
            });
        }
        // is tau -> tau C onto Hom(M, N)?
        let mut images = Vec::new();
        for t in &t_basis {
            let parts: Vec<FpMatrix> = comps.iter().map(|c| t.mul(c)).collect::<Result<_>>()?;
            images.push(parts);
        }
        let gen_rank = {
            let mats: Vec<FpMatrix> = (0..k)
                .map(|j| {
                    let rows: Vec<Vec<u32>> = images.iter().map(|parts| parts[j].data().to_vec()).collect();
                    FpMatrix::from_rows(f, n * n, &rows).expect("flattened").transpose()
                })
                .collect();
            ext.realize(&mats)?.rank()
        };
        if gen_rank == k * hom.dim() {
            return not_iso(ModuleObstruction::SingularGenerator { trial });
        }
    }
    Ok(ModuleVerdict::Inconclusive { trials, field: spec })
}
