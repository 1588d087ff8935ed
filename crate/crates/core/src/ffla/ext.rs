//! F_{p^k} as polynomials over F_p modulo an irreducible polynomial, plus
//! restriction of scalars: an F_{p^k}-linear map is realised as an F_p matrix
//! that is k times larger in each direction.

use rand::Rng;

use super::{FieldSpec, Fp, FpMatrix};
use crate::error::{Error, Result};

/// Polynomial with coefficients low-to-high, trimmed of trailing zeros.
type Poly = Vec<u32>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_sub(f: Fp, a: &[u32], b: &[u32]) -> Poly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| f.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect(),
    )
}

fn poly_mul(f: Fp, a: &[u32], b: &[u32]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

fn poly_rem(f: Fp, a: &[u32], m: &[u32]) -> Poly {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = f.inv(m[dm]);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = f.mul(*r.last().unwrap(), lead_inv);
        for (i, &mc) in m.iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, mc));
        }
        r = trim(r);
    }
    r
}

fn poly_gcd(f: Fp, a: &[u32], b: &[u32]) -> Poly {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = poly_rem(f, &x, &y);
        x = y;
        y = r;
    }
    x
}

fn poly_powmod(f: Fp, base: &[u32], mut e: u64, m: &[u32]) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = poly_rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(f, &poly_mul(f, &acc, &b), m);
        }
        b = poly_rem(f, &poly_mul(f, &b, &b), m);
        e >>= 1;
    }
    acc
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test for a monic polynomial of degree k over F_p.
pub fn is_irreducible(f: Fp, poly: &[u32]) -> bool {
    let poly = trim(poly.to_vec());
    let k = poly.len().saturating_sub(1) as u32;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    let p = f.p() as u64;
    // x^(p^j) mod poly by repeated p-th powers
    let frob = |j: u32| {
        let mut h = x.clone();
        for _ in 0..j {
            h = poly_powmod(f, &h, p, &poly);
        }
        h
    };
    if poly_sub(f, &frob(k), &x) != Vec::<u32>::new() {
        return false;
    }
    for r in prime_factors(k) {
        let h = poly_sub(f, &frob(k / r), &x);
        let g = poly_gcd(f, &h, &poly);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// F_{p^k} with an explicit irreducible modulus. Elements are coefficient
/// vectors of length k in the power basis 1, a, ..., a^{k-1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtField {
    base: Fp,
    modulus: Vec<u32>,
}

impl ExtField {
    pub fn with_modulus(base: Fp, modulus: Vec<u32>) -> Result<Self> {
        let modulus = trim(modulus);
        if modulus.last() != Some(&1) || !is_irreducible(base, &modulus) {
            return Err(Error::Input("extension modulus must be monic irreducible".into()));
        }
        Ok(ExtField { base, modulus })
    }

    /// Searches random monic polynomials until one is irreducible.
    pub fn random(spec: FieldSpec, rng: &mut impl Rng) -> Self {
        let base = spec.base();
        let k = spec.k as usize;
        if k == 1 {
            return ExtField {
                base,
                modulus: vec![0, 1],
            };
        }
        loop {
            let mut m: Vec<u32> = (0..k).map(|_| rng.gen_range(0..base.p())).collect();
            m.push(1);
            if m[0] != 0 && is_irreducible(base, &m) {
                return ExtField { base, modulus: m };
            }
        }
    }

    pub fn base(&self) -> Fp {
        self.base
    }
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.base.p(),
            k: self.degree() as u32,
        }
    }

    fn pad(&self, mut a: Poly) -> Vec<u32> {
        a.resize(self.degree(), 0);
        a
    }

    pub fn one(&self) -> Vec<u32> {
        self.pad(vec![1])
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.base.add(x, y)).collect()
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let prod = poly_mul(self.base, &trim(a.to_vec()), &trim(b.to_vec()));
        self.pad(poly_rem(self.base, &prod, &self.modulus))
    }

    pub fn is_zero(&self, a: &[u32]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// `a^s` reduced, for s in `0..count`.
    pub fn powers(&self, count: usize) -> Vec<Vec<u32>> {
        let alpha = self.pad(vec![0, 1]);
        let alpha = if self.degree() == 1 {
            // in the prime field the generator of the power basis is 1
            self.one()
        } else {
            alpha
        };
        let mut out = Vec::with_capacity(count);
        let mut cur = self.one();
        for _ in 0..count {
            out.push(cur.clone());
            cur = self.mul(&cur, &alpha);
        }
        out
    }

    /// Realises the F_{p^k}-linear map `sum_j a^j comps[j]` (each comp an F_p
    /// matrix r x c) as an F_p matrix (k r) x (k c). Block row m, block column
    /// i carries the coefficient of a^m in a^{i+j}.
    pub fn realize(&self, comps: &[FpMatrix]) -> Result<FpMatrix> {
        let k = self.degree();
        let first = comps
            .first()
            .ok_or_else(|| Error::Input("no components to realise".into()))?;
        let (r, c) = (first.rows(), first.cols());
        if comps.len() > k {
            return Err(Error::Input("more components than the extension degree".into()));
        }
        let f = self.base;
        let pw = self.powers(2 * k);
        let mut out = FpMatrix::zeros(f, k * r, k * c);
        for (j, mj) in comps.iter().enumerate() {
            if mj.rows() != r || mj.cols() != c {
                return Err(Error::DimensionMismatch {
                    what: "component shape",
                    expected: r * c,
                    got: mj.rows() * mj.cols(),
                });
            }
            for i in 0..k {
                for m in 0..k {
                    let coef = pw[i + j][m];
                    if coef == 0 {
                        continue;
                    }
                    for a in 0..r {
                        for b in 0..c {
                            let v = mj.get(a, b);
                            if v == 0 {
                                continue;
                            }
                            let cur = out.get(m * r + a, i * c + b);
                            out.set(m * r + a, i * c + b, f.add(cur, f.mul(coef, v)));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Recovers the components of a realised matrix from its first block column.
    pub fn components(&self, realized: &FpMatrix) -> Vec<FpMatrix> {
        let k = self.degree();
        let r = realized.rows() / k;
        let c = realized.cols() / k;
        (0..k)
            .map(|m| FpMatrix::from_fn(self.base, r, c, |a, b| realized.get(m * r + a, b)))
            .collect()
    }

    /// Splits a realised vector (power-major blocks) into k component vectors.
    pub fn split_vector(&self, v: &[u32]) -> Vec<Vec<u32>> {
        let k = self.degree();
        let n = v.len() / k;
        (0..k).map(|m| v[m * n..(m + 1) * n].to_vec()).collect()
    }
}
