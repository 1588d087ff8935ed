//! The multiplicative group: truncated Laurent polynomials in t with weight
//! representations. Basis element t^a sits at offset `a + d`.

use crate::error::{Error, Result};
use crate::ffla::Fp;
use crate::hopf::{RingModel, Shift};
use crate::rep::{RepExpr, RepSource, Representation};

#[derive(Clone, Debug)]
pub struct TorusRingModel {
    field: Fp,
    d: usize,
    units: Vec<Vec<(usize, u32)>>,
    diagonal: Vec<[(usize, usize); 1]>,
}

impl TorusRingModel {
    pub fn new(d: usize, p: u64) -> Result<Self> {
        let field = Fp::new(p)?;
        let units = (0..2 * d + 1).map(|i| vec![(i, 1)]).collect();
        let diagonal = (0..2 * d + 1).map(|i| [(i, i)]).collect();
        Ok(TorusRingModel {
            field,
            d,
            units,
            diagonal,
        })
    }

    pub fn index(&self, a: i64) -> usize {
        assert!(a.unsigned_abs() as usize <= self.d, "exponent {a} outside R_{}", self.d);
        (a + self.d as i64) as usize
    }

    pub fn exponent(&self, i: usize) -> i64 {
        i as i64 - self.d as i64
    }

    pub fn monomial(&self, a: i64) -> Vec<u32> {
        let mut v = vec![0; self.dim()];
        v[self.index(a)] = 1;
        v
    }

    /// Laurent polynomial from `(exponent, coefficient)` terms.
    pub fn poly(&self, terms: &[(i64, i64)]) -> Vec<u32> {
        let mut v = vec![0; self.dim()];
        for &(a, c) in terms {
            let i = self.index(a);
            v[i] = self.field.add(v[i], self.field.from_i64(c));
        }
        v
    }

    /// Evaluation at `t` in F_p^*.
    pub fn eval_functional(&self, t: u32) -> Vec<u32> {
        let f = self.field;
        let tinv = f.inv(t);
        (0..self.dim())
            .map(|i| {
                let a = self.exponent(i);
                if a >= 0 {
                    f.pow(t, a as u64)
                } else {
                    f.pow(tinv, a.unsigned_abs())
                }
            })
            .collect()
    }

    /// Human-readable Laurent polynomial.
    pub fn format(&self, v: &[u32]) -> String {
        let mut parts = Vec::new();
        for i in (0..self.dim()).rev() {
            if v[i] == 0 {
                continue;
            }
            let c = self.field.signed(v[i]);
            let a = self.exponent(i);
            let mono = match a {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{a}"),
            };
            parts.push(match (c, mono.is_empty()) {
                (_, true) => format!("{c}"),
                (1, false) => mono,
                (-1, false) => format!("-{mono}"),
                _ => format!("{c}{mono}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }

    /// Weight representation `mu(e_i) = e_i (x) t^{w_i}`.
    pub fn weight_rep(&self, rep: &WeightRep) -> Result<Representation> {
        let ell = rep.ell();
        if ell > self.d {
            return Err(Error::Budget(format!("weights need degree {ell} > {}", self.d)));
        }
        Representation::from_fn(self, rep.weights.len(), ell, |a, c| {
            if a == c {
                self.monomial(rep.weights[a])
            } else {
                vec![0; self.dim()]
            }
        })
    }
}

impl RingModel for TorusRingModel {
    fn field(&self) -> Fp {
        self.field
    }
    fn d(&self) -> usize {
        self.d
    }
    fn dim(&self) -> usize {
        2 * self.d + 1
    }
    fn degree(&self, i: usize) -> usize {
        self.exponent(i).unsigned_abs() as usize
    }
    fn one(&self) -> Vec<u32> {
        self.monomial(0)
    }

    /// Laurent product; terms must land inside `[-d, d]`.
    fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let f = self.field;
        let d = self.d as i64;
        let mut out = vec![0; self.dim()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let e = self.exponent(i) + self.exponent(j);
                assert!(e.abs() <= d, "product t^{e} leaves R_{d}");
                let k = (e + d) as usize;
                out[k] = f.add(out[k], f.mul(x, y));
            }
        }
        out
    }

    fn span_len(&self) -> usize {
        self.dim()
    }
    fn basis_span(&self, i: usize) -> usize {
        i
    }
    fn reduce_span(&self, s: usize) -> &[(usize, u32)] {
        &self.units[s]
    }
    fn coproduct_terms(&self, i: usize) -> &[(usize, usize)] {
        &self.diagonal[i]
    }
    fn antipode_span(&self, s: usize) -> usize {
        2 * self.d - s
    }
    fn counit_span(&self, _s: usize) -> u32 {
        1
    }

    /// Multiplication by t^c is admissible whenever the result stays inside
    /// `[-d, d]`, whatever the degree of the factor. Shifts by one generate
    /// the same fixpoint as all shifts.
    fn shifts(&self, generators_only: bool) -> Vec<Shift> {
        let d = self.d as i64;
        let range: Vec<i64> = if generators_only {
            vec![-1, 1]
        } else {
            (-2 * d..=2 * d).filter(|&c| c != 0).collect()
        };
        range
            .into_iter()
            .map(|c| Shift {
                admissible: (0..self.dim()).map(|i| (self.exponent(i) + c).abs() <= d).collect(),
                id: (c + 2 * d) as usize,
            })
            .collect()
    }

    fn apply_shifts(&self, v: &[u32], ids: &[usize]) -> Vec<Vec<u32>> {
        let d = self.d as i64;
        ids.iter()
            .map(|&id| {
                let c = id as i64 - 2 * d;
                let mut out = vec![0; self.dim()];
                for (i, &x) in v.iter().enumerate() {
                    if x != 0 {
                        let e = self.exponent(i) + c;
                        assert!(e.abs() <= d, "shift leaves R_{d}");
                        out[(e + d) as usize] = x;
                    }
                }
                out
            })
            .collect()
    }
}

impl RepSource for TorusRingModel {
    fn atomic(&self, shape: &RepExpr) -> Result<Representation> {
        match shape {
            RepExpr::Weight(w) => self.weight_rep(&WeightRep::new(vec![*w])),
            other => Err(Error::Capability(format!("{other} is not a torus representation"))),
        }
    }
}

/// Direct sum of characters t^{w_1}, ..., t^{w_r}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightRep {
    pub weights: Vec<i64>,
}

impl WeightRep {
    pub fn new(weights: Vec<i64>) -> Self {
        WeightRep { weights }
    }

    pub fn ell(&self) -> usize {
        self.weights.iter().map(|w| w.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn shape(&self) -> RepExpr {
        RepExpr::Sum(self.weights.iter().map(|&w| RepExpr::Weight(w)).collect())
    }
}

/// `mu(v) = sum_i v_i e_i (x) t^{w_i}`, one ring element per coordinate.
pub fn weight_mu(model: &TorusRingModel, rep: &WeightRep, v: &[u32]) -> Result<Vec<Vec<u32>>> {
    model.weight_rep(rep)?.coaction(model.field(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffla::FpSubspace;
    use crate::hopf::{antipode, closure, counit, one_step_closure};

    #[test]
    fn counit_and_antipode_examples() {
        let m = TorusRingModel::new(5, 7).unwrap();
        let f = m.field();
        let g = m.poly(&[(3, 1), (0, -2)]);
        let eps = counit(&m);
        let val = g.iter().zip(&eps).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
        assert_eq!(f.signed(val), -1);
        assert_eq!(antipode(&m, &m.poly(&[(5, 1), (0, -1)])), m.poly(&[(-5, 1), (0, -1)]));
    }

    #[test]
    fn weight_mu_example() {
        let m = TorusRingModel::new(5, 7).unwrap();
        let mu = weight_mu(&m, &WeightRep::new(vec![3, 5]), &[1, 1]).unwrap();
        assert_eq!(mu[0], m.monomial(3));
        assert_eq!(mu[1], m.monomial(5));
        let inv = weight_mu(&m, &WeightRep::new(vec![0]), &[4]).unwrap();
        assert_eq!(inv[0], m.poly(&[(0, 4)]));
    }

    #[test]
    fn one_step_on_diagonal_generator_is_nine_dimensional() {
        let m = TorusRingModel::new(5, 7).unwrap();
        let s = FpSubspace::span(m.field(), m.dim(), &[m.poly(&[(5, 1), (3, -1)])]).unwrap();
        let step = one_step_closure(&m, &s);
        assert_eq!(step.dim(), 9);
        for a in -5..=3 {
            assert!(step.contains(&m.poly(&[(a + 2, 1), (a, -1)])).unwrap());
        }
        assert_eq!(closure(&m, &s).span, step);
    }

    #[test]
    fn unit_generates_everything() {
        let m = TorusRingModel::new(3, 5).unwrap();
        let s = FpSubspace::span(m.field(), m.dim(), &[m.one()]).unwrap();
        assert_eq!(closure(&m, &s).span.dim(), m.dim());
        assert!(closure(&m, &FpSubspace::zero(m.field(), m.dim())).span.is_zero());
    }
}
