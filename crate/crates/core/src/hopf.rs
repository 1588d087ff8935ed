//! Filtered coordinate-ring models (R_d with product, coproduct, antipode and
//! counit) and the truncated-ideal closure engine shared by all of them.

use crate::ffla::{Echelon, Fp, FpMatrix, FpSubspace};

/// Multiplication by a fixed ring element, allowed on vectors supported in
/// `admissible` coordinates (so that the product stays inside R_d).
#[derive(Clone, Debug)]
pub struct Shift {
    pub admissible: Vec<bool>,
    pub id: usize,
}

pub type SparseVec = Vec<(usize, u32)>;

/// A finite-dimensional piece R_d of a coordinate ring, in a canonical basis.
///
/// Besides the canonical basis a model exposes a spanning family ("spans")
/// in which the coproduct and antipode are combinatorial; `reduce_span`
/// expresses a spanning element in canonical coordinates.
pub trait RingModel: Send + Sync {
    fn field(&self) -> Fp;
    fn d(&self) -> usize;
    fn dim(&self) -> usize;
    fn degree(&self, i: usize) -> usize;
    fn one(&self) -> Vec<u32>;

    /// Product of two elements whose degrees sum to at most d.
    fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32>;

    fn span_len(&self) -> usize;
    fn basis_span(&self, i: usize) -> usize;
    fn reduce_span(&self, s: usize) -> &[(usize, u32)];
    /// Delta(b_i) as a sum of `spans[x] (x) spans[y]` with unit coefficients.
    fn coproduct_terms(&self, i: usize) -> &[(usize, usize)];
    fn antipode_span(&self, s: usize) -> usize;
    fn counit_span(&self, s: usize) -> u32;

    /// Multipliers used by the one-step closure (`generators_only = false`)
    /// or by the equivalent generator-driven fixpoint (`true`). The default
    /// realises `sum_e (S cap R_e) R_{d-e}`.
    fn shifts(&self, generators_only: bool) -> Vec<Shift> {
        let d = self.d();
        let n = self.dim();
        (0..n)
            .filter(|&j| {
                let dj = self.degree(j);
                dj >= 1 && (!generators_only || dj == 1)
            })
            .map(|j| {
                let room = d - self.degree(j);
                Shift {
                    admissible: (0..n).map(|i| self.degree(i) <= room).collect(),
                    id: j,
                }
            })
            .collect()
    }

    fn apply_shifts(&self, v: &[u32], ids: &[usize]) -> Vec<Vec<u32>> {
        ids.iter()
            .map(|&j| {
                let mut e = vec![0; self.dim()];
                e[j] = 1;
                self.mul(v, &e)
            })
            .collect()
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Counit on the canonical basis.
pub fn counit<M: RingModel + ?Sized>(m: &M) -> Vec<u32> {
    (0..m.dim()).map(|i| m.counit_span(m.basis_span(i))).collect()
}

/// Degree of an element: the largest degree among its nonzero coordinates.
pub fn element_degree<M: RingModel + ?Sized>(m: &M, v: &[u32]) -> usize {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, _)| m.degree(i))
        .max()
        .unwrap_or(0)
}

pub fn densify(n: usize, f: Fp, s: &[(usize, u32)]) -> Vec<u32> {
    let mut v = vec![0; n];
    for &(i, x) in s {
        v[i] = f.add(v[i], x);
    }
    v
}

/// Antipode as a matrix whose row i holds the coordinates of iota(b_i).
pub fn antipode_matrix<M: RingModel + ?Sized>(m: &M) -> FpMatrix {
    let n = m.dim();
    let f = m.field();
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|i| densify(n, f, m.reduce_span(m.antipode_span(m.basis_span(i)))))
        .collect();
    FpMatrix::from_rows(f, n, &rows).expect("square")
}

pub fn antipode<M: RingModel + ?Sized>(m: &M, v: &[u32]) -> Vec<u32> {
    antipode_matrix(m).vec_mul(v).expect("dimension")
}

/// Values of a functional on every spanning element.
pub fn extend_to_spans<M: RingModel + ?Sized>(m: &M, phi: &[u32]) -> Vec<u32> {
    let f = m.field();
    let p = f.p() as u64;
    (0..m.span_len())
        .map(|s| {
            m.reduce_span(s)
                .iter()
                .fold(0u64, |acc, &(i, x)| (acc + x as u64 * phi[i] as u64) % p) as u32
        })
        .collect()
}

/// `(psi <> phi)(f) = sum psi(f_(1)) phi(f_(2))` given both functionals
/// already extended to spans.
pub fn compose_extended<M: RingModel + ?Sized>(m: &M, psi_s: &[u32], phi_s: &[u32]) -> Vec<u32> {
    let p = m.field().p() as u64;
    (0..m.dim())
        .map(|i| {
            m.coproduct_terms(i)
                .iter()
                .fold(0u64, |acc, &(a, b)| (acc + psi_s[a] as u64 * phi_s[b] as u64) % p) as u32
        })
        .collect()
}

/// Composition of functionals on R_d: `psi` after `phi`, so that evaluation
/// functionals satisfy `sigma_h <> sigma_g = sigma_{hg}`.
pub fn compose<M: RingModel + ?Sized>(m: &M, psi: &[u32], phi: &[u32]) -> Vec<u32> {
    compose_extended(m, &extend_to_spans(m, psi), &extend_to_spans(m, phi))
}

/// Delta on the canonical basis as sparse `(i, j, c)` triples meaning
/// `c * b_i (x) b_j`.
pub fn coproduct_matrix<M: RingModel + ?Sized>(m: &M) -> Vec<Vec<(usize, usize, u32)>> {
    let f = m.field();
    (0..m.dim())
        .map(|i| {
            let mut acc = std::collections::BTreeMap::new();
            for &(a, b) in m.coproduct_terms(i) {
                for &(x, cx) in m.reduce_span(a) {
                    for &(y, cy) in m.reduce_span(b) {
                        let e = acc.entry((x, y)).or_insert(0u32);
                        *e = f.add(*e, f.mul(cx, cy));
                    }
                }
            }
            acc.into_iter()
                .filter(|&(_, c)| c != 0)
                .map(|((x, y), c)| (x, y, c))
                .collect()
        })
        .collect()
}

/// A d-truncated ideal together with the number of closure rounds used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedIdeal {
    pub d: usize,
    pub span: FpSubspace,
    pub rounds: usize,
}

/// Basis of `rows cap C` where C is the coordinate subspace of admissible
/// columns.
fn restrict_to(f: Fp, rows: &[Vec<u32>], admissible: &[bool]) -> Vec<Vec<u32>> {
    let n = admissible.len();
    let order: Vec<usize> = (0..n)
        .filter(|&c| !admissible[c])
        .chain((0..n).filter(|&c| admissible[c]))
        .collect();
    let cut = order.iter().take_while(|&&c| !admissible[c]).count();
    let mut ech = Echelon::new(f, n);
    let mut out = Vec::new();
    for r in rows {
        ech.insert(order.iter().map(|&c| r[c]).collect());
    }
    for (row, piv) in ech.rows().iter().zip(ech.pivot_of_rows()) {
        if piv >= cut {
            let mut v = vec![0u32; n];
            for (k, &c) in order.iter().enumerate() {
                v[c] = row[k];
            }
            out.push(v);
        }
    }
    out
}

fn group_by_mask(shifts: Vec<Shift>) -> Vec<(Vec<bool>, Vec<usize>)> {
    let mut groups: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
    for s in shifts {
        if let Some(g) = groups.iter_mut().find(|g| g.0 == s.admissible) {
            g.1.push(s.id);
        } else {
            groups.push((s.admissible, vec![s.id]));
        }
    }
    groups
}

/// `(S)_d`: S plus all admissible products of S with the model's multipliers.
pub fn one_step_closure<M: RingModel + ?Sized>(m: &M, s: &FpSubspace) -> FpSubspace {
    let f = m.field();
    let rows = s.vectors();
    let mut gens = rows.clone();
    for (mask, ids) in group_by_mask(m.shifts(false)) {
        for v in restrict_to(f, &rows, &mask) {
            gens.extend(m.apply_shifts(&v, &ids));
        }
    }
    FpSubspace::span(f, m.dim(), &gens).expect("ring coordinates")
}

/// `((S))_d`, the smallest d-truncated ideal containing S. Iterates until the
/// dimension stops growing, multiplying each newly reached element of
/// `S cap R_{d-1}` by degree-one generators only; the fixpoint coincides
/// with that of `one_step_closure`.
pub fn closure<M: RingModel + ?Sized>(m: &M, s: &FpSubspace) -> TruncatedIdeal {
    let f = m.field();
    let n = m.dim();
    let mut ideal = Echelon::new(f, n);
    for v in s.vectors() {
        ideal.insert(v);
    }
    let groups = group_by_mask(m.shifts(true));
    let mut processed: Vec<Echelon> = groups.iter().map(|_| Echelon::new(f, n)).collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut grew = false;
        for (g, (mask, ids)) in groups.iter().enumerate() {
            if ideal.is_full() {
                break;
            }
            let level = restrict_to(f, ideal.rows(), mask);
            for v in level {
                if processed[g].insert(v.clone()).is_none() {
                    continue;
                }
                for w in m.apply_shifts(&v, ids) {
                    if ideal.insert(w).is_some() {
                        grew = true;
                    }
                }
            }
        }
        if !grew || ideal.is_full() {
            break;
        }
    }
    TruncatedIdeal {
        d: m.d(),
        span: ideal.to_subspace(),
        rounds,
    }
}

/// Reference closure: iterate `one_step_closure` until the dimension is stable.
pub fn closure_by_one_steps<M: RingModel + ?Sized>(m: &M, s: &FpSubspace) -> TruncatedIdeal {
    let mut cur = s.clone();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let next = one_step_closure(m, &cur);
        if next.dim() == cur.dim() {
            return TruncatedIdeal {
                d: m.d(),
                span: next,
                rounds,
            };
        }
        cur = next;
    }
}
