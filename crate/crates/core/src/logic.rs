//! Counting logic with d variables: formulas, their direct semantics on
//! finite relational structures, and compilation to equivariants whose value
//! on the structure encoding is the table of satisfying assignments.
//!
//! Formula syntax (S-expressions, variables `x0`, `x1`, ...):
//!
//! ```text
//! true | false
//! (E x0 x1)          edge relation (relation 0 of a graph structure)
//! (C1 x0)            color class 1 (relation 1 + i)
//! (R2 x0 x1 x2)      relation by index
//! (eq x0 x1)
//! (and f g ...) | (or f g ...) | (not f)
//! (exists x1 f)      at least one witness
//! (count 2 x1 f)     exactly two witnesses
//! ```

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ffla::Fp;
use crate::functors::{maps, EquivariantExpr, LinearMap};
use crate::graph::ColoredGraph;
use crate::rep::RepExpr;
use crate::sym_model::{encode_structure, tuple_index, StructureEncoding};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Rel { rel: usize, args: Vec<usize> },
    Eq(usize, usize),
    And(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Exists(usize, Box<Formula>),
    /// Exactly `b` witnesses.
    Count(usize, usize, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }
    pub fn exists(var: usize, a: Formula) -> Formula {
        Formula::Exists(var, Box::new(a))
    }
    pub fn count(b: usize, var: usize, a: Formula) -> Formula {
        Formula::Count(b, var, Box::new(a))
    }

    /// Largest variable index plus one.
    pub fn variable_count(&self) -> usize {
        match self {
            Formula::True => 0,
            Formula::Rel { args, .. } => args.iter().map(|&v| v + 1).max().unwrap_or(0),
            Formula::Eq(a, b) => a.max(b) + 1,
            Formula::And(a, b) => a.variable_count().max(b.variable_count()),
            Formula::Not(a) => a.variable_count(),
            Formula::Exists(v, a) | Formula::Count(_, v, a) => (v + 1).max(a.variable_count()),
        }
    }

    pub fn free_variables(&self) -> BTreeSet<usize> {
        match self {
            Formula::True => BTreeSet::new(),
            Formula::Rel { args, .. } => args.iter().copied().collect(),
            Formula::Eq(a, b) => [*a, *b].into(),
            Formula::And(a, b) => a.free_variables().union(&b.free_variables()).copied().collect(),
            Formula::Not(a) => a.free_variables(),
            Formula::Exists(v, a) | Formula::Count(_, v, a) => {
                let mut s = a.free_variables();
                s.remove(v);
                s
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::True | Formula::Rel { .. } | Formula::Eq(..) => 0,
            Formula::And(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Not(a) => a.quantifier_depth(),
            Formula::Exists(_, a) | Formula::Count(_, _, a) => 1 + a.quantifier_depth(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::Rel { rel, args } => {
                write!(f, "(R{rel}")?;
                for a in args {
                    write!(f, " x{a}")?;
                }
                write!(f, ")")
            }
            Formula::Eq(a, b) => write!(f, "(eq x{a} x{b})"),
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::Exists(v, a) => write!(f, "(exists x{v} {a})"),
            Formula::Count(b, v, a) => write!(f, "(count {b} x{v} {a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sexp {
    Atom(String, usize, usize),
    List(Vec<Sexp>, usize, usize),
}

fn tokenize(text: &str) -> Vec<(String, usize, usize)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let (mut start_line, mut start_col) = (1, 1);
    for (line_no, line) in text.lines().enumerate() {
        for (col_no, ch) in line.chars().enumerate() {
            let (l, c) = (line_no + 1, col_no + 1);
            if ch == '(' || ch == ')' || ch.is_whitespace() {
                if !cur.is_empty() {
                    out.push((std::mem::take(&mut cur), start_line, start_col));
                }
                if !ch.is_whitespace() {
                    out.push((ch.to_string(), l, c));
                }
            } else {
                if cur.is_empty() {
                    (start_line, start_col) = (l, c);
                }
                cur.push(ch);
            }
        }
        if !cur.is_empty() {
            out.push((std::mem::take(&mut cur), start_line, start_col));
        }
    }
    out
}

fn parse_error(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn read_sexp(tokens: &[(String, usize, usize)], pos: &mut usize) -> Result<Sexp> {
    let Some((tok, line, col)) = tokens.get(*pos) else {
        let (l, c) = tokens.last().map(|t| (t.1, t.2)).unwrap_or((1, 1));
        return Err(parse_error(l, c, "unexpected end of formula"));
    };
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some((t, _, _)) if t == ")" => {
                        *pos += 1;
                        return Ok(Sexp::List(items, *line, *col));
                    }
                    Some(_) => items.push(read_sexp(tokens, pos)?),
                    None => return Err(parse_error(*line, *col, "unclosed parenthesis")),
                }
            }
        }
        ")" => Err(parse_error(*line, *col, "unexpected ')'")),
        _ => Ok(Sexp::Atom(tok.clone(), *line, *col)),
    }
}

fn var_of(s: &Sexp) -> Result<usize> {
    match s {
        Sexp::Atom(t, l, c) => t
            .strip_prefix('x')
            .and_then(|r| r.parse().ok())
            .ok_or_else(|| parse_error(*l, *c, format!("expected a variable like x0, got {t:?}"))),
        Sexp::List(_, l, c) => Err(parse_error(*l, *c, "expected a variable")),
    }
}

fn to_formula(s: &Sexp) -> Result<Formula> {
    match s {
        Sexp::Atom(t, l, c) => match t.as_str() {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::not(Formula::True)),
            _ => Err(parse_error(*l, *c, format!("unexpected atom {t:?}"))),
        },
        Sexp::List(items, l, c) => {
            let Some(Sexp::Atom(head, hl, hc)) = items.first() else {
                return Err(parse_error(*l, *c, "expected an operator"));
            };
            let args = &items[1..];
            let arity = |k: usize| {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(parse_error(*hl, *hc, format!("{head} takes {k} arguments, got {}", args.len())))
                }
            };
            let fold = |op: fn(Formula, Formula) -> Formula| -> Result<Formula> {
                if args.len() < 2 {
                    return Err(parse_error(*hl, *hc, format!("{head} takes at least 2 arguments")));
                }
                let mut it = args.iter().map(to_formula);
                let first = it.next().expect("non-empty")?;
                it.try_fold(first, |acc, x| Ok(op(acc, x?)))
            };
            match head.as_str() {
                "and" => fold(Formula::and),
                "or" => fold(Formula::or),
                "not" => {
                    arity(1)?;
                    Ok(Formula::not(to_formula(&args[0])?))
                }
                "eq" => {
                    arity(2)?;
                    Ok(Formula::Eq(var_of(&args[0])?, var_of(&args[1])?))
                }
                "exists" => {
                    arity(2)?;
                    Ok(Formula::exists(var_of(&args[0])?, to_formula(&args[1])?))
                }
                "count" => {
                    arity(3)?;
                    let b = match &args[0] {
                        Sexp::Atom(t, l, c) => t
                            .parse()
                            .map_err(|_| parse_error(*l, *c, format!("expected a count, got {t:?}")))?,
                        Sexp::List(_, l, c) => return Err(parse_error(*l, *c, "expected a count")),
                    };
                    Ok(Formula::count(b, var_of(&args[1])?, to_formula(&args[2])?))
                }
                name => {
                    let rel = if name == "E" {
                        Some(0)
                    } else if let Some(i) = name.strip_prefix('C').and_then(|r| r.parse::<usize>().ok()) {
                        Some(i + 1)
                    } else {
                        name.strip_prefix('R').and_then(|r| r.parse().ok())
                    };
                    let rel = rel.ok_or_else(|| parse_error(*hl, *hc, format!("unknown operator {name:?}")))?;
                    Ok(Formula::Rel {
                        rel,
                        args: args.iter().map(var_of).collect::<Result<_>>()?,
                    })
                }
            }
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let s = read_sexp(&tokens, &mut pos)?;
    if let Some((t, l, c)) = tokens.get(pos) {
        return Err(parse_error(*l, *c, format!("trailing input {t:?}")));
    }
    to_formula(&s)
}

/// Points `0..n` with relations given by arity and tuple list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub n: usize,
    pub relations: Vec<(usize, Vec<Vec<usize>>)>,
}

impl Structure {
    /// Relation 0 is the symmetric edge relation; with more than one class
    /// in `classes`, relation `1 + i` is the i-th class.
    pub fn from_graph(g: &ColoredGraph, classes: &BTreeSet<usize>) -> Self {
        let mut relations = vec![(2, g.edges().iter().flat_map(|&(a, b)| [vec![a, b], vec![b, a]]).collect())];
        if classes.len() > 1 {
            for &c in classes {
                relations.push((1, (0..g.n()).filter(|&v| g.colors()[v] == c).map(|v| vec![v]).collect()));
            }
        }
        Structure { n: g.n(), relations }
    }

    pub fn arities(&self) -> Vec<usize> {
        self.relations.iter().map(|r| r.0).collect()
    }

    pub fn encoding(&self) -> Result<StructureEncoding> {
        encode_structure(self.n, &self.relations)
    }

    fn has(&self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].1.iter().any(|t| t == tuple)
    }
}

fn check_formula(phi: &Formula, arities: &[usize], d: usize) -> Result<()> {
    if phi.variable_count() > d {
        return Err(Error::Input(format!("formula uses {} variables, more than {d}", phi.variable_count())));
    }
    let mut stack = vec![phi];
    while let Some(f) = stack.pop() {
        match f {
            Formula::Rel { rel, args } => match arities.get(*rel) {
                None => return Err(Error::Input(format!("relation R{rel} does not exist"))),
                Some(&a) if a != args.len() => {
                    return Err(Error::Input(format!("relation R{rel} has arity {a}, used with {}", args.len())))
                }
                _ => {}
            },
            Formula::And(a, b) => stack.extend([a.as_ref(), b.as_ref()]),
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Count(_, _, a) => stack.push(a),
            Formula::True | Formula::Eq(..) => {}
        }
    }
    Ok(())
}

/// Direct semantics; `assignment[i]` is the value of `x_i` if bound.
pub fn holds(s: &Structure, phi: &Formula, assignment: &[Option<usize>]) -> Result<bool> {
    let get = |v: usize| -> Result<usize> {
        assignment
            .get(v)
            .copied()
            .flatten()
            .ok_or_else(|| Error::Input(format!("variable x{v} is unbound")))
    };
    Ok(match phi {
        Formula::True => true,
        Formula::Rel { rel, args } => {
            if *rel >= s.relations.len() {
                return Err(Error::Input(format!("relation R{rel} does not exist")));
            }
            let t = args.iter().map(|&v| get(v)).collect::<Result<Vec<_>>>()?;
            s.has(*rel, &t)
        }
        Formula::Eq(a, b) => get(*a)? == get(*b)?,
        Formula::And(a, b) => holds(s, a, assignment)? && holds(s, b, assignment)?,
        Formula::Not(a) => !holds(s, a, assignment)?,
        Formula::Exists(v, a) => witnesses(s, *v, a, assignment)? > 0,
        Formula::Count(b, v, a) => witnesses(s, *v, a, assignment)? == *b,
    })
}

fn witnesses(s: &Structure, v: usize, phi: &Formula, assignment: &[Option<usize>]) -> Result<usize> {
    let mut local = assignment.to_vec();
    if local.len() <= v {
        local.resize(v + 1, None);
    }
    let mut count = 0;
    for w in 0..s.n {
        local[v] = Some(w);
        count += holds(s, phi, &local)? as usize;
    }
    Ok(count)
}

fn tuple_of(n: usize, d: usize, mut idx: usize) -> Vec<usize> {
    let mut t = vec![0; d];
    for slot in t.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    t
}

/// Indicator of satisfying assignments over `X^d`, by direct semantics.
pub fn indicator_table(s: &Structure, phi: &Formula, d: usize) -> Result<Vec<u32>> {
    check_formula(phi, &s.arities(), d)?;
    (0..s.n.pow(d as u32))
        .map(|idx| {
            let a: Vec<Option<usize>> = tuple_of(s.n, d, idx).into_iter().map(Some).collect();
            Ok(holds(s, phi, &a)? as u32)
        })
        .collect()
}

/// Coefficients (low to high) of the polynomial of degree ≤ n through
/// `(i, values[i])` for i = 0..=n.
pub fn lagrange(f: Fp, values: &[u32]) -> Vec<u32> {
    let m = values.len();
    let mut out = vec![0u32; m];
    for (i, &yi) in values.iter().enumerate() {
        if yi == 0 {
            continue;
        }
        // basis polynomial prod_{j != i} (t - j) / (i - j)
        let mut poly = vec![1u32];
        let mut denom = 1u32;
        for j in 0..m {
            if j == i {
                continue;
            }
            let mut next = vec![0u32; poly.len() + 1];
            for (k, &c) in poly.iter().enumerate() {
                next[k + 1] = f.add(next[k + 1], c);
                next[k] = f.sub(next[k], f.mul(c, f.from_u64(j as u64)));
            }
            poly = next;
            denom = f.mul(denom, f.sub(f.from_u64(i as u64), f.from_u64(j as u64)));
        }
        let scale = f.mul(yi, f.inv(denom));
        for (o, c) in out.iter_mut().zip(poly) {
            *o = f.add(*o, f.mul(scale, c));
        }
    }
    out
}

/// Builds equivariants `V -> U^{⊗d}` with budget `2d`.
pub struct Compiler {
    f: Fp,
    n: usize,
    d: usize,
    arities: Vec<usize>,
    source: RepExpr,
    target: RepExpr,
}

impl Compiler {
    pub fn new(f: Fp, n: usize, d: usize, arities: &[usize]) -> Result<Self> {
        if (f.p() as usize) <= n {
            return Err(Error::Input(format!(
                "compiling counting formulas needs p > n; got p = {} with n = {n}",
                f.p()
            )));
        }
        if d == 0 {
            return Err(Error::Input("at least one variable is needed".into()));
        }
        let mut parts: Vec<RepExpr> = arities.iter().map(|&m| RepExpr::tensor_power(n, m)).collect();
        parts.push(RepExpr::Trivial);
        Ok(Compiler {
            f,
            n,
            d,
            arities: arities.to_vec(),
            source: RepExpr::Sum(parts),
            target: RepExpr::tensor_power(n, d),
        })
    }

    fn table_len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    fn linear(&self, map: LinearMap) -> Result<EquivariantExpr> {
        EquivariantExpr::linear(self.source.clone(), self.target.clone(), map, 2 * self.d)
    }

    fn source_dim(&self) -> usize {
        self.source.dim()
    }

    /// Sends the constant coordinate to the sum of the `d`-tuples selected
    /// by `keep`.
    fn from_constant(&self, keep: impl Fn(&[usize]) -> bool) -> Result<EquivariantExpr> {
        let last = self.source_dim() - 1;
        let col: Vec<(usize, i64)> = (0..self.table_len())
            .filter(|&i| keep(&tuple_of(self.n, self.d, i)))
            .map(|i| (i, 1))
            .collect();
        self.linear(LinearMap::from_fn(self.table_len(), self.source_dim(), |c| {
            if c == last {
                col.clone()
            } else {
                Vec::new()
            }
        }))
    }

    /// `1_d`.
    pub fn ones(&self) -> Result<EquivariantExpr> {
        self.from_constant(|_| true)
    }

    fn atom(&self, rel: usize, args: &[usize]) -> Result<EquivariantExpr> {
        let off: usize = self.arities[..rel].iter().map(|&m| self.n.pow(m as u32)).sum();
        let mut columns = vec![Vec::new(); self.source_dim()];
        for i in 0..self.table_len() {
            let t = tuple_of(self.n, self.d, i);
            let y: Vec<usize> = args.iter().map(|&v| t[v]).collect();
            columns[off + tuple_index(self.n, &y)].push((i, 1));
        }
        self.linear(LinearMap::from_columns(self.table_len(), columns)?)
    }

    fn star(&self, a: EquivariantExpr, b: EquivariantExpr) -> Result<EquivariantExpr> {
        let pair = EquivariantExpr::pair(a, b)?;
        let ex = EquivariantExpr::linear(
            pair.target.clone(),
            self.target.clone(),
            maps::diagonal_extract(self.table_len()),
            2 * self.d,
        )?;
        EquivariantExpr::compose(ex, pair)
    }

    /// `pr_i`: replaces position i by the all-ones vector.
    fn project(&self, i: usize) -> Result<EquivariantExpr> {
        let (n, d) = (self.n, self.d);
        let map = LinearMap::from_fn(self.table_len(), self.table_len(), |c| {
            let mut t = tuple_of(n, d, c);
            (0..n)
                .map(|w| {
                    t[i] = w;
                    (tuple_index(n, &t), 1)
                })
                .collect()
        });
        EquivariantExpr::linear(self.target.clone(), self.target.clone(), map, 2 * d)
    }

    /// `[q](g)` by Horner: `acc <- acc ⋆ g + c·1_d`.
    fn apply_poly(&self, coeffs: &[u32], g: &EquivariantExpr) -> Result<EquivariantExpr> {
        let top = coeffs.iter().rposition(|&c| c != 0);
        let Some(top) = top else {
            return EquivariantExpr::combo(vec![(0, self.ones()?)]);
        };
        let ones = self.ones()?;
        let mut acc = EquivariantExpr::combo(vec![(coeffs[top] as i64, ones.clone())])?;
        for k in (0..top).rev() {
            let prod = self.star(acc, g.clone())?;
            acc = if coeffs[k] == 0 {
                prod
            } else {
                EquivariantExpr::combo(vec![(1, prod), (coeffs[k] as i64, ones.clone())])?
            };
        }
        Ok(acc)
    }

    pub fn compile(&self, phi: &Formula) -> Result<EquivariantExpr> {
        check_formula(phi, &self.arities, self.d)?;
        self.compile_inner(phi)
    }

    fn compile_inner(&self, phi: &Formula) -> Result<EquivariantExpr> {
        match phi {
            Formula::True => self.ones(),
            Formula::Rel { rel, args } => self.atom(*rel, args),
            Formula::Eq(a, b) => self.from_constant(|t| t[*a] == t[*b]),
            Formula::And(a, b) => self.star(self.compile_inner(a)?, self.compile_inner(b)?),
            Formula::Not(a) => EquivariantExpr::combo(vec![(1, self.ones()?), (-1, self.compile_inner(a)?)]),
            Formula::Exists(v, a) | Formula::Count(_, v, a) => {
                let counts = EquivariantExpr::compose(self.project(*v)?, self.compile_inner(a)?)?;
                let values: Vec<u32> = (0..=self.n)
                    .map(|j| match phi {
                        Formula::Count(b, _, _) => (j == *b) as u32,
                        _ => (j > 0) as u32,
                    })
                    .collect();
                if let Formula::Count(b, _, _) = phi {
                    if *b > self.n {
                        return Err(Error::Input(format!("count {b} exceeds the {} points", self.n)));
                    }
                }
                self.apply_poly(&lagrange(self.f, &values), &counts)
            }
        }
    }
}

/// Compiles and evaluates on the structure's encoding.
pub fn compiled_table(s: &Structure, phi: &Formula, d: usize, f: Fp) -> Result<Vec<u32>> {
    let c = Compiler::new(f, s.n, d, &s.arities())?;
    let e = c.compile(phi)?;
    e.eval(f, &s.encoding()?.vector)
}

/// The compiled tables of two structures have different zero patterns.
pub fn compiled_distinguishes(s1: &Structure, s2: &Structure, phi: &Formula, d: usize, f: Fp) -> Result<bool> {
    let t1 = compiled_table(s1, phi, d, f)?;
    let t2 = compiled_table(s2, phi, d, f)?;
    Ok(t1.iter().zip(&t2).any(|(&a, &b)| (a == 0) != (b == 0)))
}

/// Random formula with variables below `d` and quantifier depth at most
/// `depth`; closed formulas are obtained by quantifying the leftovers.
pub fn random_formula(rng: &mut impl Rng, arities: &[usize], d: usize, depth: usize, n: usize) -> Formula {
    fn go(rng: &mut impl Rng, arities: &[usize], d: usize, depth: usize, n: usize) -> Formula {
        let choice = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..7) };
        match choice {
            0 | 1 if !arities.is_empty() => {
                let rel = rng.gen_range(0..arities.len());
                Formula::Rel {
                    rel,
                    args: (0..arities[rel]).map(|_| rng.gen_range(0..d)).collect(),
                }
            }
            0 | 1 | 2 => Formula::Eq(rng.gen_range(0..d), rng.gen_range(0..d)),
            3 => Formula::and(go(rng, arities, d, depth - 1, n), go(rng, arities, d, depth - 1, n)),
            4 => Formula::not(go(rng, arities, d, depth - 1, n)),
            5 => Formula::exists(rng.gen_range(0..d), go(rng, arities, d, depth - 1, n)),
            _ => Formula::count(rng.gen_range(0..=n), rng.gen_range(0..d), go(rng, arities, d, depth - 1, n)),
        }
    }
    go(rng, arities, d, depth, n)
}

/// Existentially closes every free variable.
pub fn close(phi: Formula) -> Formula {
    phi.free_variables().into_iter().rev().fold(phi, |acc, v| Formula::exists(v, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle, path, union};

    fn graph_structure(g: &ColoredGraph) -> Structure {
        Structure::from_graph(g, &g.color_classes())
    }

    #[test]
    fn exists_neighbor_on_a_path() {
        let s = graph_structure(&path(3));
        let phi = parse_formula("(exists x1 (E x0 x1))").unwrap();
        for v in 0..3 {
            assert!(holds(&s, &phi, &[Some(v), None]).unwrap());
        }
        let f = Fp::new(5).unwrap();
        assert_eq!(compiled_table(&s, &phi, 2, f).unwrap(), indicator_table(&s, &phi, 2).unwrap());
    }

    #[test]
    fn exactly_two_neighbors_marks_the_middle() {
        let s = graph_structure(&path(3));
        let phi = parse_formula("(count 2 x1 (E x0 x1))").unwrap();
        let f = Fp::new(5).unwrap();
        let table = compiled_table(&s, &phi, 2, f).unwrap();
        let middle: Vec<u32> = (0..9).map(|i| (i / 3 == 1) as u32).collect();
        assert_eq!(table, middle);
    }

    #[test]
    fn triangles_need_three_variables() {
        let tri = parse_formula("(exists x0 (exists x1 (exists x2 (and (E x0 x1) (and (E x1 x2) (E x0 x2))))))").unwrap();
        let c6 = graph_structure(&cycle(6));
        let two = graph_structure(&union(&cycle(3), &cycle(3)));
        assert!(!holds(&c6, &tri, &[]).unwrap());
        assert!(holds(&two, &tri, &[]).unwrap());
        let f = Fp::new(7).unwrap();
        assert!(compiled_distinguishes(&c6, &two, &tri, 3, f).unwrap());
    }

    #[test]
    fn small_primes_are_refused() {
        let s = graph_structure(&path(5));
        assert!(compiled_table(&s, &Formula::True, 1, Fp::new(5).unwrap()).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_formula("(and true\n  (frob x0))") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 4)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula("(not true").is_err());
        let phi = parse_formula("(or (eq x0 x1) (C0 x1))").unwrap();
        assert_eq!(parse_formula(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn lagrange_interpolates() {
        let f = Fp::new(7).unwrap();
        let vals = [0, 1, 1, 1];
        let c = lagrange(f, &vals);
        for (i, &v) in vals.iter().enumerate() {
            let x = i as u32;
            let y = c.iter().rev().fold(0, |acc, &k| f.add(f.mul(acc, x), k));
            assert_eq!(y, v);
        }
    }
}
