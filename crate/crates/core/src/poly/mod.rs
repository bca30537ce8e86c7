//! Sparse multivariate polynomials with real coefficients.
//!
//! Terms are kept in canonical form: one entry per exponent vector, no zero
//! coefficients, ordered by graded lexicographic order (total degree first,
//! then `x1` before `x2` within a degree).

mod germ;
mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

pub use germ::{jet, residuals, GermFile, MapGerm};
pub use parse::{parse, parse_with_param};

/// Errors raised while building, parsing or combining polynomials.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable `{name}` at position {pos} is out of range for {nvars} variables")]
    VariableOutOfRange {
        pos: usize,
        name: String,
        nvars: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("component {component} has a nonzero constant term; a map-germ must vanish at 0")]
    NotAGerm { component: usize },
    #[error("invalid germ shape: n = {nvars}, p = {ncomps} (need n >= p >= 1)")]
    GermShape { nvars: usize, ncomps: usize },
    #[error("jets differ at order {order}: component {component}, monomial {monomial}")]
    JetMismatch {
        order: u32,
        component: usize,
        monomial: String,
    },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("invalid germ file: {0}")]
    File(String),
}

/// Exponent vector with graded lexicographic ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponents(Vec<u32>);

impl Exponents {
    pub fn new(exps: Vec<u32>) -> Self {
        Exponents(exps)
    }

    pub fn zero(nvars: usize) -> Self {
        Exponents(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn product(&self, other: &Exponents) -> Exponents {
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A single term `coefficient * x^exponents`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coefficient: f64,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// Polynomial in `nvars` real variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<Exponents, f64>,
    nvars: usize,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            terms: BTreeMap::new(),
            nvars,
        }
    }

    pub fn constant(value: f64, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Exponents::zero(nvars), value);
        p
    }

    /// The coordinate function `x_{index+1}`.
    pub fn variable(index: usize, nvars: usize) -> Self {
        assert!(index < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(Exponents(exps), 1.0);
        p
    }

    /// Builds a canonical polynomial from `(exponents, coefficient)` pairs,
    /// merging duplicates and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            if !c.is_finite() {
                return Err(PolyError::NonFinite);
            }
            p.add_term(Exponents(exps), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Exponents, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Exponents::degree).max().unwrap_or(0)
    }

    /// Lowest total degree among the terms (`None` for the zero polynomial).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Exponents::degree).min()
    }

    pub fn coefficient(&self, exps: &[u32]) -> f64 {
        self.terms
            .get(&Exponents(exps.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coefficient(&vec![0; self.nvars])
    }

    /// Terms in ascending graded lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms()
            .map(|(e, c)| Monomial {
                exponents: e.to_vec(),
                coefficient: c,
            })
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluates without the dimension check; `x` must have `nvars` entries.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (exps, &c) in &self.terms {
            let mut term = c;
            for (xi, &e) in x.iter().zip(exps.as_slice()) {
                match e {
                    0 => {}
                    1 => term *= xi,
                    2 => term *= xi * xi,
                    _ => term *= xi.powi(e as i32),
                }
            }
            acc += term;
        }
        acc
    }

    /// Partial derivative with respect to variable `index` (0-based).
    pub fn derivative(&self, index: usize) -> Polynomial {
        assert!(index < self.nvars, "variable index out of range");
        let mut out = Polynomial::zero(self.nvars);
        for (exps, &c) in &self.terms {
            let e = exps.0[index];
            if e == 0 {
                continue;
            }
            let mut d = exps.0.clone();
            d[index] -= 1;
            out.add_term(Exponents(d), c * f64::from(e));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    /// Keeps the terms whose total degree satisfies `keep`.
    pub fn filter_degree(&self, keep: impl Fn(u32) -> bool) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e.degree()))
                .map(|(e, &c)| (e.clone(), c))
                .collect(),
            nvars: self.nvars,
        }
    }

    pub fn scale(&self, a: f64) -> Polynomial {
        if a == 0.0 {
            return Polynomial::zero(self.nvars);
        }
        let mut out = Polynomial::zero(self.nvars);
        for (e, &c) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    /// Re-embeds into `nvars` variables by appending unused trailing variables.
    pub fn extend_vars(&self, nvars: usize) -> Polynomial {
        assert!(nvars >= self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut v = e.0.clone();
                v.resize(nvars, 0);
                (Exponents(v), c)
            })
            .collect();
        Polynomial { terms, nvars }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::constant(1.0, self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn check_same(&self, other: &Polynomial) {
        assert_eq!(
            self.nvars, other.nvars,
            "polynomials live in different numbers of variables"
        );
    }

    /// Formats with custom variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        Named { poly: self, names }
    }
}

struct Named<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.poly, |i| self.names[i].clone())
    }
}

fn write_poly(
    f: &mut fmt::Formatter<'_>,
    p: &Polynomial,
    name: impl Fn(usize) -> String,
) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (k, (exps, &c)) in p.terms.iter().enumerate() {
        let neg = c < 0.0;
        let a = c.abs();
        match (k, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        let mut factors = Vec::new();
        if a != 1.0 || exps.degree() == 0 {
            factors.push(format!("{a}"));
        }
        for (i, &e) in exps.as_slice().iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(name(i)),
                _ => factors.push(format!("{}^{}", name(i), e)),
            }
        }
        write!(f, "{}", factors.join("*"))?;
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self, |i| format!("x{}", i + 1))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.check_same(rhs);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.check_same(rhs);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_same(rhs);
        let mut out = Polynomial::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &rhs.terms {
                out.add_term(ea.product(eb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

/// Evaluates a list of polynomials at one point.
pub fn eval_all(polys: &[Polynomial], x: &[f64]) -> Vec<f64> {
    polys.iter().map(|p| p.eval_unchecked(x)).collect()
}
