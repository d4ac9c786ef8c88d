//! Multivariate polynomials over the rationals.
//!
//! Terms are kept in a sorted map keyed by exponent vectors under the
//! graded-lexicographic order, so the leading term of a polynomial is
//! well defined and canonical forms are representation-unique.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector of a monomial, one entry per chart coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Exponent-wise quotient, `None` when `other` does not divide `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

// Graded-lexicographic: compare total degree first, then exponents left to right.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A multivariate polynomial with rational coefficients.
///
/// The zero polynomial has an empty term map. All terms carry nonzero
/// coefficients, so equal polynomials have identical representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; nvars]), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, BigRational::one())
    }

    pub fn from_int(nvars: usize, k: i64) -> Poly {
        Poly::constant(nvars, BigRational::from_integer(k.into()))
    }

    /// The coordinate x_i as a polynomial.
    pub fn var(nvars: usize, i: usize) -> Poly {
        assert!(i < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(Monomial(exps), BigRational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_constant())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Leading term under graded-lex, `None` for the zero polynomial.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    fn insert_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c;
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut exps = m.0.clone();
                exps[i] = e - 1;
                out.insert_term(
                    Monomial(exps),
                    c * BigRational::from_integer(e.into()),
                );
            }
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term *= &point[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Divide by the leading coefficient so the graded-lex leading
    /// coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = BigRational::one() / lc.clone();
                self.scale(&inv)
            }
        }
    }

    /// Exact multivariate division; `None` when `self` is not a multiple
    /// of `divisor`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert_eq!(self.nvars, divisor.nvars);
        if divisor.is_zero() {
            return None;
        }
        let (dm, dc) = {
            let (m, c) = divisor.leading().unwrap();
            (m.clone(), c.clone())
        };
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            let mut qterm = Poly::zero(self.nvars);
            qterm.terms.insert(qm, qc);
            rem = rem.sub(&qterm.mul(divisor));
            quot = quot.add(&qterm);
        }
        Some(quot)
    }

    /// Degree in variable `i`.
    fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    /// View as univariate in variable `v`: coefficient polynomials indexed
    /// by the power of x_v (still over the full variable set, with x_v
    /// degree zero in each coefficient).
    fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(self.nvars); d + 1];
        for (m, c) in &self.terms {
            let e = m.0[v] as usize;
            let mut exps = m.0.clone();
            exps[v] = 0;
            out[e].insert_term(Monomial(exps), c.clone());
        }
        out
    }

    /// Greatest common divisor, normalized monic under graded-lex.
    ///
    /// Primitive pseudo-remainder sequence, recursing on the variable set.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        assert_eq!(a.nvars, b.nvars);
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one(a.nvars);
        }
        // main variable: the highest-index variable occurring in either
        let v = (0..a.nvars)
            .rev()
            .find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0)
            .expect("nonconstant polynomial has a variable");
        if a.degree_in(v) == 0 || b.degree_in(v) == 0 {
            // one side is free of the main variable: gcd divides its
            // content with respect to v
            let (free, other) = if a.degree_in(v) == 0 { (a, b) } else { (b, a) };
            let cont = Self::content_in(other, v);
            return Poly::gcd(free, &cont);
        }
        let ca = Self::content_in(a, v);
        let cb = Self::content_in(b, v);
        let cont_gcd = Poly::gcd(&ca, &cb);
        let mut p = a.div_exact(&ca).unwrap().constant_primitive();
        let mut q = b.div_exact(&cb).unwrap().constant_primitive();
        if p.degree_in(v) < q.degree_in(v) {
            std::mem::swap(&mut p, &mut q);
        }
        loop {
            let r = Self::pseudo_rem(&p, &q, v);
            if r.is_zero() {
                let prim = q.div_exact(&Self::content_in(&q, v)).unwrap();
                return cont_gcd.mul(&prim).monic();
            }
            if r.degree_in(v) == 0 {
                return cont_gcd.monic();
            }
            p = q;
            q = r
                .div_exact(&Self::content_in(&r, v))
                .unwrap()
                .constant_primitive();
        }
    }

    /// Gcd of the univariate-in-`v` coefficients.
    fn content_in(p: &Poly, v: usize) -> Poly {
        let coeffs = p.coeffs_in(v);
        let mut acc = Poly::zero(p.nvars);
        for c in &coeffs {
            if !c.is_zero() {
                acc = Poly::gcd(&acc, c);
                if acc.is_constant() && !acc.is_zero() {
                    break;
                }
            }
        }
        acc
    }

    /// Pseudo-remainder of `p` by `q` in the variable `v`, up to a
    /// nonzero constant factor.
    ///
    /// Every elimination step multiplies by a leading coefficient, so
    /// the constant content is stripped after each one; without that the
    /// coefficient sizes grow multiplicatively and the remainder
    /// sequence becomes intractable on modest inputs.
    fn pseudo_rem(p: &Poly, q: &Poly, v: usize) -> Poly {
        let dq = q.degree_in(v);
        let qc = q.coeffs_in(v);
        let lq = qc[dq as usize].clone();
        let mut r = p.clone();
        while !r.is_zero() && r.degree_in(v) >= dq {
            let dr = r.degree_in(v);
            let rc = r.coeffs_in(v);
            let lr = rc[dr as usize].clone();
            // r <- lq * r - lr * x_v^(dr-dq) * q
            let mut shift = vec![0u32; p.nvars];
            shift[v] = dr - dq;
            let mut shift_poly = Poly::zero(p.nvars);
            shift_poly.terms.insert(Monomial(shift), BigRational::one());
            r = r.mul(&lq).sub(&lr.mul(&shift_poly).mul(q));
            r = r.constant_primitive();
        }
        r
    }

    /// Scales so the coefficients are integers with unit content and a
    /// positive leading coefficient. The result divides into the input
    /// by a nonzero constant.
    fn constant_primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if self.terms.values().next_back().unwrap().is_negative() {
            num_gcd = -num_gcd;
        }
        let scale = BigRational::new(den_lcm, num_gcd);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * &scale);
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // print highest terms first
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_constant() {
                factors.push(mag.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    factors.push(var_name(i));
                } else if e > 1 {
                    factors.push(format!("{}^{}", var_name(i), e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Default display names for chart coordinates.
pub fn var_name(i: usize) -> String {
    match i {
        0 => "x".to_string(),
        1 => "y".to_string(),
        2 => "z".to_string(),
        _ => format!("x{}", i),
    }
}
