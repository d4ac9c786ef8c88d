//! Calculus on an anchored bundle: sections, brackets, exterior algebra,
//! the exterior differential, Lie derivatives, the Schouten-Nijenhuis
//! bracket and the skew / almost-Lie / Lie classification.

use crate::coeff::Scalar;
use crate::linalg;
use crate::Error;
use std::collections::BTreeMap;
use std::fmt;

/// A section of the bundle, as frame components.
pub type Section = Vec<Scalar>;

/// A vector field on the chart, as coordinate components.
pub type ChartVectorField = Vec<Scalar>;

/// An anchored bundle with a skew-symmetric bracket given by structure
/// functions on a global frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Algebroid {
    rank: usize,
    chart_dim: usize,
    /// anchor[i][j] is the d/dx_j component of the anchor image of e_i.
    anchor: Vec<Vec<Scalar>>,
    /// structure[i][j] is the section [e_i, e_j]; skew in (i, j).
    structure: Vec<Vec<Section>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Skew,
    AlmostLie,
    Lie,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Skew => write!(f, "skew"),
            Classification::AlmostLie => write!(f, "almost-Lie"),
            Classification::Lie => write!(f, "Lie"),
        }
    }
}

/// Classification plus the raw test outcomes; an instance whose
/// Jacobiators vanish while some anchor defect does not is inconsistent
/// with the Leibniz identity and gets flagged rather than silently
/// classified.
#[derive(Clone, Debug)]
pub struct ClassifyDetail {
    pub class: Classification,
    pub jacobiators_vanish: bool,
    pub anchor_defects_vanish: bool,
    pub inconsistency_warning: bool,
}

impl Algebroid {
    /// A bundle with zero bracket and the given anchor.
    pub fn new(rank: usize, chart_dim: usize, anchor: Vec<Vec<Scalar>>) -> Algebroid {
        assert_eq!(anchor.len(), rank);
        for row in &anchor {
            assert_eq!(row.len(), chart_dim);
        }
        let zero_section = vec![Scalar::zero(chart_dim); rank];
        Algebroid {
            rank,
            chart_dim,
            anchor,
            structure: vec![vec![zero_section; rank]; rank],
        }
    }

    pub fn zero_anchor(rank: usize, chart_dim: usize) -> Vec<Vec<Scalar>> {
        vec![vec![Scalar::zero(chart_dim); chart_dim]; rank]
    }

    /// Sets [e_i, e_j] (and its skew partner).
    pub fn set_bracket(&mut self, i: usize, j: usize, value: Section) {
        assert!(i < self.rank && j < self.rank && i != j);
        assert_eq!(value.len(), self.rank);
        self.structure[j][i] = value.iter().map(|s| -s).collect();
        self.structure[i][j] = value;
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn chart_dim(&self) -> usize {
        self.chart_dim
    }

    pub fn anchor_matrix(&self) -> &Vec<Vec<Scalar>> {
        &self.anchor
    }

    pub fn structure_function(&self, i: usize, j: usize) -> &Section {
        &self.structure[i][j]
    }

    pub fn zero_scalar(&self) -> Scalar {
        Scalar::zero(self.chart_dim)
    }

    pub fn zero_section(&self) -> Section {
        vec![self.zero_scalar(); self.rank]
    }

    pub fn frame_section(&self, i: usize) -> Section {
        let mut s = self.zero_section();
        s[i] = Scalar::one(self.chart_dim);
        s
    }

    /// The chart vector field which is the anchor image of a section.
    pub fn anchor_of(&self, a: &Section) -> ChartVectorField {
        (0..self.chart_dim)
            .map(|m| {
                (0..self.rank).fold(self.zero_scalar(), |acc, i| {
                    &acc + &(&a[i] * &self.anchor[i][m])
                })
            })
            .collect()
    }

    /// The directional derivative of a scalar along the anchor image of a
    /// section.
    pub fn anchor_apply(&self, a: &Section, phi: &Scalar) -> Scalar {
        let field = self.anchor_of(a);
        self.chart_apply(&field, phi)
    }

    /// Directional derivative along a chart vector field.
    pub fn chart_apply(&self, field: &ChartVectorField, phi: &Scalar) -> Scalar {
        (0..self.chart_dim).fold(self.zero_scalar(), |acc, m| {
            &acc + &(&field[m] * &phi.partial(m))
        })
    }

    /// Commutator of chart vector fields.
    pub fn chart_bracket(&self, x: &ChartVectorField, y: &ChartVectorField) -> ChartVectorField {
        (0..self.chart_dim)
            .map(|m| {
                (0..self.chart_dim).fold(self.zero_scalar(), |acc, l| {
                    let t = &(&x[l] * &y[m].partial(l)) - &(&y[l] * &x[m].partial(l));
                    &acc + &t
                })
            })
            .collect()
    }

    /// The bracket of sections with arbitrary scalar coefficients,
    /// extended from the structure functions by the Leibniz identity.
    pub fn bracket_sections(&self, a: &Section, b: &Section) -> Result<Section, Error> {
        if a.len() != self.rank || b.len() != self.rank {
            return Err(Error::RankMismatch);
        }
        let mut out = self.zero_section();
        for i in 0..self.rank {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..self.rank {
                if b[j].is_zero() {
                    continue;
                }
                let f = &a[i] * &b[j];
                for k in 0..self.rank {
                    out[k] = &out[k] + &(&f * &self.structure[i][j][k]);
                }
            }
        }
        // derivative terms: a_i (rho(e_i).b_j) e_j - b_j (rho(e_j).a_i) e_i
        for j in 0..self.rank {
            let da = self.anchor_apply(a, &b[j]);
            out[j] = &out[j] + &da;
            let db = self.anchor_apply(b, &a[j]);
            out[j] = &out[j] - &db;
        }
        Ok(out)
    }

    /// rho([e_i, e_j]) - [rho(e_i), rho(e_j)] as a chart vector field.
    pub fn anchor_defect(&self, i: usize, j: usize) -> ChartVectorField {
        let lhs = self.anchor_of(&self.structure[i][j]);
        let rhs = self.chart_bracket(&self.anchor[i], &self.anchor[j]);
        lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect()
    }

    /// Cyclic sum [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j].
    pub fn jacobiator_sections(&self, i: usize, j: usize, k: usize) -> Section {
        let mut out = self.zero_section();
        for &(p, q, r) in &[(i, j, k), (j, k, i), (k, i, j)] {
            let inner = self.structure[p][q].clone();
            let term = self
                .bracket_sections(&inner, &self.frame_section(r))
                .expect("frame sections have matching rank");
            for m in 0..self.rank {
                out[m] = &out[m] + &term[m];
            }
        }
        out
    }

    pub fn classify_detailed(&self) -> ClassifyDetail {
        let mut jac_zero = true;
        'outer: for i in 0..self.rank {
            for j in (i + 1)..self.rank {
                for k in (j + 1)..self.rank {
                    if self.jacobiator_sections(i, j, k).iter().any(|s| !s.is_zero()) {
                        jac_zero = false;
                        break 'outer;
                    }
                }
            }
        }
        let mut anchor_zero = true;
        'outer2: for i in 0..self.rank {
            for j in (i + 1)..self.rank {
                if self.anchor_defect(i, j).iter().any(|s| !s.is_zero()) {
                    anchor_zero = false;
                    break 'outer2;
                }
            }
        }
        let class = match (jac_zero, anchor_zero) {
            (true, true) => Classification::Lie,
            (false, true) => Classification::AlmostLie,
            _ => Classification::Skew,
        };
        ClassifyDetail {
            class,
            jacobiators_vanish: jac_zero,
            anchor_defects_vanish: anchor_zero,
            inconsistency_warning: jac_zero && !anchor_zero,
        }
    }

    pub fn classify(&self) -> Classification {
        self.classify_detailed().class
    }
}

/// Variance of a graded exterior object.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Multivector,
    Form,
}

/// A degree-graded exterior object: components indexed by strictly
/// increasing frame-index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    variance: Variance,
    degree: usize,
    rank: usize,
    nvars: usize,
    comps: BTreeMap<Vec<usize>, Scalar>,
}

/// Sorts an index tuple, returning the parity sign; `None` on repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, sign))
}

impl Tensor {
    pub fn zero(variance: Variance, degree: usize, rank: usize, nvars: usize) -> Tensor {
        Tensor {
            variance,
            degree,
            rank,
            nvars,
            comps: BTreeMap::new(),
        }
    }

    /// Degree-0 tensor holding a single scalar.
    pub fn scalar(variance: Variance, rank: usize, value: Scalar) -> Tensor {
        let nvars = value.nvars();
        let mut t = Tensor::zero(variance, 0, rank, nvars);
        t.set(vec![], value);
        t
    }

    /// Basis element e_i (multivector) or its dual (form).
    pub fn basis(variance: Variance, rank: usize, nvars: usize, i: usize) -> Tensor {
        let mut t = Tensor::zero(variance, 1, rank, nvars);
        t.set(vec![i], Scalar::one(nvars));
        t
    }

    pub fn from_components(
        variance: Variance,
        degree: usize,
        rank: usize,
        nvars: usize,
        comps: impl IntoIterator<Item = (Vec<usize>, Scalar)>,
    ) -> Tensor {
        let mut t = Tensor::zero(variance, degree, rank, nvars);
        for (idx, c) in comps {
            t.add_component(&idx, c);
        }
        t
    }

    /// A degree-1 tensor from plain components.
    pub fn from_vector(variance: Variance, nvars: usize, comps: &[Scalar]) -> Tensor {
        let rank = comps.len();
        Tensor::from_components(
            variance,
            1,
            rank,
            nvars,
            comps
                .iter()
                .enumerate()
                .map(|(i, c)| (vec![i], c.clone())),
        )
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.comps.iter()
    }

    fn set(&mut self, idx: Vec<usize>, c: Scalar) {
        if c.is_zero() {
            self.comps.remove(&idx);
        } else {
            self.comps.insert(idx, c);
        }
    }

    /// Adds to the component at an arbitrary (possibly unsorted) tuple.
    pub fn add_component(&mut self, idx: &[usize], c: Scalar) {
        assert_eq!(idx.len(), self.degree);
        let Some((sorted, sign)) = sort_with_sign(idx) else {
            return;
        };
        let c = if sign < 0 { -&c } else { c };
        let cur = self
            .comps
            .get(&sorted)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.nvars));
        self.set(sorted, &cur + &c);
    }

    /// Component at an arbitrary tuple, with the permutation sign.
    pub fn component(&self, idx: &[usize]) -> Scalar {
        assert_eq!(idx.len(), self.degree);
        match sort_with_sign(idx) {
            None => Scalar::zero(self.nvars),
            Some((sorted, sign)) => {
                let c = self
                    .comps
                    .get(&sorted)
                    .cloned()
                    .unwrap_or_else(|| Scalar::zero(self.nvars));
                if sign < 0 {
                    -&c
                } else {
                    c
                }
            }
        }
    }

    /// The single scalar of a degree-0 tensor.
    pub fn as_scalar(&self) -> Scalar {
        assert_eq!(self.degree, 0);
        self.component(&[])
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor, Error> {
        if self.variance != other.variance {
            return Err(Error::VarianceMismatch);
        }
        if self.degree != other.degree || self.rank != other.rank {
            return Err(Error::DegreeMismatch);
        }
        let mut out = self.clone();
        for (idx, c) in &other.comps {
            let cur = out
                .comps
                .get(idx)
                .cloned()
                .unwrap_or_else(|| Scalar::zero(self.nvars));
            out.set(idx.clone(), &cur + c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor, Error> {
        self.add(&other.scale(&Scalar::from_int(self.nvars, -1)))
    }

    pub fn scale(&self, f: &Scalar) -> Tensor {
        let mut out = Tensor::zero(self.variance, self.degree, self.rank, self.nvars);
        for (idx, c) in &self.comps {
            out.set(idx.clone(), c * f);
        }
        out
    }

    pub fn neg(&self) -> Tensor {
        self.scale(&Scalar::from_int(self.nvars, -1))
    }

    /// Graded exterior product of same-variance tensors.
    pub fn wedge(&self, other: &Tensor) -> Result<Tensor, Error> {
        if self.variance != other.variance {
            return Err(Error::VarianceMismatch);
        }
        if self.rank != other.rank {
            return Err(Error::DegreeMismatch);
        }
        let mut out = Tensor::zero(
            self.variance,
            self.degree + other.degree,
            self.rank,
            self.nvars,
        );
        for (ia, ca) in &self.comps {
            for (ib, cb) in &other.comps {
                let mut idx = ia.clone();
                idx.extend_from_slice(ib);
                out.add_component(&idx, ca * cb);
            }
        }
        Ok(out)
    }

    /// Duality pairing of a multivector with a form of the same degree,
    /// normalized so that basis elements pair to Kronecker deltas
    /// (the determinant convention).
    pub fn pairing(p: &Tensor, eta: &Tensor) -> Result<Scalar, Error> {
        if p.variance != Variance::Multivector || eta.variance != Variance::Form {
            return Err(Error::VarianceMismatch);
        }
        if p.degree != eta.degree || p.rank != eta.rank {
            return Err(Error::DegreeMismatch);
        }
        let mut acc = Scalar::zero(p.nvars);
        for (idx, c) in &p.comps {
            let e = eta.comps.get(idx);
            if let Some(e) = e {
                acc = &acc + &(c * e);
            }
        }
        Ok(acc)
    }

    /// Multilinear evaluation of a form on degree-many sections.
    pub fn eval_on_sections(&self, args: &[&Section]) -> Scalar {
        assert_eq!(self.variance, Variance::Form);
        assert_eq!(args.len(), self.degree);
        self.eval_multilinear(args)
    }

    /// Multilinear evaluation of a multivector on degree-many 1-forms
    /// (given by coframe components).
    pub fn eval_on_forms(&self, args: &[&Vec<Scalar>]) -> Scalar {
        assert_eq!(self.variance, Variance::Multivector);
        assert_eq!(args.len(), self.degree);
        self.eval_multilinear(args)
    }

    fn eval_multilinear(&self, args: &[&Vec<Scalar>]) -> Scalar {
        if self.degree == 0 {
            return self.as_scalar();
        }
        let mut acc = Scalar::zero(self.nvars);
        for (idx, c) in &self.comps {
            // determinant of the args restricted to the index tuple
            let m: linalg::Matrix = idx
                .iter()
                .map(|&p| args.iter().map(|a| a[p].clone()).collect())
                .collect();
            acc = &acc + &(c * &linalg::det(&m));
        }
        acc
    }

    /// Partial evaluation on leading arguments; the remaining slots stay
    /// free, producing a lower-degree tensor of the same variance.
    pub fn contract(&self, args: &[&Vec<Scalar>]) -> Tensor {
        assert!(args.len() <= self.degree);
        let remaining = self.degree - args.len();
        let mut out = Tensor::zero(self.variance, remaining, self.rank, self.nvars);
        let mut idx = vec![0usize; remaining];
        self.contract_rec(args, &mut idx, 0, &mut out);
        out
    }

    fn contract_rec(
        &self,
        args: &[&Vec<Scalar>],
        idx: &mut Vec<usize>,
        pos: usize,
        out: &mut Tensor,
    ) {
        if pos == idx.len() {
            let mut full: Vec<Vec<Scalar>> = args.iter().map(|a| (*a).clone()).collect();
            for &i in idx.iter() {
                let mut basis = vec![Scalar::zero(self.nvars); self.rank];
                basis[i] = Scalar::one(self.nvars);
                full.push(basis);
            }
            let refs: Vec<&Vec<Scalar>> = full.iter().collect();
            let v = self.eval_multilinear(&refs);
            if !v.is_zero() {
                out.add_component(&idx.clone(), v);
            }
            return;
        }
        let start = if pos == 0 { 0 } else { idx[pos - 1] + 1 };
        for i in start..self.rank {
            idx[pos] = i;
            self.contract_rec(args, idx, pos + 1, out);
        }
    }

    /// Interior product of a section into a form (insertion in the first
    /// slot). A degree-0 form contracts to zero.
    pub fn interior(&self, a: &Section) -> Result<Tensor, Error> {
        if self.variance != Variance::Form {
            return Err(Error::VarianceMismatch);
        }
        if self.degree == 0 {
            return Ok(Tensor::zero(Variance::Form, 0, self.rank, self.nvars));
        }
        Ok(self.contract(&[a]))
    }

    /// All strictly increasing index tuples of the given length.
    pub fn index_tuples(rank: usize, degree: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut idx = vec![0usize; degree];
        fn rec(rank: usize, idx: &mut Vec<usize>, pos: usize, out: &mut Vec<Vec<usize>>) {
            if pos == idx.len() {
                out.push(idx.clone());
                return;
            }
            let start = if pos == 0 { 0 } else { idx[pos - 1] + 1 };
            for i in start..rank {
                idx[pos] = i;
                rec(rank, idx, pos + 1, out);
            }
        }
        rec(rank, &mut idx, 0, &mut out);
        out
    }
}

impl Algebroid {
    /// The exterior differential on forms.
    pub fn d_rho(&self, eta: &Tensor) -> Tensor {
        assert_eq!(eta.variance(), Variance::Form);
        let k = eta.degree();
        let mut out = Tensor::zero(Variance::Form, k + 1, self.rank, self.chart_dim);
        for tuple in Tensor::index_tuples(self.rank, k + 1) {
            let mut acc = self.zero_scalar();
            for (pos, &i) in tuple.iter().enumerate() {
                let sub: Vec<Vec<Scalar>> = tuple
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != pos)
                    .map(|(_, &p)| self.frame_section(p))
                    .collect();
                let refs: Vec<&Section> = sub.iter().collect();
                let v = self.anchor_apply(&self.frame_section(i), &eta.eval_on_sections(&refs));
                if pos % 2 == 0 {
                    acc = &acc + &v;
                } else {
                    acc = &acc - &v;
                }
            }
            for p in 0..tuple.len() {
                for q in (p + 1)..tuple.len() {
                    let bracket = self.structure[tuple[p]][tuple[q]].clone();
                    let mut argv: Vec<Vec<Scalar>> = vec![bracket];
                    for (pos, &t) in tuple.iter().enumerate() {
                        if pos != p && pos != q {
                            argv.push(self.frame_section(t));
                        }
                    }
                    let refs: Vec<&Section> = argv.iter().collect();
                    let v = eta.eval_on_sections(&refs);
                    if (p + q) % 2 == 0 {
                        acc = &acc + &v;
                    } else {
                        acc = &acc - &v;
                    }
                }
            }
            if !acc.is_zero() {
                out.add_component(&tuple, acc);
            }
        }
        out
    }

    /// d of a scalar, as a 1-form.
    pub fn d_scalar(&self, phi: &Scalar) -> Tensor {
        self.d_rho(&Tensor::scalar(Variance::Form, self.rank, phi.clone()))
    }

    /// Lie derivative of a form along a section, by the evaluation
    /// formula.
    pub fn lie_derivative_form(&self, a: &Section, eta: &Tensor) -> Tensor {
        assert_eq!(eta.variance(), Variance::Form);
        let k = eta.degree();
        if k == 0 {
            return Tensor::scalar(
                Variance::Form,
                self.rank,
                self.anchor_apply(a, &eta.as_scalar()),
            );
        }
        let mut out = Tensor::zero(Variance::Form, k, self.rank, self.chart_dim);
        for tuple in Tensor::index_tuples(self.rank, k) {
            let frames: Vec<Section> = tuple.iter().map(|&i| self.frame_section(i)).collect();
            let refs: Vec<&Section> = frames.iter().collect();
            let mut acc = self.anchor_apply(a, &eta.eval_on_sections(&refs));
            for pos in 0..k {
                let bracket = self
                    .bracket_sections(a, &frames[pos])
                    .expect("sections share the algebroid rank");
                let mut argv = frames.clone();
                argv[pos] = bracket;
                let refs: Vec<&Section> = argv.iter().collect();
                acc = &acc - &eta.eval_on_sections(&refs);
            }
            if !acc.is_zero() {
                out.add_component(&tuple, acc);
            }
        }
        out
    }

    /// Lie derivative of a multivector along a section, defined through
    /// the duality bracket with forms.
    pub fn lie_derivative_multivector(&self, a: &Section, p: &Tensor) -> Tensor {
        assert_eq!(p.variance(), Variance::Multivector);
        let k = p.degree();
        if k == 0 {
            return Tensor::scalar(
                Variance::Multivector,
                self.rank,
                self.anchor_apply(a, &p.as_scalar()),
            );
        }
        if k == 1 {
            let comps: Section = (0..self.rank).map(|i| p.component(&[i])).collect();
            let b = self
                .bracket_sections(a, &comps)
                .expect("sections share the algebroid rank");
            return Tensor::from_vector(Variance::Multivector, self.chart_dim, &b);
        }
        let mut out = Tensor::zero(Variance::Multivector, k, self.rank, self.chart_dim);
        for tuple in Tensor::index_tuples(self.rank, k) {
            // <L_a P, e^I> = rho(a).<P, e^I> - <P, L_a e^I>
            let mut coform = Tensor::zero(Variance::Form, k, self.rank, self.chart_dim);
            coform.add_component(&tuple, Scalar::one(self.chart_dim));
            let direct = self.anchor_apply(a, &Tensor::pairing(p, &coform).unwrap());
            let lie_coform = self.lie_derivative_form(a, &coform);
            let v = &direct - &Tensor::pairing(p, &lie_coform).unwrap();
            if !v.is_zero() {
                out.add_component(&tuple, v);
            }
        }
        out
    }

    /// Lie derivative dispatching on variance.
    pub fn lie_derivative(&self, a: &Section, t: &Tensor) -> Tensor {
        match t.variance() {
            Variance::Form => self.lie_derivative_form(a, t),
            Variance::Multivector => self.lie_derivative_multivector(a, t),
        }
    }

    /// L_a eta - i_a(d eta) - d(i_a eta); zero exactly when the Cartan
    /// formula holds.
    pub fn cartan_defect(&self, a: &Section, eta: &Tensor) -> Tensor {
        let lie = self.lie_derivative_form(a, eta);
        let t1 = self.d_rho(eta).interior(a).unwrap();
        let t2 = self.d_rho(&eta.interior(a).unwrap());
        lie.sub(&t1).unwrap().sub(&t2).unwrap()
    }

    fn tensor_as_section(&self, p: &Tensor) -> Section {
        assert_eq!(p.degree(), 1);
        (0..self.rank).map(|i| p.component(&[i])).collect()
    }

    /// Schouten-Nijenhuis bracket, by recursion on the defining axioms.
    pub fn schouten(&self, p: &Tensor, q: &Tensor) -> Tensor {
        assert_eq!(p.variance(), Variance::Multivector);
        assert_eq!(q.variance(), Variance::Multivector);
        let (k, l) = (p.degree(), q.degree());
        if k == 0 && l == 0 {
            return Tensor::zero(Variance::Multivector, 0, self.rank, self.chart_dim);
        }
        if k == 1 {
            return self.lie_derivative_multivector(&self.tensor_as_section(p), q);
        }
        if l == 1 {
            // [P, b] = (-1)^k [b, P]
            let flipped = self.lie_derivative_multivector(&self.tensor_as_section(q), p);
            return if k % 2 == 0 { flipped } else { flipped.neg() };
        }
        if l == 0 {
            // [P, phi] = [phi, P]
            return self.schouten(q, p);
        }
        // l >= 2 (and k == 0 or k >= 2): split Q = b ^ R term by term and
        // use [P, Q ^ R] = [P, Q] ^ R + (-1)^((k+1) deg Q) Q ^ [P, R]
        let mut out = Tensor::zero(
            Variance::Multivector,
            k + l - 1,
            self.rank,
            self.chart_dim,
        );
        for (idx, c) in q.components() {
            let mut b = self.zero_section();
            b[idx[0]] = c.clone();
            let b_tensor = Tensor::from_vector(Variance::Multivector, self.chart_dim, &b);
            let mut rest = Tensor::zero(
                Variance::Multivector,
                l - 1,
                self.rank,
                self.chart_dim,
            );
            rest.add_component(&idx[1..], Scalar::one(self.chart_dim));
            let first = self.schouten(p, &b_tensor).wedge(&rest).unwrap();
            let second = b_tensor.wedge(&self.schouten(p, &rest)).unwrap();
            let second = if (k + 1) % 2 == 0 { second } else { second.neg() };
            out = out.add(&first).unwrap().add(&second).unwrap();
        }
        out
    }
}
