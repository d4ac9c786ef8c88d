//! Contravariant calculus of a bivector field: musical maps, the Koszul
//! bracket, the induced skew algebroid on the dual bundle, and the
//! torsion and Jacobiator identities attached to it.

use crate::algebroid::{Algebroid, ChartVectorField, Section, Tensor, Variance};
use crate::coeff::Scalar;
use crate::linalg;
use crate::Error;

/// Components of a 1-form on the coframe.
pub type Coform = Vec<Scalar>;

/// A bivector field on an anchored bundle.
#[derive(Clone, Debug)]
pub struct BivectorContext {
    base: Algebroid,
    pi: Tensor,
}

fn cyclic<'a>(
    a: &'a Coform,
    b: &'a Coform,
    c: &'a Coform,
) -> [(&'a Coform, &'a Coform, &'a Coform); 3] {
    [(a, b, c), (b, c, a), (c, a, b)]
}

impl BivectorContext {
    pub fn new(base: Algebroid, pi: Tensor) -> Result<BivectorContext, Error> {
        if pi.variance() != Variance::Multivector {
            return Err(Error::VarianceMismatch);
        }
        if pi.degree() != 2 || pi.rank() != base.rank() {
            return Err(Error::DegreeMismatch);
        }
        Ok(BivectorContext { base, pi })
    }

    pub fn base(&self) -> &Algebroid {
        &self.base
    }

    pub fn pi(&self) -> &Tensor {
        &self.pi
    }

    pub fn pi_eval(&self, alpha: &Coform, beta: &Coform) -> Scalar {
        self.pi.eval_on_forms(&[alpha, beta])
    }

    /// The unique section with beta(sharp_pi(alpha)) = Pi(alpha, beta),
    /// by contraction of the component table.
    pub fn sharp_pi(&self, alpha: &Coform) -> Section {
        let r = self.base.rank();
        let nv = self.base.chart_dim();
        (0..r)
            .map(|k| {
                let mut ek = vec![Scalar::zero(nv); r];
                ek[k] = Scalar::one(nv);
                self.pi_eval(alpha, &ek)
            })
            .collect()
    }

    pub fn rho_pi(&self, alpha: &Coform) -> ChartVectorField {
        self.base.anchor_of(&self.sharp_pi(alpha))
    }

    /// The Koszul bracket of 1-forms.
    pub fn koszul_bracket(&self, alpha: &Coform, beta: &Coform) -> Coform {
        let sa = self.sharp_pi(alpha);
        let sb = self.sharp_pi(beta);
        let at = Tensor::from_vector(Variance::Form, self.base.chart_dim(), alpha);
        let bt = Tensor::from_vector(Variance::Form, self.base.chart_dim(), beta);
        let t1 = self.base.lie_derivative_form(&sa, &bt);
        let t2 = self.base.lie_derivative_form(&sb, &at);
        let t3 = self.base.d_scalar(&self.pi_eval(alpha, beta));
        let out = t1.sub(&t2).unwrap().sub(&t3).unwrap();
        (0..self.base.rank()).map(|i| out.component(&[i])).collect()
    }

    fn coframe(&self, i: usize) -> Coform {
        let mut v = vec![Scalar::zero(self.base.chart_dim()); self.base.rank()];
        v[i] = Scalar::one(self.base.chart_dim());
        v
    }

    /// The skew algebroid on the dual bundle, with anchor rho_pi on the
    /// coframe and structure functions read off the Koszul bracket.
    pub fn dual_algebroid(&self) -> Algebroid {
        let r = self.base.rank();
        let anchor: Vec<Vec<Scalar>> = (0..r).map(|i| self.rho_pi(&self.coframe(i))).collect();
        let mut dual = Algebroid::new(r, self.base.chart_dim(), anchor);
        for i in 0..r {
            for j in (i + 1)..r {
                let b = self.koszul_bracket(&self.coframe(i), &self.coframe(j));
                dual.set_bracket(i, j, b);
            }
        }
        dual
    }

    /// [Pi,Pi](alpha,beta,gamma) through the cyclic-sum identity; must
    /// agree with the axiom-driven Schouten bracket.
    pub fn schouten_via_cyclic(&self, alpha: &Coform, beta: &Coform, gamma: &Coform) -> Scalar {
        let mut acc = Scalar::zero(self.base.chart_dim());
        for (a, b, c) in cyclic(alpha, beta, gamma) {
            let field = self.rho_pi(a);
            acc = &acc - &self.base.chart_apply(&field, &self.pi_eval(b, c));
            acc = &acc + &self.pi_eval(&self.koszul_bracket(a, b), c);
        }
        acc
    }

    /// d_{rho_pi} Q + [Pi, Q]; zero exactly when the differential of the
    /// dual algebroid is minus the Schouten bracket with Pi.
    pub fn dpi_defect(&self, q: &Tensor) -> Tensor {
        assert_eq!(q.variance(), Variance::Multivector);
        let dual = self.dual_algebroid();
        // a k-multivector on the bundle is a k-form on the dual bundle
        let as_form = Tensor::from_components(
            Variance::Form,
            q.degree(),
            q.rank(),
            q.nvars(),
            q.components().map(|(i, c)| (i.clone(), c.clone())),
        );
        let d = dual.d_rho(&as_form);
        let d_back = Tensor::from_components(
            Variance::Multivector,
            d.degree(),
            d.rank(),
            d.nvars(),
            d.components().map(|(i, c)| (i.clone(), c.clone())),
        );
        d_back.add(&self.base.schouten(&self.pi, q)).unwrap()
    }

    /// gamma(sharp_pi([alpha,beta]_Pi) - [sharp alpha, sharp beta])
    /// minus half of [Pi,Pi](alpha,beta,gamma); identically zero.
    pub fn torsion_defect_pi(&self, alpha: &Coform, beta: &Coform, gamma: &Coform) -> Scalar {
        let s_bracket = self.sharp_pi(&self.koszul_bracket(alpha, beta));
        let bracket_s = self
            .base
            .bracket_sections(&self.sharp_pi(alpha), &self.sharp_pi(beta))
            .expect("sections share the base rank");
        let diff: Section = s_bracket
            .iter()
            .zip(&bracket_s)
            .map(|(x, y)| x - y)
            .collect();
        let lhs = gamma
            .iter()
            .zip(&diff)
            .fold(Scalar::zero(self.base.chart_dim()), |acc, (g, d)| {
                &acc + &(g * d)
            });
        let pipi = self
            .base
            .schouten(&self.pi, &self.pi)
            .eval_on_forms(&[alpha, beta, gamma]);
        let half = Scalar::from_int(self.base.chart_dim(), 1)
            .div(&Scalar::from_int(self.base.chart_dim(), 2))
            .unwrap();
        &lhs - &(&half * &pipi)
    }

    /// The direct Jacobiator of the dual bracket together with the
    /// closed-form right-hand side it must equal on a Lie base.
    pub fn jacobiator_pi(
        &self,
        alpha: &Coform,
        beta: &Coform,
        gamma: &Coform,
    ) -> Result<(Coform, Coform), Error> {
        if self.base.classify() != crate::algebroid::Classification::Lie {
            return Err(Error::NotLie);
        }
        let r = self.base.rank();
        let nv = self.base.chart_dim();
        let mut direct = vec![Scalar::zero(nv); r];
        let mut rhs_t = Tensor::zero(Variance::Form, 1, r, nv);
        for (a, b, c) in cyclic(alpha, beta, gamma) {
            let inner = self.koszul_bracket(a, b);
            let term = self.koszul_bracket(&inner, c);
            for i in 0..r {
                direct[i] = &direct[i] + &term[i];
            }
            // L along sharp([a,b]_Pi) - [sharp a, sharp b]
            let s_bracket = self.sharp_pi(&inner);
            let bracket_s = self
                .base
                .bracket_sections(&self.sharp_pi(a), &self.sharp_pi(b))
                .expect("sections share the base rank");
            let diff: Section = s_bracket
                .iter()
                .zip(&bracket_s)
                .map(|(x, y)| x - y)
                .collect();
            let ct = Tensor::from_vector(Variance::Form, nv, c);
            rhs_t = rhs_t
                .add(&self.base.lie_derivative_form(&diff, &ct))
                .unwrap();
            // - d(Pi(L_{sharp a}b, c) + Pi(b, L_{sharp a}c))
            let sa = self.sharp_pi(a);
            let bt = Tensor::from_vector(Variance::Form, nv, b);
            let lb: Coform = {
                let t = self.base.lie_derivative_form(&sa, &bt);
                (0..r).map(|i| t.component(&[i])).collect()
            };
            let lc: Coform = {
                let t = self.base.lie_derivative_form(&sa, &ct);
                (0..r).map(|i| t.component(&[i])).collect()
            };
            let scal = &self.pi_eval(&lb, c) + &self.pi_eval(b, &lc);
            rhs_t = rhs_t.sub(&self.base.d_scalar(&scal)).unwrap();
        }
        let rhs: Coform = (0..r).map(|i| rhs_t.component(&[i])).collect();
        Ok((direct, rhs))
    }

    pub fn is_poisson(&self) -> bool {
        self.base.schouten(&self.pi, &self.pi).is_zero()
    }
}

/// Matrix of the lowering map a -> -i_a Omega on the frame; row i holds
/// the coframe components of the image of e_i.
fn flat_omega_matrix(a: &Algebroid, omega: &Tensor) -> linalg::Matrix {
    let r = a.rank();
    (0..r)
        .map(|i| {
            let row = omega.interior(&a.frame_section(i)).unwrap();
            (0..r)
                .map(|k| -&row.component(&[k]))
                .collect()
        })
        .collect()
}

/// Inverts the lowering map of a nondegenerate 2-form and builds the
/// bivector with the same musical isomorphism.
pub fn pi_from_nondegenerate_form(
    a: &Algebroid,
    omega: &Tensor,
) -> Result<BivectorContext, Error> {
    assert_eq!(omega.variance(), Variance::Form);
    assert_eq!(omega.degree(), 2);
    let r = a.rank();
    let nv = a.chart_dim();
    let flat = flat_omega_matrix(a, omega);
    // sharp_omega(e^k): solve flat(x) = e^k, i.e. x^T flat = e^k
    let flat_t: linalg::Matrix = (0..r)
        .map(|i| (0..r).map(|j| flat[j][i].clone()).collect())
        .collect();
    let mut sharps = Vec::with_capacity(r);
    for k in 0..r {
        let mut ek = vec![Scalar::zero(nv); r];
        ek[k] = Scalar::one(nv);
        sharps.push(linalg::solve(&flat_t, &ek)?);
    }
    let mut pi = Tensor::zero(Variance::Multivector, 2, r, nv);
    for i in 0..r {
        for j in (i + 1)..r {
            let refs: Vec<&Section> = vec![&sharps[i], &sharps[j]];
            let v = omega.eval_on_sections(&refs);
            pi.add_component(&[i, j], v);
        }
    }
    BivectorContext::new(a.clone(), pi)
}

/// Nondegenerate and closed.
pub fn is_symplectic(a: &Algebroid, omega: &Tensor) -> bool {
    if pi_from_nondegenerate_form(a, omega).is_err() {
        return false;
    }
    a.d_rho(omega).is_zero()
}
