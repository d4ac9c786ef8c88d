//! Jacobi pairs and their twisted dual calculus: the lambda-deformed
//! bracket on the coframe, the skew algebroid of a triple, its torsion
//! and Jacobiator identities, and the compatibility of a pair with a
//! metric through the triple Levi-Civita connection.

use crate::algebroid::{Algebroid, ChartVectorField, Section, Tensor, Variance};
use crate::coeff::Scalar;
use crate::linalg;
use crate::poisson::{BivectorContext, Coform};
use crate::riemann::{self, Connection, Dense, Metric};
use crate::Error;

/// Where the 1-form of the triple came from; mixing the two regimes is
/// a bug, so the context records it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaSource {
    User,
    Metric,
}

/// A bivector-section pair with an optional coframe 1-form.
#[derive(Clone, Debug)]
pub struct JacobiContext {
    ctx: BivectorContext,
    xi: Section,
    lambda: Option<(Coform, LambdaSource)>,
}

fn dot(alpha: &Coform, a: &Section) -> Scalar {
    alpha
        .iter()
        .zip(a)
        .fold(Scalar::zero(alpha[0].nvars()), |acc, (x, y)| &acc + &(x * y))
}

impl JacobiContext {
    pub fn new(base: Algebroid, pi: Tensor, xi: Section) -> Result<JacobiContext, Error> {
        if xi.len() != base.rank() {
            return Err(Error::RankMismatch);
        }
        Ok(JacobiContext {
            ctx: BivectorContext::new(base, pi)?,
            xi,
            lambda: None,
        })
    }

    pub fn base(&self) -> &Algebroid {
        self.ctx.base()
    }

    pub fn bivector(&self) -> &BivectorContext {
        &self.ctx
    }

    pub fn pi(&self) -> &Tensor {
        self.ctx.pi()
    }

    pub fn xi(&self) -> &Section {
        &self.xi
    }

    pub fn lambda(&self) -> Option<&Coform> {
        self.lambda.as_ref().map(|(l, _)| l)
    }

    pub fn lambda_source(&self) -> Option<LambdaSource> {
        self.lambda.as_ref().map(|(_, s)| *s)
    }

    pub fn set_lambda(&mut self, lambda: Coform) {
        assert_eq!(lambda.len(), self.base().rank());
        self.lambda = Some((lambda, LambdaSource::User));
    }

    fn require_lambda(&self) -> Result<&Coform, Error> {
        self.lambda
            .as_ref()
            .map(|(l, _)| l)
            .ok_or(Error::MissingLambda)
    }

    /// Defects of the two defining identities: [Pi,Pi] - 2 xi ^ Pi and
    /// the Lie derivative of Pi along xi.
    pub fn jacobi_defects(&self) -> (Tensor, Tensor) {
        let base = self.base();
        let pipi = base.schouten(self.pi(), self.pi());
        let xi_t = Tensor::from_vector(Variance::Multivector, base.chart_dim(), &self.xi);
        let wedge = xi_t.wedge(self.pi()).unwrap();
        let two = Scalar::from_int(base.chart_dim(), 2);
        let first = pipi.sub(&wedge.scale(&two)).unwrap();
        let second = base.lie_derivative_multivector(&self.xi, self.pi());
        (first, second)
    }

    pub fn is_jacobi(&self) -> bool {
        let (a, b) = self.jacobi_defects();
        a.is_zero() && b.is_zero()
    }

    /// The bracket induced on chart functions.
    pub fn jacobi_bracket(&self, phi: &Scalar, psi: &Scalar) -> Scalar {
        let base = self.base();
        let r = base.rank();
        let d = |f: &Scalar| -> Coform {
            (0..r)
                .map(|i| base.anchor_apply(&base.frame_section(i), f))
                .collect()
        };
        let t1 = self.ctx.pi_eval(&d(phi), &d(psi));
        let t2 = phi * &base.anchor_apply(&self.xi, psi);
        let t3 = psi * &base.anchor_apply(&self.xi, phi);
        &(&t1 + &t2) - &t3
    }

    pub fn sharp_pi_xi(&self, alpha: &Coform) -> Section {
        let mut s = self.ctx.sharp_pi(alpha);
        let f = dot(alpha, &self.xi);
        for (out, x) in s.iter_mut().zip(&self.xi) {
            *out = &*out + &(&f * x);
        }
        s
    }

    pub fn rho_pi_xi(&self, alpha: &Coform) -> ChartVectorField {
        self.base().anchor_of(&self.sharp_pi_xi(alpha))
    }

    fn lie_xi_coform(&self, alpha: &Coform) -> Coform {
        let base = self.base();
        let t = Tensor::from_vector(Variance::Form, base.chart_dim(), alpha);
        let l = base.lie_derivative_form(&self.xi, &t);
        (0..base.rank()).map(|i| l.component(&[i])).collect()
    }

    /// The lambda-deformed bracket on 1-forms.
    pub fn lambda_bracket(&self, alpha: &Coform, beta: &Coform) -> Result<Coform, Error> {
        let lambda = self.require_lambda()?;
        let base = self.base();
        let r = base.rank();
        let mut out = self.ctx.koszul_bracket(alpha, beta);
        let axi = dot(alpha, &self.xi);
        let bxi = dot(beta, &self.xi);
        let lb = self.lie_xi_coform(beta);
        let la = self.lie_xi_coform(alpha);
        let piab = self.ctx.pi_eval(alpha, beta);
        for i in 0..r {
            out[i] = &out[i] + &(&axi * &(&lb[i] - &beta[i]));
            out[i] = &out[i] - &(&bxi * &(&la[i] - &alpha[i]));
            out[i] = &out[i] - &(&piab * &lambda[i]);
        }
        Ok(out)
    }

    fn coframe(&self, i: usize) -> Coform {
        let r = self.base().rank();
        let nv = self.base().chart_dim();
        let mut v = vec![Scalar::zero(nv); r];
        v[i] = Scalar::one(nv);
        v
    }

    /// The skew algebroid of the triple on the coframe.
    pub fn triple_dual_algebroid(&self) -> Result<Algebroid, Error> {
        self.require_lambda()?;
        let r = self.base().rank();
        let anchor: Vec<Vec<Scalar>> = (0..r).map(|i| self.rho_pi_xi(&self.coframe(i))).collect();
        let mut dual = Algebroid::new(r, self.base().chart_dim(), anchor);
        for i in 0..r {
            for j in (i + 1)..r {
                let b = self.lambda_bracket(&self.coframe(i), &self.coframe(j))?;
                dual.set_bracket(i, j, b);
            }
        }
        Ok(dual)
    }

    /// sharp([alpha,beta]) - [sharp alpha, sharp beta]
    /// - Pi(alpha,beta)(xi - sharp(lambda)); zero by the torsion theorem
    /// on a Jacobi pair.
    pub fn triple_torsion_defect(&self, alpha: &Coform, beta: &Coform) -> Result<Section, Error> {
        if !self.is_jacobi() {
            return Err(Error::NotJacobi);
        }
        let lambda = self.require_lambda()?.clone();
        let base = self.base();
        let lhs1 = self.sharp_pi_xi(&self.lambda_bracket(alpha, beta)?);
        let lhs2 = base
            .bracket_sections(&self.sharp_pi_xi(alpha), &self.sharp_pi_xi(beta))
            .expect("sections share the base rank");
        let piab = self.ctx.pi_eval(alpha, beta);
        let sl = self.sharp_pi_xi(&lambda);
        Ok((0..base.rank())
            .map(|k| {
                let rhs = &piab * &(&self.xi[k] - &sl[k]);
                &(&lhs1[k] - &lhs2[k]) - &rhs
            })
            .collect())
    }

    /// Whether xi - sharp(lambda) is killed by the anchor, the
    /// hypothesis of the almost-Lie corollary.
    pub fn kernel_criterion(&self) -> Result<bool, Error> {
        let lambda = self.require_lambda()?.clone();
        let sl = self.sharp_pi_xi(&lambda);
        let diff: Section = self.xi.iter().zip(&sl).map(|(x, y)| x - y).collect();
        Ok(self.base().anchor_of(&diff).iter().all(|v| v.is_zero()))
    }

    /// Scalar of the Lie derivative of Pi along xi on a coform pair.
    fn lie_xi_pi_eval(&self, alpha: &Coform, beta: &Coform) -> Scalar {
        self.base()
            .lie_derivative_multivector(&self.xi, self.pi())
            .eval_on_forms(&[alpha, beta])
    }

    /// The deformation of the Koszul bracket by xi:
    /// L_xi([a,b]) - [L_xi a, b] - [a, L_xi b].
    fn lie_xi_of_koszul(&self, alpha: &Coform, beta: &Coform) -> Coform {
        let t1 = self.lie_xi_coform(&self.ctx.koszul_bracket(alpha, beta));
        let t2 = self.ctx.koszul_bracket(&self.lie_xi_coform(alpha), beta);
        let t3 = self.ctx.koszul_bracket(alpha, &self.lie_xi_coform(beta));
        t1.iter()
            .zip(&t2)
            .zip(&t3)
            .map(|((a, b), c)| &(a - b) - c)
            .collect()
    }

    /// Direct Jacobiator of the lambda bracket and the closed-form
    /// right-hand side it must equal on a Lie base.
    pub fn triple_jacobiator(
        &self,
        alpha: &Coform,
        beta: &Coform,
        gamma: &Coform,
    ) -> Result<(Coform, Coform), Error> {
        if self.base().classify() != crate::algebroid::Classification::Lie {
            return Err(Error::NotLie);
        }
        let lambda = self.require_lambda()?.clone();
        let base = self.base();
        let r = base.rank();
        let nv = base.chart_dim();
        let cyc = [(alpha, beta, gamma), (beta, gamma, alpha), (gamma, alpha, beta)];

        let mut direct = vec![Scalar::zero(nv); r];
        for (a, b, c) in &cyc {
            let t = self.lambda_bracket(&self.lambda_bracket(a, b)?, c)?;
            for i in 0..r {
                direct[i] = &direct[i] + &t[i];
            }
        }

        // W = (1/2)[Pi,Pi] - xi ^ Pi and its companion 2 xi ^ Pi - [Pi,Pi]
        let pipi = base.schouten(self.pi(), self.pi());
        let xi_t = Tensor::from_vector(Variance::Multivector, nv, &self.xi);
        let wedge = xi_t.wedge(self.pi()).unwrap();
        let half = Scalar::from_int(nv, 1).div(&Scalar::from_int(nv, 2)).unwrap();
        let w = pipi.scale(&half).sub(&wedge).unwrap();
        let two = Scalar::from_int(nv, 2);
        let comp = wedge.scale(&two).sub(&pipi).unwrap();

        let mut rhs = Tensor::zero(Variance::Form, 1, r, nv);
        // cyclic Lie derivative along W(a, b, .)
        for (a, b, c) in &cyc {
            let sec: Section = {
                let t = w.contract(&[a, b]);
                (0..r).map(|i| t.component(&[i])).collect()
            };
            let ct = Tensor::from_vector(Variance::Form, nv, c);
            rhs = rhs.add(&base.lie_derivative_form(&sec, &ct)).unwrap();
        }
        // scalar multiple of lambda
        let mut coeff = comp.eval_on_forms(&[alpha, beta, gamma]);
        for (a, b, c) in &cyc {
            coeff = &coeff + &(&dot(c, &self.xi) * &self.lie_xi_pi_eval(a, b));
        }
        let lam_t = Tensor::from_vector(Variance::Form, nv, &lambda);
        rhs = rhs.add(&lam_t.scale(&coeff)).unwrap();
        // exact term
        rhs = rhs
            .add(&base.d_scalar(&comp.eval_on_forms(&[alpha, beta, gamma])))
            .unwrap();
        // deformation of the Koszul bracket by xi
        for (a, b, c) in &cyc {
            let def = self.lie_xi_of_koszul(a, b);
            let def_t = Tensor::from_vector(Variance::Form, nv, &def);
            rhs = rhs.sub(&def_t.scale(&dot(c, &self.xi))).unwrap();
        }
        // (L_xi c - c) scaled by L_xi Pi(a, b)
        for (a, b, c) in &cyc {
            let lc = self.lie_xi_coform(c);
            let diff: Coform = lc.iter().zip(*c).map(|(x, y)| x - y).collect();
            let diff_t = Tensor::from_vector(Variance::Form, nv, &diff);
            rhs = rhs.add(&diff_t.scale(&self.lie_xi_pi_eval(a, b))).unwrap();
        }
        // Pi(a,b) (L_xi c - [lambda, c])
        for (a, b, c) in &cyc {
            let lc = self.lie_xi_coform(c);
            let bc = self.lambda_bracket(&lambda, c)?;
            let diff: Coform = lc.iter().zip(&bc).map(|(x, y)| x - y).collect();
            let diff_t = Tensor::from_vector(Variance::Form, nv, &diff);
            rhs = rhs.add(&diff_t.scale(&self.ctx.pi_eval(a, b))).unwrap();
        }
        let rhs_v: Coform = (0..r).map(|i| rhs.component(&[i])).collect();
        Ok((direct, rhs_v))
    }

    /// Whether L_xi alpha = [lambda, alpha] on the whole coframe; the
    /// sufficient condition for the triple dual to be Lie.
    pub fn corollary_condition(&self) -> Result<bool, Error> {
        let lambda = self.require_lambda()?.clone();
        for i in 0..self.base().rank() {
            let a = self.coframe(i);
            let lhs = self.lie_xi_coform(&a);
            let rhs = self.lambda_bracket(&lambda, &a)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Derives the 1-form of the triple from a metric and stores it:
    /// g(xi,xi) flat(xi) - flat(J xi).
    pub fn lambda_from_metric(&mut self, g: &Metric) -> Coform {
        let (j, _) = riemann::j_endomorphisms(&self.ctx, g);
        let gxx = g.eval(&self.xi, &self.xi);
        let fxi = g.flat(&self.xi);
        let jxi = linalg::mat_vec(&j, &self.xi);
        let fjxi = g.flat(&jxi);
        let lambda: Coform = fxi
            .iter()
            .zip(&fjxi)
            .map(|(a, b)| &(&gxx * a) - b)
            .collect();
        self.lambda = Some((lambda.clone(), LambdaSource::Metric));
        lambda
    }

    /// Levi-Civita connection of the cometric on the triple dual.
    pub fn triple_levi_civita(&self, g: &Metric) -> Result<(Connection, Metric), Error> {
        let dual = self.triple_dual_algebroid()?;
        let dual_metric = Metric::new(dual.clone(), g.cometric_matrix(), g.riemannian())?;
        Ok((riemann::levi_civita(&dual, &dual_metric), dual_metric))
    }

    /// Contravariant derivative of the bivector over the triple dual,
    /// direction in the first slot.
    pub fn d_pi_triple(&self, g: &Metric) -> Result<Dense, Error> {
        let (conn, _) = self.triple_levi_civita(g)?;
        let pi_as_form = Tensor::from_components(
            Variance::Form,
            2,
            self.pi().rank(),
            self.pi().nvars(),
            self.pi().components().map(|(i, c)| (i.clone(), c.clone())),
        );
        Ok(conn.derivative_form(&pi_as_form))
    }

    /// Defect of the first compatibility identity on a coframe triple.
    pub fn compat_defect(
        &self,
        g: &Metric,
        dpi: &Dense,
        i: usize,
        j: usize,
        k: usize,
    ) -> Scalar {
        let nv = self.base().chart_dim();
        let half = Scalar::from_int(nv, 1).div(&Scalar::from_int(nv, 2)).unwrap();
        let (_, jstar) = riemann::j_endomorphisms(&self.ctx, g);
        let co = g.cometric_matrix();
        let a = self.coframe(i);
        let b = self.coframe(j);
        let c = self.coframe(k);
        let jb = linalg::mat_vec(&jstar, &b);
        let jc = linalg::mat_vec(&jstar, &c);
        let mut rhs = &dot(&c, &self.xi) * &self.ctx.pi_eval(&a, &b);
        rhs = &rhs - &(&dot(&b, &self.xi) * &self.ctx.pi_eval(&a, &c));
        let gab = {
            let s = linalg::mat_vec(&co, &b);
            dot(&a, &s)
        };
        let gac = {
            let s = linalg::mat_vec(&co, &c);
            dot(&a, &s)
        };
        rhs = &rhs - &(&dot(&jc, &self.xi) * &gab);
        rhs = &rhs + &(&dot(&jb, &self.xi) * &gac);
        dpi.get(&[i, j, k]) - &(&half * &rhs)
    }

    /// Defect of the endomorphism form of the compatibility identity:
    /// (D_alpha Jstar) beta minus its closed form, on a coframe pair.
    pub fn compat_endo_defect(
        &self,
        g: &Metric,
        conn: &Connection,
        i: usize,
        j: usize,
    ) -> Coform {
        let nv = self.base().chart_dim();
        let r = self.base().rank();
        let half = Scalar::from_int(nv, 1).div(&Scalar::from_int(nv, 2)).unwrap();
        let (_, jstar) = riemann::j_endomorphisms(&self.ctx, g);
        let djstar = conn.derivative_endo(&jstar);
        let a = self.coframe(i);
        let b = self.coframe(j);
        let co = g.cometric_matrix();
        let fxi = g.flat(&self.xi);
        let ja = linalg::mat_vec(&jstar, &a);
        let jb = linalg::mat_vec(&jstar, &b);
        let jfxi = linalg::mat_vec(&jstar, &fxi);
        let piab = self.ctx.pi_eval(&a, &b);
        let bxi = dot(&b, &self.xi);
        let gab = {
            let s = linalg::mat_vec(&co, &b);
            dot(&a, &s)
        };
        let jbxi = dot(&jb, &self.xi);
        (0..r)
            .map(|k| {
                let lhs = djstar[i][k][j].clone();
                let mut rhs = &piab * &fxi[k];
                rhs = &rhs - &(&bxi * &ja[k]);
                rhs = &rhs - &(&gab * &jfxi[k]);
                rhs = &rhs + &(&jbxi * &a[k]);
                &lhs - &(&half * &rhs)
            })
            .collect()
    }

    /// Compatibility of the triple: the first identity holds on all
    /// coframe triples, cross-checked against the endomorphism form.
    pub fn is_triple_compatible(&self, g: &Metric) -> Result<bool, Error> {
        let dpi = self.d_pi_triple(g)?;
        let r = self.base().rank();
        let mut ok = true;
        'outer: for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    if !self.compat_defect(g, &dpi, i, j, k).is_zero() {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        let (conn, _) = self.triple_levi_civita(g)?;
        let mut endo_ok = true;
        'outer2: for i in 0..r {
            for j in 0..r {
                if self
                    .compat_endo_defect(g, &conn, i, j)
                    .iter()
                    .any(|v| !v.is_zero())
                {
                    endo_ok = false;
                    break 'outer2;
                }
            }
        }
        debug_assert_eq!(ok, endo_ok);
        Ok(ok && endo_ok)
    }

    /// Under the hypotheses L_xi Pi = 0 and triple compatibility, being
    /// Jacobi is equivalent to (xi - sharp_pi(lambda)) ^ Pi = 0; both
    /// booleans are returned so a discrepancy is visible.
    pub fn compatibility_jacobi_criterion(&mut self, g: &Metric) -> Result<(bool, bool), Error> {
        let (_, lxi) = self.jacobi_defects();
        if !lxi.is_zero() {
            return Err(Error::HypothesisFailed(
                "the bivector is not invariant along the section".into(),
            ));
        }
        self.lambda_from_metric(g);
        if !self.is_triple_compatible(g)? {
            return Err(Error::HypothesisFailed(
                "the triple is not compatible with the metric".into(),
            ));
        }
        let lambda = self.require_lambda()?.clone();
        let sl = self.ctx.sharp_pi(&lambda);
        let diff: Section = self.xi.iter().zip(&sl).map(|(x, y)| x - y).collect();
        let nv = self.base().chart_dim();
        let diff_t = Tensor::from_vector(Variance::Multivector, nv, &diff);
        let wedge_zero = diff_t.wedge(self.pi()).unwrap().is_zero();
        Ok((self.is_jacobi(), wedge_zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::testkit::{heisenberg, tangent_plane};
    use crate::algebroid::Classification;
    use crate::poisson::pi_from_nondegenerate_form;

    fn heis_contact() -> JacobiContext {
        let h = heisenberg();
        let mut pi = Tensor::zero(Variance::Multivector, 2, 3, 0);
        pi.add_component(&[0, 1], Scalar::from_int(0, -1));
        let xi = h.frame_section(2);
        JacobiContext::new(h, pi, xi).unwrap()
    }

    fn cof(r: usize, nv: usize, i: usize) -> Coform {
        let mut v = vec![Scalar::zero(nv); r];
        v[i] = Scalar::one(nv);
        v
    }

    #[test]
    fn jacobi_predicate() {
        let j = heis_contact();
        assert!(j.is_jacobi());

        // wrong section breaks the wedge identity
        let h = heisenberg();
        let mut pi = Tensor::zero(Variance::Multivector, 2, 3, 0);
        pi.add_component(&[0, 1], Scalar::from_int(0, -1));
        let bad = JacobiContext::new(h.clone(), pi.clone(), h.frame_section(0)).unwrap();
        assert!(!bad.is_jacobi());

        // a Poisson bivector with zero section is Jacobi
        let a = tangent_plane();
        let omega = Tensor::basis(Variance::Form, 2, 2, 0)
            .wedge(&Tensor::basis(Variance::Form, 2, 2, 1))
            .unwrap();
        let ctx = pi_from_nondegenerate_form(&a, &omega).unwrap();
        let p = JacobiContext::new(a.clone(), ctx.pi().clone(), a.zero_section()).unwrap();
        assert!(p.is_jacobi());
    }

    #[test]
    fn jacobi_bracket_examples() {
        // constants bracket to zero over a point
        let j = heis_contact();
        let two = Scalar::from_int(0, 2);
        let five = Scalar::from_int(0, 5);
        assert!(j.jacobi_bracket(&two, &five).is_zero());

        // canonical plane: {x,y} = Pi(dx,dy) = 1
        let a = tangent_plane();
        let omega = Tensor::basis(Variance::Form, 2, 2, 0)
            .wedge(&Tensor::basis(Variance::Form, 2, 2, 1))
            .unwrap();
        let ctx = pi_from_nondegenerate_form(&a, &omega).unwrap();
        let p = JacobiContext::new(a.clone(), ctx.pi().clone(), a.zero_section()).unwrap();
        let x = Scalar::var(2, 0);
        let y = Scalar::var(2, 1);
        assert_eq!(p.jacobi_bracket(&x, &y), Scalar::one(2));
        assert!(p.jacobi_bracket(&x, &x).is_zero());
    }

    #[test]
    fn sharp_pi_xi_examples() {
        let j = heis_contact();
        // e^3 hits the section itself
        assert_eq!(j.sharp_pi_xi(&cof(3, 0, 2)), j.base().frame_section(2));
        // e^1 sees no xi contribution
        let mut want = vec![Scalar::zero(0); 3];
        want[1] = Scalar::from_int(0, -1);
        assert_eq!(j.sharp_pi_xi(&cof(3, 0, 0)), want);
    }

    #[test]
    fn lambda_bracket_reduces_to_koszul() {
        let a = tangent_plane();
        let omega = Tensor::basis(Variance::Form, 2, 2, 0)
            .wedge(&Tensor::basis(Variance::Form, 2, 2, 1))
            .unwrap();
        let ctx = pi_from_nondegenerate_form(&a, &omega).unwrap();
        let mut p = JacobiContext::new(a.clone(), ctx.pi().clone(), a.zero_section()).unwrap();
        assert!(matches!(
            p.lambda_bracket(&cof(2, 2, 0), &cof(2, 2, 1)),
            Err(Error::MissingLambda)
        ));
        p.set_lambda(vec![Scalar::zero(2); 2]);
        for i in 0..2 {
            for k in 0..2 {
                assert_eq!(
                    p.lambda_bracket(&cof(2, 2, i), &cof(2, 2, k)).unwrap(),
                    ctx.koszul_bracket(&cof(2, 2, i), &cof(2, 2, k))
                );
            }
        }
        // triple dual then coincides with the plain dual
        assert_eq!(p.triple_dual_algebroid().unwrap(), ctx.dual_algebroid());
    }

    #[test]
    fn lambda_bracket_contact_example() {
        let mut j = heis_contact();
        j.set_lambda(cof(3, 0, 2));
        // [e^1,e^3] = -e^1 + e^1 - 0 = 0
        let b = j.lambda_bracket(&cof(3, 0, 0), &cof(3, 0, 2)).unwrap();
        assert!(b.iter().all(|s| s.is_zero()));
        // antisymmetry on equal arguments
        let d = j.lambda_bracket(&cof(3, 0, 1), &cof(3, 0, 1)).unwrap();
        assert!(d.iter().all(|s| s.is_zero()));
        // [e^1,e^2] = [e^1,e^2]_Pi - Pi(e^1,e^2) lambda = e^3
        let b12 = j.lambda_bracket(&cof(3, 0, 0), &cof(3, 0, 1)).unwrap();
        assert_eq!(b12, cof(3, 0, 2));
    }

    #[test]
    fn triple_dual_is_lie_and_transported() {
        let mut j = heis_contact();
        j.set_lambda(cof(3, 0, 2));
        let dual = j.triple_dual_algebroid().unwrap();
        assert_eq!(dual.classify(), Classification::Lie);
        // sharp is a morphism onto the base bracket
        for i in 0..3 {
            for k in 0..3 {
                let lhs = j.sharp_pi_xi(&j.lambda_bracket(&cof(3, 0, i), &cof(3, 0, k)).unwrap());
                let rhs = j
                    .base()
                    .bracket_sections(
                        &j.sharp_pi_xi(&cof(3, 0, i)),
                        &j.sharp_pi_xi(&cof(3, 0, k)),
                    )
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn triple_torsion_theorem() {
        let mut j = heis_contact();
        j.set_lambda(cof(3, 0, 2));
        // sharp(lambda) recovers the section
        assert_eq!(j.sharp_pi_xi(&cof(3, 0, 2)), j.base().frame_section(2));
        for i in 0..3 {
            for k in 0..3 {
                let d = j.triple_torsion_defect(&cof(3, 0, i), &cof(3, 0, k)).unwrap();
                assert!(d.iter().all(|s| s.is_zero()));
            }
        }
        assert!(j.kernel_criterion().unwrap());

        // non-Jacobi context refuses the theorem
        let h = heisenberg();
        let mut pi = Tensor::zero(Variance::Multivector, 2, 3, 0);
        pi.add_component(&[0, 1], Scalar::from_int(0, -1));
        let mut bad = JacobiContext::new(h.clone(), pi, h.frame_section(0)).unwrap();
        bad.set_lambda(cof(3, 0, 2));
        assert!(matches!(
            bad.triple_torsion_defect(&cof(3, 0, 0), &cof(3, 0, 1)),
            Err(Error::NotJacobi)
        ));
    }

    #[test]
    fn triple_jacobiator_direct_equals_rhs() {
        // arbitrary lambda and a non-Jacobi bivector on a Lie base:
        // the theorem is unconditional in (Pi, xi, lambda)
        let h = heisenberg();
        let mut pi = Tensor::zero(Variance::Multivector, 2, 3, 0);
        pi.add_component(&[0, 1], Scalar::from_int(0, -1));
        pi.add_component(&[1, 2], Scalar::from_int(0, 2));
        let mut j = JacobiContext::new(h.clone(), pi, h.frame_section(0)).unwrap();
        let mut lambda = cof(3, 0, 1);
        lambda[2] = Scalar::from_int(0, 3);
        j.set_lambda(lambda);
        let (direct, rhs) = j
            .triple_jacobiator(&cof(3, 0, 0), &cof(3, 0, 1), &cof(3, 0, 2))
            .unwrap();
        assert_eq!(direct, rhs);
    }

    #[test]
    fn triple_jacobiator_contact_vanishes() {
        let mut j = heis_contact();
        j.set_lambda(cof(3, 0, 2));
        assert!(j.corollary_condition().unwrap());
        let (direct, rhs) = j
            .triple_jacobiator(&cof(3, 0, 0), &cof(3, 0, 1), &cof(3, 0, 2))
            .unwrap();
        assert!(direct.iter().all(|s| s.is_zero()));
        assert!(rhs.iter().all(|s| s.is_zero()));
    }

    #[test]
    fn lambda_from_identity_metric() {
        let mut j = heis_contact();
        let g = Metric::identity(j.base().clone());
        let lambda = j.lambda_from_metric(&g);
        assert_eq!(lambda, cof(3, 0, 2));
        assert_eq!(j.lambda_source(), Some(LambdaSource::Metric));
    }

    #[test]
    fn triple_connection_reduces_when_xi_zero() {
        let a = tangent_plane();
        let omega = Tensor::basis(Variance::Form, 2, 2, 0)
            .wedge(&Tensor::basis(Variance::Form, 2, 2, 1))
            .unwrap();
        let ctx = pi_from_nondegenerate_form(&a, &omega).unwrap();
        let mut p = JacobiContext::new(a.clone(), ctx.pi().clone(), a.zero_section()).unwrap();
        let g = Metric::identity(a.clone());
        let lambda = p.lambda_from_metric(&g);
        assert!(lambda.iter().all(|s| s.is_zero()));
        let (tconn, _) = p.triple_levi_civita(&g).unwrap();
        let (cconn, _) = riemann::contravariant_levi_civita(&ctx, &g);
        for i in 0..2 {
            for k in 0..2 {
                assert_eq!(tconn.gamma(i, k), cconn.gamma(i, k));
            }
        }
        // flat plane: all symbols vanish
        for i in 0..2 {
            for k in 0..2 {
                assert!(tconn.gamma(i, k).iter().all(|s| s.is_zero()));
            }
        }
    }

    #[test]
    fn triple_compatibility_flat_kaehler() {
        let a = tangent_plane();
        let omega = Tensor::basis(Variance::Form, 2, 2, 0)
            .wedge(&Tensor::basis(Variance::Form, 2, 2, 1))
            .unwrap();
        let ctx = pi_from_nondegenerate_form(&a, &omega).unwrap();
        let mut p = JacobiContext::new(a.clone(), ctx.pi().clone(), a.zero_section()).unwrap();
        let g = Metric::identity(a.clone());
        p.lambda_from_metric(&g);
        assert!(p.is_triple_compatible(&g).unwrap());
        // with zero section the predicate is plain bivector-metric
        // compatibility
        assert!(riemann::is_riemann_poisson(&ctx, &g));
        let (ok, wedge) = p.compatibility_jacobi_criterion(&g).unwrap();
        assert!(ok && wedge);
    }

    #[test]
    fn cyclic_compat_sum_is_wedge() {
        // whenever the compatibility identity holds, its cyclic sum
        // collapses to (xi ^ Pi)(coframe triple); on the flat plane with
        // zero section both sides vanish, checked through the defects
        let a = tangent_plane();
        let omega = Tensor::basis(Variance::Form, 2, 2, 0)
            .wedge(&Tensor::basis(Variance::Form, 2, 2, 1))
            .unwrap();
        let ctx = pi_from_nondegenerate_form(&a, &omega).unwrap();
        let mut p = JacobiContext::new(a.clone(), ctx.pi().clone(), a.zero_section()).unwrap();
        let g = Metric::identity(a.clone());
        p.lambda_from_metric(&g);
        let dpi = p.d_pi_triple(&g).unwrap();
        let xi_t = Tensor::from_vector(Variance::Multivector, 2, p.xi());
        let wedge = xi_t.wedge(p.pi()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let cyc = &(dpi.get(&[i, j, k]) + dpi.get(&[j, k, i])) + dpi.get(&[k, i, j]);
                    let w = wedge.eval_on_forms(&[&cof(2, 2, i), &cof(2, 2, j), &cof(2, 2, k)]);
                    assert_eq!(cyc, w);
                }
            }
        }
    }

    #[test]
    fn contact_criterion_facts_are_consistent() {
        // the identity-metric contact triple is Jacobi with a nonzero
        // wedge (xi - sharp_pi(lambda)) ^ Pi, so by the criterion
        // theorem its hypotheses cannot all hold: the compatibility
        // check must fail for this metric
        let mut j = heis_contact();
        let g = Metric::identity(j.base().clone());
        let lambda = j.lambda_from_metric(&g);
        assert!(j.is_jacobi());
        let sl = j.bivector().sharp_pi(&lambda);
        let diff: Section = j.xi().iter().zip(&sl).map(|(x, y)| x - y).collect();
        let diff_t = Tensor::from_vector(Variance::Multivector, 0, &diff);
        let wedge = diff_t.wedge(j.pi()).unwrap();
        assert!(!wedge.is_zero());
        match j.compatibility_jacobi_criterion(&g) {
            Err(Error::HypothesisFailed(_)) => {}
            other => panic!("expected a failed hypothesis, got {other:?}"),
        }
        assert!(!j.is_triple_compatible(&g).unwrap());
    }
}
