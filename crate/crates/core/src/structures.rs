//! Geometric structures carried by an algebroid frame: odd-rank form pairs
//! with their distinguished section, contact forms, conformally closed
//! nondegenerate pairs, and metric contact data, together with checkers for
//! the identities tying each of them to the bivector calculus.

use crate::algebroid::{Algebroid, Section, Tensor, Variance};
use crate::coeff::Scalar;
use crate::jacobi::JacobiContext;
use crate::linalg::{self, Matrix};
use crate::poisson::{pi_from_nondegenerate_form, BivectorContext, Coform};
use crate::riemann::{self, levi_civita, Dense, Metric};
use crate::Error;

fn dot(alpha: &[Scalar], a: &[Scalar]) -> Scalar {
    let nv = alpha.first().map(|s| s.nvars()).unwrap_or(0);
    alpha
        .iter()
        .zip(a)
        .fold(Scalar::zero(nv), |acc, (x, y)| &acc + &(x * y))
}

fn coframe(r: usize, nv: usize, i: usize) -> Coform {
    let mut v = vec![Scalar::zero(nv); r];
    v[i] = Scalar::one(nv);
    v
}

fn half(nv: usize) -> Scalar {
    Scalar::from_int(nv, 1)
        .div(&Scalar::from_int(nv, 2))
        .unwrap()
}

fn transpose(m: &Matrix) -> Matrix {
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|i| (0..rows).map(|j| m[j][i].clone()).collect())
        .collect()
}

/// Raising map of the pair on a single coform: sharp of the bivector plus
/// the pairing with the section times the section.
fn sharp_with_section(ctx: &BivectorContext, xi: &Section, alpha: &Coform) -> Section {
    let mut s = ctx.sharp_pi(alpha);
    let f = dot(alpha, xi);
    for (out, x) in s.iter_mut().zip(xi) {
        *out = &*out + &(&f * x);
    }
    s
}

/// An odd-rank pair of a nondegenerate-in-the-top-degree 2-form and a
/// 1-form, with the distinguished section and bivector it induces.
pub struct CosymplecticPair {
    base: Algebroid,
    omega: Tensor,
    eta: Coform,
    reeb: Section,
    fundamental_pi: Tensor,
    flat_rows: Vec<Coform>,
    sharp_cols: Vec<Section>,
}

impl CosymplecticPair {
    pub fn base(&self) -> &Algebroid {
        &self.base
    }

    pub fn omega(&self) -> &Tensor {
        &self.omega
    }

    pub fn eta(&self) -> &Coform {
        &self.eta
    }

    pub fn reeb(&self) -> &Section {
        &self.reeb
    }

    pub fn fundamental_pi(&self) -> &Tensor {
        &self.fundamental_pi
    }

    /// Lowering map a -> -i_a omega + eta(a) eta on a section.
    pub fn flat(&self, a: &Section) -> Coform {
        let r = self.base.rank();
        (0..r)
            .map(|k| {
                a.iter()
                    .zip(&self.flat_rows)
                    .fold(self.base.zero_scalar(), |acc, (c, row)| {
                        &acc + &(c * &row[k])
                    })
            })
            .collect()
    }

    /// Inverse of the lowering map on a coform.
    pub fn sharp(&self, alpha: &Coform) -> Section {
        let r = self.base.rank();
        (0..r)
            .map(|k| {
                alpha
                    .iter()
                    .zip(&self.sharp_cols)
                    .fold(self.base.zero_scalar(), |acc, (c, col)| {
                        &acc + &(c * &col[k])
                    })
            })
            .collect()
    }

    /// The induced bivector-with-section context.
    pub fn jacobi_context(&self) -> JacobiContext {
        JacobiContext::new(
            self.base.clone(),
            self.fundamental_pi.clone(),
            self.reeb.clone(),
        )
        .expect("the pair carries a valid degree-2 multivector")
    }
}

/// Builds the pair from an odd-rank frame: solves the linear system for the
/// distinguished section, inverts the lowering map, and derives the
/// bivector whose raising map agrees with the one of the pair.
pub fn make_cosymplectic(
    a: &Algebroid,
    omega: &Tensor,
    eta: &Coform,
) -> Result<CosymplecticPair, Error> {
    let r = a.rank();
    let nv = a.chart_dim();
    if r % 2 == 0 {
        return Err(Error::EvenRank);
    }
    let m = (r - 1) / 2;
    let eta_t = Tensor::from_vector(Variance::Form, nv, eta);
    let mut top = eta_t.clone();
    for _ in 0..m {
        top = top.wedge(omega)?;
    }
    let all: Vec<usize> = (0..r).collect();
    if top.component(&all).is_zero() {
        return Err(Error::DegenerateTopForm);
    }

    // reeb: omega(reeb, e_j) = 0 for all j and eta(reeb) = 1
    let mut rows: Matrix = (0..r)
        .map(|j| {
            (0..r)
                .map(|i| {
                    omega.eval_on_sections(&[&a.frame_section(i), &a.frame_section(j)])
                })
                .collect()
        })
        .collect();
    rows.push(eta.clone());
    let mut rhs = vec![Scalar::zero(nv); r];
    rhs.push(Scalar::one(nv));
    let reeb = linalg::solve(&rows, &rhs)?;

    // lowering map rows and its inverse columns
    let flat_rows: Vec<Coform> = (0..r)
        .map(|i| {
            let ia = omega.interior(&a.frame_section(i)).unwrap();
            (0..r)
                .map(|k| &(-&ia.component(&[k])) + &(&eta[i] * &eta[k]))
                .collect()
        })
        .collect();
    let flat_t = transpose(&flat_rows);
    let sharp_cols: Vec<Section> = (0..r)
        .map(|k| linalg::solve(&flat_t, &coframe(r, nv, k)))
        .collect::<Result<_, _>>()?;

    let mut pi = Tensor::zero(Variance::Multivector, 2, r, nv);
    for i in 0..r {
        for j in (i + 1)..r {
            let v = omega.eval_on_sections(&[&sharp_cols[i], &sharp_cols[j]]);
            pi.add_component(&[i, j], v);
        }
    }

    let pair = CosymplecticPair {
        base: a.clone(),
        omega: omega.clone(),
        eta: eta.clone(),
        reeb,
        fundamental_pi: pi,
        flat_rows,
        sharp_cols,
    };
    // the raising map of the derived bivector-with-section agrees with the
    // inverse of the lowering map of the pair
    debug_assert!({
        let ctx = BivectorContext::new(a.clone(), pair.fundamental_pi.clone()).unwrap();
        (0..r).all(|i| {
            sharp_with_section(&ctx, &pair.reeb, &coframe(r, nv, i)) == pair.sharp_cols[i]
        })
    });
    Ok(pair)
}

/// Defects of the two transported identities relating the derived pair to
/// the form data, one value per strictly increasing frame triple and pair;
/// both lists vanish identically.
pub fn cosymplectic_identity_defects(p: &CosymplecticPair) -> (Vec<Scalar>, Vec<Scalar>) {
    let a = &p.base;
    let nv = a.chart_dim();
    let eta_t = Tensor::from_vector(Variance::Form, nv, &p.eta);
    let d_eta = a.d_rho(&eta_t);
    let d_omega = a.d_rho(&p.omega);
    let l_omega = a.lie_derivative_form(&p.reeb, &p.omega);
    let l_eta = a.lie_derivative_form(&p.reeb, &eta_t);
    let inner = d_eta.sub(&p.omega).unwrap().sub(&l_omega).unwrap();
    let rhs3 = d_omega.add(&eta_t.wedge(&inner).unwrap()).unwrap();
    let rhs2 = eta_t.wedge(&l_eta).unwrap().sub(&l_omega).unwrap();
    pair_identity_defects(a, &p.fundamental_pi, &p.reeb, &p.flat_rows, &rhs3, &rhs2)
}

/// Shared evaluator for the transported identities of a 2-form pair: the
/// cubic and quadratic defects of the derived bivector against the given
/// right-hand sides, under the transport alpha = flat(a).
fn pair_identity_defects(
    a: &Algebroid,
    pi: &Tensor,
    xi: &Section,
    flat_rows: &[Coform],
    rhs3: &Tensor,
    rhs2: &Tensor,
) -> (Vec<Scalar>, Vec<Scalar>) {
    let r = a.rank();
    let nv = a.chart_dim();
    let xi_t = Tensor::from_vector(Variance::Multivector, nv, xi);
    let lhs3 = a
        .schouten(pi, pi)
        .scale(&half(nv))
        .sub(&xi_t.wedge(pi).unwrap())
        .unwrap();
    let lhs2 = a.lie_derivative_multivector(xi, pi);
    let triples = Tensor::index_tuples(r, 3)
        .into_iter()
        .map(|idx| {
            let forms: Vec<&Coform> = idx.iter().map(|&i| &flat_rows[i]).collect();
            let frames: Vec<Section> = idx.iter().map(|&i| a.frame_section(i)).collect();
            let refs: Vec<&Section> = frames.iter().collect();
            &lhs3.eval_on_forms(&forms) - &rhs3.eval_on_sections(&refs)
        })
        .collect();
    let pairs = Tensor::index_tuples(r, 2)
        .into_iter()
        .map(|idx| {
            let forms: Vec<&Coform> = idx.iter().map(|&i| &flat_rows[i]).collect();
            let frames: Vec<Section> = idx.iter().map(|&i| a.frame_section(i)).collect();
            let refs: Vec<&Section> = frames.iter().collect();
            &lhs2.eval_on_forms(&forms) - &rhs2.eval_on_sections(&refs)
        })
        .collect();
    (triples, pairs)
}

/// Whether the 1-form wedged with the top power of its differential is
/// nondegenerate on an odd-rank frame.
pub fn is_contact(a: &Algebroid, eta: &Coform) -> Result<bool, Error> {
    let r = a.rank();
    if r % 2 == 0 {
        return Err(Error::EvenRank);
    }
    let nv = a.chart_dim();
    let eta_t = Tensor::from_vector(Variance::Form, nv, eta);
    let omega = a.d_rho(&eta_t);
    let mut top = eta_t;
    for _ in 0..(r - 1) / 2 {
        top = top.wedge(&omega)?;
    }
    let all: Vec<usize> = (0..r).collect();
    Ok(!top.component(&all).is_zero())
}

/// The bivector-with-section induced by a contact form; on a Lie base the
/// induced pair satisfies both defining identities.
pub fn contact_to_jacobi(a: &Algebroid, eta: &Coform) -> Result<JacobiContext, Error> {
    if !is_contact(a, eta)? {
        return Err(Error::NotContact);
    }
    let eta_t = Tensor::from_vector(Variance::Form, a.chart_dim(), eta);
    let omega = a.d_rho(&eta_t);
    let pair = make_cosymplectic(a, &omega, eta)?;
    let ctx = pair.jacobi_context();
    debug_assert!(
        a.classify() != crate::algebroid::Classification::Lie || ctx.is_jacobi()
    );
    Ok(ctx)
}

/// A nondegenerate 2-form with a reference 1-form, carrying the derived
/// bivector and the section raised from the reference form.
pub struct LcsPair {
    ctx: BivectorContext,
    omega: Tensor,
    theta: Coform,
    xi: Section,
}

impl LcsPair {
    pub fn base(&self) -> &Algebroid {
        self.ctx.base()
    }

    pub fn omega(&self) -> &Tensor {
        &self.omega
    }

    pub fn theta(&self) -> &Coform {
        &self.theta
    }

    pub fn pi(&self) -> &Tensor {
        self.ctx.pi()
    }

    pub fn xi(&self) -> &Section {
        &self.xi
    }

    pub fn bivector(&self) -> &BivectorContext {
        &self.ctx
    }

    pub fn jacobi_context(&self) -> JacobiContext {
        JacobiContext::new(self.base().clone(), self.pi().clone(), self.xi.clone())
            .expect("the pair carries a valid degree-2 multivector")
    }
}

/// Builds the pair from a nondegenerate 2-form and a reference 1-form.
pub fn make_lcs(a: &Algebroid, omega: &Tensor, theta: &Coform) -> Result<LcsPair, Error> {
    let ctx = pi_from_nondegenerate_form(a, omega)?;
    let xi = ctx.sharp_pi(theta);
    Ok(LcsPair {
        ctx,
        omega: omega.clone(),
        theta: theta.clone(),
        xi,
    })
}

/// Whether the conformal closedness identity and the closedness of the
/// reference form both hold.
pub fn is_lcs(p: &LcsPair) -> bool {
    let a = p.base();
    let nv = a.chart_dim();
    let theta_t = Tensor::from_vector(Variance::Form, nv, &p.theta);
    let first = a
        .d_rho(&p.omega)
        .add(&theta_t.wedge(&p.omega).unwrap())
        .unwrap();
    first.is_zero() && a.d_rho(&theta_t).is_zero()
}

/// Defects of the two transported identities relating the derived pair to
/// the form data; both lists vanish identically.
pub fn lcs_identity_defects(p: &LcsPair) -> (Vec<Scalar>, Vec<Scalar>) {
    let a = p.base();
    let r = a.rank();
    let nv = a.chart_dim();
    let theta_t = Tensor::from_vector(Variance::Form, nv, &p.theta);
    let rhs3 = a
        .d_rho(&p.omega)
        .add(&theta_t.wedge(&p.omega).unwrap())
        .unwrap();
    let rhs2 = a.lie_derivative_form(&p.xi, &p.omega).neg();
    let flat_rows: Vec<Coform> = (0..r)
        .map(|i| {
            let ia = p.omega.interior(&a.frame_section(i)).unwrap();
            (0..r).map(|k| -&ia.component(&[k])).collect()
        })
        .collect();
    pair_identity_defects(a, p.pi(), &p.xi, &flat_rows, &rhs3, &rhs2)
}

/// An endomorphism, a section, a 1-form, and a metric satisfying the
/// almost contact axioms, with the derived bivector.
pub struct AlmostContactMetric {
    base: Algebroid,
    phi: Matrix,
    xi: Section,
    eta: Coform,
    g: Metric,
    fundamental_pi: Tensor,
}

impl AlmostContactMetric {
    pub fn base(&self) -> &Algebroid {
        &self.base
    }

    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn xi(&self) -> &Section {
        &self.xi
    }

    pub fn eta(&self) -> &Coform {
        &self.eta
    }

    pub fn metric(&self) -> &Metric {
        &self.g
    }

    pub fn jacobi_context(&self) -> JacobiContext {
        JacobiContext::new(self.base.clone(), self.fundamental_pi.clone(), self.xi.clone())
            .expect("the structure carries a valid degree-2 multivector")
    }
}

/// The derived bivector g(sharp alpha, phi(sharp beta)) of the structure.
pub fn acm_fundamental_pi(s: &AlmostContactMetric) -> &Tensor {
    &s.fundamental_pi
}

/// Validates the almost contact metric axioms and derives the fundamental
/// bivector; the raising map of the derived pair is an isometry.
pub fn make_acm(
    a: &Algebroid,
    phi: Matrix,
    xi: Section,
    eta: Coform,
    g: Metric,
) -> Result<AlmostContactMetric, Error> {
    let r = a.rank();
    let nv = a.chart_dim();
    let phi2 = linalg::mat_mul(&phi, &phi);
    for i in 0..r {
        for j in 0..r {
            let mut want = &xi[i] * &eta[j];
            if i == j {
                want = &want - &Scalar::one(nv);
            }
            if phi2[i][j] != want {
                return Err(Error::AxiomViolation(
                    "the endomorphism squared is not minus the identity plus \
                     the form tensored with the section"
                        .into(),
                ));
            }
        }
    }
    if !dot(&eta, &xi).is_one() {
        return Err(Error::AxiomViolation(
            "the form does not evaluate to one on the section".into(),
        ));
    }
    let gm = g.matrix();
    let gphi = linalg::mat_mul(gm, &phi);
    let assoc = linalg::mat_mul(&transpose(&phi), &gphi);
    for i in 0..r {
        for j in 0..r {
            let want = &gm[i][j] - &(&eta[i] * &eta[j]);
            if assoc[i][j] != want {
                return Err(Error::AxiomViolation(
                    "the metric is not associated with the almost contact structure".into(),
                ));
            }
        }
    }

    // consequences of the axioms
    debug_assert!(linalg::mat_vec(&phi, &xi).iter().all(Scalar::is_zero));
    debug_assert!((0..r)
        .all(|j| (0..r).fold(Scalar::zero(nv), |acc, i| &acc + &(&eta[i] * &phi[i][j])).is_zero()));
    debug_assert_eq!(g.flat(&xi), eta);
    debug_assert!(g.eval(&xi, &xi).is_one());
    // skewness of phi for g
    debug_assert_eq!(
        linalg::mat_mul(&transpose(&phi), gm),
        linalg::mat_mul(gm, &phi)
            .iter()
            .map(|row| row.iter().map(|v| -v).collect())
            .collect::<Matrix>()
    );

    // fundamental bivector: g(sharp e^i, phi(sharp e^j)) = (phi cometric)[i][j]
    let full = linalg::mat_mul(&phi, &g.cometric_matrix());
    let mut pi = Tensor::zero(Variance::Multivector, 2, r, nv);
    for i in 0..r {
        for j in (i + 1)..r {
            pi.add_component(&[i, j], full[i][j].clone());
        }
    }

    let out = AlmostContactMetric {
        base: a.clone(),
        phi,
        xi,
        eta,
        g,
        fundamental_pi: pi,
    };
    // the raising map of the derived pair is an isometry
    debug_assert!({
        let ctx = BivectorContext::new(a.clone(), out.fundamental_pi.clone()).unwrap();
        let co = out.g.cometric_matrix();
        (0..r).all(|i| {
            (0..r).all(|j| {
                let si = sharp_with_section(&ctx, &out.xi, &coframe(r, nv, i));
                let sj = sharp_with_section(&ctx, &out.xi, &coframe(r, nv, j));
                out.g.eval(&si, &sj) == co[i][j]
            })
        })
    });
    Ok(out)
}

/// Solves the endomorphism of a contact form with a candidate metric from
/// g(a, phi(b)) = d eta(a, b) and validates the almost contact axioms.
pub fn make_contact_riemannian(
    a: &Algebroid,
    eta: &Coform,
    g: &Metric,
) -> Result<(AlmostContactMetric, Matrix), Error> {
    if !is_contact(a, eta)? {
        return Err(Error::NotContact);
    }
    let r = a.rank();
    let nv = a.chart_dim();
    let eta_t = Tensor::from_vector(Variance::Form, nv, eta);
    let omega = a.d_rho(&eta_t);
    let co = g.cometric_matrix();
    // column j of phi raises the coform a -> omega(a, e_j)
    let mut phi = vec![vec![Scalar::zero(nv); r]; r];
    for j in 0..r {
        let col_form: Coform = (0..r)
            .map(|i| omega.eval_on_sections(&[&a.frame_section(i), &a.frame_section(j)]))
            .collect();
        let col = linalg::mat_vec(&co, &col_form);
        for i in 0..r {
            phi[i][j] = col[i].clone();
        }
    }
    let pair = make_cosymplectic(a, &omega, eta)?;
    match make_acm(a, phi.clone(), pair.reeb().clone(), eta.clone(), g.clone()) {
        Ok(s) => Ok((s, phi)),
        Err(Error::AxiomViolation(_)) => Err(Error::NotAssociated),
        Err(e) => Err(e),
    }
}

/// Whether the covariant derivative of the endomorphism under the metric
/// connection has the half-twisted closed form on all frame pairs.
pub fn is_half_kenmotsu(s: &AlmostContactMetric) -> bool {
    let a = &s.base;
    let r = a.rank();
    let nv = a.chart_dim();
    let conn = levi_civita(a, &s.g);
    let h = half(nv);
    for i in 0..r {
        for j in 0..r {
            let ei = a.frame_section(i);
            let ej = a.frame_section(j);
            let phi_ej = linalg::mat_vec(&s.phi, &ej);
            let lhs: Section = {
                let t1 = conn.nabla(&ei, &phi_ej);
                let t2 = linalg::mat_vec(&s.phi, &conn.nabla(&ei, &ej));
                t1.iter().zip(&t2).map(|(x, y)| x - y).collect()
            };
            let phi_ei = linalg::mat_vec(&s.phi, &ei);
            let gpab = s.g.eval(&phi_ei, &ej);
            let etab = s.eta[j].clone();
            let rhs: Section = (0..r)
                .map(|k| &h * &(&(&gpab * &s.xi[k]) - &(&etab * &phi_ei[k])))
                .collect();
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Whether the raising map of the pair is an isometry for the metric on
/// the whole coframe.
pub fn is_metric_associated_lcs(p: &LcsPair, g: &Metric) -> bool {
    let r = p.base().rank();
    let nv = p.base().chart_dim();
    let co = g.cometric_matrix();
    let mut ok = true;
    'outer: for i in 0..r {
        for j in i..r {
            let si = sharp_with_section(&p.ctx, &p.xi, &coframe(r, nv, i));
            let sj = sharp_with_section(&p.ctx, &p.xi, &coframe(r, nv, j));
            if g.eval(&si, &sj) != co[i][j] {
                ok = false;
                break 'outer;
            }
        }
    }
    // with a zero reference form the condition reduces to the unitarity of
    // the dual endomorphism
    if p.theta.iter().all(Scalar::is_zero) {
        let (_, jstar) = riemann::j_endomorphisms(&p.ctx, g);
        let unitary = (0..r).all(|i| {
            (i..r).all(|j| {
                let ji = linalg::mat_vec(&jstar, &coframe(r, nv, i));
                let jj = linalg::mat_vec(&jstar, &coframe(r, nv, j));
                g.coeval(&ji, &jj) == co[i][j]
            })
        });
        debug_assert_eq!(ok, unitary);
    }
    ok
}

/// The conformal parallelism defect of the 2-form: the covariant
/// derivative corrected by the reference-form terms, on all frame triples
/// with the direction first; identically zero exactly in the conformally
/// parallel case.
pub fn conformal_defect(p: &LcsPair, g: &Metric) -> Dense {
    let a = p.base();
    let r = a.rank();
    let nv = a.chart_dim();
    let conn = levi_civita(a, g);
    let nabla_omega = conn.derivative_form(&p.omega);
    let h = half(nv);
    let s_theta = g.sharp(&p.theta);
    let gm = g.matrix();
    let mut out = Dense::zero(r, 3, nv);
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let om_ik = p
                    .omega
                    .eval_on_sections(&[&a.frame_section(i), &a.frame_section(k)]);
                let om_ij = p
                    .omega
                    .eval_on_sections(&[&a.frame_section(i), &a.frame_section(j)]);
                let om_tk = p
                    .omega
                    .eval_on_sections(&[&s_theta, &a.frame_section(k)]);
                let om_tj = p
                    .omega
                    .eval_on_sections(&[&s_theta, &a.frame_section(j)]);
                let mut v = nabla_omega.get(&[i, j, k]).clone();
                v = &v - &(&h * &(&(&p.theta[j] * &om_ik) - &(&p.theta[k] * &om_ij)));
                v = &v + &(&h * &(&(&gm[i][j] * &om_tk) - &(&gm[i][k] * &om_tj)));
                out.set(&[i, j, k], v);
            }
        }
    }
    out
}

/// Compatibility of the derived triple against the conformal parallelism
/// of the form, under the hypotheses that the pair satisfies the closed
/// conformal identities and that the metric is associated with both the
/// form and the pair; the two verdicts agree.
pub fn lck_equivalence_check(p: &LcsPair, g: &Metric) -> Result<(bool, bool), Error> {
    let a = p.base();
    let r = a.rank();
    let nv = a.chart_dim();
    if !is_lcs(p) {
        return Err(Error::HypothesisFailed(
            "the pair does not satisfy the closed conformal identities".into(),
        ));
    }
    if !is_metric_associated_lcs(p, g) {
        return Err(Error::HypothesisFailed(
            "the raising map of the pair is not an isometry for the metric".into(),
        ));
    }
    let (j, jstar) = riemann::j_endomorphisms(&p.ctx, g);
    let j2 = linalg::mat_mul(&j, &j);
    let minus_id: Matrix = (0..r)
        .map(|i| {
            (0..r)
                .map(|k| {
                    if i == k {
                        -&Scalar::one(nv)
                    } else {
                        Scalar::zero(nv)
                    }
                })
                .collect()
        })
        .collect();
    let hermitian = j2 == minus_id
        && (0..r).all(|i| {
            (0..r).all(|k| {
                let jei = linalg::mat_vec(&j, &a.frame_section(i));
                p.omega
                    .eval_on_sections(&[&a.frame_section(i), &a.frame_section(k)])
                    == g.eval(&jei, &a.frame_section(k))
            })
        });
    if !hermitian {
        return Err(Error::HypothesisFailed(
            "the metric is not associated with the nondegenerate form".into(),
        ));
    }

    let mut jc = p.jacobi_context();
    jc.lambda_from_metric(g);
    let compatible = jc.is_triple_compatible(g)?;

    let ck = conformal_defect(p, g).is_zero();

    // the raising map intertwines the two endomorphisms
    debug_assert!((0..r).all(|i| {
        let si = sharp_with_section(&p.ctx, &p.xi, &coframe(r, nv, i));
        let lhs = linalg::mat_vec(&j, &si);
        let rhs = sharp_with_section(&p.ctx, &p.xi, &linalg::mat_vec(&jstar, &coframe(r, nv, i)));
        lhs == rhs
    }));
    // the contravariant derivative of the bivector transports to the
    // covariant derivative of the form
    debug_assert!({
        let dpi = jc.d_pi_triple(g).unwrap();
        let conn = levi_civita(a, g);
        let nabla_omega = conn.derivative_form(&p.omega);
        let sharps: Vec<Section> = (0..r)
            .map(|i| sharp_with_section(&p.ctx, &p.xi, &coframe(r, nv, i)))
            .collect();
        (0..r).all(|i| {
            (0..r).all(|jx| {
                (0..r).all(|k| {
                    let mut acc = Scalar::zero(nv);
                    for x in 0..r {
                        for y in 0..r {
                            for z in 0..r {
                                let w = &(&sharps[i][x] * &sharps[jx][y]) * &sharps[k][z];
                                acc = &acc + &(&w * nabla_omega.get(&[x, y, z]));
                            }
                        }
                    }
                    *dpi.get(&[i, jx, k]) == acc
                })
            })
        })
    });

    Ok((compatible, ck))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::testkit::{heisenberg, tangent_line, tangent_plane};

    fn int(k: i64) -> Scalar {
        Scalar::from_int(0, k)
    }

    /// The contact data on the Heisenberg frame: omega = -e^1 ^ e^2 is the
    /// differential of eta = e^3.
    fn heis_contact_data() -> (Algebroid, Tensor, Coform) {
        let h = heisenberg();
        let mut omega = Tensor::zero(Variance::Form, 2, 3, 0);
        omega.add_component(&[0, 1], int(-1));
        let eta = coframe(3, 0, 2);
        (h, omega, eta)
    }

    /// Solvable rank-4 frame over a point: [e1, ej] = ej for j > 1.
    fn solvable4() -> Algebroid {
        let mut a = Algebroid::new(4, 0, Algebroid::zero_anchor(4, 0));
        for j in 1..4 {
            let mut v = a.zero_section();
            v[j] = Scalar::one(0);
            a.set_bracket(0, j, v);
        }
        a
    }

    fn plane_omega() -> Tensor {
        let mut omega = Tensor::zero(Variance::Form, 2, 2, 2);
        omega.add_component(&[0, 1], Scalar::one(2));
        omega
    }

    #[test]
    fn cosymplectic_heisenberg_reeb_and_pi() {
        let (h, omega, eta) = heis_contact_data();
        let p = make_cosymplectic(&h, &omega, &eta).unwrap();
        assert_eq!(p.reeb(), &h.frame_section(2));
        let mut want = Tensor::zero(Variance::Multivector, 2, 3, 0);
        want.add_component(&[0, 1], int(-1));
        assert_eq!(p.fundamental_pi().sub(&want).unwrap().is_zero(), true);

        // explicit inverse pair on the coframe
        assert_eq!(p.sharp(&coframe(3, 0, 0)), {
            let mut v = h.zero_section();
            v[1] = int(-1);
            v
        });
        assert_eq!(p.sharp(&coframe(3, 0, 1)), h.frame_section(0));
        assert_eq!(p.flat(&h.frame_section(2)), eta);
    }

    #[test]
    fn cosymplectic_reeb_rescales_with_eta() {
        let (h, omega, eta) = heis_contact_data();
        let eta2: Coform = eta.iter().map(|v| &int(2) * v).collect();
        let p = make_cosymplectic(&h, &omega, &eta2).unwrap();
        let mut want = h.zero_section();
        want[2] = int(1).div(&int(2)).unwrap();
        assert_eq!(p.reeb(), &want);
    }

    #[test]
    fn cosymplectic_error_paths() {
        let t = tangent_plane();
        let eta = coframe(2, 2, 0);
        assert!(matches!(
            make_cosymplectic(&t, &plane_omega(), &eta),
            Err(Error::EvenRank)
        ));

        let (h, _, eta) = heis_contact_data();
        let zero = Tensor::zero(Variance::Form, 2, 3, 0);
        assert!(matches!(
            make_cosymplectic(&h, &zero, &eta),
            Err(Error::DegenerateTopForm)
        ));
    }

    #[test]
    fn cosymplectic_defects_vanish() {
        let (h, omega, eta) = heis_contact_data();
        let p = make_cosymplectic(&h, &omega, &eta).unwrap();
        let (t1, t2) = cosymplectic_identity_defects(&p);
        assert!(t1.iter().all(Scalar::is_zero));
        assert!(t2.iter().all(Scalar::is_zero));

        // a perturbed, non-contact instance still satisfies both identities
        let mut omega2 = omega.clone();
        omega2.add_component(&[0, 2], int(3));
        let p2 = make_cosymplectic(&h, &omega2, &eta).unwrap();
        let (u1, u2) = cosymplectic_identity_defects(&p2);
        assert!(u1.iter().all(Scalar::is_zero));
        assert!(u2.iter().all(Scalar::is_zero));
    }

    #[test]
    fn contact_predicate() {
        let (h, _, eta) = heis_contact_data();
        assert!(is_contact(&h, &eta).unwrap());

        let abelian = Algebroid::new(3, 0, Algebroid::zero_anchor(3, 0));
        assert!(!is_contact(&abelian, &coframe(3, 0, 2)).unwrap());

        let t = tangent_plane();
        assert!(matches!(
            is_contact(&t, &coframe(2, 2, 0)),
            Err(Error::EvenRank)
        ));
        assert!(matches!(
            contact_to_jacobi(&abelian, &coframe(3, 0, 2)),
            Err(Error::NotContact)
        ));
    }

    #[test]
    fn contact_to_jacobi_heisenberg() {
        let (h, _, eta) = heis_contact_data();
        let jc = contact_to_jacobi(&h, &eta).unwrap();
        assert_eq!(jc.xi(), &h.frame_section(2));
        let mut want = Tensor::zero(Variance::Multivector, 2, 3, 0);
        want.add_component(&[0, 1], int(-1));
        assert!(jc.pi().sub(&want).unwrap().is_zero());
        assert!(jc.is_jacobi());
    }

    #[test]
    fn lcs_plane() {
        let t = tangent_plane();
        let theta = coframe(2, 2, 0);
        let p = make_lcs(&t, &plane_omega(), &theta).unwrap();
        assert_eq!(p.xi(), &t.frame_section(1));
        assert!(is_lcs(&p));
        assert!(p.jacobi_context().is_jacobi());
        let (t1, t2) = lcs_identity_defects(&p);
        assert!(t1.iter().all(Scalar::is_zero));
        assert!(t2.iter().all(Scalar::is_zero));
    }

    #[test]
    fn lcs_theta_zero_reduces_to_symplectic() {
        let t = tangent_plane();
        let theta = vec![Scalar::zero(2); 2];
        let p = make_lcs(&t, &plane_omega(), &theta).unwrap();
        assert!(p.xi().iter().all(Scalar::is_zero));
        assert!(is_lcs(&p));
        assert!(p.jacobi_context().is_jacobi());
        assert!(p.bivector().is_poisson());
    }

    #[test]
    fn lcs_solvable_rank4() {
        let a = solvable4();
        let mut omega = Tensor::zero(Variance::Form, 2, 4, 0);
        omega.add_component(&[0, 1], int(1));
        omega.add_component(&[2, 3], int(1));
        let mut theta = vec![Scalar::zero(0); 4];
        theta[0] = int(2);
        let p = make_lcs(&a, &omega, &theta).unwrap();
        assert!(is_lcs(&p));
        assert!(p.jacobi_context().is_jacobi());
        let (t1, t2) = lcs_identity_defects(&p);
        assert!(t1.iter().all(Scalar::is_zero));
        assert!(t2.iter().all(Scalar::is_zero));
    }

    #[test]
    fn lcs_open_theta_is_not_jacobi_but_defects_vanish() {
        // rank-4 Lie frame over a line whose reference form is not closed
        let one = Scalar::one(1);
        let mut anchor = Algebroid::zero_anchor(4, 1);
        anchor[0][0] = one.clone();
        let a = Algebroid::new(4, 1, anchor);
        let x = Scalar::var(1, 0);
        let mut omega = Tensor::zero(Variance::Form, 2, 4, 1);
        omega.add_component(&[0, 1], Scalar::one(1));
        omega.add_component(&[2, 3], &x + &Scalar::one(1));
        let mut theta = vec![Scalar::zero(1); 4];
        theta[1] = x.clone();
        let theta_t = Tensor::from_vector(Variance::Form, 1, &theta);
        assert!(!a.d_rho(&theta_t).is_zero());

        let p = make_lcs(&a, &omega, &theta).unwrap();
        assert!(!is_lcs(&p));
        assert!(!p.jacobi_context().is_jacobi());
        let (t1, t2) = lcs_identity_defects(&p);
        assert!(t1.iter().all(Scalar::is_zero));
        assert!(t2.iter().all(Scalar::is_zero));
    }

    /// The metric contact endomorphism of the Heisenberg contact form with
    /// the identity metric.
    fn heis_phi() -> Matrix {
        let z = Scalar::zero(0);
        vec![
            vec![z.clone(), int(-1), z.clone()],
            vec![int(1), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone()],
        ]
    }

    #[test]
    fn acm_heisenberg() {
        let (h, _, eta) = heis_contact_data();
        let g = Metric::identity(h.clone());
        let s = make_acm(&h, heis_phi(), h.frame_section(2), eta, g).unwrap();
        let mut want = Tensor::zero(Variance::Multivector, 2, 3, 0);
        want.add_component(&[0, 1], int(-1));
        assert!(acm_fundamental_pi(&s).sub(&want).unwrap().is_zero());
    }

    #[test]
    fn acm_rank_one_zero_endomorphism() {
        let t = tangent_line();
        let g = Metric::identity(t.clone());
        let phi = vec![vec![Scalar::zero(1)]];
        let s = make_acm(&t, phi, t.frame_section(0), coframe(1, 1, 0), g).unwrap();
        assert!(acm_fundamental_pi(&s).is_zero());
        assert!(is_half_kenmotsu(&s));
    }

    #[test]
    fn acm_axiom_violations() {
        let (h, _, eta) = heis_contact_data();
        let g = Metric::identity(h.clone());
        let two_eta: Coform = eta.iter().map(|v| &int(2) * v).collect();
        assert!(matches!(
            make_acm(&h, heis_phi(), h.frame_section(2), two_eta, g.clone()),
            Err(Error::AxiomViolation(_))
        ));
        let zero_phi = vec![vec![Scalar::zero(0); 3]; 3];
        assert!(matches!(
            make_acm(&h, zero_phi, h.frame_section(2), eta, g),
            Err(Error::AxiomViolation(_))
        ));
    }

    #[test]
    fn contact_riemannian_heisenberg() {
        let (h, _, eta) = heis_contact_data();
        let g = Metric::identity(h.clone());
        let (s, phi) = make_contact_riemannian(&h, &eta, &g).unwrap();
        assert_eq!(phi, heis_phi());
        assert_eq!(s.xi(), &h.frame_section(2));
        let mut want = Tensor::zero(Variance::Multivector, 2, 3, 0);
        want.add_component(&[0, 1], int(-1));
        assert!(acm_fundamental_pi(&s).sub(&want).unwrap().is_zero());
    }

    #[test]
    fn contact_riemannian_rejects_unassociated_metric() {
        let (h, _, eta) = heis_contact_data();
        let z = Scalar::zero(0);
        let g = Metric::new(
            h.clone(),
            vec![
                vec![int(2), z.clone(), z.clone()],
                vec![z.clone(), int(2), z.clone()],
                vec![z.clone(), z.clone(), int(1)],
            ],
            true,
        )
        .unwrap();
        assert!(matches!(
            make_contact_riemannian(&h, &eta, &g),
            Err(Error::NotAssociated)
        ));
    }

    #[test]
    fn contact_riemannian_transport_law() {
        let (h, _, eta) = heis_contact_data();
        let g = Metric::identity(h.clone());
        let (s, _) = make_contact_riemannian(&h, &eta, &g).unwrap();
        let mut jc = s.jacobi_context();
        let lambda = jc.lambda_from_metric(&g);
        // for a metric contact structure the derived form is the contact form
        assert_eq!(&lambda, s.eta());

        let (dual_conn, _) = jc.triple_levi_civita(&g).unwrap();
        let conn = levi_civita(&h, &g);
        let ctx = BivectorContext::new(h.clone(), s.fundamental_pi.clone()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d = dual_conn.gamma(i, j).clone();
                let lhs = sharp_with_section(&ctx, s.xi(), &d);
                let si = sharp_with_section(&ctx, s.xi(), &coframe(3, 0, i));
                let sj = sharp_with_section(&ctx, s.xi(), &coframe(3, 0, j));
                let rhs = conn.nabla(&si, &sj);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn half_kenmotsu_matches_triple_compatibility() {
        let (h, _, eta) = heis_contact_data();
        let g = Metric::identity(h.clone());
        let (s, _) = make_contact_riemannian(&h, &eta, &g).unwrap();
        let mut jc = s.jacobi_context();
        jc.lambda_from_metric(&g);
        let compatible = jc.is_triple_compatible(&g).unwrap();
        assert_eq!(is_half_kenmotsu(&s), compatible);
    }

    #[test]
    fn half_kenmotsu_transport_lemma() {
        let (h, _, eta) = heis_contact_data();
        let g = Metric::identity(h.clone());
        let (s, _) = make_contact_riemannian(&h, &eta, &g).unwrap();
        let mut jc = s.jacobi_context();
        jc.lambda_from_metric(&g);
        let (dual_conn, _) = jc.triple_levi_civita(&g).unwrap();
        let ctx = BivectorContext::new(h.clone(), s.fundamental_pi.clone()).unwrap();
        let (_, jstar) = riemann::j_endomorphisms(&ctx, &g);
        let djstar = dual_conn.derivative_endo(&jstar);
        let conn = levi_civita(&h, &g);
        for i in 0..3 {
            for j in 0..3 {
                let dj_beta: Coform = (0..3).map(|k| djstar[i][k][j].clone()).collect();
                let lhs = sharp_with_section(&ctx, s.xi(), &dj_beta);
                let si = sharp_with_section(&ctx, s.xi(), &coframe(3, 0, i));
                let sj = sharp_with_section(&ctx, s.xi(), &coframe(3, 0, j));
                let phi_sj = linalg::mat_vec(s.phi(), &sj);
                let t1 = conn.nabla(&si, &phi_sj);
                let t2 = linalg::mat_vec(s.phi(), &conn.nabla(&si, &sj));
                let rhs: Section = t1.iter().zip(&t2).map(|(x, y)| -&(x - y)).collect();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn metric_association_for_lcs_pairs() {
        let t = tangent_plane();
        let g = Metric::identity(t.clone());
        let zero_theta = vec![Scalar::zero(2); 2];
        let p0 = make_lcs(&t, &plane_omega(), &zero_theta).unwrap();
        assert!(is_metric_associated_lcs(&p0, &g));

        let stretched = Metric::new(
            t.clone(),
            vec![
                vec![Scalar::one(2), Scalar::zero(2)],
                vec![Scalar::zero(2), Scalar::from_int(2, 2)],
            ],
            true,
        )
        .unwrap();
        assert!(!is_metric_associated_lcs(&p0, &stretched));

        // a nonzero reference form on the plane admits no associated metric
        let p1 = make_lcs(&t, &plane_omega(), &coframe(2, 2, 0)).unwrap();
        assert!(!is_metric_associated_lcs(&p1, &g));
    }

    #[test]
    fn conformal_defect_flat_cases() {
        let t = tangent_plane();
        let g = Metric::identity(t.clone());
        let p1 = make_lcs(&t, &plane_omega(), &coframe(2, 2, 0)).unwrap();
        assert!(conformal_defect(&p1, &g).is_zero());

        let zero_theta = vec![Scalar::zero(2); 2];
        let p0 = make_lcs(&t, &plane_omega(), &zero_theta).unwrap();
        assert!(conformal_defect(&p0, &g).is_zero());

        // with a zero reference form the defect is the plain covariant
        // derivative of the form, here zero for a constant metric as well
        let stretched = Metric::new(
            t.clone(),
            vec![
                vec![Scalar::one(2), Scalar::zero(2)],
                vec![Scalar::zero(2), Scalar::from_int(2, 2)],
            ],
            true,
        )
        .unwrap();
        assert!(conformal_defect(&p0, &stretched).is_zero());
    }

    #[test]
    fn lck_flat_kaehler_plane() {
        let t = tangent_plane();
        let g = Metric::identity(t.clone());
        let zero_theta = vec![Scalar::zero(2); 2];
        let p = make_lcs(&t, &plane_omega(), &zero_theta).unwrap();
        assert_eq!(lck_equivalence_check(&p, &g).unwrap(), (true, true));
    }

    #[test]
    fn lck_hypothesis_failures() {
        let t = tangent_plane();
        let g = Metric::identity(t.clone());
        let p1 = make_lcs(&t, &plane_omega(), &coframe(2, 2, 0)).unwrap();
        assert!(matches!(
            lck_equivalence_check(&p1, &g),
            Err(Error::HypothesisFailed(_))
        ));

        let zero_theta = vec![Scalar::zero(2); 2];
        let p0 = make_lcs(&t, &plane_omega(), &zero_theta).unwrap();
        let stretched = Metric::new(
            t.clone(),
            vec![
                vec![Scalar::one(2), Scalar::zero(2)],
                vec![Scalar::zero(2), Scalar::from_int(2, 2)],
            ],
            true,
        )
        .unwrap();
        assert!(matches!(
            lck_equivalence_check(&p0, &stretched),
            Err(Error::HypothesisFailed(_))
        ));
    }
}
