//! Metrics and connections: musical isomorphisms, the Levi-Civita
//! connection from the Koszul formula, the contravariant Levi-Civita
//! connection of a bivector-metric pair, the induced endomorphism pair,
//! and the compatibility predicate.

use crate::algebroid::{Algebroid, Section, Tensor, Variance};
use crate::coeff::Scalar;
use crate::linalg::{self, Matrix};
use crate::poisson::{BivectorContext, Coform};
use crate::Error;

/// A fiber metric given by its frame matrix. Definiteness is not
/// decidable over rational functions, so `riemannian` is a caller
/// assertion that sampling may refute.
#[derive(Clone, Debug)]
pub struct Metric {
    base: Algebroid,
    matrix: Matrix,
    riemannian: bool,
}

impl Metric {
    pub fn new(base: Algebroid, matrix: Matrix, riemannian: bool) -> Result<Metric, Error> {
        let r = base.rank();
        if matrix.len() != r || matrix.iter().any(|row| row.len() != r) {
            return Err(Error::RankMismatch);
        }
        for i in 0..r {
            for j in 0..r {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::AxiomViolation("metric matrix is not symmetric".into()));
                }
            }
        }
        if linalg::det(&matrix).is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(Metric {
            base,
            matrix,
            riemannian,
        })
    }

    pub fn identity(base: Algebroid) -> Metric {
        let m = linalg::identity(base.rank(), base.chart_dim());
        Metric::new(base, m, true).expect("identity matrix is symmetric and invertible")
    }

    pub fn base(&self) -> &Algebroid {
        &self.base
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn riemannian(&self) -> bool {
        self.riemannian
    }

    pub fn eval(&self, a: &Section, b: &Section) -> Scalar {
        let r = self.base.rank();
        let nv = self.base.chart_dim();
        let mut acc = Scalar::zero(nv);
        for i in 0..r {
            for j in 0..r {
                acc = &acc + &(&(&a[i] * &b[j]) * &self.matrix[i][j]);
            }
        }
        acc
    }

    /// The inverse matrix; the metric it defines lives on the dual
    /// bundle.
    pub fn cometric_matrix(&self) -> Matrix {
        linalg::invert(&self.matrix).expect("metric matrices are invertible by construction")
    }

    pub fn flat(&self, a: &Section) -> Coform {
        let r = self.base.rank();
        (0..r)
            .map(|k| {
                let ek = self.base.frame_section(k);
                self.eval(a, &ek)
            })
            .collect()
    }

    pub fn sharp(&self, alpha: &Coform) -> Section {
        linalg::mat_vec(&self.cometric_matrix(), alpha)
    }

    pub fn coeval(&self, alpha: &Coform, beta: &Coform) -> Scalar {
        self.eval(&self.sharp(alpha), &self.sharp(beta))
    }
}

/// A dense, not necessarily alternating, (0,k) component table on the
/// frame. Covariant derivatives of forms land here.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    rank: usize,
    order: usize,
    vals: Vec<Scalar>,
}

impl Dense {
    pub fn zero(rank: usize, order: usize, nvars: usize) -> Dense {
        Dense {
            rank,
            order,
            vals: vec![Scalar::zero(nvars); rank.pow(order as u32)],
        }
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.rank + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        &self.vals[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        let o = self.offset(idx);
        self.vals[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(|v| v.is_zero())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// An affine connection given by its Christoffel table on the frame:
/// gamma[i][j] is the section obtained by differentiating e_j along e_i.
#[derive(Clone, Debug)]
pub struct Connection {
    base: Algebroid,
    gamma: Vec<Vec<Section>>,
}

impl Connection {
    pub fn new(base: Algebroid, gamma: Vec<Vec<Section>>) -> Connection {
        assert_eq!(gamma.len(), base.rank());
        Connection { base, gamma }
    }

    pub fn base(&self) -> &Algebroid {
        &self.base
    }

    pub fn gamma(&self, i: usize, j: usize) -> &Section {
        &self.gamma[i][j]
    }

    /// Derivative of a section along a section, extended from the table
    /// by the connection axioms.
    pub fn nabla(&self, a: &Section, b: &Section) -> Section {
        let r = self.base.rank();
        let mut out = self.base.zero_section();
        for j in 0..r {
            out[j] = self.base.anchor_apply(a, &b[j]);
        }
        for i in 0..r {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..r {
                if b[j].is_zero() {
                    continue;
                }
                let f = &a[i] * &b[j];
                for k in 0..r {
                    out[k] = &out[k] + &(&f * &self.gamma[i][j][k]);
                }
            }
        }
        out
    }

    /// Frame torsion component.
    pub fn torsion(&self, i: usize, j: usize) -> Section {
        let bracket = self.base.structure_function(i, j);
        (0..self.base.rank())
            .map(|k| &(&self.gamma[i][j][k] - &self.gamma[j][i][k]) - &bracket[k])
            .collect()
    }

    pub fn is_torsion_free(&self) -> bool {
        let r = self.base.rank();
        (0..r).all(|i| {
            ((i + 1)..r).all(|j| self.torsion(i, j).iter().all(|s| s.is_zero()))
        })
    }

    pub fn is_metric_for(&self, g: &Metric) -> bool {
        self.derivative_metric(g.matrix()).is_zero()
    }

    /// Covariant derivative of an alternating (0,k) tensor, as a dense
    /// (0,k+1) table with the direction in the first slot.
    pub fn derivative_form(&self, t: &Tensor) -> Dense {
        assert_eq!(t.variance(), Variance::Form);
        assert_eq!(t.rank(), self.base.rank());
        let r = self.base.rank();
        let nv = self.base.chart_dim();
        let k = t.degree();
        let mut out = Dense::zero(r, k + 1, nv);
        let mut idx = vec![0usize; k + 1];
        loop {
            let i = idx[0];
            let frames: Vec<Section> = idx[1..]
                .iter()
                .map(|&j| self.base.frame_section(j))
                .collect();
            let refs: Vec<&Section> = frames.iter().collect();
            let mut v = self
                .base
                .anchor_apply(&self.base.frame_section(i), &t.eval_on_sections(&refs));
            for m in 0..k {
                let mut argv = frames.clone();
                argv[m] = self.gamma[i][idx[1 + m]].clone();
                let refs: Vec<&Section> = argv.iter().collect();
                v = &v - &t.eval_on_sections(&refs);
            }
            out.set(&idx, v);
            // odometer over all multi-indices
            let mut p = k + 1;
            loop {
                if p == 0 {
                    return out;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < r {
                    break;
                }
                idx[p] = 0;
            }
        }
    }

    /// Covariant derivative of a symmetric (0,2) table.
    pub fn derivative_metric(&self, m: &Matrix) -> Dense {
        let r = self.base.rank();
        let nv = self.base.chart_dim();
        let mut out = Dense::zero(r, 3, nv);
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let mut v = self
                        .base
                        .anchor_apply(&self.base.frame_section(i), &m[j][k]);
                    for l in 0..r {
                        v = &v - &(&self.gamma[i][j][l] * &m[l][k]);
                        v = &v - &(&self.gamma[i][k][l] * &m[j][l]);
                    }
                    out.set(&[i, j, k], v);
                }
            }
        }
        out
    }

    /// Covariant derivative of an endomorphism: for each frame direction
    /// the matrix of b -> nabla(J b) - J(nabla b).
    pub fn derivative_endo(&self, e: &Matrix) -> Vec<Matrix> {
        let r = self.base.rank();
        (0..r)
            .map(|i| {
                let ei = self.base.frame_section(i);
                let cols: Vec<Section> = (0..r)
                    .map(|j| {
                        let ej = self.base.frame_section(j);
                        let jej = linalg::mat_vec(e, &ej);
                        let t1 = self.nabla(&ei, &jej);
                        let t2 = linalg::mat_vec(e, &self.nabla(&ei, &ej));
                        t1.iter().zip(&t2).map(|(x, y)| x - y).collect()
                    })
                    .collect();
                (0..r)
                    .map(|row| (0..r).map(|col| cols[col][row].clone()).collect())
                    .collect()
            })
            .collect()
    }
}

/// The unique symmetric metric connection, solved frame-wise from the
/// Koszul formula.
pub fn levi_civita(a: &Algebroid, g: &Metric) -> Connection {
    let r = a.rank();
    let nv = a.chart_dim();
    let half = Scalar::from_int(nv, 1)
        .div(&Scalar::from_int(nv, 2))
        .unwrap();
    let inv = g.cometric_matrix();
    let mut gamma = vec![vec![a.zero_section(); r]; r];
    for i in 0..r {
        for j in 0..r {
            let ei = a.frame_section(i);
            let ej = a.frame_section(j);
            let rhs: Vec<Scalar> = (0..r)
                .map(|k| {
                    let ek = a.frame_section(k);
                    let mut v = a.anchor_apply(&ei, &g.matrix()[j][k]);
                    v = &v + &a.anchor_apply(&ej, &g.matrix()[i][k]);
                    v = &v - &a.anchor_apply(&ek, &g.matrix()[i][j]);
                    v = &v - &g.eval(a.structure_function(j, k), &ei);
                    v = &v - &g.eval(a.structure_function(i, k), &ej);
                    v = &v + &g.eval(a.structure_function(i, j), &ek);
                    &half * &v
                })
                .collect();
            gamma[i][j] = linalg::mat_vec(&inv, &rhs);
        }
    }
    Connection::new(a.clone(), gamma)
}

/// The Levi-Civita connection of the cometric on the dual algebroid of
/// the bivector, together with that dual metric.
pub fn contravariant_levi_civita(
    ctx: &BivectorContext,
    g: &Metric,
) -> (Connection, Metric) {
    let dual = ctx.dual_algebroid();
    let dual_metric = Metric::new(dual.clone(), g.cometric_matrix(), g.riemannian())
        .expect("the inverse of a symmetric invertible matrix is symmetric and invertible");
    (levi_civita(&dual, &dual_metric), dual_metric)
}

/// The endomorphism pair determined by g(J a, b) being the bivector:
/// matrices -P g and -g P where P is the component matrix of Pi.
pub fn j_endomorphisms(ctx: &BivectorContext, g: &Metric) -> (Matrix, Matrix) {
    let r = ctx.base().rank();
    let nv = ctx.base().chart_dim();
    let p: Matrix = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| ctx.pi().component(&[i, j]))
                .collect()
        })
        .collect();
    let minus_one = Scalar::from_int(nv, -1);
    let neg = |m: Matrix| -> Matrix {
        m.into_iter()
            .map(|row| row.into_iter().map(|v| &v * &minus_one).collect())
            .collect()
    };
    let j = neg(linalg::mat_mul(&p, g.matrix()));
    let jstar = neg(linalg::mat_mul(g.matrix(), &p));
    (j, jstar)
}

/// The contravariant derivative of the bivector, as a dense (0,3) table
/// on the dual algebroid (direction first).
pub fn d_pi(ctx: &BivectorContext, g: &Metric) -> Dense {
    let (conn, _) = contravariant_levi_civita(ctx, g);
    let pi_as_form = Tensor::from_components(
        Variance::Form,
        2,
        ctx.pi().rank(),
        ctx.pi().nvars(),
        ctx.pi().components().map(|(i, c)| (i.clone(), c.clone())),
    );
    conn.derivative_form(&pi_as_form)
}

/// Compatibility of the pair: the contravariant derivative of the
/// bivector vanishes. Cross-checked against the equivalent vanishing of
/// the derivative of the dual endomorphism.
pub fn is_riemann_poisson(ctx: &BivectorContext, g: &Metric) -> bool {
    let dpi = d_pi(ctx, g);
    let (conn, _) = contravariant_levi_civita(ctx, g);
    let (_, jstar) = j_endomorphisms(ctx, g);
    let djstar = conn.derivative_endo(&jstar);
    let dpi_zero = dpi.is_zero();
    let dj_zero = djstar.iter().all(|m| m.iter().all(|r| r.iter().all(|v| v.is_zero())));
    debug_assert_eq!(dpi_zero, dj_zero);
    dpi_zero && dj_zero
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::testkit::{heisenberg, tangent_plane};
    use crate::poisson::pi_from_nondegenerate_form;

    fn heis_ctx() -> BivectorContext {
        let h = heisenberg();
        let mut pi = Tensor::zero(Variance::Multivector, 2, 3, 0);
        pi.add_component(&[0, 1], Scalar::from_int(0, -1));
        BivectorContext::new(h, pi).unwrap()
    }

    fn cof(r: usize, nv: usize, i: usize) -> Coform {
        let mut v = vec![Scalar::zero(nv); r];
        v[i] = Scalar::one(nv);
        v
    }

    #[test]
    fn cometric_and_musical_maps() {
        let x = Scalar::var(1, 0);
        let d = &Scalar::one(1) + &(&x * &x);
        let m = vec![
            vec![Scalar::one(1), Scalar::zero(1)],
            vec![Scalar::zero(1), d.clone()],
        ];
        let base = crate::algebroid::Algebroid::new(2, 1, crate::algebroid::Algebroid::zero_anchor(2, 1));
        let g = Metric::new(base, m, true).unwrap();
        let co = g.cometric_matrix();
        assert_eq!(co[1][1], d.inverse().unwrap());
        assert_eq!(co[0][0], Scalar::one(1));

        // sharp is inverse to flat
        let sec = vec![x.clone(), &x + &Scalar::one(1)];
        assert_eq!(g.sharp(&g.flat(&sec)), sec);
    }

    #[test]
    fn euclidean_identity_cometric() {
        let g = Metric::identity(tangent_plane());
        assert_eq!(g.cometric_matrix(), linalg::identity(2, 2));
    }

    #[test]
    fn levi_civita_flat_plane() {
        let a = tangent_plane();
        let g = Metric::identity(a.clone());
        let conn = levi_civita(&a, &g);
        for i in 0..2 {
            for j in 0..2 {
                assert!(conn.gamma(i, j).iter().all(|s| s.is_zero()));
            }
        }
        assert!(conn.is_torsion_free());
        assert!(conn.is_metric_for(&g));
    }

    #[test]
    fn levi_civita_heisenberg() {
        let a = heisenberg();
        let g = Metric::identity(a.clone());
        let conn = levi_civita(&a, &g);
        // 2 g(nabla_{e1} e2, e3) = g([e1,e2],e3) = 1
        let half = Scalar::from_int(0, 1).div(&Scalar::from_int(0, 2)).unwrap();
        assert_eq!(conn.gamma(0, 1)[2], half);
        assert!(conn.is_torsion_free());
        assert!(conn.is_metric_for(&g));
    }

    #[test]
    fn levi_civita_unique_among_symmetric_metric_connections() {
        let a = heisenberg();
        let g = Metric::identity(a.clone());
        let conn = levi_civita(&a, &g);
        // any perturbation of the table breaks symmetry or metricity
        let mut gamma: Vec<Vec<Section>> = (0..3)
            .map(|i| (0..3).map(|j| conn.gamma(i, j).clone()).collect())
            .collect();
        gamma[0][1][2] = &gamma[0][1][2] + &Scalar::one(0);
        let other = Connection::new(a, gamma);
        assert!(!(other.is_torsion_free() && other.is_metric_for(&g)));
    }

    #[test]
    fn contravariant_connection_zero_bivector() {
        let h = heisenberg();
        let z = BivectorContext::new(h.clone(), Tensor::zero(Variance::Multivector, 2, 3, 0))
            .unwrap();
        let g = Metric::identity(h);
        let (conn, _) = contravariant_levi_civita(&z, &g);
        for i in 0..3 {
            for j in 0..3 {
                assert!(conn.gamma(i, j).iter().all(|s| s.is_zero()));
            }
        }
    }

    #[test]
    fn contravariant_connection_transports_through_sharp() {
        // nondegenerate case: sharp(D_alpha beta) = nabla_{sharp alpha}(sharp beta)
        let a = tangent_plane();
        let omega = Tensor::basis(Variance::Form, 2, 2, 0)
            .wedge(&Tensor::basis(Variance::Form, 2, 2, 1))
            .unwrap();
        let ctx = pi_from_nondegenerate_form(&a, &omega).unwrap();
        let g = Metric::identity(a.clone());
        let (d, _) = contravariant_levi_civita(&ctx, &g);
        let nabla = levi_civita(&a, &g);
        for i in 0..2 {
            for j in 0..2 {
                let lhs = ctx.sharp_pi(&d.gamma(i, j));
                let rhs = nabla.nabla(&ctx.sharp_pi(&cof(2, 2, i)), &ctx.sharp_pi(&cof(2, 2, j)));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn j_endomorphism_examples() {
        let a = tangent_plane();
        let omega = Tensor::basis(Variance::Form, 2, 2, 0)
            .wedge(&Tensor::basis(Variance::Form, 2, 2, 1))
            .unwrap();
        let ctx = pi_from_nondegenerate_form(&a, &omega).unwrap();
        let g = Metric::identity(a.clone());
        let (j, jstar) = j_endomorphisms(&ctx, &g);
        // Pi(e^1,e^2) = 1 here, so J = [[0,-1],[1,0]]
        assert_eq!(j[0][1], Scalar::from_int(2, -1));
        assert_eq!(j[1][0], Scalar::one(2));
        assert!(j[0][0].is_zero() && j[1][1].is_zero());
        assert_eq!(j, jstar);

        // zero bivector gives zero endomorphisms
        let z = BivectorContext::new(a.clone(), Tensor::zero(Variance::Multivector, 2, 2, 2))
            .unwrap();
        let (jz, _) = j_endomorphisms(&z, &g);
        assert!(jz.iter().all(|r| r.iter().all(|v| v.is_zero())));
    }

    #[test]
    fn sharp_intertwines_j_and_jstar() {
        // sharp_g . J* = J . sharp_g with a non-identity metric
        let ctx = heis_ctx();
        let mut m = linalg::identity(3, 0);
        m[0][0] = Scalar::from_int(0, 2);
        m[0][1] = Scalar::one(0);
        m[1][0] = Scalar::one(0);
        m[1][1] = Scalar::from_int(0, 3);
        let g = Metric::new(ctx.base().clone(), m, true).unwrap();
        let (j, jstar) = j_endomorphisms(&ctx, &g);
        let lhs = linalg::mat_mul(&g.cometric_matrix(), &jstar);
        let rhs = linalg::mat_mul(&j, &g.cometric_matrix());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn metricity_of_contravariant_connection() {
        let ctx = heis_ctx();
        let g = Metric::identity(ctx.base().clone());
        let (conn, dual_metric) = contravariant_levi_civita(&ctx, &g);
        assert!(conn.derivative_metric(dual_metric.matrix()).is_zero());
        assert!(conn.is_torsion_free());
    }

    #[test]
    fn d_pi_heisenberg_nonzero() {
        let ctx = heis_ctx();
        let g = Metric::identity(ctx.base().clone());
        let dpi = d_pi(&ctx, &g);
        assert!(!dpi.is_zero());
        assert!(!is_riemann_poisson(&ctx, &g));
    }

    #[test]
    fn d_pi_matches_j_star_derivative() {
        // g*(alpha, D_gamma J*(beta)) = -D_gamma Pi(alpha, beta)
        let ctx = heis_ctx();
        let g = Metric::identity(ctx.base().clone());
        let (conn, dual_metric) = contravariant_levi_civita(&ctx, &g);
        let (_, jstar) = j_endomorphisms(&ctx, &g);
        let djstar = conn.derivative_endo(&jstar);
        let dpi = d_pi(&ctx, &g);
        for c in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    let col: Vec<Scalar> =
                        (0..3).map(|row| djstar[c][row][b].clone()).collect();
                    let lhs = dual_metric.eval(&cof(3, 0, a), &col);
                    let rhs = -dpi.get(&[c, a, b]);
                    assert_eq!(lhs, rhs, "at ({c},{a},{b})");
                }
            }
        }
    }

    #[test]
    fn flat_kaehler_plane_is_compatible() {
        let a = tangent_plane();
        let omega = Tensor::basis(Variance::Form, 2, 2, 0)
            .wedge(&Tensor::basis(Variance::Form, 2, 2, 1))
            .unwrap();
        let ctx = pi_from_nondegenerate_form(&a, &omega).unwrap();
        let g = Metric::identity(a.clone());
        assert!(is_riemann_poisson(&ctx, &g));
        // transport identity: D Pi(alpha,beta,gamma) = nabla Omega on sharps
        let dpi = d_pi(&ctx, &g);
        let nabla = levi_civita(&a, &g);
        let domega = nabla.derivative_form(&omega);
        assert!(dpi.is_zero() && domega.is_zero());

        // zero bivector is compatible with anything
        let z = BivectorContext::new(a.clone(), Tensor::zero(Variance::Multivector, 2, 2, 2))
            .unwrap();
        assert!(is_riemann_poisson(&z, &g));
    }
}
