//! Seeded random instance generator. Produces models in the text syntax
//! domain: a base algebroid plus tensors shaped for the requested kind,
//! with the unconditional checks that apply to it. The same seed and
//! parameters always yield the same model.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{Algebroid, Section, Tensor, Variance};
use crate::coeff::Scalar;
use crate::linalg::{self, Matrix};
use crate::model::{CheckRequest, Model, NamedAlgebroid, NamedTensor, TensorValue};
use crate::poisson::pi_from_nondegenerate_form;
use crate::structures::make_cosymplectic;
use crate::Error;

/// Shape of the generated instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Random anchor and skew bracket table, no closure conditions.
    Skew,
    /// Constant structure table of a Lie algebra, conjugated by a random
    /// invertible integer basis change.
    LieAlgebra,
    /// Identity anchor onto the chart directions, zero brackets.
    TangentLike,
    /// Odd-rank base with a random 2-form and 1-form forming a valid
    /// pair (the lowering map is invertible); closedness is not imposed.
    CosymplecticData,
    /// Even-rank base with a random nondegenerate 2-form and a random
    /// reference 1-form; closedness is not imposed.
    LcsData,
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind, Error> {
        match s {
            "skew" => Ok(Kind::Skew),
            "lie-algebra" => Ok(Kind::LieAlgebra),
            "tangent-like" => Ok(Kind::TangentLike),
            "cosymplectic-data" => Ok(Kind::CosymplecticData),
            "lcs-data" => Ok(Kind::LcsData),
            other => Err(Error::UnsupportedParams(format!(
                "unknown kind '{}'",
                other
            ))),
        }
    }
}

/// Size and shape bounds of a generated instance.
#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub rank: usize,
    pub chart_dim: usize,
    /// Maximum total degree of polynomial coefficients.
    pub max_degree: usize,
    pub kind: Kind,
}

const COORD_NAMES: [&str; 2] = ["x", "y"];

fn validate(p: &GenParams) -> Result<(), Error> {
    if p.rank == 0 || p.rank > 4 {
        return Err(Error::UnsupportedParams(
            "rank must be between 1 and 4".into(),
        ));
    }
    if p.chart_dim > 2 {
        return Err(Error::UnsupportedParams("chart dimension is at most 2".into()));
    }
    if p.max_degree > 2 {
        return Err(Error::UnsupportedParams(
            "coefficient degree is at most 2".into(),
        ));
    }
    match p.kind {
        Kind::CosymplecticData if p.rank % 2 == 0 => Err(Error::UnsupportedParams(
            "cosymplectic data needs an odd rank".into(),
        )),
        Kind::LcsData if p.rank % 2 == 1 => Err(Error::UnsupportedParams(
            "a nondegenerate 2-form needs an even rank".into(),
        )),
        _ => Ok(()),
    }
}

/// Random polynomial of bounded total degree with small integer
/// coefficients; constants dominate so tables stay sparse.
fn random_scalar(rng: &mut ChaCha8Rng, nv: usize, max_degree: usize) -> Scalar {
    let mut out = Scalar::from_int(nv, rng.gen_range(-2..=2));
    if nv == 0 || max_degree == 0 {
        return out;
    }
    let terms = rng.gen_range(0..=2);
    for _ in 0..terms {
        let c = rng.gen_range(-2..=2i64);
        if c == 0 {
            continue;
        }
        let mut term = Scalar::from_int(nv, c);
        let mut degree_left = max_degree;
        for v in 0..nv {
            if degree_left == 0 {
                break;
            }
            let e = rng.gen_range(0..=degree_left as u32);
            degree_left -= e as usize;
            if e > 0 {
                term = &term * &Scalar::var(nv, v).pow(e);
            }
        }
        out = &out + &term;
    }
    out
}

fn random_section(rng: &mut ChaCha8Rng, r: usize, nv: usize, max_degree: usize) -> Section {
    (0..r).map(|_| random_scalar(rng, nv, max_degree)).collect()
}

/// Random unimodular integer matrix: the identity stirred by elementary
/// row operations, so it is always invertible.
fn random_basis_change(rng: &mut ChaCha8Rng, r: usize, nv: usize) -> Matrix {
    let mut p = linalg::identity(r, nv);
    for _ in 0..(3 * r) {
        let i = rng.gen_range(0..r);
        let mut j = rng.gen_range(0..r);
        if i == j {
            j = (j + 1) % r;
        }
        if r == 1 {
            break;
        }
        match rng.gen_range(0..3) {
            0 => p.swap(i, j),
            _ => {
                let c = Scalar::from_int(nv, if rng.gen_bool(0.5) { 1 } else { -1 });
                let row: Vec<Scalar> = p[j].iter().map(|v| v * &c).collect();
                for (a, b) in p[i].iter_mut().zip(&row) {
                    *a = &*a + b;
                }
            }
        }
    }
    p
}

/// Constant structure tables of the curated Lie algebra families per
/// rank; entry (i, j) with i < j holds the section of the bracket.
fn lie_structure_table(rng: &mut ChaCha8Rng, r: usize, nv: usize) -> Vec<((usize, usize), Section)> {
    let unit = |k: usize| -> Section {
        (0..r)
            .map(|i| {
                if i == k {
                    Scalar::one(nv)
                } else {
                    Scalar::zero(nv)
                }
            })
            .collect()
    };
    let neg_unit = |k: usize| -> Section { unit(k).iter().map(|s| -s).collect() };
    match r {
        1 => Vec::new(),
        2 => match rng.gen_range(0..2) {
            // abelian
            0 => Vec::new(),
            // affine line: [e1, e2] = e2
            _ => vec![((0, 1), unit(1))],
        },
        3 => match rng.gen_range(0..3) {
            0 => Vec::new(),
            // nilpotent: [e1, e2] = e3
            1 => vec![((0, 1), unit(2))],
            // rotations: [e1, e2] = e3, [e2, e3] = e1, [e3, e1] = e2
            _ => vec![
                ((0, 1), unit(2)),
                ((1, 2), unit(0)),
                ((0, 2), neg_unit(1)),
            ],
        },
        _ => match rng.gen_range(0..3) {
            0 => Vec::new(),
            // solvable: [e1, ej] = ej for j > 1
            1 => vec![((0, 1), unit(1)), ((0, 2), unit(2)), ((0, 3), unit(3))],
            // nilpotent plus a central direction: [e1, e2] = e3
            _ => vec![((0, 1), unit(2))],
        },
    }
}

fn conjugated_lie_algebroid(rng: &mut ChaCha8Rng, r: usize, nv: usize) -> Algebroid {
    let table = lie_structure_table(rng, r, nv);
    let p = random_basis_change(rng, r, nv);
    let pinv = linalg::invert(&p).expect("unimodular matrices invert");
    let mut structure = vec![vec![vec![Scalar::zero(nv); r]; r]; r];
    for ((i, j), sec) in &table {
        for (k, v) in sec.iter().enumerate() {
            structure[*i][*j][k] = v.clone();
            structure[*j][*i][k] = -v;
        }
    }
    let mut out = Algebroid::new(r, nv, Algebroid::zero_anchor(r, nv));
    for i in 0..r {
        for j in (i + 1)..r {
            // [f_i, f_j] with f = P e, expressed back in the f frame
            let mut sec = vec![Scalar::zero(nv); r];
            for a in 0..r {
                for b in 0..r {
                    let w = &p[i][a] * &p[j][b];
                    if w.is_zero() {
                        continue;
                    }
                    for c in 0..r {
                        if structure[a][b][c].is_zero() {
                            continue;
                        }
                        let coeff = &w * &structure[a][b][c];
                        for (d, s) in sec.iter_mut().enumerate() {
                            *s = &*s + &(&coeff * &pinv[c][d]);
                        }
                    }
                }
            }
            out.set_bracket(i, j, sec);
        }
    }
    out
}

fn random_form(rng: &mut ChaCha8Rng, r: usize, nv: usize, degree: usize, max_degree: usize) -> Tensor {
    let mut t = Tensor::zero(Variance::Form, degree, r, nv);
    for idx in Tensor::index_tuples(r, degree) {
        t.add_component(&idx, random_scalar(rng, nv, max_degree));
    }
    t
}

fn base_for(rng: &mut ChaCha8Rng, p: &GenParams) -> Algebroid {
    let (r, nv) = (p.rank, p.chart_dim);
    match p.kind {
        Kind::LieAlgebra => conjugated_lie_algebroid(rng, r, nv),
        Kind::TangentLike => {
            let mut anchor = Algebroid::zero_anchor(r, nv);
            for (i, row) in anchor.iter_mut().enumerate().take(nv.min(r)) {
                row[i] = Scalar::one(nv);
            }
            Algebroid::new(r, nv, anchor)
        }
        Kind::Skew | Kind::CosymplecticData | Kind::LcsData => {
            let mut anchor = Algebroid::zero_anchor(r, nv);
            for row in anchor.iter_mut() {
                for v in row.iter_mut() {
                    *v = random_scalar(rng, nv, p.max_degree);
                }
            }
            let mut a = Algebroid::new(r, nv, anchor);
            for i in 0..r {
                for j in (i + 1)..r {
                    a.set_bracket(i, j, random_section(rng, r, nv, p.max_degree));
                }
            }
            a
        }
    }
}

fn coform_tensor(nv: usize, v: &[Scalar]) -> Tensor {
    Tensor::from_vector(Variance::Form, nv, v)
}

/// Generates one named model. Unsupported parameter combinations are
/// rejected rather than silently clamped.
pub fn random_instance(seed: u64, params: &GenParams) -> Result<Model, Error> {
    validate(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r, nv) = (params.rank, params.chart_dim);
    let coords: Vec<String> = COORD_NAMES[..nv].iter().map(|s| s.to_string()).collect();
    let frame: Vec<String> = (1..=r).map(|i| format!("e{}", i)).collect();
    let algebroid = base_for(&mut rng, params);
    let mut model = Model::default();
    let mut tensors = Vec::new();
    let mut checks = Vec::new();
    match params.kind {
        Kind::Skew | Kind::LieAlgebra | Kind::TangentLike => {
            let mut pi = Tensor::zero(Variance::Multivector, 2, r, nv);
            for idx in Tensor::index_tuples(r, 2) {
                pi.add_component(&idx, random_scalar(&mut rng, nv, params.max_degree));
            }
            tensors.push(NamedTensor {
                name: "pi".into(),
                base: "A".into(),
                value: TensorValue::Multivector(pi),
            });
            checks.push(("classify", vec!["A"]));
            checks.push(("schouten_identity", vec!["A", "pi"]));
            if params.kind != Kind::Skew {
                checks.push(("lie", vec!["A"]));
            }
        }
        Kind::CosymplecticData => {
            // retry until the lowering map of the pair is invertible
            let (omega, eta) = loop {
                let omega = random_form(&mut rng, r, nv, 2, params.max_degree);
                let eta: Vec<Scalar> = (0..r)
                    .map(|_| random_scalar(&mut rng, nv, params.max_degree))
                    .collect();
                if make_cosymplectic(&algebroid, &omega, &eta).is_ok() {
                    break (omega, eta);
                }
            };
            tensors.push(NamedTensor {
                name: "omega".into(),
                base: "A".into(),
                value: TensorValue::Form(omega),
            });
            tensors.push(NamedTensor {
                name: "eta".into(),
                base: "A".into(),
                value: TensorValue::Form(coform_tensor(nv, &eta)),
            });
            checks.push(("cosymplectic_identities", vec!["A", "omega", "eta"]));
        }
        Kind::LcsData => {
            let omega = loop {
                let omega = random_form(&mut rng, r, nv, 2, params.max_degree);
                if pi_from_nondegenerate_form(&algebroid, &omega).is_ok() {
                    break omega;
                }
            };
            let theta: Vec<Scalar> = (0..r)
                .map(|_| random_scalar(&mut rng, nv, params.max_degree))
                .collect();
            tensors.push(NamedTensor {
                name: "omega".into(),
                base: "A".into(),
                value: TensorValue::Form(omega),
            });
            tensors.push(NamedTensor {
                name: "theta".into(),
                base: "A".into(),
                value: TensorValue::Form(coform_tensor(nv, &theta)),
            });
            checks.push(("lcs_identities", vec!["A", "omega", "theta"]));
        }
    }
    model.algebroids.push(NamedAlgebroid {
        name: "A".into(),
        coords,
        frame,
        algebroid,
    });
    model.tensors = tensors;
    model.checks = checks
        .into_iter()
        .map(|(name, args)| CheckRequest {
            name: name.into(),
            args: args.into_iter().map(String::from).collect(),
            line: 0,
        })
        .collect();
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::Classification;
    use crate::checks::{run_checks, Verdict};
    use crate::model::{parse_model, print_model};

    fn params(kind: Kind, rank: usize, chart_dim: usize) -> GenParams {
        GenParams {
            rank,
            chart_dim,
            max_degree: 1,
            kind,
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = params(Kind::Skew, 3, 2);
        let a = random_instance(7, &p).unwrap();
        let b = random_instance(7, &p).unwrap();
        assert_eq!(a, b);
        let c = random_instance(8, &p).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_models_round_trip() {
        for (kind, rank) in [
            (Kind::Skew, 3),
            (Kind::LieAlgebra, 3),
            (Kind::TangentLike, 2),
            (Kind::CosymplecticData, 3),
            (Kind::LcsData, 2),
        ] {
            let m = random_instance(11, &params(kind, rank, 1)).unwrap();
            let printed = print_model(&m);
            let again = parse_model(&printed).unwrap_or_else(|e| {
                panic!("reparse of {:?} failed: {:?}\n{}", kind, e, printed)
            });
            assert_eq!(m, again, "{:?}", kind);
        }
    }

    #[test]
    fn lie_kind_generates_lie_algebroids() {
        for seed in 0..20 {
            let m = random_instance(seed, &params(Kind::LieAlgebra, 4, 0)).unwrap();
            assert_eq!(
                m.algebroids[0].algebroid.classify(),
                Classification::Lie,
                "seed {}",
                seed
            );
        }
    }

    #[test]
    fn tangent_kind_generates_lie_algebroids() {
        let m = random_instance(3, &params(Kind::TangentLike, 3, 2)).unwrap();
        let a = &m.algebroids[0].algebroid;
        assert_eq!(a.classify(), Classification::Lie);
        assert_eq!(a.anchor_matrix()[0][0], crate::coeff::Scalar::one(2));
    }

    #[test]
    fn generated_checks_pass() {
        for seed in 0..10 {
            for (kind, rank) in [
                (Kind::Skew, 3),
                (Kind::CosymplecticData, 3),
                (Kind::LcsData, 2),
            ] {
                let m = random_instance(seed, &params(kind, rank, 1)).unwrap();
                let report = run_checks(&m);
                for o in &report.outcomes {
                    assert_eq!(o.verdict, Verdict::Pass, "seed {} {:?} {}", seed, kind, o.check);
                }
            }
        }
    }

    #[test]
    fn unsupported_params_are_rejected() {
        assert!(matches!(
            random_instance(0, &params(Kind::Skew, 5, 0)),
            Err(Error::UnsupportedParams(_))
        ));
        assert!(matches!(
            random_instance(0, &params(Kind::LcsData, 3, 0)),
            Err(Error::UnsupportedParams(_))
        ));
        assert!(matches!(
            random_instance(0, &params(Kind::CosymplecticData, 2, 0)),
            Err(Error::UnsupportedParams(_))
        ));
        let bad_degree = GenParams {
            rank: 2,
            chart_dim: 1,
            max_degree: 3,
            kind: Kind::Skew,
        };
        assert!(matches!(
            random_instance(0, &bad_degree),
            Err(Error::UnsupportedParams(_))
        ));
    }
}
