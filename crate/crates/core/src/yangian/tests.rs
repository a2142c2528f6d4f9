use super::*;
use crate::patterns::DegreeVector;
use crate::scalar::UPoly;

fn q(n: i64, d: i64) -> Scalar {
    Scalar::new(n, d)
}

fn env2() -> SpecEnv {
    SpecEnv::from_values(vec![q(3, 2), q(-2, 5)], q(7, 3), 8).unwrap()
}

fn pat(pi: &Composition, cells: Vec<u32>) -> GTPattern {
    GTPattern::from_cells(pi, cells).unwrap()
}

#[test]
fn e_coeff_rank_one() {
    let pi = Composition::new(vec![1, 1]).unwrap();
    let env = env2();
    let (x1, x2, h) = (&env.x[0], &env.x[1], &env.hbar);
    let src = pat(&pi, vec![1]);
    let tgt = GTPattern::zero(&pi);
    assert_eq!(e_coeff(&pi, &src, &tgt, 1, 1, &env).unwrap(), h - x1 + x2);
    assert!(e_coeff(&pi, &tgt, &tgt, 1, 1, &env).unwrap().is_zero());
    assert!(e_coeff(&pi, &pat(&pi, vec![3]), &tgt, 1, 1, &env).unwrap().is_zero());
}

#[test]
fn e_coeff_rejects_small_superscript() {
    let pi = Composition::new(vec![1, 2]).unwrap();
    let env = make_env(&pi, 1);
    let z = GTPattern::zero(&pi);
    assert!(matches!(e_coeff(&pi, &z, &z, 1, 1, &env), Err(Error::NoSuchGenerator(_))));
    assert!(f_coeff(&pi, &z, &z, 1, 0, &env).is_err());
}

#[test]
fn f_coeff_rank_one() {
    let pi = Composition::new(vec![1, 1]).unwrap();
    let env = env2();
    let z = GTPattern::zero(&pi);
    let one = pat(&pi, vec![1]);
    let hinv = env.hbar.inv().unwrap();
    assert_eq!(f_coeff(&pi, &z, &one, 1, 1, &env).unwrap(), -hinv.clone());
    assert_eq!(f_coeff(&pi, &z, &one, 1, 2, &env).unwrap(), &env.x[0] * &hinv);
    assert!(f_coeff(&pi, &z, &pat(&pi, vec![2]), 1, 1, &env).unwrap().is_zero());
}

fn make_env(pi: &Composition, seed: u64) -> SpecEnv {
    crate::scalar::make_spec_env(pi.total() as usize, 10, seed).unwrap()
}

#[test]
fn invalid_moves_vanish_through_the_formula() {
    let pi = Composition::new(vec![1, 1, 2]).unwrap();
    let env = make_env(&pi, 3);
    for d in crate::patterns::degree_vectors_up_to(2, 3) {
        for p in enumerate_patterns(&pi, &d).unwrap() {
            for i in 1..3 {
                for (j, a) in pi.row_cells(i) {
                    if p.moved(i, j, a, -1).is_none() {
                        let s = pi.shift(i) + 1;
                        assert!(e_coeff_formula(&p, i, j, a, s, &env).unwrap().is_zero());
                    }
                    if p.moved(i, j, a, 1).is_none() {
                        assert!(f_coeff_formula(&p, i, j, a, 1, &env).unwrap().is_zero());
                    }
                }
            }
        }
    }
}

#[test]
fn apply_generator_examples() {
    let pi = Composition::new(vec![1, 1]).unwrap();
    let env = env2();
    let hi = WeightVector::basis(&GTPattern::zero(&pi));
    let out = apply_generator(GeneratorLabel::f(1, 1), &hi, &env).unwrap().unwrap();
    assert_eq!(out.degree, DegreeVector(vec![1]));
    assert_eq!(out.coeff(&pat(&pi, vec![1])), -env.hbar.inv().unwrap());
    assert!(apply_generator(GeneratorLabel::e(1, 1), &hi, &env).unwrap().is_none());

    let v = WeightVector::basis(&pat(&pi, vec![2]));
    let dv = apply_generator(GeneratorLabel::d(2, 1), &v, &env).unwrap().unwrap();
    assert_eq!(dv.coeffs.len(), 1);
    assert!(dv.coeffs.contains_key(&pat(&pi, vec![2])));
}

#[test]
fn a_eigenvalue_examples() {
    let pi = Composition::new(vec![1, 2, 2]).unwrap();
    let env = make_env(&pi, 5);
    let z = GTPattern::zero(&pi);
    assert_eq!(a_eigenvalue(&pi, 0, &z, &env).unwrap(), UPoly::constant(Scalar::one()));
    for i in 0..=3 {
        let a = a_eigenvalue(&pi, i, &z, &env).unwrap();
        assert!(a.is_monic());
        assert_eq!(a.degree(), Some(pi.prefix(i) as usize));
    }
    let pi = Composition::new(vec![1, 1]).unwrap();
    let env = env2();
    let a = a_eigenvalue(&pi, 1, &GTPattern::zero(&pi), &env).unwrap();
    assert_eq!(a, UPoly::linear(&env.x[0] / &env.hbar));
}

#[test]
fn d_series_on_highest_vector() {
    let pi = Composition::new(vec![2, 2]).unwrap();
    let env = make_env(&pi, 9);
    let z = GTPattern::zero(&pi);
    let order = 6;
    for i in 1..=2 {
        // u^{-p_i} prod_j (u + i - 1 + x_j / hbar) over the i-th block
        let block = pi.blocks()[i - 1].clone();
        let roots: Vec<Scalar> = block
            .map(|k| Scalar::from_int(i as i64 - 1) + &env.x[k] / &env.hbar)
            .collect();
        let poly = crate::scalar::poly_from_roots(&roots);
        let deg = poly.degree().unwrap();
        let s = d_series(&pi, i, &z, &env, order).unwrap();
        for t in 0..=order {
            let want = if t <= deg { poly.coeff(deg - t) } else { Scalar::zero() };
            assert_eq!(s.coeff(t), want, "i={i} t={t}");
        }
    }
}

#[test]
fn truncated_d1_vanishes_in_rank_one() {
    let pi = Composition::new(vec![1, 1]).unwrap();
    let env = make_env(&pi, 2);
    for m in 0..=4 {
        let p = pat(&pi, vec![m]);
        for r in 2..8 {
            assert!(d_generator(&pi, 1, r, &p, &env).unwrap().is_zero());
        }
    }
}

#[test]
fn b_and_c_match_interpolation() {
    for parts in [vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 1, 2]] {
        let pi = Composition::new(parts).unwrap();
        let env = make_env(&pi, 17);
        for d in crate::patterns::degree_vectors_up_to(pi.n() - 1, 2) {
            for p in enumerate_patterns(&pi, &d).unwrap() {
                for i in 1..pi.n() {
                    let b = b_series(&pi, i, &p, &env).unwrap();
                    let c = c_series(&pi, i, &p, &env).unwrap();
                    let geo = Normalization::Geometric;
                    assert_eq!(b, interpolate_bc(SeriesKind::B, geo, &pi, i, &p, &env).unwrap());
                    assert_eq!(c, interpolate_bc(SeriesKind::C, geo, &pi, i, &p, &env).unwrap());
                    for poly in b.values().chain(c.values()) {
                        assert!(poly.degree().unwrap() < pi.prefix(i) as usize);
                    }
                }
            }
        }
    }
}

#[test]
fn b_kills_highest_vector() {
    let pi = Composition::new(vec![1, 2]).unwrap();
    let env = make_env(&pi, 1);
    assert!(b_series(&pi, 1, &GTPattern::zero(&pi), &env).unwrap().is_empty());
}

#[test]
fn fmo_rescaling() {
    let pi = Composition::new(vec![1, 1]).unwrap();
    let env = env2();
    let v = WeightVector::basis(&pat(&pi, vec![1]));
    let w = to_fmo(&v, Direction::ToFmo, &env);
    assert_eq!(w.coeff(&pat(&pi, vec![1])), -env.hbar.clone());
    assert_eq!(to_fmo(&w, Direction::ToGeometric, &env), v);
    let hi = WeightVector::basis(&GTPattern::zero(&pi));
    assert_eq!(to_fmo(&hi, Direction::ToFmo, &env), hi);
}

#[test]
fn fmo_engine_intertwines() {
    let pi = Composition::new(vec![1, 2]).unwrap();
    let env = make_env(&pi, 4);
    let geo = ActionEngine::new(&pi, &env, Normalization::Geometric).unwrap();
    let fmo = ActionEngine::new(&pi, &env, Normalization::Fmo).unwrap();
    let d = DegreeVector(vec![2]);
    for p in enumerate_patterns(&pi, &d).unwrap() {
        for label in [GeneratorLabel::e(1, 2), GeneratorLabel::e(1, 3), GeneratorLabel::f(1, 1), GeneratorLabel::f(1, 2)] {
            // Psi(X v) = X Psi(v)
            let v = WeightVector::basis(&p);
            let tgt = label.target_degree(&d).unwrap();
            let xv = WeightVector { pi: pi.clone(), degree: tgt, coeffs: geo.apply(label, &v.coeffs).unwrap() };
            let lhs = to_fmo(&xv, Direction::ToFmo, &env);
            let pv = to_fmo(&v, Direction::ToFmo, &env);
            assert_eq!(lhs.coeffs, fmo.apply(label, &pv.coeffs).unwrap());
        }
    }
}

#[test]
fn relation_b_rank_one_and_perturbation() {
    let pi = Composition::new(vec![1, 1]).unwrap();
    let mut check = RelationCheck::new(&pi, 2, 11, 1);
    let rep = verify_relation(RelationId::B, &check).unwrap();
    assert!(rep.holds, "{:?}", rep.witness);
    check.perturb = true;
    let rep = verify_relation(RelationId::B, &check).unwrap();
    assert!(!rep.holds);
    let w = serde_json::to_value(rep.witness.unwrap()).unwrap();
    assert_eq!(w["relation"], "b");
    assert_eq!(w["pi"], serde_json::json!([1, 1]));
}

#[test]
fn all_relations_small() {
    for parts in [vec![1, 2], vec![1, 1, 1]] {
        let pi = Composition::new(parts).unwrap();
        for norm in [Normalization::Geometric, Normalization::Fmo] {
            let mut check = RelationCheck::new(&pi, 2, 5, 1);
            check.normalization = norm;
            for rel in RelationId::ALL {
                let rep = verify_relation(rel, &check).unwrap();
                assert!(rep.holds, "{rel} {norm:?} {:?}", rep.witness);
            }
        }
    }
}

#[test]
fn operator_matrix_degrees() {
    let pi = Composition::new(vec![1, 1, 1]).unwrap();
    let env = make_env(&pi, 8);
    let engine = ActionEngine::new(&pi, &env, Normalization::Geometric).unwrap();
    let m = engine.operator_matrix(GeneratorLabel::f(2, 1), &DegreeVector(vec![1, 0])).unwrap().unwrap();
    assert_eq!(m.target_degree, DegreeVector(vec![1, 1]));
    for (s, t) in m.entries.keys() {
        assert_eq!(s.degree(), m.source_degree);
        assert_eq!(t.degree(), m.target_degree);
    }
    assert!(engine.operator_matrix(GeneratorLabel::e(1, 1), &DegreeVector(vec![0, 0])).unwrap().is_none());
}
