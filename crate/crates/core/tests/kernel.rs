use std::sync::Arc;

use vertex_core::algebras::{heisenberg, heisenberg_virasoro, sl2_affine, sugawara, sugawara_with};
use vertex_core::coefficients::{Poly, Scalar};
use vertex_core::kernel::{render_field, ConformalWeight, Engine, Factor, Field, Monomial};

fn engine(spec: vertex_core::AlgebraSpec) -> Engine {
    Engine::new(Arc::new(spec))
}

fn word(factors: &[(usize, u32)]) -> Field {
    let fs: Vec<Factor> = factors.iter().map(|&(g, d)| Factor::new(g, d)).collect();
    Field::monomial(Monomial::from_sorted(fs).expect("canonical word"))
}

#[test]
fn derivative_basics() {
    let e = engine(heisenberg(1));
    assert!(e.derive(&Field::vacuum()).is_zero());
    assert_eq!(e.derive(&word(&[(0, 0)])), word(&[(0, 1)]));
    // ∂:a ∂a: = :∂a ∂a: + :a ∂²a: -- canonical order puts higher derivatives first.
    let d = e.derive(&word(&[(0, 1), (0, 0)]));
    assert_eq!(d, &word(&[(0, 1), (0, 1)]) + &word(&[(0, 2), (0, 0)]));
}

#[test]
fn wick_unit_and_reordering() {
    let e = engine(heisenberg(1));
    let a = word(&[(0, 0)]);
    assert_eq!(e.wick(&Field::vacuum(), &a), a);
    assert_eq!(e.wick(&a, &a), word(&[(0, 0), (0, 0)]));
    let da = word(&[(0, 1)]);
    assert_eq!(e.wick(&da, &a), word(&[(0, 1), (0, 0)]));
    assert_eq!(e.wick(&a, &da), word(&[(0, 1), (0, 0)]));
    let four = e.iterated_wick(&[a.clone(), a.clone(), a.clone(), a.clone()]).unwrap();
    assert_eq!(four, word(&[(0, 0); 4]));
}

#[test]
fn heisenberg_products() {
    let e = engine(heisenberg(2));
    let (a1, a2) = (Field::generator(0), Field::generator(1));
    assert_eq!(e.nproduct(&a1, &a1, 1), Field::vacuum());
    assert!(e.ope(&a1, &a2).is_empty());
    let da = e.derive(&a1);
    assert_eq!(e.nproduct(&da, &a1, 2), Field::scalar(Scalar::from_int(-2)));
}

#[test]
fn heisenberg_virasoro_ope() {
    let e = engine(heisenberg(1));
    let l = heisenberg_virasoro(&e);
    let ope = e.ope(&l, &l);
    let expected = vec![
        (0, e.derive(&l)),
        (1, l.scaled(&Scalar::from_int(2))),
        (3, Field::scalar(Scalar::ratio(1, 2))),
    ];
    assert_eq!(ope, expected);
    let a = Field::generator(0);
    assert_eq!(e.nproduct(&l, &a, 1), a);
    assert!(e.nproduct(&l, &a, 2).is_zero());
}

#[test]
fn sugawara_central_charge() {
    let e = engine(sl2_affine());
    let l = sugawara(&e).unwrap();
    let k = Scalar::k();
    let c = Scalar::new(Poly::from_i64s(&[0, 3]), Poly::from_i64s(&[2, 1])).unwrap();
    assert_eq!(e.nproduct(&l, &l, 3), Field::scalar(&c * &Scalar::ratio(1, 2)));
    assert_eq!(e.nproduct(&l, &l, 1), l.scaled(&Scalar::from_int(2)));
    let h = Field::generator(2);
    assert_eq!(e.nproduct(&l, &h, 1), h);
    assert!(e.nproduct(&l, &h, 2).is_zero());
    // Explicit Casimir data :xy: + :yx: + ½:hh: gives the same field.
    let half = num_rational::BigRational::new(1.into(), 2.into());
    let one = num_rational::BigRational::from_integer(1.into());
    let explicit = sugawara_with(&e, &[(0, 1, one.clone()), (1, 0, one), (2, 2, half)]).unwrap();
    assert_eq!(explicit, l);
    let _ = k;
}

#[test]
fn weights() {
    let e = engine(heisenberg(1));
    let a = Field::generator(0);
    assert_eq!(e.conformal_weight(&Field::vacuum()), ConformalWeight::Homogeneous(0));
    let w02 = e.wick(&a, &e.derive_n(&a, 2));
    assert_eq!(e.conformal_weight(&w02), ConformalWeight::Homogeneous(4));
    assert_eq!(e.conformal_weight(&(&a + &e.wick(&a, &a))), ConformalWeight::Mixed);
}

#[test]
fn rendering() {
    let spec = heisenberg(1);
    let e = engine(spec.clone());
    let a = Field::generator(0);
    let f = &e.wick(&a, &e.derive_n(&a, 2)).scaled(&Scalar::ratio(-5, 4)) + &Field::scalar(Scalar::k());
    assert_eq!(render_field(&spec, &f), "k - 5/4*:d^2 a a:");
}

mod oracle {
    use super::*;
    use num_rational::BigRational;
    use vertex_core::fock::{oracle_verify, FockModule, ModuleState};

    #[test]
    fn omega00_mode_on_one_particle_state() {
        let spec = heisenberg(1);
        let e = engine(spec.clone());
        let a = Field::generator(0);
        let w00 = e.wick(&a, &a);
        let fm = FockModule::new(&spec, None, 6).unwrap();
        let v = fm.creation_state(&[(0, -1)]);
        let out = fm.mode_action(&w00, 1, &v).unwrap();
        let mut expected = ModuleState::zero();
        expected.add_scaled(&v, &BigRational::from_integer(2.into()));
        assert_eq!(out, expected);
    }

    #[test]
    fn kernel_reordering_agrees_with_oracle() {
        for spec in [heisenberg(2), sl2_affine()] {
            let e = engine(spec.clone());
            let n = spec.generator_count();
            for g in 0..n {
                for h in 0..n {
                    // Built in two different nestings; the oracle only sees the normal forms.
                    let word = [Factor::new(g, 1), Factor::new(h, 0), Factor::new(0, 0)];
                    let nested = e.normalize_word(&word);
                    let left = e.wick(&e.wick(&word_field(&e, word[0]), &word_field(&e, word[1])), &Field::generator(0));
                    let fm = FockModule::new(&spec, None, 5).unwrap();
                    let direct = fm
                        .creation_state(&[(g, -2), (h, -1), (0, -1)]);
                    assert_eq!(fm.state_of(&nested).unwrap(), direct);
                    let r = oracle_verify(&spec, &left, &left, 4, None).unwrap();
                    assert!(r.agree);
                }
            }
        }
    }

    fn word_field(e: &Engine, f: Factor) -> Field {
        e.derive_n(&Field::generator(f.gen()), f.deriv)
    }
}
