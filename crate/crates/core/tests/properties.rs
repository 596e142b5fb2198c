//! Randomized checks of the vertex-algebra axioms and of the coefficient field.

use std::sync::{Arc, OnceLock};

use num_rational::BigRational;
use proptest::prelude::*;
use vertex_core::algebras::{heisenberg, sl2_affine, CARTAN};
use vertex_core::coefficients::{binomial, factorial, Poly, Scalar};
use vertex_core::fock::{Expr, FockModule};
use vertex_core::kernel::{AlgebraSpec, Engine, Factor, Field, Monomial};
use vertex_core::orbifold::{derivative_basis, is_invariant, mixed_rewrite_formula, omega, rewrite_derivative_basis};

fn h2() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| Engine::new(Arc::new(heisenberg(2))))
}

fn sl2_at_5() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| Engine::new(Arc::new(sl2_affine().specialize(&BigRational::from_integer(5.into())).unwrap())))
}

fn sl2_symbolic() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| Engine::new(Arc::new(sl2_affine())))
}

fn module(spec: &AlgebraSpec) -> FockModule {
    FockModule::new(spec, Some(BigRational::from_integer(5.into())), 4).unwrap()
}

fn h2_module() -> &'static FockModule {
    static M: OnceLock<FockModule> = OnceLock::new();
    M.get_or_init(|| module(h2().spec()))
}

fn sl2_module() -> &'static FockModule {
    static M: OnceLock<FockModule> = OnceLock::new();
    M.get_or_init(|| module(sl2_symbolic().spec()))
}

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn monomial(gens: usize, max_len: usize) -> impl Strategy<Value = Monomial> {
    prop::collection::vec((0..gens, 0u32..=2), 1..=max_len)
        .prop_map(|fs| Monomial::sorted(fs.into_iter().map(|(g, d)| Factor::new(g, d)).collect()))
}

/// Sums of one or two short words with small integer coefficients.
fn field(gens: usize) -> impl Strategy<Value = Field> {
    prop::collection::vec((monomial(gens, 2), -3i64..=3), 1..=2).prop_map(|terms| {
        let mut f = Field::zero();
        for (m, c) in terms {
            f.add_term(m, s(c));
        }
        f
    })
}

/// Words with an even number of factors, so every term is fixed by the sign involution.
fn even_field(gens: usize) -> impl Strategy<Value = Field> {
    prop::collection::vec((monomial(gens, 2), -3i64..=3), 1..=2).prop_map(|terms| {
        let mut f = Field::zero();
        for (m, c) in terms {
            let mut factors = m.factors().to_vec();
            if factors.len() % 2 == 1 {
                factors.push(Factor::new(0, 0));
            }
            f.add_term(Monomial::sorted(factors), s(c));
        }
        f
    })
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-4i64..=4, 1..=3).prop_map(|c| Poly::from_i64s(&c))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (poly(), poly()).prop_filter_map("zero denominator", |(n, d)| Scalar::new(n, d).ok())
}

fn translation(e: &Engine, a: &Field, b: &Field, n: i64) -> Result<(), TestCaseError> {
    let lhs = e.nproduct(&e.derive(a), b, n);
    prop_assert_eq!(lhs, e.nproduct(a, b, n - 1).scaled(&s(-n)));
    let whole = e.derive(&e.nproduct(a, b, n));
    let split = &e.nproduct(&e.derive(a), b, n) + &e.nproduct(a, &e.derive(b), n);
    prop_assert_eq!(whole, split);
    Ok(())
}

/// `b∘_n a = Σ_j (-1)^{n+j+1} ∂^{(j)} (a∘_{n+j} b)`.
fn skew_symmetry(e: &Engine, a: &Field, b: &Field, n: i64) -> Result<(), TestCaseError> {
    let top = e.locality_bound(a, b) as i64;
    let mut rhs = Field::zero();
    for j in 0..(top - n).max(0) {
        let sign = if (n + j + 1) % 2 == 0 { 1 } else { -1 };
        let c = Scalar::from_rational(&BigRational::new(sign.into(), factorial(j as u32)));
        rhs.add_scaled(&e.derive_n(&e.nproduct(a, b, n + j), j as u32), &c);
    }
    prop_assert_eq!(e.nproduct(b, a, n), rhs);
    Ok(())
}

/// `a∘_m (b∘_n c) - b∘_n (a∘_m c) = Σ_j binom(m,j) (a∘_j b)∘_{m+n-j} c` for `m >= 0`.
fn commutator(e: &Engine, a: &Field, b: &Field, c: &Field, m: i64, n: i64) -> Result<(), TestCaseError> {
    let lhs = &e.nproduct(a, &e.nproduct(b, c, n), m) - &e.nproduct(b, &e.nproduct(a, c, m), n);
    let mut rhs = Field::zero();
    for j in 0..=m {
        let ab = e.nproduct(a, b, j);
        rhs.add_scaled(&e.nproduct(&ab, c, m + n - j), &Scalar::from_bigint(binomial(m, j as u32)));
    }
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

fn oracle_agrees(e: &Engine, fm: &FockModule, a: &Field, b: &Field, n: i64) -> Result<(), TestCaseError> {
    let kernel = Expr::field(e.nproduct(a, b, n));
    let modes = Expr::field(a.clone()).nprod(Expr::field(b.clone()), n);
    let report = fm.verify_exprs(&modes, &kernel).unwrap();
    prop_assert!(report.agree, "{:?}", report.witness);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn scalar_field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
            prop_assert_eq!(b.checked_div(&a).unwrap(), &b * &a.inv().unwrap());
        }
        prop_assert_eq!(a.pow(2), &a * &a);
    }

    #[test]
    fn scalars_are_canonical(n in poly(), d in poly(), g in poly()) {
        prop_assume!(!d.is_zero() && !g.is_zero());
        let plain = Scalar::new(n.clone(), d.clone()).unwrap();
        let scaled = Scalar::new(&n * &g, &d * &g).unwrap();
        prop_assert_eq!(plain, scaled);
    }

    #[test]
    fn evaluation_is_a_ring_map(a in scalar(), b in scalar(), x in -6i64..=6) {
        let at = BigRational::from_integer(x.into());
        if let (Ok(va), Ok(vb)) = (a.eval(&at), b.eval(&at)) {
            prop_assert_eq!((&a * &b).eval(&at).unwrap(), &va * &vb);
            prop_assert_eq!((&a + &b).eval(&at).unwrap(), &va + &vb);
        }
    }

    #[test]
    fn translation_h2(a in field(2), b in field(2), n in -3i64..=4) {
        translation(h2(), &a, &b, n)?;
    }

    #[test]
    fn translation_sl2(a in field(3), b in field(3), n in -3i64..=4) {
        translation(sl2_at_5(), &a, &b, n)?;
    }

    #[test]
    fn skew_symmetry_h2(a in field(2), b in field(2), n in -2i64..=3) {
        skew_symmetry(h2(), &a, &b, n)?;
    }

    #[test]
    fn skew_symmetry_sl2(a in field(3), b in field(3), n in -2i64..=3) {
        skew_symmetry(sl2_at_5(), &a, &b, n)?;
    }

    #[test]
    fn commutator_h2(a in field(2), b in field(2), c in field(2), m in 0i64..=2, n in -2i64..=2) {
        commutator(h2(), &a, &b, &c, m, n)?;
    }

    #[test]
    fn commutator_sl2(a in field(3), b in field(3), c in field(3), m in 0i64..=2, n in -2i64..=2) {
        commutator(sl2_at_5(), &a, &b, &c, m, n)?;
    }

    #[test]
    fn symbolic_sl2_specializes_to_numeric(a in field(3), b in field(3), n in -2i64..=2) {
        let at = BigRational::from_integer(5.into());
        let symbolic = sl2_symbolic().nproduct(&a, &b, n);
        let special = symbolic.map_coefficients(|c| c.specialize(&at)).unwrap();
        prop_assert_eq!(special, sl2_at_5().nproduct(&a, &b, n));
    }

    #[test]
    fn invariants_close_under_products(a in even_field(2), b in even_field(2), n in -2i64..=3) {
        let e = h2();
        prop_assert!(is_invariant(e, &a, CARTAN).unwrap());
        prop_assert!(is_invariant(e, &e.nproduct(&a, &b, n), CARTAN).unwrap());
    }

    #[test]
    fn rewrite_dimensions(i in 0usize..2, j in 0usize..2, a in 0u32..=4, b in 0u32..=4) {
        let m = a + b;
        let basis = derivative_basis(i, j, m);
        let expected = if i == j { m as usize / 2 + 1 } else { m as usize + 1 };
        prop_assert_eq!(basis.len(), expected);
        let e = h2();
        let rw = rewrite_derivative_basis(e, i, j, a, b).unwrap();
        prop_assert_eq!(rw.expand(e).unwrap(), omega(e, i, j, a, b).unwrap());
        if i != j {
            let formula = mixed_rewrite_formula(i, j, a, m).expand(e).unwrap();
            prop_assert_eq!(formula, omega(e, i, j, a, b).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn oracle_agrees_h2(a in field(2), b in field(2), n in -2i64..=2) {
        oracle_agrees(h2(), h2_module(), &a, &b, n)?;
    }

    #[test]
    fn oracle_agrees_sl2(a in field(3), b in field(3), n in -2i64..=2) {
        oracle_agrees(sl2_symbolic(), sl2_module(), &a, &b, n)?;
    }
}
