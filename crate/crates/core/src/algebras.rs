//! Constructors for Heisenberg and affine vertex algebras, Sugawara vectors,
//! and the eigenbasis of the Cartan involution.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coefficients::Scalar;
use crate::kernel::{AlgebraSpec, Engine, Field, KernelError, Monomial, SpecBuilder};

/// Name of the involution registered on every algebra built here.
pub const CARTAN: &str = "cartan";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("bracket is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("Jacobi identity fails for ({0}, {1}, {2})")]
    Jacobi(usize, usize, usize),
    #[error("bilinear form is not symmetric at ({0}, {1})")]
    AsymmetricForm(usize, usize),
    #[error("bilinear form is not invariant at ({0}, {1}, {2})")]
    NotInvariant(usize, usize, usize),
    #[error("bilinear form is degenerate")]
    DegenerateForm,
    #[error("structure data has inconsistent dimensions")]
    Dimension,
    #[error("critical level k = -h∨: no Sugawara vector")]
    CriticalLevel,
    #[error("spec carries no affine data (level, form, dual Coxeter number)")]
    NotAffine,
    #[error("inconsistent root data: {0}")]
    RootData(String),
    #[error("table entry {0} is not linear in the generators")]
    NonlinearTable(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Rank-`n` Heisenberg algebra: `a∘_1 a = 1`, or `ai∘_1 aj = δ_ij` for `n > 1`.
pub fn heisenberg(n: usize) -> AlgebraSpec {
    assert!(n >= 1, "rank must be positive");
    let mut b = SpecBuilder::new(&format!("heisenberg{n}"));
    b.involution(CARTAN);
    for i in 0..n {
        let name = if n == 1 { "a".to_string() } else { format!("a{}", i + 1) };
        let g = b.generator(&name, 1).unwrap();
        b.parity(g, CARTAN, -1).unwrap();
    }
    for i in 0..n {
        b.entry(i, i, 1, Field::vacuum()).unwrap();
    }
    b.build().expect("Heisenberg table is consistent")
}

/// `L = ½ Σ :ai ai:`, the Virasoro field of central charge `n`.
pub fn heisenberg_virasoro(engine: &Engine) -> Field {
    let mut l = Field::zero();
    for i in 0..engine.spec().generator_count() {
        let a = Field::generator(i);
        l.add_scaled(&engine.wick(&a, &a), &Scalar::ratio(1, 2));
    }
    l
}

/// Structure data of a finite-dimensional Lie algebra with an invariant form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieData {
    pub names: Vec<String>,
    /// `bracket[i][j][l]`: coefficient of basis vector `l` in `[e_i, e_j]`.
    pub bracket: Vec<Vec<Vec<BigRational>>>,
    pub form: Vec<Vec<BigRational>>,
    pub dual_coxeter: Option<BigRational>,
}

impl LieData {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    fn bracket_vec(&self, u: &[BigRational], v: &[BigRational]) -> Vec<BigRational> {
        let d = self.dim();
        let mut out = vec![BigRational::zero(); d];
        for i in 0..d {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if v[j].is_zero() {
                    continue;
                }
                let c = &u[i] * &v[j];
                for (l, o) in out.iter_mut().enumerate() {
                    *o += &c * &self.bracket[i][j][l];
                }
            }
        }
        out
    }

    fn form_on(&self, u: &[BigRational], v: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                s += &u[i] * &self.form[i][j] * &v[j];
            }
        }
        s
    }

    /// Antisymmetry, Jacobi identity, symmetry and invariance of the form.
    pub fn validate(&self) -> Result<(), AlgebraError> {
        let d = self.dim();
        if self.bracket.len() != d
            || self.bracket.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d))
            || self.form.len() != d
            || self.form.iter().any(|r| r.len() != d)
        {
            return Err(AlgebraError::Dimension);
        }
        let unit = |i: usize| {
            let mut v = vec![BigRational::zero(); d];
            v[i] = BigRational::one();
            v
        };
        for i in 0..d {
            for j in 0..d {
                if (0..d).any(|l| self.bracket[i][j][l] != -self.bracket[j][i][l].clone()) {
                    return Err(AlgebraError::NotAntisymmetric(i, j));
                }
                if self.form[i][j] != self.form[j][i] {
                    return Err(AlgebraError::AsymmetricForm(i, j));
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let (ei, ej, el) = (unit(i), unit(j), unit(l));
                    let a = self.bracket_vec(&ei, &self.bracket_vec(&ej, &el));
                    let b = self.bracket_vec(&ej, &self.bracket_vec(&el, &ei));
                    let c = self.bracket_vec(&el, &self.bracket_vec(&ei, &ej));
                    if (0..d).any(|t| !(&a[t] + &b[t] + &c[t]).is_zero()) {
                        return Err(AlgebraError::Jacobi(i, j, l));
                    }
                    let lhs = self.form_on(&self.bracket_vec(&ei, &ej), &el);
                    let rhs = self.form_on(&ei, &self.bracket_vec(&ej, &el));
                    if lhs != rhs {
                        return Err(AlgebraError::NotInvariant(i, j, l));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The universal affine vertex algebra at `level` (use [`Scalar::k`] for the
/// formal level): `X∘_1 Y = level·B(X,Y)` and `X∘_0 Y = [X,Y]`.
pub fn affine(name: &str, data: &LieData, level: Scalar) -> Result<AlgebraSpec, AlgebraError> {
    data.validate()?;
    let d = data.dim();
    let mut b = SpecBuilder::new(name).symbolic(!level.is_constant());
    for n in &data.names {
        b.generator(n, 1)?;
    }
    for i in 0..d {
        for j in 0..d {
            let pole2 = &level * &Scalar::from_rational(&data.form[i][j]);
            b.entry(i, j, 1, Field::scalar(pole2))?;
            let mut pole1 = Field::zero();
            for l in 0..d {
                pole1.add_term(
                    Monomial::single(crate::kernel::Factor::new(l, 0)),
                    Scalar::from_rational(&data.bracket[i][j][l]),
                );
            }
            b.entry(i, j, 0, pole1)?;
        }
    }
    b.affine_data(data.dual_coxeter.clone(), data.form.clone(), level);
    Ok(b.build()?)
}

/// sl2 in the basis `x, y, h` with `(x|y) = 1`, `(h|h) = 2`.
pub fn sl2_data() -> LieData {
    let z = || vec![vec![vec![BigRational::zero(); 3]; 3]; 3];
    let mut br = z();
    let (x, y, h) = (0, 1, 2);
    let mut set = |i: usize, j: usize, l: usize, c: i64| {
        br[i][j][l] = rat(c, 1);
        br[j][i][l] = rat(-c, 1);
    };
    set(x, y, h, 1);
    set(h, x, x, 2);
    set(h, y, y, -2);
    let form = vec![
        vec![rat(0, 1), rat(1, 1), rat(0, 1)],
        vec![rat(1, 1), rat(0, 1), rat(0, 1)],
        vec![rat(0, 1), rat(0, 1), rat(2, 1)],
    ];
    LieData {
        names: vec!["x".into(), "y".into(), "h".into()],
        bracket: br,
        form,
        dual_coxeter: Some(rat(2, 1)),
    }
}

/// `sl_{n+1}` in the basis `x_ij = E_ij`, `y_ij = E_ji` (`i < j`) and
/// `h_i = E_ii - E_{i+1,i+1}`, with the trace form, together with its root data.
pub fn sl_data(n: usize) -> (LieData, RootData) {
    let size = n + 1;
    let mut mats: Vec<Vec<Vec<BigRational>>> = Vec::new();
    let mut names = Vec::new();
    let unit = |r: usize, c: usize| {
        let mut m = vec![vec![BigRational::zero(); size]; size];
        m[r][c] = BigRational::one();
        m
    };
    let pairs: Vec<(usize, usize)> = (0..size).flat_map(|i| (i + 1..size).map(move |j| (i, j))).collect();
    for &(i, j) in &pairs {
        names.push(format!("x{}{}", i + 1, j + 1));
        mats.push(unit(i, j));
    }
    for &(i, j) in &pairs {
        names.push(format!("y{}{}", i + 1, j + 1));
        mats.push(unit(j, i));
    }
    for i in 0..n {
        names.push(format!("h{}", i + 1));
        let mut m = unit(i, i);
        m[i + 1][i + 1] = -BigRational::one();
        mats.push(m);
    }
    let m = pairs.len();
    let dim = mats.len();
    let mul = |a: &Vec<Vec<BigRational>>, b: &Vec<Vec<BigRational>>| {
        let mut out = vec![vec![BigRational::zero(); size]; size];
        for r in 0..size {
            for t in 0..size {
                if a[r][t].is_zero() {
                    continue;
                }
                for c in 0..size {
                    out[r][c] += &a[r][t] * &b[t][c];
                }
            }
        }
        out
    };
    // Coordinates of a traceless matrix in the basis above.
    let coords = |a: &Vec<Vec<BigRational>>| {
        let mut v = vec![BigRational::zero(); dim];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            v[p] = a[i][j].clone();
            v[m + p] = a[j][i].clone();
        }
        let mut acc = BigRational::zero();
        for i in 0..n {
            acc += &a[i][i];
            v[2 * m + i] = acc.clone();
        }
        v
    };
    let mut bracket = vec![vec![Vec::new(); dim]; dim];
    let mut form = vec![vec![BigRational::zero(); dim]; dim];
    for u in 0..dim {
        for v in 0..dim {
            let (ab, ba) = (mul(&mats[u], &mats[v]), mul(&mats[v], &mats[u]));
            let comm: Vec<Vec<BigRational>> =
                ab.iter().zip(&ba).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect();
            bracket[u][v] = coords(&comm);
            form[u][v] = (0..size).map(|i| ab[i][i].clone()).sum();
        }
    }
    let data = LieData { names, bracket, form, dual_coxeter: Some(rat(size as i64, 1)) };
    let roots = RootData { roots: (0..m).map(|p| (p, m + p)).collect(), cartan: (2 * m..dim).collect() };
    (data, roots)
}

/// `V^k(sl2)` with formal level `k`.
pub fn sl2_affine() -> AlgebraSpec {
    affine("sl2", &sl2_data(), Scalar::k()).expect("sl2 data is valid")
}

/// Invert a rational matrix; `None` when singular.
fn invert(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let d = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = BigRational::one() / &a[c][c];
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        for r in 0..d {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (v, pv) in a[r].iter_mut().zip(pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[d..].to_vec()).collect())
}

/// Casimir data `Σ (B^{-1})_{ab} X_a ⊗ X_b`, equal to `Σ u ⊗ u` over any
/// orthonormal basis but computed without square roots.
pub fn casimir_from_form(spec: &AlgebraSpec) -> Result<Vec<(usize, usize, BigRational)>, AlgebraError> {
    let form = spec.bilinear_form.as_ref().ok_or(AlgebraError::NotAffine)?;
    let inv = invert(form).ok_or(AlgebraError::DegenerateForm)?;
    let mut out = Vec::new();
    for (a, row) in inv.iter().enumerate() {
        for (b, c) in row.iter().enumerate() {
            if !c.is_zero() {
                out.push((a, b, c.clone()));
            }
        }
    }
    Ok(out)
}

/// Sugawara vector `1/(2(k+h∨)) Σ c_ab :X_a X_b:` for explicitly supplied
/// Casimir data `(a, b, c_ab)`.
pub fn sugawara_with(
    engine: &Engine,
    casimir: &[(usize, usize, BigRational)],
) -> Result<Field, AlgebraError> {
    let spec = engine.spec();
    let level = spec.level.clone().ok_or(AlgebraError::NotAffine)?;
    let hv = spec.dual_coxeter.clone().ok_or(AlgebraError::NotAffine)?;
    let shifted = &level + &Scalar::from_rational(&hv);
    if shifted.is_zero() {
        return Err(AlgebraError::CriticalLevel);
    }
    let norm = (&Scalar::from_int(2) * &shifted).inv().map_err(|_| AlgebraError::CriticalLevel)?;
    let mut sum = Field::zero();
    for (a, b, c) in casimir {
        let term = engine.wick(&Field::generator(*a), &Field::generator(*b));
        sum.add_scaled(&term, &Scalar::from_rational(c));
    }
    Ok(sum.scaled(&norm))
}

/// Sugawara vector with the Casimir taken from the algebra's bilinear form.
pub fn sugawara(engine: &Engine) -> Result<Field, AlgebraError> {
    let casimir = casimir_from_form(engine.spec())?;
    sugawara_with(engine, &casimir)
}

/// Labels of a root basis: pairs `(x_β, y_β)` and Cartan elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootData {
    pub roots: Vec<(usize, usize)>,
    pub cartan: Vec<usize>,
}

impl RootData {
    pub fn sl2() -> Self {
        RootData { roots: vec![(0, 1)], cartan: vec![2] }
    }

    fn validate(&self, dim: usize) -> Result<(), AlgebraError> {
        let mut seen = vec![false; dim];
        let all = self.roots.iter().flat_map(|&(x, y)| [x, y]).chain(self.cartan.iter().copied());
        for i in all {
            if i >= dim {
                return Err(AlgebraError::RootData(format!("index {i} out of range")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(AlgebraError::RootData(format!("index {i} labeled twice")));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(AlgebraError::RootData(format!("index {i} unlabeled")));
        }
        Ok(())
    }
}

/// Generator names for the eigenbasis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenNames {
    pub e: Vec<String>,
    pub f: Vec<String>,
    pub h: Vec<String>,
}

/// Result of rewriting an affine algebra in the involution eigenbasis.
pub struct Eigenbasis {
    pub spec: AlgebraSpec,
    /// Image of each old generator as a linear field in the new generators.
    pub old_in_new: Vec<Field>,
    /// Image of each new generator as a linear field in the old generators.
    pub new_in_old: Vec<Field>,
}

/// Rewrites an affine algebra in the basis `E = x+y` (odd), `F = x-y` (even),
/// `h` (odd). New generators are ordered `E..., F..., h...`.
pub fn cartan_eigenbasis(
    spec: &AlgebraSpec,
    roots: &RootData,
    names: Option<EigenNames>,
) -> Result<Eigenbasis, AlgebraError> {
    roots.validate(spec.generator_count())?;
    let m = roots.roots.len();
    let l = roots.cartan.len();
    let names = names.unwrap_or_else(|| EigenNames {
        e: (1..=m).map(|i| format!("E{i}")).collect(),
        f: (1..=m).map(|i| format!("F{i}")).collect(),
        h: roots.cartan.iter().map(|&c| spec.generators()[c].name.clone()).collect(),
    });
    if names.e.len() != m || names.f.len() != m || names.h.len() != l {
        return Err(AlgebraError::RootData("wrong number of names".into()));
    }
    let old = |i: usize| Field::generator(i);
    let new = |i: usize| Field::generator(i);
    let half = Scalar::ratio(1, 2);
    let mut new_in_old = Vec::new();
    let mut old_in_new = vec![Field::zero(); spec.generator_count()];
    for (i, &(x, y)) in roots.roots.iter().enumerate() {
        new_in_old.push(&old(x) + &old(y));
        old_in_new[x] = (&new(i) + &new(m + i)).scaled(&half);
        old_in_new[y] = (&new(i) - &new(m + i)).scaled(&half);
    }
    for &(x, y) in &roots.roots {
        new_in_old.push(&old(x) - &old(y));
    }
    for (r, &h) in roots.cartan.iter().enumerate() {
        new_in_old.push(old(h));
        old_in_new[h] = new(2 * m + r);
    }

    let mut b = SpecBuilder::new(&format!("{}-eigen", spec.name())).symbolic(spec.symbolic_level());
    b.involution(CARTAN);
    let all_names = names.e.iter().chain(&names.f).chain(&names.h);
    for (i, name) in all_names.enumerate() {
        b.generator(name, 1)?;
        let odd = i < m || i >= 2 * m;
        b.parity(i, CARTAN, if odd { -1 } else { 1 })?;
    }
    let engine = Engine::new(Arc::new(spec.clone()));
    let count = new_in_old.len();
    for u in 0..count {
        for v in 0..count {
            for n in 0..2 {
                let prod = engine.nproduct(&new_in_old[u], &new_in_old[v], n);
                let mapped = linear_image(spec, &prod, &old_in_new)?;
                if !mapped.is_zero() {
                    b.entry(u, v, n as u32, mapped)?;
                }
            }
        }
    }
    if let (Some(form), Some(level)) = (&spec.bilinear_form, &spec.level) {
        let coords: Vec<Vec<BigRational>> = new_in_old
            .iter()
            .map(|f| {
                (0..spec.generator_count())
                    .map(|g| f.coefficient(&Monomial::single(crate::kernel::Factor::new(g, 0))))
                    .map(|c| c.as_rational().expect("constant change of basis"))
                    .collect()
            })
            .collect();
        let new_form = coords
            .iter()
            .map(|u| {
                coords
                    .iter()
                    .map(|v| {
                        let mut s = BigRational::zero();
                        for i in 0..u.len() {
                            for j in 0..v.len() {
                                s += &u[i] * &form[i][j] * &v[j];
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        b.affine_data(spec.dual_coxeter.clone(), new_form, level.clone());
    }
    Ok(Eigenbasis { spec: b.build()?, old_in_new, new_in_old })
}

/// Substitutes generators in a field whose terms have length at most one.
fn linear_image(spec: &AlgebraSpec, f: &Field, images: &[Field]) -> Result<Field, AlgebraError> {
    let mut out = Field::zero();
    for (m, c) in f.terms() {
        match m.factors() {
            [] => out.add_term(Monomial::vacuum(), c.clone()),
            [x] if x.deriv == 0 => out.add_scaled(&images[x.gen()], c),
            _ => {
                let text = crate::kernel::render_monomial(spec, m);
                return Err(AlgebraError::NonlinearTable(text));
            }
        }
    }
    Ok(out)
}

/// Maps a field into another algebra given the image of every basic generator.
pub fn transport(field: &Field, images: &[Field], target: &Engine) -> Field {
    let mut out = Field::zero();
    for (m, c) in field.terms() {
        let parts: Vec<Field> = m
            .factors()
            .iter()
            .map(|f| target.derive_n(&images[f.gen()], f.deriv))
            .collect();
        let image = if parts.is_empty() {
            Field::vacuum()
        } else {
            target.iterated_wick(&parts).unwrap()
        };
        out.add_scaled(&image, c);
    }
    out
}

/// sl2 in the eigenbasis `G = x+y`, `F = x-y`, `H = h`.
pub fn sl2_eigenbasis() -> Eigenbasis {
    let names = EigenNames { e: vec!["G".into()], f: vec!["F".into()], h: vec!["H".into()] };
    cartan_eigenbasis(&sl2_affine(), &RootData::sl2(), Some(names)).expect("sl2 root data is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_tables() {
        let h1 = heisenberg(1);
        assert_eq!(h1.generator_count(), 1);
        assert_eq!(h1.table().iter().count(), 1);
        let h3 = heisenberg(3);
        let e = Engine::new(Arc::new(h3));
        assert!(e.nproduct(&Field::generator(0), &Field::generator(2), 1).is_zero());
    }

    #[test]
    fn sl2_products() {
        let e = Engine::new(Arc::new(sl2_affine()));
        let (x, y, h) = (Field::generator(0), Field::generator(1), Field::generator(2));
        assert_eq!(e.nproduct(&x, &y, 1), Field::scalar(Scalar::k()));
        assert_eq!(e.nproduct(&x, &y, 0), h);
        assert_eq!(e.nproduct(&h, &h, 1), Field::scalar(&Scalar::from_int(2) * &Scalar::k()));
        assert_eq!(e.nproduct(&h, &y, 0), y.scaled(&Scalar::from_int(-2)));
        assert!(e.ope(&x, &x).is_empty());
    }

    #[test]
    fn abelian_affine_is_heisenberg() {
        let d = 2;
        let data = LieData {
            names: vec!["a1".into(), "a2".into()],
            bracket: vec![vec![vec![BigRational::zero(); d]; d]; d],
            form: vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]],
            dual_coxeter: None,
        };
        let spec = affine("abelian", &data, Scalar::one()).unwrap();
        assert_eq!(spec.table(), heisenberg(2).table());
    }

    #[test]
    fn jacobi_violation_is_rejected() {
        let mut data = sl2_data();
        data.bracket[2][0][0] = rat(3, 1);
        data.bracket[0][2][0] = rat(-3, 1);
        assert!(affine("bad", &data, Scalar::k()).is_err());
    }

    #[test]
    fn eigenbasis_products() {
        let eb = sl2_eigenbasis();
        let e = Engine::new(Arc::new(eb.spec));
        let (g, f, h) = (Field::generator(0), Field::generator(1), Field::generator(2));
        let two_k = &Scalar::from_int(2) * &Scalar::k();
        assert_eq!(e.nproduct(&g, &g, 1), Field::scalar(two_k.clone()));
        assert_eq!(e.nproduct(&f, &f, 1), Field::scalar(-two_k));
        assert_eq!(e.nproduct(&f, &g, 0), h.scaled(&Scalar::from_int(2)));
        assert!(e.nproduct(&f, &g, 1).is_zero());
    }

    #[test]
    fn critical_level_is_rejected() {
        let spec = affine("sl2", &sl2_data(), Scalar::from_int(-2)).unwrap();
        let e = Engine::new(Arc::new(spec));
        assert!(matches!(sugawara(&e), Err(AlgebraError::CriticalLevel)));
    }
}
