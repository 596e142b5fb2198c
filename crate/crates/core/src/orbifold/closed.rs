//! Closed forms for circle products among the quadratics `ω^{ij}_{a,b}` of a
//! rank-n Heisenberg algebra, and of `ω` with `∂^c α`.

use super::{factor_field, omega, OrbifoldError};
use crate::coefficients::{falling, Scalar};
use crate::kernel::{Engine, Field};

/// `λ_{a,b,c,m} = (b+c+1)_m (-1)^b + (a+c+1)_m (-1)^a` with falling factorials.
pub fn lambda(a: u32, b: u32, c: u32, m: u32) -> Scalar {
    &signed_falling(b, b + c + 1, m) + &signed_falling(a, a + c + 1, m)
}

fn signed_falling(sign_exp: u32, n: u32, m: u32) -> Scalar {
    let v = Scalar::from_bigint(falling(n as i64, m));
    if sign_exp.is_multiple_of(2) {
        v
    } else {
        -v
    }
}

/// One circle product `lhs ∘_m rhs` with a closed-form answer. Indices are
/// generator numbers of the Heisenberg algebra; distinct letters must be
/// pairwise distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// `ω^{ii}_{a,b} ∘_m ∂^c α^i`
    IiAlpha { i: usize, a: u32, b: u32, c: u32 },
    /// `ω^{ij}_{a,b} ∘_m ∂^c α^i`
    IjAlphaI { i: usize, j: usize, a: u32, b: u32, c: u32 },
    /// `ω^{ij}_{a,b} ∘_m ∂^c α^j`
    IjAlphaJ { i: usize, j: usize, a: u32, b: u32, c: u32 },
    /// `ω^{ij}_{a,b} ∘_m ω^{ij}_{c,d}`
    IjIj { i: usize, j: usize, a: u32, b: u32, c: u32, d: u32 },
    /// `ω^{ij}_{a,b} ∘_m ω^{jk}_{c,d}`
    IjJk { i: usize, j: usize, k: usize, a: u32, b: u32, c: u32, d: u32 },
    /// `ω^{ii}_{a,b} ∘_m ω^{ij}_{c,d}`
    IiIj { i: usize, j: usize, a: u32, b: u32, c: u32, d: u32 },
    /// `ω^{jj}_{a,b} ∘_m ω^{ij}_{c,d}`
    JjIj { i: usize, j: usize, a: u32, b: u32, c: u32, d: u32 },
    /// `ω^{ii}_{a,b} ∘_m ω^{ii}_{c,d}`
    IiIi { i: usize, a: u32, b: u32, c: u32, d: u32 },
}

impl ClosedForm {
    /// Largest `m` covered by the formula: `a+b+c+1`.
    pub fn max_m(&self) -> u32 {
        use ClosedForm::*;
        match *self {
            IiAlpha { a, b, c, .. }
            | IjAlphaI { a, b, c, .. }
            | IjAlphaJ { a, b, c, .. }
            | IjIj { a, b, c, .. }
            | IjJk { a, b, c, .. }
            | IiIj { a, b, c, .. }
            | JjIj { a, b, c, .. }
            | IiIi { a, b, c, .. } => a + b + c + 1,
        }
    }

    fn check_indices(&self) -> Result<(), OrbifoldError> {
        use ClosedForm::*;
        let ok = match *self {
            IiAlpha { .. } | IiIi { .. } => true,
            IjAlphaI { i, j, .. } | IjAlphaJ { i, j, .. } | IjIj { i, j, .. } | IiIj { i, j, .. } | JjIj { i, j, .. } => {
                i != j
            }
            IjJk { i, j, k, .. } => i != j && j != k && i != k,
        };
        if ok {
            Ok(())
        } else {
            Err(OrbifoldError::BadIndices)
        }
    }

    /// The product computed by the kernel from the realized fields.
    pub fn kernel_value(&self, engine: &Engine, m: u32) -> Result<Field, OrbifoldError> {
        use ClosedForm::*;
        let (x, y) = match *self {
            IiAlpha { i, a, b, c } => (omega(engine, i, i, a, b)?, alpha(engine, i, c)?),
            IjAlphaI { i, j, a, b, c } => (omega(engine, i, j, a, b)?, alpha(engine, i, c)?),
            IjAlphaJ { i, j, a, b, c } => (omega(engine, i, j, a, b)?, alpha(engine, j, c)?),
            IjIj { i, j, a, b, c, d } => (omega(engine, i, j, a, b)?, omega(engine, i, j, c, d)?),
            IjJk { i, j, k, a, b, c, d } => (omega(engine, i, j, a, b)?, omega(engine, j, k, c, d)?),
            IiIj { i, j, a, b, c, d } => (omega(engine, i, i, a, b)?, omega(engine, i, j, c, d)?),
            JjIj { i, j, a, b, c, d } => (omega(engine, j, j, a, b)?, omega(engine, i, j, c, d)?),
            IiIi { i, a, b, c, d } => (omega(engine, i, i, a, b)?, omega(engine, i, i, c, d)?),
        };
        Ok(engine.nproduct(&x, &y, m as i64))
    }
}

fn alpha(engine: &Engine, i: usize, c: u32) -> Result<Field, OrbifoldError> {
    if i >= engine.spec().generator_count() {
        return Err(OrbifoldError::IndexOutOfRange(i));
    }
    Ok(factor_field(i, c))
}

/// Accumulates `coeff · ω^{ij}_{p,q}`, skipping zero coefficients so no
/// out-of-range index is ever built.
fn add_omega(
    engine: &Engine,
    out: &mut Field,
    coeff: Scalar,
    i: usize,
    j: usize,
    p: i64,
    q: u32,
) -> Result<(), OrbifoldError> {
    if coeff.is_zero() {
        return Ok(());
    }
    let p = u32::try_from(p).expect("nonzero coefficient implies a valid index");
    out.add_scaled(&omega(engine, i, j, p, q)?, &coeff);
    Ok(())
}

/// Right-hand side of the closed formula for `kind ∘_m`.
pub fn circle_closed_form(engine: &Engine, kind: ClosedForm, m: u32) -> Result<Field, OrbifoldError> {
    use ClosedForm::*;
    kind.check_indices()?;
    let max = kind.max_m();
    if m > max {
        return Err(OrbifoldError::OutOfRange { m, max });
    }
    let mut out = Field::zero();
    match kind {
        IiAlpha { i, a, b, c } => {
            out.add_scaled(&alpha(engine, i, a + b + c + 1 - m)?, &lambda(a, b, c, m));
        }
        IjAlphaI { j, a, b, c, .. } => {
            out.add_scaled(&alpha(engine, j, a + b + c + 1 - m)?, &signed_falling(a, a + c + 1, m));
        }
        IjAlphaJ { i, a, b, c, .. } => {
            out.add_scaled(&alpha(engine, i, a + b + c + 1 - m)?, &signed_falling(b, b + c + 1, m));
        }
        IjIj { i, j, a, b, c, d } => {
            let s = (a + b + c + 1) as i64 - m as i64;
            add_omega(engine, &mut out, signed_falling(a, a + c + 1, m), j, j, s, d)?;
            let t = (a + b + d + 1) as i64 - m as i64;
            add_omega(engine, &mut out, signed_falling(b, b + d + 1, m), i, i, t, c)?;
        }
        IjJk { i, k, a, b, c, d, .. } => {
            let s = (a + b + c + 1) as i64 - m as i64;
            add_omega(engine, &mut out, signed_falling(b, b + c + 1, m), i, k, s, d)?;
        }
        IiIj { i, j, a, b, c, d } => {
            let s = (a + b + c + 1) as i64 - m as i64;
            add_omega(engine, &mut out, lambda(a, b, c, m), i, j, s, d)?;
        }
        JjIj { i, j, a, b, c, d } => {
            let t = (a + b + d + 1) as i64 - m as i64;
            if !lambda(a, b, d, m).is_zero() {
                out.add_scaled(&omega(engine, i, j, c, t as u32)?, &lambda(a, b, d, m));
            }
        }
        IiIi { i, a, b, c, d } => {
            let s = (a + b + c + 1) as i64 - m as i64;
            add_omega(engine, &mut out, lambda(a, b, c, m), i, i, s, d)?;
            let t = (a + b + d + 1) as i64 - m as i64;
            if !lambda(a, b, d, m).is_zero() {
                out.add_scaled(&omega(engine, i, i, c, t as u32)?, &lambda(a, b, d, m));
            }
        }
    }
    Ok(out)
}

/// Every closed-form instance with indices below `rank` and derivative
/// orders up to `max_order`, paired with each admissible `m`.
pub fn closed_form_instances(rank: usize, max_order: u32) -> Vec<(ClosedForm, u32)> {
    use ClosedForm::*;
    let r = 0..=max_order;
    let mut kinds = Vec::new();
    for i in 0..rank {
        for a in r.clone() {
            for b in r.clone() {
                for c in r.clone() {
                    kinds.push(IiAlpha { i, a, b, c });
                    for d in r.clone() {
                        kinds.push(IiIi { i, a, b, c, d });
                    }
                    for j in (0..rank).filter(|&j| j != i) {
                        kinds.push(IjAlphaI { i, j, a, b, c });
                        kinds.push(IjAlphaJ { i, j, a, b, c });
                        for d in r.clone() {
                            kinds.push(IjIj { i, j, a, b, c, d });
                            kinds.push(IiIj { i, j, a, b, c, d });
                            kinds.push(JjIj { i, j, a, b, c, d });
                            for k in (0..rank).filter(|&k| k != i && k != j) {
                                kinds.push(IjJk { i, j, k, a, b, c, d });
                            }
                        }
                    }
                }
            }
        }
    }
    kinds.into_iter().flat_map(|f| (0..=f.max_m()).map(move |m| (f, m))).collect()
}

/// Instances where the kernel disagrees with the closed form.
pub fn closed_form_discrepancies(engine: &Engine, instances: &[(ClosedForm, u32)]) -> Result<Vec<(ClosedForm, u32)>, OrbifoldError> {
    use rayon::prelude::*;
    let flags = instances
        .par_iter()
        .map(|&(f, m)| Ok(f.kernel_value(engine, m)? != circle_closed_form(engine, f, m)?))
        .collect::<Result<Vec<bool>, OrbifoldError>>()?;
    Ok(instances.iter().zip(flags).filter(|(_, bad)| *bad).map(|(x, _)| *x).collect())
}
