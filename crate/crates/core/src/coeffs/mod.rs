//! Exact coefficient arithmetic: ℚ, 𝔽_p, ℚ(a) and the local test algebras
//! `k[ε]/(εⁿ)`.

mod artin;
mod ratfn;
mod ring;
mod scalar;

pub use artin::ArtinScalar;
pub use ratfn::RatFn;
pub use ring::{CoeffRing, LocalCoeff};
pub use scalar::{is_prime, Field, Fp, Scalar};

pub(crate) use scalar::{parse_rational, rational_to_string};

use crate::error::{Error, Result};

/// Specialization point of a one-parameter family in the indeterminate `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LimitPoint {
    Zero,
    Infinity,
}

/// Limit of the projective point `[v]` as `a` tends to `point`.
///
/// Rescales by the extreme `a`-valuation so every entry is regular and at
/// least one is a unit, then evaluates. Entries must lie in ℚ(a); the result
/// is a nonzero vector over ℚ.
pub fn rational_function_limit(v: &[Scalar], point: LimitPoint) -> Result<Vec<Scalar>> {
    let fns: Vec<&RatFn> = v
        .iter()
        .map(|s| s.as_ratfn().ok_or_else(|| Error::FieldMismatch("expected Q(a) entries".into())))
        .collect::<Result<_>>()?;
    let shift = match point {
        LimitPoint::Zero => fns.iter().filter_map(|f| f.valuation_at_zero()).min(),
        LimitPoint::Infinity => fns.iter().filter_map(|f| f.degree()).max(),
    }
    .ok_or(Error::ZeroVector)?;
    fns.iter()
        .map(|f| {
            let g = f.shift(-shift);
            let val = match point {
                LimitPoint::Zero => g.eval_at_zero(),
                LimitPoint::Infinity => g.eval_at_infinity(),
            }?;
            Ok(Scalar::Q(val))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Scalar {
        Scalar::RatFn(RatFn::var())
    }

    fn one() -> Scalar {
        Field::RationalFunction.one()
    }

    #[test]
    fn limit_at_zero() {
        let v = vec![one(), a()];
        assert_eq!(rational_function_limit(&v, LimitPoint::Zero).unwrap(), vec![Scalar::q(1, 1), Scalar::q(0, 1)]);
    }

    #[test]
    fn limit_at_infinity() {
        let v = vec![one(), a()];
        assert_eq!(
            rational_function_limit(&v, LimitPoint::Infinity).unwrap(),
            vec![Scalar::q(0, 1), Scalar::q(1, 1)]
        );
    }

    #[test]
    fn limit_divides_out_common_power() {
        let v = vec![a(), &(&a() * &a()) + &a()];
        assert_eq!(rational_function_limit(&v, LimitPoint::Zero).unwrap(), vec![Scalar::q(1, 1), Scalar::q(1, 1)]);
    }

    #[test]
    fn zero_vector_has_no_limit() {
        let z = Field::RationalFunction.zero();
        assert_eq!(rational_function_limit(&[z.clone(), z], LimitPoint::Zero), Err(Error::ZeroVector));
    }

    #[test]
    fn limit_is_projectively_invariant() {
        let v = vec![&a() + &one(), &a() * &a(), Field::RationalFunction.from_i64(3)];
        let c = (&(&a() * &a()) - &one()).div(&(&a() + &Field::RationalFunction.from_i64(2))).unwrap();
        let w: Vec<Scalar> = v.iter().map(|x| x * &c).collect();
        for p in [LimitPoint::Zero, LimitPoint::Infinity] {
            let l1 = rational_function_limit(&v, p).unwrap();
            let l2 = rational_function_limit(&w, p).unwrap();
            let k = l1.iter().position(|x| !x.is_zero()).unwrap();
            let ratio = l2[k].div(&l1[k]).unwrap();
            assert!(!ratio.is_zero());
            for (x, y) in l1.iter().zip(&l2) {
                assert_eq!(&(x * &ratio), y);
            }
        }
    }
}
