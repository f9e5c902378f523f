use std::fmt::Debug;

/// Commutative ring operations shared by every coefficient type in the crate.
///
/// Constants are produced from an existing element (`zero_like`, `one_like`)
/// because the ring is a runtime value: the prime of an `Fp`, the order of a
/// truncated algebra, the variable set of a symbolic polynomial.
pub trait CoeffRing: Clone + PartialEq + Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;

    fn from_int_like(&self, n: i64) -> Self {
        let one = self.one_like();
        let mut acc = self.zero_like();
        for _ in 0..n.unsigned_abs() {
            acc = acc.plus(&one);
        }
        if n < 0 {
            acc.negated()
        } else {
            acc
        }
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            base = base.times(&base);
            e >>= 1;
        }
        acc
    }
}

/// Coefficient rings that are local with residue field a `Field`: fields
/// themselves and the truncated algebras `k[ε]/(εⁿ)`.
pub trait LocalCoeff: CoeffRing {
    fn is_unit(&self) -> bool;
    fn try_inverse(&self) -> crate::error::Result<Self>;
    fn residue(&self) -> super::Scalar;
    fn field(&self) -> super::Field;
    fn from_scalar_like(&self, c: super::Scalar) -> Self;
}
