//! Local systems on the circle: a fiber F^r with an invertible monodromy
//! matrix M. Cohomology is ker(1 - M) in degree 0 and coker(1 - M) in
//! degree 1; both vanish exactly when 1 - M is invertible over F, which is
//! the vanishing statement for nontrivial holonomy.

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::modules::{self, CoefficientRing, ModuleClass, ModuleMap};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone)]
pub struct CircleLocalSystem {
    pub ring: CoefficientRing,
    pub monodromy: IntMatrix,
}

impl CircleLocalSystem {
    pub fn new(ring: CoefficientRing, monodromy: IntMatrix) -> Result<Self> {
        ring.validate()?;
        if monodromy.rows() != monodromy.cols() {
            return Err(Error::DimensionMismatch {
                context: "monodromy matrix",
                expected: monodromy.rows(),
                found: monodromy.cols(),
            });
        }
        let det = monodromy.determinant()?;
        let invertible = match &ring {
            CoefficientRing::Int | CoefficientRing::RatModInt => det.abs().is_one(),
            CoefficientRing::Rat => !det.is_zero(),
            CoefficientRing::Mod(n) => det.gcd(&BigInt::from(*n)).is_one(),
        };
        if !invertible {
            return Err(Error::NonInvertibleMonodromy(ring.to_string()));
        }
        Ok(CircleLocalSystem { ring, monodromy })
    }

    pub fn fiber_rank(&self) -> usize {
        self.monodromy.rows()
    }
}

/// (H^0, H^1) of the circle with coefficients in the local system:
/// kernel and cokernel of 1 - M.
pub fn circle_local_cohomology(
    system: &CircleLocalSystem,
) -> Result<(ModuleClass, ModuleClass)> {
    let r = system.fiber_rank();
    let one_minus_m = IntMatrix::identity(r).sub(&system.monodromy)?;
    let map = ModuleMap::new(system.ring.clone(), one_minus_m)?;
    let (h0, _) = modules::kernel(&map)?;
    let h1 = modules::cokernel(&map)?;
    Ok((h0, h1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_system_on_the_circle() {
        let sys = CircleLocalSystem::new(CoefficientRing::Int, IntMatrix::identity(1)).unwrap();
        let (h0, h1) = circle_local_cohomology(&sys).unwrap();
        assert_eq!(h0.canonical_string(), "Z^1");
        assert_eq!(h1.canonical_string(), "Z^1");
    }

    #[test]
    fn sign_flip_monodromy() {
        let m = IntMatrix::from_rows_i64(&[vec![-1]]);
        let sys = CircleLocalSystem::new(CoefficientRing::Int, m).unwrap();
        let (h0, h1) = circle_local_cohomology(&sys).unwrap();
        assert!(h0.is_zero());
        assert_eq!(h1.canonical_string(), "Z/2");
    }

    #[test]
    fn order_three_rotation() {
        // the 2x2 integer matrix of a primitive third root of unity
        let m = IntMatrix::from_rows_i64(&[vec![0, -1], vec![1, -1]]);
        let sys = CircleLocalSystem::new(CoefficientRing::Int, m.clone()).unwrap();
        let (h0, h1) = circle_local_cohomology(&sys).unwrap();
        assert!(h0.is_zero());
        assert_eq!(h1.canonical_string(), "Z/3");
        // det(1 - M) = 3
        let d = IntMatrix::identity(2).sub(&m).unwrap().determinant().unwrap();
        assert_eq!(d, BigInt::from(3));
    }

    #[test]
    fn nontrivial_holonomy_vanishing() {
        // 1 - M invertible over F forces H^0 = H^1 = 0
        let m = IntMatrix::from_rows_i64(&[vec![2]]);
        let sys = CircleLocalSystem::new(CoefficientRing::Rat, m).unwrap();
        let (h0, h1) = circle_local_cohomology(&sys).unwrap();
        assert!(h0.is_zero());
        assert!(h1.is_zero());
    }

    #[test]
    fn invertibility_guard() {
        let m = IntMatrix::from_rows_i64(&[vec![2]]);
        assert!(CircleLocalSystem::new(CoefficientRing::Int, m.clone()).is_err());
        assert!(CircleLocalSystem::new(CoefficientRing::Mod(4), m.clone()).is_err());
        assert!(CircleLocalSystem::new(CoefficientRing::Mod(3), m.clone()).is_ok());
        assert!(CircleLocalSystem::new(CoefficientRing::Rat, m).is_ok());
        let zero = IntMatrix::zero(1, 1);
        assert!(CircleLocalSystem::new(CoefficientRing::Rat, zero).is_err());
    }
}
