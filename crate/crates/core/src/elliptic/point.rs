use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::curve::EllipticCurveQ;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RationalPoint {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl RationalPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        RationalPoint::Affine { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RationalPoint::new(BigRational::from_integer(x.into()), BigRational::from_integer(y.into()))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, RationalPoint::Infinity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            RationalPoint::Affine { x, .. } => Some(x),
            RationalPoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&BigRational> {
        match self {
            RationalPoint::Affine { y, .. } => Some(y),
            RationalPoint::Infinity => None,
        }
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalPoint::Infinity => f.write_str("O"),
            RationalPoint::Affine { x, y } => write!(f, "({x},{y})"),
        }
    }
}

impl EllipticCurveQ {
    pub fn neg(&self, p: &RationalPoint) -> RationalPoint {
        match p {
            RationalPoint::Infinity => RationalPoint::Infinity,
            RationalPoint::Affine { x, y } => {
                let [a1, _, a3, _, _] = self.a_rational();
                RationalPoint::new(x.clone(), -y - a1 * x - a3)
            }
        }
    }

    pub fn add(&self, p: &RationalPoint, q: &RationalPoint) -> RationalPoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (RationalPoint::Infinity, _) => return q.clone(),
            (_, RationalPoint::Infinity) => return p.clone(),
            (RationalPoint::Affine { x: x1, y: y1 }, RationalPoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let [a1, a2, a3, a4, a6] = self.a_rational();
        let (lambda, nu) = if x1 == x2 {
            let den = y1 + y2 + &a1 * x2 + &a3;
            if den.is_zero() {
                return RationalPoint::Infinity;
            }
            let two = BigRational::from_integer(BigInt::from(2));
            let three = BigRational::from_integer(BigInt::from(3));
            let d = &two * y1 + &a1 * x1 + &a3;
            let l = (&three * x1 * x1 + &two * &a2 * x1 + &a4 - &a1 * y1) / &d;
            let n = (-(x1 * x1 * x1) + &a4 * x1 + two * a6 - &a3 * y1) / d;
            (l, n)
        } else {
            let d = x2 - x1;
            ((y2 - y1) / &d, (y1 * x2 - y2 * x1) / d)
        };
        let x3 = &lambda * &lambda + &a1 * &lambda - a2 - x1 - x2;
        let y3 = -(lambda + a1) * &x3 - nu - a3;
        RationalPoint::new(x3, y3)
    }

    pub fn double(&self, p: &RationalPoint) -> RationalPoint {
        self.add(p, p)
    }

    pub fn sub(&self, p: &RationalPoint, q: &RationalPoint) -> RationalPoint {
        self.add(p, &self.neg(q))
    }

    pub fn mul(&self, p: &RationalPoint, n: i64) -> RationalPoint {
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = RationalPoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.double(&base);
            }
        }
        acc
    }

    /// Order of `p` if it is at most `limit`, else `None`.
    pub fn order_up_to(&self, p: &RationalPoint, limit: u64) -> Option<u64> {
        let mut q = p.clone();
        for n in 1..=limit {
            if q.is_infinity() {
                return Some(n);
            }
            q = self.add(&q, p);
        }
        None
    }
}

/// `x = m/e^2` in lowest terms gives `e`; convenience for height code.
pub fn x_denominator_root(x: &BigRational) -> Option<BigInt> {
    let d = x.denom();
    if d.is_one() {
        return Some(BigInt::one());
    }
    crate::primes::exact_sqrt(d)
}
