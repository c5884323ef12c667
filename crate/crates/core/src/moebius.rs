//! Exact 2x2 rational matrices and the linear-fractional maps they induce.
//!
//! A matrix `[[a, b], [c, d]]` acts on the line by `x -> (ax + b)/(cx + d)`.
//! Composition of maps is the matrix product, so `f_u = f_{u1} o ... o f_{un}`
//! has matrix `M_{u1} * ... * M_{un}`.
//!
//! Matrices are compared literally, not projectively. Every product of the
//! family generators has determinant 1 and nonnegative entries, and on that
//! semigroup two matrices induce the same map exactly when they are equal
//! (the only scalar relating two determinant-1 matrices is +-1, and -1 would
//! flip the sign of a nonzero nonnegative entry).

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl Matrix2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Matrix2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Matrix2::new(Rational::one(), Rational::zero(), Rational::zero(), Rational::one())
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn scale(&self, k: &Rational) -> Matrix2 {
        Matrix2::new(&self.a * k, &self.b * k, &self.c * k, &self.d * k)
    }

    /// Inverse matrix; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix2> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let inv = det.recip();
        Some(Matrix2::new(
            &self.d * &inv,
            -(&self.b * &inv),
            -(&self.c * &inv),
            &self.a * &inv,
        ))
    }

    pub fn entries(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn all_nonnegative(&self) -> bool {
        self.entries().iter().all(|e| !e.is_negative())
    }

    /// Largest absolute entrywise difference.
    pub fn max_entry_distance(&self, other: &Matrix2) -> Rational {
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(x, y)| (*x - y).abs())
            .max()
            .unwrap()
    }

    pub fn pow(&self, m: u32) -> Matrix2 {
        (0..m).fold(Matrix2::identity(), |acc, _| &acc * self)
    }
}

impl<'a, 'b> Mul<&'b Matrix2> for &'a Matrix2 {
    type Output = Matrix2;

    fn mul(self, rhs: &'b Matrix2) -> Matrix2 {
        Matrix2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;

    fn mul(self, rhs: Matrix2) -> Matrix2 {
        &self * &rhs
    }
}

impl fmt::Debug for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Closed interval `[left, right]` with exact endpoints.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub left: Rational,
    pub right: Rational,
}

impl Interval {
    pub fn new(left: Rational, right: Rational) -> Result<Self> {
        if left > right {
            return Err(Error::Domain(format!("empty interval [{left}, {right}]")));
        }
        Ok(Interval { left, right })
    }

    pub fn point(x: Rational) -> Self {
        Interval { left: x.clone(), right: x }
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.left <= x && x <= &self.right
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    /// Closed intervals share at least one point.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.left <= other.right && other.left <= self.right
    }

    /// Evenly spaced rational points `left + j (right - left) / count`, `j = 1..=count`.
    pub fn grid(&self, count: u32) -> Vec<Rational> {
        let len = self.length();
        (1..=count as i64)
            .map(|j| &self.left + &len * Rational::new(j, count as i64))
            .collect()
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left, self.right)
    }
}

/// A fixed point of a map, exact when rational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPoint {
    Exact(Rational),
    /// Irrational root enclosed in a rational interval.
    Enclosure(Interval),
}

impl FixedPoint {
    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            FixedPoint::Exact(x) => Some(x),
            FixedPoint::Enclosure(_) => None,
        }
    }
}

/// Default width of irrational fixed-point enclosures: `10^-30`.
pub fn default_enclosure_width() -> Rational {
    Rational::pow10_neg(30)
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoebiusMap {
    pub matrix: Matrix2,
}

impl fmt::Debug for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MoebiusMap{:?}", self.matrix)
    }
}

impl MoebiusMap {
    pub fn new(matrix: Matrix2) -> Self {
        MoebiusMap { matrix }
    }

    pub fn identity() -> Self {
        MoebiusMap::new(Matrix2::identity())
    }

    /// Affine map `x -> ratio * x + shift`.
    pub fn affine(ratio: Rational, shift: Rational) -> Self {
        MoebiusMap::new(Matrix2::new(ratio, shift, Rational::zero(), Rational::one()))
    }

    /// `self o other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        MoebiusMap::new(&self.matrix * &other.matrix)
    }

    fn denominator(&self, x: &Rational) -> Rational {
        &self.matrix.c * x + &self.matrix.d
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let den = self.denominator(x);
        if den.is_zero() {
            return Err(Error::Pole(x.to_string()));
        }
        Ok((&self.matrix.a * x + &self.matrix.b) / den)
    }

    /// `f'(x) = det / (cx + d)^2`.
    pub fn derivative(&self, x: &Rational) -> Result<Rational> {
        let den = self.denominator(x);
        if den.is_zero() {
            return Err(Error::Pole(x.to_string()));
        }
        Ok(self.matrix.det() / (&den * &den))
    }

    /// Errors unless `cx + d` is nonzero with one sign on all of `j`.
    pub fn check_no_pole(&self, j: &Interval) -> Result<()> {
        let l = self.denominator(&j.left).signum();
        let r = self.denominator(&j.right).signum();
        if l == 0 || r == 0 || l != r {
            return Err(Error::PoleInInterval {
                left: j.left.to_string(),
                right: j.right.to_string(),
            });
        }
        Ok(())
    }

    /// Exact `(inf, sup)` of `|f'|` on `j`.
    ///
    /// Without a pole in `j`, `|f'| = |det| / (cx + d)^2` is monotone there,
    /// so both extremes sit at the endpoints.
    pub fn derivative_bounds(&self, j: &Interval) -> Result<(Rational, Rational)> {
        self.check_no_pole(j)?;
        let l = self.derivative(&j.left)?.abs();
        let r = self.derivative(&j.right)?.abs();
        Ok(if l <= r { (l, r) } else { (r, l) })
    }

    /// `sup / inf` of `|f'|` on `j`; 1 for affine maps.
    pub fn distortion(&self, j: &Interval) -> Result<Rational> {
        let (inf, sup) = self.derivative_bounds(j)?;
        if inf.is_zero() {
            return Err(Error::Degenerate("derivative vanishes".into()));
        }
        Ok(sup / inf)
    }

    /// Exact image `f(j)`; `f` is monotone on a pole-free interval.
    pub fn image_interval(&self, j: &Interval) -> Result<Interval> {
        self.check_no_pole(j)?;
        let l = self.eval(&j.left)?;
        let r = self.eval(&j.right)?;
        Ok(if l <= r {
            Interval { left: l, right: r }
        } else {
            Interval { left: r, right: l }
        })
    }

    /// Solutions of `cx^2 + (d - a)x - b = 0`.
    ///
    /// Rational roots are exact; irrational roots come back as enclosures of
    /// width at most `width`. A translation-like map with no finite fixed
    /// point yields an empty list.
    pub fn fixed_points(&self, width: &Rational) -> Result<Vec<FixedPoint>> {
        let Matrix2 { a, b, c, d } = &self.matrix;
        if b.is_zero() && c.is_zero() && a == d {
            return Err(Error::Degenerate("identity map fixes every point".into()));
        }
        let lin = d - a;
        if c.is_zero() {
            if lin.is_zero() {
                return Ok(Vec::new());
            }
            return Ok(vec![FixedPoint::Exact(b / &lin)]);
        }
        let disc = &lin * &lin + Rational::integer(4) * b * c;
        if disc.is_negative() {
            return Ok(Vec::new());
        }
        let two_c = Rational::integer(2) * c;
        let scale = two_c.abs();
        let (lo, hi) = disc
            .sqrt_enclosure(&(width * &scale))
            .expect("discriminant is nonnegative");
        let neg_lin = -&lin;
        if lo == hi {
            let mut roots = vec![(&neg_lin - &lo) / &two_c, (&neg_lin + &lo) / &two_c];
            roots.sort();
            roots.dedup();
            return Ok(roots.into_iter().map(FixedPoint::Exact).collect());
        }
        let mut out = Vec::with_capacity(2);
        for sign in [-1i64, 1] {
            let s = Rational::integer(sign);
            let e1 = (&neg_lin + &s * &lo) / &two_c;
            let e2 = (&neg_lin + &s * &hi) / &two_c;
            let (l, r) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            out.push(FixedPoint::Enclosure(Interval { left: l, right: r }));
        }
        out.sort_by(|x, y| match (x, y) {
            (FixedPoint::Enclosure(p), FixedPoint::Enclosure(q)) => p.left.cmp(&q.left),
            _ => std::cmp::Ordering::Equal,
        });
        Ok(out)
    }
}

/// A finite family of linear-fractional maps acting on a common interval.
///
/// Construction checks that each map sends the interval into itself and has
/// no pole there, and records the contraction bounds `gamma_lower` (min of
/// `inf |f'|`) and `gamma_upper` (max of `sup |f'|`). Operations that need a
/// hyperbolic system call [`IfsInstance::require_hyperbolic`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IfsInstance {
    pub maps: Vec<MoebiusMap>,
    pub invariant_interval: Interval,
    pub gamma_lower: Rational,
    pub gamma_upper: Rational,
}

impl IfsInstance {
    pub fn new(maps: Vec<MoebiusMap>, invariant_interval: Interval) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Domain("an IFS needs at least one map".into()));
        }
        let mut gamma_lower: Option<Rational> = None;
        let mut gamma_upper: Option<Rational> = None;
        for (i, f) in maps.iter().enumerate() {
            let image = f.image_interval(&invariant_interval)?;
            if !invariant_interval.contains_interval(&image) {
                return Err(Error::Precondition(format!(
                    "map {} sends {:?} to {:?}, outside the invariant interval",
                    i + 1,
                    invariant_interval,
                    image
                )));
            }
            let (inf, sup) = f.derivative_bounds(&invariant_interval)?;
            gamma_lower = Some(match gamma_lower {
                Some(g) => g.min(inf),
                None => inf,
            });
            gamma_upper = Some(match gamma_upper {
                Some(g) => g.max(sup),
                None => sup,
            });
        }
        Ok(IfsInstance {
            maps,
            invariant_interval,
            gamma_lower: gamma_lower.unwrap(),
            gamma_upper: gamma_upper.unwrap(),
        })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.gamma_lower.is_positive() && self.gamma_upper < 1
    }

    pub fn require_hyperbolic(&self) -> Result<()> {
        if self.is_hyperbolic() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "not a strict contraction on {:?}: gamma bounds [{}, {}]",
                self.invariant_interval, self.gamma_lower, self.gamma_upper
            )))
        }
    }

    pub fn matrices(&self) -> Vec<Matrix2> {
        self.maps.iter().map(|f| f.matrix.clone()).collect()
    }
}

/// Generator matrices `A`, `B`, `C_t` of the family, in that order.
pub fn family_matrices(t: &Rational) -> [Matrix2; 3] {
    let half = Rational::new(1, 2);
    let two = Rational::integer(2);
    let zero = Rational::zero();
    [
        Matrix2::new(half.clone(), zero.clone(), two.clone(), two.clone()),
        Matrix2::new(half.clone(), zero.clone(), zero.clone(), two.clone()),
        Matrix2::new(half, t.clone(), zero, two),
    ]
}

/// `A^m = [[2^-m, 0], [2^(m+2) (1 - 4^-m) / 3, 2^m]]`, so that
/// `f_1^m(x) = x / (4^m (1 + 4x (1 - 4^-m) / 3))`.
pub fn a_power_closed_form(m: u32) -> Matrix2 {
    let p = Rational::integer(2).pow(m as i32);
    let four_m = Rational::integer(4).pow(-(m as i32));
    let c = Rational::integer(4) * &p * (Rational::one() - four_m) / Rational::integer(3);
    Matrix2::new(p.recip(), Rational::zero(), c, p)
}

/// `I_t = [0, 2t/3]`, the interval ending at the fixed point of `f_3`.
pub fn family_interval(t: &Rational) -> Interval {
    Interval {
        left: Rational::zero(),
        right: Rational::new(2, 3) * t,
    }
}

pub fn require_positive_parameter(t: &Rational) -> Result<()> {
    if t.is_positive() {
        Ok(())
    } else {
        Err(Error::Domain(format!("parameter t must be positive, got {t}")))
    }
}

/// The family `{f_1, f_2, f_3}`: `x/(4x+4)`, `x/4`, `x/4 + t/2` on `[0, 2t/3]`.
pub fn make_family(t: &Rational) -> Result<IfsInstance> {
    require_positive_parameter(t)?;
    let maps = family_matrices(t).into_iter().map(MoebiusMap::new).collect();
    IfsInstance::new(maps, family_interval(t))
}
