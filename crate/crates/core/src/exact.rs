//! Exact arithmetic over the Gaussian rationals Q(i), plus the handful of
//! exact linear-algebra and polynomial routines the Lie algebra and metric
//! computations need.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element a + b·i of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Gaussian {
    pub re: BigRational,
    pub im: BigRational,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Gaussian {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gaussian { re, im }
    }
    pub fn zero() -> Self {
        Gaussian::new(BigRational::zero(), BigRational::zero())
    }
    pub fn one() -> Self {
        Gaussian::from_int(1)
    }
    pub fn i() -> Self {
        Gaussian::new(BigRational::zero(), BigRational::one())
    }
    pub fn from_int(n: i64) -> Self {
        Gaussian::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }
    pub fn from_rat(r: BigRational) -> Self {
        Gaussian::new(r, BigRational::zero())
    }
    pub fn from_ints(re: i64, im: i64) -> Self {
        Gaussian::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        Gaussian::new(self.re.clone(), -self.im.clone())
    }
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.norm_sqr();
        Some(Gaussian::new(&self.re / &d, -&self.im / &d))
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Gaussian::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
    pub fn scale(&self, r: &BigRational) -> Self {
        Gaussian::new(&self.re * r, &self.im * r)
    }
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for Gaussian {
    /// Prints in the expression grammar, e.g. `3/4`, `-2*i`, `(1/2 + -1*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*i", self.im),
            (false, false) => write!(f, "({} + {}*i)", self.re, self.im),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Gaussian> for Gaussian {
            type Output = Gaussian;
            fn $m(self, rhs: Gaussian) -> Gaussian {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Gaussian> for Gaussian {
            type Output = Gaussian;
            fn $m(self, rhs: &'a Gaussian) -> Gaussian {
                (&self).$m(rhs)
            }
        }
    };
}

impl<'a> Add<&'a Gaussian> for &Gaussian {
    type Output = Gaussian;
    fn add(self, rhs: &'a Gaussian) -> Gaussian {
        Gaussian::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}
impl<'a> Sub<&'a Gaussian> for &Gaussian {
    type Output = Gaussian;
    fn sub(self, rhs: &'a Gaussian) -> Gaussian {
        Gaussian::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}
impl<'a> Mul<&'a Gaussian> for &Gaussian {
    type Output = Gaussian;
    fn mul(self, rhs: &'a Gaussian) -> Gaussian {
        Gaussian::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian::new(-self.re, -self.im)
    }
}
impl Neg for &Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian::new(-self.re.clone(), -self.im.clone())
    }
}
impl AddAssign<&Gaussian> for Gaussian {
    fn add_assign(&mut self, rhs: &Gaussian) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}
impl SubAssign<&Gaussian> for Gaussian {
    fn sub_assign(&mut self, rhs: &Gaussian) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

/// Parses a decimal literal such as `12`, `0.25` or `1.5e-3` into an exact rational.
pub fn decimal_to_rational(lit: &str) -> Option<BigRational> {
    let lower = lit.to_ascii_lowercase();
    let (mant, exp) = match lower.split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i64>().ok()?),
        None => (lower.clone(), 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((a, b)) => (a.to_string(), b.to_string()),
        None => (mant.clone(), String::new()),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 {
        BigRational::from_integer(num * pow)
    } else {
        BigRational::new(num, pow)
    })
}

/// Signature (positive, negative, zero) of a real symmetric rational matrix,
/// by symmetric Gaussian elimination (congruence to a diagonal matrix).
pub fn symmetric_signature(m: &[Vec<BigRational>]) -> (usize, usize, usize) {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut diag = Vec::with_capacity(n);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&p| !a[p][p].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                // all remaining diagonal entries vanish; look for an off-diagonal entry
                let mut pair = None;
                'outer: for (ii, &r) in active.iter().enumerate() {
                    for &c in &active[ii + 1..] {
                        if !a[r][c].is_zero() {
                            pair = Some((r, c));
                            break 'outer;
                        }
                    }
                }
                match pair {
                    None => {
                        diag.extend(active.iter().map(|_| BigRational::zero()));
                        break;
                    }
                    Some((r, c)) => {
                        // row/col r += row/col c makes a[r][r] = 2 a[r][c] != 0
                        for k in 0..n {
                            let v = a[c][k].clone();
                            a[r][k] += v;
                        }
                        for k in 0..n {
                            let v = a[k][c].clone();
                            a[k][r] += v;
                        }
                        r
                    }
                }
            }
        };
        let piv = a[p][p].clone();
        for &r in active.iter() {
            if r == p || a[r][p].is_zero() {
                continue;
            }
            let f = &a[r][p] / &piv;
            for k in 0..n {
                let v = &f * &a[p][k];
                a[r][k] -= v;
            }
            for k in 0..n {
                let v = &f * &a[k][p];
                a[k][r] -= v;
            }
        }
        diag.push(piv);
        active.retain(|&x| x != p);
    }
    let pos = diag.iter().filter(|d| d.is_positive()).count();
    let neg = diag.iter().filter(|d| d.is_negative()).count();
    (pos, neg, n - pos - neg)
}

/// Rank of a Gaussian-rational matrix (rows of equal length).
pub fn gaussian_rank(rows: &[Vec<Gaussian>]) -> usize {
    row_reduce(rows.to_vec()).1.len()
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn row_reduce(mut m: Vec<Vec<Gaussian>>) -> (Vec<Vec<Gaussian>>, Vec<usize>) {
    let rows = m.len();
    if rows == 0 {
        return (m, vec![]);
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&k| !m[k][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for k in c..cols {
            m[r][k] = &m[r][k] * &inv;
        }
        for k in 0..rows {
            if k != r && !m[k][c].is_zero() {
                let f = m[k][c].clone();
                for col in c..cols {
                    let v = &f * &m[r][col];
                    m[k][col] -= &v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Solves `a x = b` exactly for square or overdetermined consistent systems.
/// Returns `None` when the system is inconsistent or underdetermined.
pub fn gaussian_solve(a: &[Vec<Gaussian>], b: &[Gaussian]) -> Option<Vec<Gaussian>> {
    let cols = a.first()?.len();
    let aug: Vec<Vec<Gaussian>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let (red, piv) = row_reduce(aug);
    if piv.contains(&cols) || piv.len() < cols {
        return None;
    }
    Some((0..cols).map(|c| red[c][cols].clone()).collect())
}

/// Dense univariate polynomial with Gaussian-rational coefficients,
/// lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(pub Vec<Gaussian>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![])
    }
    pub fn constant(c: Gaussian) -> Self {
        Poly(vec![c]).trimmed()
    }
    /// The indeterminate itself.
    pub fn var() -> Self {
        Poly(vec![Gaussian::zero(), Gaussian::one()])
    }
    pub(crate) fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }
    pub fn eval(&self, x: &Gaussian) -> Gaussian {
        let mut acc = Gaussian::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }
    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let z = Gaussian::zero();
        Poly((0..n)
            .map(|k| self.0.get(k).unwrap_or(&z) + o.0.get(k).unwrap_or(&z))
            .collect())
        .trimmed()
    }
    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }
    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Gaussian::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly(out).trimmed()
    }
    pub fn scale(&self, c: &Gaussian) -> Poly {
        Poly(self.0.iter().map(|x| x * c).collect()).trimmed()
    }
    fn monic(&self) -> Poly {
        match self.0.last() {
            None => Poly::zero(),
            Some(lead) => self.scale(&lead.inv().expect("nonzero lead")),
        }
    }
    /// Remainder of division by a nonzero polynomial.
    pub fn rem(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.0[dd].inv().expect("nonzero lead");
        let mut r = self.0.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let f = &r[k] * &lead_inv;
            if !f.is_zero() {
                for (j, c) in d.0.iter().enumerate() {
                    let v = &f * c;
                    r[k - dd + j] -= &v;
                }
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Poly(r).trimmed()
    }
    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
    /// Roots in Q(i) of a polynomial of degree at most 2.
    pub fn small_roots(&self) -> Option<Vec<Gaussian>> {
        match self.degree() {
            None => None,
            Some(0) => Some(vec![]),
            Some(1) => Some(vec![-(&self.0[0] * &self.0[1].inv()?)]),
            Some(2) => {
                let m = self.monic();
                // x^2 + p x + q
                let p = &m.0[1];
                let q = &m.0[0];
                let half = Gaussian::from_rat(rat(1, 2));
                let hp = p * &half;
                let disc = &(&hp * &hp) - q;
                let s = gaussian_sqrt(&disc)?;
                let r1 = &(-&hp) + &s;
                let r2 = &(-&hp) - &s;
                Some(if r1 == r2 { vec![r1] } else { vec![r1, r2] })
            }
            Some(_) => None,
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(d, c)| match d {
                0 => format!("{c}"),
                1 => format!("{c}*k"),
                _ => format!("{c}*k^{d}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// Square root in Q(i) when it exists.
pub fn gaussian_sqrt(z: &Gaussian) -> Option<Gaussian> {
    if z.im.is_zero() {
        if z.re.is_negative() {
            return Some(Gaussian::new(BigRational::zero(), rational_sqrt(&-z.re.clone())?));
        }
        return Some(Gaussian::from_rat(rational_sqrt(&z.re)?));
    }
    // (a + bi)^2 = z: a^2 = (|z| + re)/2, b = im / (2a)
    let modulus = rational_sqrt(&z.norm_sqr())?;
    let two = rat(2, 1);
    let a = rational_sqrt(&((&modulus + &z.re) / &two))?;
    if a.is_zero() {
        return None;
    }
    let b = &z.im / (&two * &a);
    Some(Gaussian::new(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(decimal_to_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(decimal_to_rational("12").unwrap(), rat(12, 1));
        assert_eq!(decimal_to_rational("1.5e-3").unwrap(), rat(3, 2000));
        assert_eq!(decimal_to_rational("2e2").unwrap(), rat(200, 1));
    }

    #[test]
    fn signature_of_hyperbolic_plane() {
        let m = vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]];
        assert_eq!(symmetric_signature(&m), (1, 1, 0));
        let d = vec![
            vec![rat(2, 1), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(-3, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(0, 1)],
        ];
        assert_eq!(symmetric_signature(&d), (1, 1, 1));
    }

    #[test]
    fn poly_gcd_and_roots() {
        // (k - 2)(k + 1) and (k - 2)(k - 5)
        let k = Poly::var();
        let c = |n| Poly::constant(Gaussian::from_int(n));
        let p = k.sub(&c(2)).mul(&k.add(&c(1)));
        let q = k.sub(&c(2)).mul(&k.sub(&c(5)));
        let g = p.gcd(&q);
        assert_eq!(g.small_roots().unwrap(), vec![Gaussian::from_int(2)]);
        assert_eq!(p.small_roots().unwrap().len(), 2);
    }

    #[test]
    fn gaussian_sqrt_of_minus_two_i() {
        let z = Gaussian::from_ints(0, -2);
        let s = gaussian_sqrt(&z).unwrap();
        assert_eq!(&s * &s, z);
    }

    #[test]
    fn solve_small_system() {
        let a = vec![
            vec![Gaussian::from_int(1), Gaussian::i()],
            vec![Gaussian::from_int(0), Gaussian::from_int(2)],
        ];
        let b = vec![Gaussian::from_int(1), Gaussian::from_int(4)];
        let x = gaussian_solve(&a, &b).unwrap();
        assert_eq!(x[1], Gaussian::from_int(2));
        assert_eq!(x[0], Gaussian::from_ints(1, -2));
    }
}
