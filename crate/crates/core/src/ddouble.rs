//! Double-double arithmetic.
//!
//! A [`DoubleDouble`] is the unevaluated sum `hi + lo` of two `f64`s with
//! `|lo| <= ulp(hi) / 2`, giving a 106-bit significand (about 32 decimal
//! digits). Arithmetic uses the error-free transformations of Dekker and
//! Knuth; `exp` and `ln` are accurate to a few units in the last place, which
//! is what the extended-precision rechecks rely on.
//!
//! The exponent range is that of `f64`. Transcendental functions other than
//! `exp`, `ln` and `powf` are provided so the type is a complete
//! [`num_traits::Float`]; trigonometric argument reduction uses a
//! double-double `pi/2` and loses accuracy for arguments beyond ~1e6.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN_2: DoubleDouble = DoubleDouble { hi: 6.931471805599453e-1, lo: 2.3190468138462996e-17 };
const LN_10: DoubleDouble = DoubleDouble { hi: 2.302585092994046, lo: -2.1707562233822494e-16 };
const PI: DoubleDouble = DoubleDouble { hi: 3.141592653589793, lo: 1.2246467991473532e-16 };
const FRAC_PI_2: DoubleDouble = DoubleDouble { hi: 1.5707963267948966, lo: 6.123233995736766e-17 };

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    /// 2^-104.
    pub const EPSILON: Self = Self { hi: 4.930380657631324e-32, lo: 0.0 };

    /// Builds a value from two components, renormalising them.
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self::finish(hi, lo)
    }

    #[inline]
    const fn c(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    #[inline]
    fn finish(hi: f64, lo: f64) -> Self {
        if hi.is_finite() {
            Self { hi, lo }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Self::finish(hi, lo)
    }

    /// Multiplication by `2^k`, exact barring over/underflow.
    fn ldexp(self, k: i32) -> Self {
        // split so that 2^k itself never overflows
        let half = k / 2;
        let a = 2f64.powi(half);
        let b = 2f64.powi(k - half);
        Self::finish(self.hi * a * b, self.lo * a * b)
    }

    fn sqr(self) -> Self {
        let (p1, p2) = two_prod(self.hi, self.hi);
        let p2 = p2 + 2.0 * self.hi * self.lo;
        let (hi, lo) = quick_two_sum(p1, p2);
        Self::finish(hi, lo)
    }

    /// `expm1` of a reduced argument `|r| <= ln(2)/2`, via Taylor series on
    /// `r / 1024` followed by ten applications of `s -> s (2 + s)`.
    fn expm1_reduced(r: Self) -> Self {
        let r = r.ldexp(-10);
        let mut s = r;
        let mut term = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = term * r / Self::c(n);
            s += term;
            if term.hi.abs() <= 1e-36 * s.hi.abs().max(f64::MIN_POSITIVE) || n > 30.0 {
                break;
            }
        }
        for _ in 0..10 {
            s = s * (s + Self::c(2.0));
        }
        s
    }

    fn exp_dd(self) -> Self {
        if self.hi.is_nan() {
            return self;
        }
        if self.hi > 709.782712893384 {
            return Self::c(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ONE;
        }
        let k = (self.hi / LN_2.hi).round();
        let r = self - LN_2.mul_f64(k);
        let e = Self::expm1_reduced(r) + Self::ONE;
        e.ldexp(k as i32)
    }

    fn ln_dd(self) -> Self {
        if self.hi.is_nan() || self.hi < 0.0 {
            return Self::c(f64::NAN);
        }
        if self.hi == 0.0 {
            return Self::c(f64::NEG_INFINITY);
        }
        if self.hi.is_infinite() {
            return self;
        }
        if self == Self::ONE {
            return Self::ZERO;
        }
        // Newton on exp(y) = x; each step doubles the number of correct digits
        let mut y = Self::c(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp_dd() - Self::ONE;
        }
        y
    }

    fn sin_cos_reduced(r: Self) -> (Self, Self) {
        let r2 = r.sqr();
        // sin
        let mut s = r;
        let mut term = r;
        let mut k = 1.0;
        loop {
            term = -(term * r2) / Self::c((k + 1.0) * (k + 2.0));
            k += 2.0;
            s += term;
            if term.hi.abs() <= 1e-36 || k > 60.0 {
                break;
            }
        }
        // cos
        let mut c = Self::ONE;
        let mut term = Self::ONE;
        let mut k = 0.0;
        loop {
            term = -(term * r2) / Self::c((k + 1.0) * (k + 2.0));
            k += 2.0;
            c += term;
            if term.hi.abs() <= 1e-36 || k > 60.0 {
                break;
            }
        }
        (s, c)
    }

    fn sin_cos_dd(self) -> (Self, Self) {
        if !self.hi.is_finite() {
            return (Self::c(f64::NAN), Self::c(f64::NAN));
        }
        let k = (self.hi / FRAC_PI_2.hi).round();
        let r = self - FRAC_PI_2.mul_f64(k);
        let (s, c) = Self::sin_cos_reduced(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    fn atan2_dd(y: Self, x: Self) -> Self {
        if x.is_zero() && y.is_zero() {
            return Self::ZERO;
        }
        if x.is_zero() {
            return if y.hi > 0.0 { FRAC_PI_2 } else { -FRAC_PI_2 };
        }
        if y.is_zero() {
            return if x.hi > 0.0 { Self::ZERO } else { PI };
        }
        let r = (x.sqr() + y.sqr()).sqrt();
        let xx = x / r;
        let yy = y / r;
        let mut z = Self::c(y.hi.atan2(x.hi));
        for _ in 0..2 {
            let (s, c) = z.sin_cos_dd();
            if xx.hi.abs() > yy.hi.abs() {
                z += (yy - s) / c;
            } else {
                z -= (xx - c) / s;
            }
        }
        z
    }

    fn pow10(e: i32) -> Self {
        let ten = Self::c(10.0);
        if e >= 0 {
            ten.powi(e)
        } else {
            Self::ONE / ten.powi(-e)
        }
    }

    /// Decimal scientific rendering with `digits` significant digits.
    pub fn to_sci_string(self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.hi.is_nan() {
            return "NaN".into();
        }
        if self.hi.is_infinite() {
            return if self.hi > 0.0 { "inf".into() } else { "-inf".into() };
        }
        if self.is_zero() {
            return format!("{:.*}e0", digits - 1, 0.0);
        }
        let neg = self.hi < 0.0;
        let x = self.abs();
        let mut e = x.hi.log10().floor() as i32;
        let mut y = x / Self::pow10(e);
        if y.hi >= 10.0 {
            y = y / Self::c(10.0);
            e += 1;
        } else if y.hi < 1.0 {
            y = y * Self::c(10.0);
            e -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = y.hi.floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            y = (y - Self::c(d)) * Self::c(10.0);
        }
        // round half up on the guard digit
        let guard = ds.pop().unwrap_or(0);
        if guard >= 5 {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            out.push('.');
            for d in &ds[1..] {
                out.push((b'0' + d) as char);
            }
        }
        out.push('e');
        out.push_str(&e.to_string());
        out
    }
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
}

impl From<f32> for DoubleDouble {
    fn from(v: f32) -> Self {
        Self { hi: v as f64, lo: 0.0 }
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        if !s1.is_finite() {
            return Self::c(s1);
        }
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Self::finish(hi, lo)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        if !p1.is_finite() || p1 == 0.0 {
            return Self::c(p1);
        }
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Self::finish(hi, lo)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() || q1 == 0.0 {
            return Self::c(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::c(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - b * (self / b).trunc()
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for DoubleDouble {
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl std::iter::Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDoubleDoubleError;

impl fmt::Display for ParseDoubleDoubleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid decimal literal")
    }
}

impl std::error::Error for ParseDoubleDoubleError {}

impl FromStr for DoubleDouble {
    type Err = ParseDoubleDoubleError;

    /// Parses a decimal literal (`-1.25e-3`, `inf`, `nan`) to full precision.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (neg, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let lower = body.to_ascii_lowercase();
        if lower == "inf" || lower == "infinity" {
            let v = Self::c(f64::INFINITY);
            return Ok(if neg { -v } else { v });
        }
        if lower == "nan" {
            return Ok(Self::c(f64::NAN));
        }
        let (mant, exp) = match lower.find('e') {
            Some(i) => (&lower[..i], lower[i + 1..].parse::<i32>().map_err(|_| ParseDoubleDoubleError)?),
            None => (lower.as_str(), 0),
        };
        let mut acc = Self::ZERO;
        let mut frac_digits = 0i32;
        let mut seen_dot = false;
        let mut any = false;
        for c in mant.chars() {
            match c {
                '.' if !seen_dot => seen_dot = true,
                '0'..='9' => {
                    any = true;
                    acc = acc.mul_f64(10.0) + Self::c((c as u8 - b'0') as f64);
                    if seen_dot {
                        frac_digits += 1;
                    }
                }
                _ => return Err(ParseDoubleDoubleError),
            }
        }
        if !any {
            return Err(ParseDoubleDoubleError);
        }
        let e = exp - frac_digits;
        let v = if e >= 0 { acc * Self::pow10(e) } else { acc / Self::pow10(-e) };
        Ok(if neg { -v } else { v })
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = ParseDoubleDoubleError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err(ParseDoubleDoubleError);
        }
        s.parse()
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().map(|p| p + 1).unwrap_or(32);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        i64::try_from(self.to_i128()?).ok()
    }
    fn to_u64(&self) -> Option<u64> {
        u64::try_from(self.to_i128()?).ok()
    }
    fn to_i128(&self) -> Option<i128> {
        let t = self.trunc();
        if !t.hi.is_finite() || t.hi.abs() >= 1.7e38 {
            return None;
        }
        Some(t.hi as i128 + t.lo as i128)
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
    fn to_f32(&self) -> Option<f32> {
        Some((self.hi + self.lo) as f32)
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Self::new(hi, lo))
    }
    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Self::new(hi, lo))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Some(Self::c(n))
    }
    fn from_f32(n: f32) -> Option<Self> {
        Some(Self::c(n as f64))
    }
}

impl NumCast for DoubleDouble {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        // integers beyond 2^53 keep their low bits in `lo`
        if let Some(v) = n.to_f64() {
            if v.fract() == 0.0 && v.abs() > 9.007_199_254_740_992e15 {
                if let Some(i) = n.to_i64() {
                    return Self::from_i64(i);
                }
                if let Some(u) = n.to_u64() {
                    return Self::from_u64(u);
                }
            }
            return Some(<Self as From<f64>>::from(v));
        }
        None
    }
}

impl Float for DoubleDouble {
    fn nan() -> Self {
        Self::c(f64::NAN)
    }
    fn infinity() -> Self {
        Self::c(f64::INFINITY)
    }
    fn neg_infinity() -> Self {
        Self::c(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Self { hi: -0.0, lo: 0.0 }
    }
    fn min_value() -> Self {
        Self::c(f64::MIN)
    }
    fn min_positive_value() -> Self {
        Self::c(f64::MIN_POSITIVE)
    }
    fn epsilon() -> Self {
        Self::EPSILON
    }
    fn max_value() -> Self {
        Self::c(f64::MAX)
    }
    fn is_nan(self) -> bool {
        self.hi.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi.classify()
    }
    fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            Self::new(hi, self.lo.floor())
        } else {
            Self::c(hi)
        }
    }
    fn ceil(self) -> Self {
        let hi = self.hi.ceil();
        if hi == self.hi {
            Self::new(hi, self.lo.ceil())
        } else {
            Self::c(hi)
        }
    }
    fn round(self) -> Self {
        let half = Self::c(0.5);
        if self.hi >= 0.0 {
            (self + half).floor()
        } else {
            -((-self) + half).floor()
        }
    }
    fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            self.ceil()
        }
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.hi.is_sign_negative()) {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        Self::c(self.hi.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.hi.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.hi.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::ONE / self
    }
    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }
    fn powf(self, n: Self) -> Self {
        if n.is_zero() {
            return Self::ONE;
        }
        if self.is_nan() || n.is_nan() {
            return Self::nan();
        }
        if self.is_zero() {
            return if n.hi > 0.0 { Self::ZERO } else { Self::infinity() };
        }
        if n.fract().is_zero() && n.hi.abs() <= 64.0 {
            return self.powi(n.hi as i32);
        }
        if self.hi < 0.0 {
            if n.fract().is_zero() {
                let mag = (-self).powf(n);
                let odd = (n * Self::c(0.5)).fract() != Self::ZERO;
                return if odd { -mag } else { mag };
            }
            return Self::nan();
        }
        (n * self.ln_dd()).exp_dd()
    }
    fn sqrt(self) -> Self {
        if self.hi < 0.0 {
            return Self::nan();
        }
        if self.is_zero() || self.is_infinite() {
            return self;
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let diff = (self - Self::c(ax).sqr()).hi * (x * 0.5);
        Self::new(ax, diff)
    }
    fn exp(self) -> Self {
        self.exp_dd()
    }
    fn exp2(self) -> Self {
        (self * LN_2).exp_dd()
    }
    fn ln(self) -> Self {
        self.ln_dd()
    }
    fn log(self, base: Self) -> Self {
        self.ln_dd() / base.ln_dd()
    }
    fn log2(self) -> Self {
        self.ln_dd() / LN_2
    }
    fn log10(self) -> Self {
        self.ln_dd() / LN_10
    }
    fn max(self, other: Self) -> Self {
        if self.is_nan() || other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if self.is_nan() || other < self {
            other
        } else {
            self
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self <= other {
            Self::ZERO
        } else {
            self - other
        }
    }
    fn cbrt(self) -> Self {
        if self.is_zero() || !self.is_finite() {
            return self;
        }
        let mut y = Self::c(self.hi.cbrt());
        for _ in 0..2 {
            let y2 = y.sqr();
            y -= (y2 * y - self) / (Self::c(3.0) * y2);
        }
        y
    }
    fn hypot(self, other: Self) -> Self {
        (self.sqr() + other.sqr()).sqrt()
    }
    fn sin(self) -> Self {
        self.sin_cos_dd().0
    }
    fn cos(self) -> Self {
        self.sin_cos_dd().1
    }
    fn tan(self) -> Self {
        let (s, c) = self.sin_cos_dd();
        s / c
    }
    fn asin(self) -> Self {
        if self.abs() > Self::ONE {
            return Self::nan();
        }
        Self::atan2_dd(self, (Self::ONE - self.sqr()).sqrt())
    }
    fn acos(self) -> Self {
        if self.abs() > Self::ONE {
            return Self::nan();
        }
        Self::atan2_dd((Self::ONE - self.sqr()).sqrt(), self)
    }
    fn atan(self) -> Self {
        Self::atan2_dd(self, Self::ONE)
    }
    fn atan2(self, other: Self) -> Self {
        Self::atan2_dd(self, other)
    }
    fn sin_cos(self) -> (Self, Self) {
        self.sin_cos_dd()
    }
    fn exp_m1(self) -> Self {
        if self.hi.abs() <= 0.5 * LN_2.hi {
            Self::expm1_reduced(self)
        } else {
            self.exp_dd() - Self::ONE
        }
    }
    fn ln_1p(self) -> Self {
        if self.hi.abs() < 1e-3 {
            // alternating series; 1e-3^12 is below the working precision
            let mut term = self;
            let mut s = self;
            for k in 2..=14 {
                term = -(term * self);
                s += term / Self::c(k as f64);
            }
            s
        } else {
            (Self::ONE + self).ln_dd()
        }
    }
    fn sinh(self) -> Self {
        let em1 = self.exp_m1();
        (em1 + em1 / (em1 + Self::ONE)) * Self::c(0.5)
    }
    fn cosh(self) -> Self {
        let e = self.exp_dd();
        (e + e.recip()) * Self::c(0.5)
    }
    fn tanh(self) -> Self {
        if self.hi.abs() > 40.0 {
            return Self::c(self.hi.signum());
        }
        let em1 = (self * Self::c(2.0)).exp_m1();
        em1 / (em1 + Self::c(2.0))
    }
    fn asinh(self) -> Self {
        let a = self.abs();
        let v = (a + a.sqr() / (Self::ONE + (Self::ONE + a.sqr()).sqrt())).ln_1p();
        if self.hi < 0.0 {
            -v
        } else {
            v
        }
    }
    fn acosh(self) -> Self {
        if self < Self::ONE {
            return Self::nan();
        }
        (self + (self.sqr() - Self::ONE).sqrt()).ln_dd()
    }
    fn atanh(self) -> Self {
        (Self::c(2.0) * self / (Self::ONE - self)).ln_1p() * Self::c(0.5)
    }
    /// Decodes the leading component only.
    fn integer_decode(self) -> (u64, i16, i8) {
        Float::integer_decode(self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(s: &str) -> DoubleDouble {
        s.parse().unwrap()
    }

    fn rel(a: DoubleDouble, b: DoubleDouble) -> f64 {
        ((a - b) / b).abs().to_f64().unwrap()
    }

    // references computed with mpmath at 45 digits
    #[test]
    fn transcendental_references() {
        let cases: Vec<(DoubleDouble, &str)> = vec![
            (DoubleDouble::ONE.exp(), "2.718281828459045235360287471352662497757"),
            (dd("-3.7").exp(), "2.472352647033939120275738298340262934451e-2"),
            (dd("50").exp(), "5.184705528587072464087453322933485384827e+21"),
            (dd("10").ln(), "2.302585092994045684017991454684364207601"),
            (dd("0.3").ln(), "-1.203972804325935992622746217761838502954"),
            (dd("1.7").powf(dd("2.5")), "3.768098990207130957028957560194068592753"),
            (dd("0.3").powf(dd("1.4")), "1.853402551702235754717657543760629661307e-1"),
            (dd("2").sqrt(), "1.41421356237309504880168872420969807857"),
            (dd("1.2345").powf(dd("-0.77")), "8.502602133888591535613154223391692823526e-1"),
            ((DoubleDouble::ONE + dd("1e-12")).powf(dd("2.5")), "1.000000000002500000000001875000000000313"),
            (dd("1e-5").exp_m1(), "1.000005000016666708333416666805555753969e-5"),
            (dd("1e-5").ln_1p(), "9.999950000333330833353333166668095225595e-6"),
            (dd("7").cbrt(), "1.912931182772389101199116839548760282862"),
            (DoubleDouble::ONE / dd("3"), "3.333333333333333333333333333333333333333e-1"),
        ];
        for (i, (got, want)) in cases.into_iter().enumerate() {
            let err = rel(got, dd(want));
            assert!(err < 1e-30, "case {i}: rel err {err:e}, got {got}");
        }
    }

    #[test]
    fn trig_references() {
        let cases: Vec<(DoubleDouble, &str)> = vec![
            (DoubleDouble::ONE.sin(), "8.414709848078965066525023216302989996226e-1"),
            (DoubleDouble::ONE.cos(), "5.403023058681397174009366074429766037323e-1"),
            (dd("0.5").atan(), "4.636476090008061162142562314612144020285e-1"),
            (dd("-1").atan2(dd("-2")), "-2.677945044588987122248387151818288482169"),
            (dd("0.3").asin(), "3.046926540153975079720029612275291669546e-1"),
            (dd("0.1").sinh(), "1.001667500198440258237293835219050235149e-1"),
            (dd("2").tanh(), "9.64027580075816883946413724100923150255e-1"),
            (dd("100").sin(), "-5.06365641109758793656557610459785432065e-1"),
        ];
        for (i, (got, want)) in cases.into_iter().enumerate() {
            let err = rel(got, dd(want));
            assert!(err < 1e-29, "case {i}: rel err {err:e}, got {got}");
        }
    }

    #[test]
    fn integer_power_is_exact() {
        let v = dd("3").powf(dd("9"));
        assert_eq!(v, dd("19683"));
        assert_eq!(dd("-2").powf(dd("3")), dd("-8"));
        assert!(dd("-2").powf(dd("0.5")).is_nan());
    }

    #[test]
    fn zero_power_conventions() {
        assert_eq!(DoubleDouble::ZERO.powf(DoubleDouble::ZERO), DoubleDouble::ONE);
        assert!(DoubleDouble::ZERO.powf(dd("-0.5")).is_infinite());
        assert!(DoubleDouble::ZERO.powf(dd("0.5")).is_zero());
    }

    #[test]
    fn rendering_round_trips() {
        let x = DoubleDouble::ONE / dd("3");
        assert_eq!(x.to_sci_string(5), "3.3333e-1");
        assert_eq!(dd("-9.99996").to_sci_string(5), "-1.0000e1");
        let pi_text = PI.to_sci_string(32);
        assert!(rel(dd(&pi_text), PI) < 1e-31, "{pi_text}");
        assert_eq!(format!("{:.3}", dd("1234.5")), "1.235e3");
    }

    #[test]
    fn ordering_and_rounding() {
        let a = DoubleDouble::new(1.0, 1e-20);
        assert!(a > DoubleDouble::ONE);
        assert_eq!(dd("2.5").round(), dd("3"));
        assert_eq!(dd("-2.5").round(), dd("-3"));
        assert_eq!(dd("-2.5").floor(), dd("-3"));
        assert_eq!(dd("7.5") % dd("2"), dd("1.5"));
        assert_eq!(<DoubleDouble as NumCast>::from(u64::MAX).unwrap().to_u64(), Some(u64::MAX));
    }
}
