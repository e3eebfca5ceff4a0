//! Exact rational helpers: parsing/printing the `"p/q"` wire form,
//! decimal rendering with round-half-to-even, and small-denominator
//! snapping of floating-point candidates.

use num::bigint::{BigInt, Sign};
use num::{BigRational, One, Signed, Zero};

use crate::{Error, Result};

pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Renders a rational as `"p/q"` (or just `"p"` when the denominator is 1).
pub fn to_frac_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn from_frac_string(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: BigInt = p
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad rational numerator in {s:?}")))?;
    let q: BigInt = q
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad rational denominator in {s:?}")))?;
    if q.is_zero() {
        return Err(Error::Format(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(p, q))
}

/// Decimal rendering at `sig` significant digits, round half to even.
pub fn to_decimal_string(r: &Rat, sig: usize) -> String {
    let sig = sig.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let p = r.numer().abs();
    let q = r.denom().clone();

    // e = floor(log10(p/q)): the unique e with 10^e <= p/q < 10^(e+1).
    let mut e: i64 = (p.to_string().len() as i64) - (q.to_string().len() as i64);
    let ten = BigInt::from(10);
    loop {
        // compare p/q with 10^e
        let (lhs, rhs) = if e >= 0 {
            (p.clone(), &q * ten.pow(e as u32))
        } else {
            (&p * ten.pow((-e) as u32), q.clone())
        };
        if lhs < rhs {
            e -= 1;
        } else if lhs >= &rhs * &ten {
            e += 1;
        } else {
            break;
        }
    }

    // digits = round_half_even(p/q * 10^(sig-1-e)), a sig-digit integer.
    let shift = sig as i64 - 1 - e;
    let (num, den) = if shift >= 0 {
        (&p * ten.pow(shift as u32), q.clone())
    } else {
        (p.clone(), &q * ten.pow((-shift) as u32))
    };
    let (quot, rem) = num::Integer::div_rem(&num, &den);
    let mut digits = quot;
    let twice = &rem * BigInt::from(2);
    if twice > den || (twice == den && num::Integer::is_odd(&digits)) {
        digits += 1;
    }
    let mut ds = digits.to_string();
    if ds.len() > sig {
        // rounding carried into a new leading digit
        ds.truncate(sig);
        e += 1;
    }

    let body = if (-4..16).contains(&e) {
        if e >= 0 {
            let e = e as usize;
            if e + 1 >= ds.len() {
                let zeros = "0".repeat(e + 1 - ds.len());
                format!("{ds}{zeros}")
            } else {
                format!("{}.{}", &ds[..e + 1], &ds[e + 1..])
            }
        } else {
            let zeros = "0".repeat((-e - 1) as usize);
            format!("0.{zeros}{ds}")
        }
    } else {
        let mantissa = if ds.len() > 1 {
            format!("{}.{}", &ds[..1], &ds[1..])
        } else {
            ds
        };
        format!("{mantissa}e{e}")
    };
    // trim trailing fractional zeros
    let body = if body.contains('.') && !body.contains('e') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `(1 - 1/k)^e` and friends: integer power of a rational.
pub fn pow(r: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

/// Best rational approximation to `x` with denominator at most `max_den`,
/// by walking the Stern-Brocot tree. Requires finite `x >= 0`.
pub fn snap_to_rational(x: f64, max_den: u64) -> Rat {
    assert!(x.is_finite() && x >= 0.0);
    let whole = x.floor();
    let frac = x - whole;
    let whole_rat = Rat::from_integer(BigInt::from(whole as u64));
    if frac == 0.0 {
        return whole_rat;
    }
    // mediant search for frac in (0,1)
    let (mut lo_n, mut lo_d, mut hi_n, mut hi_d) = (0u64, 1u64, 1u64, 1u64);
    let (mut best_n, mut best_d) = (0u64, 1u64);
    let mut best_err = frac;
    loop {
        let med_n = lo_n + hi_n;
        let med_d = lo_d + hi_d;
        if med_d > max_den {
            break;
        }
        let med = med_n as f64 / med_d as f64;
        let err = (med - frac).abs();
        if err < best_err {
            best_err = err;
            best_n = med_n;
            best_d = med_d;
        }
        if med < frac {
            lo_n = med_n;
            lo_d = med_d;
        } else if med > frac {
            hi_n = med_n;
            hi_d = med_d;
        } else {
            break;
        }
    }
    // endpoints 0/1 and 1/1 are candidates too
    if (1.0 - frac).abs() < best_err {
        best_n = 1;
        best_d = 1;
    }
    whole_rat + Rat::new(BigInt::from(best_n), BigInt::from(best_d))
}

pub fn to_f64(r: &Rat) -> f64 {
    let p = bigint_to_f64(r.numer());
    let q = bigint_to_f64(r.denom());
    p / q
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    let (sign, digits) = b.to_u64_digits();
    let mut acc = 0.0f64;
    for d in digits.iter().rev() {
        acc = acc * 18446744073709551616.0 + *d as f64;
    }
    if sign == Sign::Minus {
        -acc
    } else {
        acc
    }
}
