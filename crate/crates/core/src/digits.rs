//! Eventually periodic base-b expansions of rationals.
//!
//! An expansion is stored as a finite preperiod followed by a period that
//! repeats forever. Constructors always bring the representation into
//! canonical form (primitive period, shortest preperiod), so two values are
//! structurally equal exactly when they describe the same digit sequence.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number. Always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Largest base whose digits still print as a single character.
pub const MAX_BASE: u32 = 36;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventuallyPeriodicDigits {
    base: u32,
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

impl EventuallyPeriodicDigits {
    /// Builds a canonical expansion from raw digit lists.
    ///
    /// The value may be exactly 1 only for the all-`(base-1)` sequence, which
    /// arises as the complement of zero.
    pub fn new(base: u32, mut preperiod: Vec<u8>, mut period: Vec<u8>) -> Result<Self> {
        check_base(base)?;
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        for &d in preperiod.iter().chain(period.iter()) {
            if u32::from(d) >= base {
                return Err(Error::DigitOutOfRange {
                    digit: d.into(),
                    base,
                });
            }
        }

        let root = primitive_root_len(&period);
        period.truncate(root);

        while let (Some(&last_pre), Some(&last_per)) = (preperiod.last(), period.last()) {
            if last_pre != last_per {
                break;
            }
            preperiod.pop();
            period.rotate_right(1);
        }

        Ok(EventuallyPeriodicDigits {
            base,
            preperiod,
            period,
        })
    }

    /// Parses the `preperiod|period` notation, e.g. `"|10"` or `"1|0"`.
    pub fn parse(text: &str, base: u32) -> Result<Self> {
        check_base(base)?;
        let parse_err = |reason: &str| Error::Parse {
            input: text.to_string(),
            reason: reason.to_string(),
        };
        let (pre, per) = text
            .trim()
            .split_once('|')
            .ok_or_else(|| parse_err("expected `preperiod|period`"))?;
        let to_digits = |s: &str| -> Result<Vec<u8>> {
            s.chars()
                .map(|c| {
                    c.to_digit(base)
                        .map(|d| d as u8)
                        .ok_or_else(|| parse_err("not a digit of this base"))
                })
                .collect()
        };
        Self::new(base, to_digits(pre)?, to_digits(per)?)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    /// True when the expansion ends in repeated zeros.
    pub fn is_terminating(&self) -> bool {
        self.period == [0]
    }

    /// Digit `z_i` for `i >= 1`.
    ///
    /// # Panics
    /// Panics if `i == 0`.
    pub fn digit_at(&self, i: usize) -> u8 {
        assert!(i >= 1, "digit positions start at 1");
        let k = i - 1;
        if k < self.preperiod.len() {
            self.preperiod[k]
        } else {
            self.period[(k - self.preperiod.len()) % self.period.len()]
        }
    }

    /// The infinite digit stream `z_1, z_2, ...`.
    pub fn digits(&self) -> impl Iterator<Item = u8> + Clone + '_ {
        self.preperiod
            .iter()
            .copied()
            .chain(self.period.iter().copied().cycle())
    }

    /// First `k` digits.
    pub fn prefix(&self, k: usize) -> Vec<u8> {
        self.digits().take(k).collect()
    }

    /// The expansion that remains after dropping the first `k` digits.
    pub fn suffix(&self, k: usize) -> Self {
        if k <= self.preperiod.len() {
            // Already canonical: dropping leading digits keeps the tail shape.
            return EventuallyPeriodicDigits {
                base: self.base,
                preperiod: self.preperiod[k..].to_vec(),
                period: self.period.clone(),
            };
        }
        let mut period = self.period.clone();
        period.rotate_left((k - self.preperiod.len()) % self.period.len());
        EventuallyPeriodicDigits {
            base: self.base,
            preperiod: Vec::new(),
            period,
        }
    }

    /// Expansion `head` followed by this one.
    pub fn prepend(&self, head: &[u8]) -> Result<Self> {
        let mut preperiod = head.to_vec();
        preperiod.extend_from_slice(&self.preperiod);
        Self::new(self.base, preperiod, self.period.clone())
    }

    /// Exact value of the expansion.
    pub fn value(&self) -> Rational {
        value_of(self)
    }
}

impl fmt::Display for EventuallyPeriodicDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let write_digits = |f: &mut fmt::Formatter<'_>, ds: &[u8]| -> fmt::Result {
            for &d in ds {
                let c = char::from_digit(u32::from(d), self.base).unwrap_or('?');
                write!(f, "{c}")?;
            }
            Ok(())
        };
        write_digits(f, &self.preperiod)?;
        f.write_str("|")?;
        write_digits(f, &self.period)
    }
}

fn check_base(base: u32) -> Result<()> {
    if (2..=MAX_BASE).contains(&base) {
        Ok(())
    } else {
        Err(Error::InvalidBase(base))
    }
}

/// Length of the shortest word whose repetition is `word`.
fn primitive_root_len(word: &[u8]) -> usize {
    let n = word.len();
    (1..=n)
        .filter(|p| n.is_multiple_of(*p))
        .find(|&p| word.iter().enumerate().all(|(i, &d)| d == word[i % p]))
        .unwrap_or(n)
}

/// Parses `p/q` or a bare integer into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let err = |reason: &str| Error::Parse {
        input: text.to_string(),
        reason: reason.to_string(),
    };
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Formats a rational as `p/q`, always showing the denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Base-`base` expansion of `r` by long division.
///
/// The first repeated remainder closes the period, which yields the shortest
/// preperiod and period directly.
pub fn expand(r: &Rational, base: u32) -> Result<EventuallyPeriodicDigits> {
    check_base(base)?;
    if r.is_negative() || r >= &Rational::one() {
        return Err(Error::Domain(format_rational(r)));
    }
    let (pre, per) = match (r.numer().to_u64(), r.denom().to_u64()) {
        (Some(p), Some(q)) => long_division(u128::from(p), u128::from(q), base),
        _ => long_division(r.numer().clone(), r.denom().clone(), base),
    };
    EventuallyPeriodicDigits::new(base, pre, per)
}

fn long_division<T>(numer: T, denom: T, base: u32) -> (Vec<u8>, Vec<u8>)
where
    T: Integer + Clone + Hash + From<u32> + ToPrimitive,
{
    let base_t = T::from(base);
    let mut seen: HashMap<T, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut rem = numer;
    loop {
        if rem.is_zero() {
            return (digits, vec![0]);
        }
        if let Some(&start) = seen.get(&rem) {
            let period = digits.split_off(start);
            return (digits, period);
        }
        seen.insert(rem.clone(), digits.len());
        let (d, r) = (rem * base_t.clone()).div_rem(&denom);
        digits.push(d.to_u8().expect("digit below base"));
        rem = r;
    }
}

/// Exact value of an expansion by geometric series.
pub fn value_of(d: &EventuallyPeriodicDigits) -> Rational {
    let base = BigInt::from(d.base);
    let fold = |ds: &[u8]| {
        ds.iter()
            .fold(BigInt::zero(), |acc, &z| acc * &base + BigInt::from(z))
    };
    let head = fold(&d.preperiod);
    let cycle = fold(&d.period);
    let head_scale: BigInt = Pow::pow(&base, d.preperiod.len());
    let cycle_scale: BigInt = Pow::pow(&base, d.period.len()) - 1u32;
    Rational::new(head * &cycle_scale + cycle, head_scale * cycle_scale)
}

/// The other expansion of a number with two representations, if any.
///
/// A terminating expansion whose last nonzero digit sits at position `n`
/// maps to the one that lowers that digit and repeats `base-1` from `n+1`,
/// and the reverse.
pub fn alternate_expansion(d: &EventuallyPeriodicDigits) -> Option<EventuallyPeriodicDigits> {
    let top = (d.base - 1) as u8;
    let last = *d.preperiod.last()?;
    let mut pre = d.preperiod.clone();
    let n = pre.len() - 1;
    let period = if d.period == [0] {
        pre[n] = last - 1;
        vec![top]
    } else if d.period == [top] {
        pre[n] = last + 1;
        vec![0]
    } else {
        return None;
    };
    Some(EventuallyPeriodicDigits::new(d.base, pre, period).expect("digits stay in range"))
}

/// Replaces every digit `z` by `(base-1) - z`.
pub fn complement(d: &EventuallyPeriodicDigits) -> EventuallyPeriodicDigits {
    let top = (d.base - 1) as u8;
    let flip = |ds: &[u8]| ds.iter().map(|&z| top - z).collect::<Vec<_>>();
    EventuallyPeriodicDigits::new(d.base, flip(&d.preperiod), flip(&d.period))
        .expect("complement keeps digits in range")
}
