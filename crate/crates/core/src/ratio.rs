//! Exact rational scalars and small deterministic sampling helpers.

use alloc::string::String;

/// The scalar type used for every distance, diameter, scale and bound.
pub type Rational = num_rational::Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Parses "p/q" or a bare integer "p".
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Formats reduced; denominator 1 prints as a bare integer.
pub fn format_rational(r: &Rational) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    if *r.denom() == 1 {
        let _ = write!(out, "{}", r.numer());
    } else {
        let _ = write!(out, "{}/{}", r.numer(), r.denom());
    }
    out
}

/// splitmix64, used for deterministic in-crate sampling (triple checks on
/// large spaces). Not a user-facing randomness source.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + (self.next_u64() % ((hi - lo + 1) as u64)) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7", "1/2", "-20/6", "0"] {
            let r = parse_rational(s).unwrap();
            let t = format_rational(&r);
            assert_eq!(parse_rational(&t).unwrap(), r);
        }
        assert_eq!(parse_rational("-20/6").unwrap(), rat(-10, 3));
        assert_eq!(format_rational(&rat(-10, 3)), "-10/3");
        assert_eq!(format_rational(&rat_int(4)), "4");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }
}
