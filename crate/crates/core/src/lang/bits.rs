//! Fixed-width bitvectors with arbitrary-precision payloads.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitvec {
    width: u32,
    bits: BigUint,
}

fn mask(width: u32) -> BigUint {
    (BigUint::one() << width as usize) - BigUint::one()
}

impl Bitvec {
    /// Builds a bitvector, truncating `bits` to `width`.
    pub fn new(width: u32, bits: BigUint) -> Bitvec {
        assert!(width > 0, "bitvector width must be positive");
        let bits = if bits.bits() > width as u64 { bits & mask(width) } else { bits };
        Bitvec { width, bits }
    }

    pub fn from_u64(width: u32, v: u64) -> Bitvec {
        Bitvec::new(width, BigUint::from(v))
    }

    /// Two's-complement encoding of a signed integer.
    pub fn from_int(width: u32, v: &BigInt) -> Bitvec {
        let modulus = BigInt::one() << width as usize;
        let mut r = v % &modulus;
        if r.sign() == Sign::Minus {
            r += &modulus;
        }
        Bitvec::new(width, r.to_biguint().unwrap())
    }

    pub fn zero(width: u32) -> Bitvec {
        Bitvec::new(width, BigUint::zero())
    }

    pub fn ones(width: u32) -> Bitvec {
        Bitvec::new(width, mask(width))
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn bits(&self) -> &BigUint {
        &self.bits
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.bits.to_u64()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn bit(&self, i: u32) -> bool {
        self.bits.bit(i as u64)
    }

    pub fn msb(&self) -> bool {
        self.bit(self.width - 1)
    }

    pub fn to_signed(&self) -> BigInt {
        let u = BigInt::from(self.bits.clone());
        if self.msb() {
            u - (BigInt::one() << self.width as usize)
        } else {
            u
        }
    }

    pub fn add(&self, o: &Bitvec) -> Bitvec {
        Bitvec::new(self.width, &self.bits + &o.bits)
    }

    pub fn sub(&self, o: &Bitvec) -> Bitvec {
        Bitvec::new(self.width, (&self.bits + mask(self.width) + 1u32) - &o.bits)
    }

    pub fn mul(&self, o: &Bitvec) -> Bitvec {
        Bitvec::new(self.width, &self.bits * &o.bits)
    }

    pub fn udiv(&self, o: &Bitvec) -> Option<Bitvec> {
        if o.is_zero() {
            None
        } else {
            Some(Bitvec::new(self.width, &self.bits / &o.bits))
        }
    }

    pub fn neg(&self) -> Bitvec {
        Bitvec::zero(self.width).sub(self)
    }

    pub fn not(&self) -> Bitvec {
        Bitvec::new(self.width, &self.bits ^ mask(self.width))
    }

    pub fn and(&self, o: &Bitvec) -> Bitvec {
        Bitvec::new(self.width, &self.bits & &o.bits)
    }

    pub fn or(&self, o: &Bitvec) -> Bitvec {
        Bitvec::new(self.width, &self.bits | &o.bits)
    }

    pub fn xor(&self, o: &Bitvec) -> Bitvec {
        Bitvec::new(self.width, &self.bits ^ &o.bits)
    }

    fn shift_amount(&self, o: &Bitvec) -> Option<u32> {
        o.bits.to_u32().filter(|s| *s < self.width)
    }

    pub fn shl(&self, o: &Bitvec) -> Bitvec {
        match self.shift_amount(o) {
            Some(s) => Bitvec::new(self.width, &self.bits << s as usize),
            None => Bitvec::zero(self.width),
        }
    }

    pub fn lshr(&self, o: &Bitvec) -> Bitvec {
        match self.shift_amount(o) {
            Some(s) => Bitvec::new(self.width, &self.bits >> s as usize),
            None => Bitvec::zero(self.width),
        }
    }

    pub fn ashr(&self, o: &Bitvec) -> Bitvec {
        let fill = if self.msb() { Bitvec::ones(self.width) } else { Bitvec::zero(self.width) };
        match self.shift_amount(o) {
            Some(0) => self.clone(),
            Some(s) => {
                let shifted = &self.bits >> s as usize;
                let keep = (self.width - s) as usize;
                let high = (fill.bits.clone() >> keep) << keep;
                Bitvec::new(self.width, shifted | (high & mask(self.width)))
            }
            None => fill,
        }
    }

    pub fn ult(&self, o: &Bitvec) -> bool {
        self.bits < o.bits
    }

    pub fn slt(&self, o: &Bitvec) -> bool {
        self.to_signed() < o.to_signed()
    }

    /// Bits `lo..hi` (half-open, bit 0 is the least significant).
    pub fn extract(&self, lo: u32, hi: u32) -> Bitvec {
        assert!(lo < hi && hi <= self.width);
        Bitvec::new(hi - lo, &self.bits >> lo as usize)
    }

    /// Zero-extends or truncates to `width`.
    pub fn resize(&self, width: u32) -> Bitvec {
        Bitvec::new(width, self.bits.clone())
    }

    pub fn to_bin_string(&self) -> String {
        format!("{:0>w$}", self.bits.to_str_radix(2), w = self.width as usize)
    }

    pub fn to_hex_string(&self) -> String {
        let digits = self.width.div_ceil(4) as usize;
        format!("{:0>w$}", self.bits.to_str_radix(16), w = digits)
    }

    /// Source-literal form: hexadecimal when the width is a multiple of four.
    pub fn literal(&self) -> String {
        if self.width.is_multiple_of(4) {
            format!("0x{}", self.to_hex_string())
        } else {
            format!("0b{}", self.to_bin_string())
        }
    }

    /// Parses `0x…` (width 4 per digit) or `0b…` (width 1 per digit).
    pub fn parse_literal(s: &str) -> Option<Bitvec> {
        let (radix, per, digits) = if let Some(d) = s.strip_prefix("0x") {
            (16, 4, d)
        } else {
            let d = s.strip_prefix("0b")?;
            (2, 1, d)
        };
        let digits: String = digits.chars().filter(|c| *c != '_').collect();
        if digits.is_empty() {
            return None;
        }
        let bits = BigUint::parse_bytes(digits.as_bytes(), radix)?;
        Some(Bitvec::new(per * digits.len() as u32, bits))
    }
}

impl fmt::Debug for Bitvec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal())
    }
}

impl fmt::Display for Bitvec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(w: u32, v: u64) -> Bitvec {
        Bitvec::from_u64(w, v)
    }

    #[test]
    fn literals_take_width_from_digits() {
        assert_eq!(Bitvec::parse_literal("0x0058"), Some(bv(16, 0x58)));
        assert_eq!(Bitvec::parse_literal("0b011"), Some(bv(3, 3)));
        assert_eq!(bv(16, 0x58).literal(), "0x0058");
        assert_eq!(bv(3, 3).literal(), "0b011");
    }

    #[test]
    fn wrapping_arithmetic() {
        assert_eq!(bv(4, 2).add(&bv(4, 3)), bv(4, 5));
        assert_eq!(bv(4, 15).add(&bv(4, 1)), bv(4, 0));
        assert_eq!(bv(4, 1).sub(&bv(4, 2)), bv(4, 15));
        assert_eq!(bv(4, 7).mul(&bv(4, 3)), bv(4, 5));
        assert_eq!(bv(4, 7).udiv(&bv(4, 0)), None);
        assert_eq!(bv(4, 1).neg(), bv(4, 15));
    }

    #[test]
    fn shifts() {
        assert_eq!(bv(4, 0b1001).shl(&bv(4, 1)), bv(4, 0b0010));
        assert_eq!(bv(4, 0b1001).lshr(&bv(4, 1)), bv(4, 0b0100));
        assert_eq!(bv(4, 0b1001).ashr(&bv(4, 1)), bv(4, 0b1100));
        assert_eq!(bv(4, 0b1001).ashr(&bv(4, 9)), bv(4, 0b1111));
        assert_eq!(bv(4, 0b0001).shl(&bv(4, 4)), bv(4, 0));
    }

    #[test]
    fn extraction_is_lsb_first() {
        assert_eq!(bv(4, 0b0010).extract(0, 1), bv(1, 0));
        assert_eq!(bv(4, 0b0110).extract(1, 3), bv(2, 0b11));
        assert_eq!(bv(4, 0b1000).extract(3, 4), bv(1, 1));
    }

    #[test]
    fn signed_compare() {
        assert!(bv(4, 0b1111).slt(&bv(4, 0)));
        assert!(!bv(4, 0b1111).ult(&bv(4, 0)));
        assert_eq!(Bitvec::from_int(4, &BigInt::from(-1)), bv(4, 15));
    }

    fn mask64(w: u32) -> u128 {
        (1u128 << w) - 1
    }

    proptest::proptest! {
        #[test]
        fn arithmetic_matches_wide_integers(w in 1u32..=64, a: u64, b: u64) {
            let m = mask64(w);
            let (x, y) = (a as u128 & m, b as u128 & m);
            let (p, q) = (bv(w, x as u64), bv(w, y as u64));
            let r = |v: u128| bv(w, (v & m) as u64);
            proptest::prop_assert_eq!(p.add(&q), r(x + y));
            proptest::prop_assert_eq!(p.sub(&q), r(x + (m + 1) - y));
            proptest::prop_assert_eq!(p.mul(&q), r(x.wrapping_mul(y)));
            proptest::prop_assert_eq!(p.udiv(&q), (y != 0).then(|| r(x / y)));
            proptest::prop_assert_eq!(p.and(&q), r(x & y));
            proptest::prop_assert_eq!(p.xor(&q), r(x ^ y));
            proptest::prop_assert_eq!(p.not(), r(!x));
            proptest::prop_assert_eq!(p.ult(&q), x < y);
            let signed = |v: u128| if v >> (w - 1) & 1 == 1 { v as i128 - (m as i128 + 1) } else { v as i128 };
            proptest::prop_assert_eq!(p.slt(&q), signed(x) < signed(y));
            proptest::prop_assert_eq!(p.to_signed(), BigInt::from(signed(x)));
        }

        #[test]
        fn shifts_match_wide_integers(w in 1u32..=64, a: u64, s in 0u64..80) {
            let m = mask64(w);
            let x = a as u128 & m;
            let (p, k) = (bv(w, x as u64), bv(w, s & m as u64));
            let amt = (s & m as u64) as u32;
            let r = |v: u128| bv(w, (v & m) as u64);
            let (shl, lshr) = if amt < w { (r(x << amt), r(x >> amt)) } else { (r(0), r(0)) };
            proptest::prop_assert_eq!(p.shl(&k), shl);
            proptest::prop_assert_eq!(p.lshr(&k), lshr);
            let neg = x >> (w - 1) & 1 == 1;
            let sar = if amt >= w { if neg { r(m) } else { r(0) } } else if neg { r((x >> amt) | (m & !(m >> amt))) } else { r(x >> amt) };
            proptest::prop_assert_eq!(p.ashr(&k), sar);
        }

        #[test]
        fn literals_round_trip(w in 1u32..=64, a: u64) {
            let p = bv(w, (a as u128 & mask64(w)) as u64);
            proptest::prop_assert_eq!(Bitvec::parse_literal(&p.literal()), Some(p));
        }

        #[test]
        fn extract_then_resize_recovers_low_bits(w in 2u32..=64, a: u64, hi in 1u32..64) {
            let hi = hi.min(w);
            let p = bv(w, (a as u128 & mask64(w)) as u64);
            proptest::prop_assert_eq!(p.extract(0, hi), p.resize(hi));
        }
    }
}
