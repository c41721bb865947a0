//! Exact 2×2 integer matrix algebra with determinant ±1.
//!
//! Everything downstream (twist bookkeeping, gluing maps, generator
//! decompositions) runs on [`Gl2z`]. Arithmetic is 64-bit with overflow
//! treated as a hard error; desk-scale inputs never get close.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Sl2zError {
    #[error("determinant {0} is not ±1")]
    BadDeterminant(i64),
    #[error("decomposition requires determinant +1, got -1")]
    DetMinusOne,
}

/// 2×2 integer matrix `[[a, b], [c, d]]` with `ad - bc = ±1`.
///
/// Serializes as the flat array `[a, b, c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[i64; 4]", try_from = "[i64; 4]")]
pub struct Gl2z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl From<Gl2z> for [i64; 4] {
    fn from(m: Gl2z) -> Self {
        [m.a, m.b, m.c, m.d]
    }
}

impl TryFrom<[i64; 4]> for Gl2z {
    type Error = Sl2zError;
    fn try_from(v: [i64; 4]) -> Result<Self, Sl2zError> {
        Gl2z::new(v[0], v[1], v[2], v[3])
    }
}

fn mul_i64(x: i64, y: i64) -> i64 {
    x.checked_mul(y).expect("integer overflow in 2x2 matrix arithmetic")
}

fn add_i64(x: i64, y: i64) -> i64 {
    x.checked_add(y).expect("integer overflow in 2x2 matrix arithmetic")
}

impl Gl2z {
    pub const IDENTITY: Gl2z = Gl2z { a: 1, b: 0, c: 0, d: 1 };
    /// Swap of the two coordinate axes (determinant −1). Used only as an
    /// involutive conjugator.
    pub const SWAP: Gl2z = Gl2z { a: 0, b: 1, c: 1, d: 0 };
    /// Lower shear `(x, y) ↦ (x, x + y)`; first standard generator.
    pub const LOWER: Gl2z = Gl2z { a: 1, b: 0, c: 1, d: 1 };
    /// Upper shear `(x, y) ↦ (x + y, y)`; second standard generator.
    pub const UPPER: Gl2z = Gl2z { a: 1, b: 1, c: 0, d: 1 };
    /// The order-six elliptic element `UPPER⁻¹ · LOWER = [[0,-1],[1,1]]`.
    pub const ORDER_SIX: Gl2z = Gl2z { a: 0, b: -1, c: 1, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Gl2z, Sl2zError> {
        let m = Gl2z { a, b, c, d };
        match m.det() {
            1 | -1 => Ok(m),
            bad => Err(Sl2zError::BadDeterminant(bad)),
        }
    }

    pub fn det(&self) -> i64 {
        add_i64(mul_i64(self.a, self.d), -mul_i64(self.b, self.c))
    }

    pub fn mul(&self, rhs: &Gl2z) -> Gl2z {
        Gl2z {
            a: add_i64(mul_i64(self.a, rhs.a), mul_i64(self.b, rhs.c)),
            b: add_i64(mul_i64(self.a, rhs.b), mul_i64(self.b, rhs.d)),
            c: add_i64(mul_i64(self.c, rhs.a), mul_i64(self.d, rhs.c)),
            d: add_i64(mul_i64(self.c, rhs.b), mul_i64(self.d, rhs.d)),
        }
    }

    /// Exact inverse: adjugate scaled by the (±1) determinant.
    pub fn inv(&self) -> Gl2z {
        let det = self.det();
        Gl2z {
            a: mul_i64(det, self.d),
            b: mul_i64(det, -self.b),
            c: mul_i64(det, -self.c),
            d: mul_i64(det, self.a),
        }
    }

    pub fn neg(&self) -> Gl2z {
        Gl2z { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn pow(&self, n: u32) -> Gl2z {
        let mut out = Gl2z::IDENTITY;
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Conjugation by the axis swap: `SWAP · A · SWAP`.
    pub fn conj_xy(&self) -> Gl2z {
        Gl2z::SWAP.mul(self).mul(&Gl2z::SWAP)
    }

    /// Integer action on a column vector.
    pub fn apply(&self, v: (i64, i64)) -> (i64, i64) {
        (
            add_i64(mul_i64(self.a, v.0), mul_i64(self.b, v.1)),
            add_i64(mul_i64(self.c, v.0), mul_i64(self.d, v.1)),
        )
    }

    /// Real action on a point of the plane (or torus cover).
    pub fn apply_f64(&self, v: (f64, f64)) -> (f64, f64) {
        (
            self.a as f64 * v.0 + self.b as f64 * v.1,
            self.c as f64 * v.0 + self.d as f64 * v.1,
        )
    }
}

/// One letter of a word in the two shear generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenLetter {
    A1,
    A1Inv,
    A2,
    A2Inv,
}

impl GenLetter {
    pub fn matrix(&self) -> Gl2z {
        match self {
            GenLetter::A1 => Gl2z::LOWER,
            GenLetter::A1Inv => Gl2z::LOWER.inv(),
            GenLetter::A2 => Gl2z::UPPER,
            GenLetter::A2Inv => Gl2z::UPPER.inv(),
        }
    }

    pub fn inverse(&self) -> GenLetter {
        match self {
            GenLetter::A1 => GenLetter::A1Inv,
            GenLetter::A1Inv => GenLetter::A1,
            GenLetter::A2 => GenLetter::A2Inv,
            GenLetter::A2Inv => GenLetter::A2,
        }
    }
}

/// Word in the shear generators, multiplied left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorWord(pub Vec<GenLetter>);

impl GeneratorWord {
    pub fn evaluate(&self) -> Gl2z {
        self.0
            .iter()
            .fold(Gl2z::IDENTITY, |acc, l| acc.mul(&l.matrix()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Result of [`decompose`]: `evaluate(word) = sign · A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub word: GeneratorWord,
    pub sign: i64,
}

fn div_round(a: i64, b: i64) -> i64 {
    // nearest integer, ties toward zero; keeps remainders ≤ |b|/2
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + r.signum() * b.signum()
    } else {
        q
    }
}

/// Euclidean-style decomposition of a determinant-one matrix into shear
/// generators, up to an overall sign.
///
/// Reduces the first column with alternating shear powers until it hits
/// `(±1, 0)`, then peels the remaining upper-triangular power. Returns the
/// word (letters multiply left to right) and the sign `s ∈ {±1}` with
/// `word = s·A⁻¹`-free form, i.e. `evaluate(word) == s · A` exactly.
pub fn decompose(m: &Gl2z) -> Result<Decomposition, Sl2zError> {
    if m.det() != 1 {
        return Err(Sl2zError::DetMinusOne);
    }
    // Letters applied on the left to reduce the matrix.
    let mut applied: Vec<GenLetter> = Vec::new();
    let mut cur = *m;
    let mut apply_power = |cur: &mut Gl2z, letter: GenLetter, times: i64| {
        let (l, n) = if times >= 0 { (letter, times) } else { (letter.inverse(), -times) };
        for _ in 0..n {
            *cur = l.matrix().mul(cur);
            applied.push(l);
        }
    };
    while cur.c != 0 {
        if cur.a == 0 {
            // one upper-shear step makes |a| = |c|
            let s = cur.c.signum();
            apply_power(&mut cur, GenLetter::A2, s);
        } else {
            let q = div_round(cur.c, cur.a);
            if q == 0 {
                // |c| < |a| already; shrink a below |c| instead
                let p = div_round(cur.a, cur.c);
                apply_power(&mut cur, GenLetter::A2, -p);
            } else {
                // subtract q copies of row 1 from row 2
                apply_power(&mut cur, GenLetter::A1, -q);
            }
        }
    }
    // cur = [[s, b'], [0, s]] with s = ±1; peel the shear power
    let sign = cur.a;
    debug_assert_eq!(sign * cur.d, 1);
    let shift = sign * cur.b; // cur = s·UPPER^shift
    // cur = (g_k···g_1)·M, so M = g_1⁻¹···g_k⁻¹·(s·A2^shift)
    let mut word: Vec<GenLetter> = applied.iter().map(|l| l.inverse()).collect();
    let tail = if shift >= 0 { GenLetter::A2 } else { GenLetter::A2Inv };
    for _ in 0..shift.abs() {
        word.push(tail);
    }
    let out = Decomposition { word: GeneratorWord(word), sign };
    debug_assert_eq!(out.word.evaluate(), if sign == 1 { *m } else { m.neg() });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generator_constants_are_consistent() {
        assert_eq!(Gl2z::SWAP.mul(&Gl2z::SWAP), Gl2z::IDENTITY);
        assert_eq!(Gl2z::SWAP.mul(&Gl2z::LOWER).mul(&Gl2z::SWAP), Gl2z::UPPER);
        assert_eq!(Gl2z::UPPER.inv().mul(&Gl2z::LOWER), Gl2z::ORDER_SIX);
        assert_eq!(Gl2z::ORDER_SIX.pow(3), Gl2z::IDENTITY.neg());
        assert_eq!(Gl2z::ORDER_SIX.pow(6), Gl2z::IDENTITY);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(Gl2z::UPPER.inv().mul(&Gl2z::LOWER), Gl2z::new(0, -1, 1, 1).unwrap());
        let a = Gl2z::new(3, 2, 1, 1).unwrap();
        assert_eq!(Gl2z::IDENTITY.mul(&a), a);
        assert_eq!(Gl2z::LOWER.mul(&Gl2z::UPPER.inv()), Gl2z::new(1, -1, 1, 0).unwrap());
    }

    #[test]
    fn inv_examples() {
        assert_eq!(Gl2z::UPPER.inv(), Gl2z::new(1, -1, 0, 1).unwrap());
        assert_eq!(Gl2z::IDENTITY.inv(), Gl2z::IDENTITY);
        assert_eq!(Gl2z::ORDER_SIX.inv(), Gl2z::new(1, 1, -1, 0).unwrap());
        // det −1 case: SWAP is its own inverse
        assert_eq!(Gl2z::SWAP.inv(), Gl2z::SWAP);
    }

    #[test]
    fn conj_xy_examples() {
        assert_eq!(Gl2z::LOWER.conj_xy(), Gl2z::UPPER);
        assert_eq!(Gl2z::IDENTITY.conj_xy(), Gl2z::IDENTITY);
        assert_eq!(Gl2z::UPPER.conj_xy(), Gl2z::LOWER);
    }

    #[test]
    fn constructor_rejects_bad_determinant() {
        assert_eq!(Gl2z::new(1, 0, 0, 2), Err(Sl2zError::BadDeterminant(2)));
        assert_eq!(Gl2z::new(0, 0, 0, 0), Err(Sl2zError::BadDeterminant(0)));
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&Gl2z::ORDER_SIX).unwrap();
        assert_eq!(d.sign, 1);
        assert_eq!(d.word.0, vec![GenLetter::A2Inv, GenLetter::A1]);

        let id = decompose(&Gl2z::IDENTITY).unwrap();
        assert_eq!(id.sign, 1);
        assert!(id.word.is_empty());

        let minus = decompose(&Gl2z::IDENTITY.neg()).unwrap();
        assert_eq!(minus.sign, -1);
        assert_eq!(minus.word.evaluate(), Gl2z::IDENTITY);

        assert_eq!(decompose(&Gl2z::SWAP), Err(Sl2zError::DetMinusOne));
    }

    fn random_word_matrix(rng: &mut ChaCha8Rng, max_entry: i64) -> Gl2z {
        let letters = [GenLetter::A1, GenLetter::A1Inv, GenLetter::A2, GenLetter::A2Inv];
        let mut m = Gl2z::IDENTITY;
        for _ in 0..rng.gen_range(0..60) {
            let next = m.mul(&letters[rng.gen_range(0..4)].matrix());
            if [next.a, next.b, next.c, next.d].iter().any(|e| e.abs() > max_entry) {
                break;
            }
            m = next;
        }
        m
    }

    #[test]
    fn decompose_round_trips_random_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51_2a);
        for _ in 0..1000 {
            let m = random_word_matrix(&mut rng, 1_000_000);
            let d = decompose(&m).unwrap();
            let back = d.word.evaluate();
            assert_eq!(back, if d.sign == 1 { m } else { m.neg() }, "word len {}", d.word.len());
        }
    }

    #[test]
    fn det_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = random_word_matrix(&mut rng, 10_000);
            let n = random_word_matrix(&mut rng, 10_000);
            let swap = rng.gen_bool(0.5);
            let m = if swap { m.mul(&Gl2z::SWAP) } else { m };
            assert_eq!(m.mul(&n).det(), m.det() * n.det());
        }
    }
}
