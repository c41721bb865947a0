//! Closed-braid calculus: components, writhes, linking numbers, parity
//! witnesses and framing arithmetic for braided links.
//!
//! Links enter the system only as braid words. A word on `n` strands is a
//! sequence of Artin letters σ_i^{±1} (1-based `i < n`); its closure joins
//! position `p` at the top to position `p` at the bottom. Components are
//! named by the minimum strand label in their cycle.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("strand count must be at least 1")]
    NoStrands,
    #[error("letter index {0} out of range for {1} strands")]
    LetterOutOfRange(usize, usize),
    #[error("component {0} is not a component of this link")]
    NoSuchComponent(usize),
    #[error("parity violation on component {0}: writhe {1}, strands {2}")]
    ParityViolation(usize, i64, usize),
}

/// One Artin letter: generator index (1-based, `< strands`) and crossing sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Letter {
    pub index: usize,
    pub sign: i8,
}

/// Braid word on `strands` strands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<BraidWord, BraidError> {
        if strands == 0 {
            return Err(BraidError::NoStrands);
        }
        for l in &letters {
            if l.index == 0 || l.index >= strands || (l.sign != 1 && l.sign != -1) {
                return Err(BraidError::LetterOutOfRange(l.index, strands));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Parse the signed-integer encoding: `+i` for σ_i, `-i` for σ_i⁻¹.
    pub fn from_signed(strands: usize, word: &[i64]) -> Result<BraidWord, BraidError> {
        let letters = word
            .iter()
            .map(|&w| Letter { index: w.unsigned_abs() as usize, sign: if w >= 0 { 1 } else { -1 } })
            .collect();
        BraidWord::new(strands, letters)
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.letters
            .iter()
            .map(|l| l.index as i64 * l.sign as i64)
            .collect()
    }

    /// Appends `k` trivial strands (no letters touch them); their closures
    /// are split unknots.
    pub fn with_trivial_strands(&self, k: usize) -> BraidWord {
        BraidWord { strands: self.strands + k, letters: self.letters.clone() }
    }
}

/// Permutation sending the starting position of a strand to its ending
/// position, tracked through the letters.
pub fn strand_permutation(word: &BraidWord) -> Vec<usize> {
    let n = word.strands;
    // strand_at[p] = label of the strand currently at position p
    let mut strand_at: Vec<usize> = (0..n).collect();
    for l in &word.letters {
        strand_at.swap(l.index - 1, l.index);
    }
    let mut perm = vec![0usize; n];
    for (pos, &label) in strand_at.iter().enumerate() {
        perm[label] = pos;
    }
    perm
}

/// Per-component data of a closed braid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    /// Minimum strand label in the closure cycle.
    pub id: usize,
    /// Strand labels in the cycle.
    pub strands: Vec<usize>,
    /// Signed self-crossing count ω(K).
    pub writhe: i64,
    pub positive_crossings: u64,
    pub negative_crossings: u64,
}

impl Component {
    /// Number of strands n(K).
    pub fn strand_count(&self) -> usize {
        self.strands.len()
    }
}

/// Closure of a braid word with derived invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedBraidLink {
    pub word: BraidWord,
    pub components: Vec<Component>,
    /// Linking numbers keyed by component id pairs (lo, hi).
    pub linking: BTreeMap<(usize, usize), i64>,
}

/// Closes a braid word: components are the cycles of the strand
/// permutation; writhes and linking tallies come from walking the letters
/// with position-to-strand tracking. A crossing of two strands in the same
/// component adds its sign to that component's writhe; across components it
/// adds to the pair tally, and the linking number is half the tally.
pub fn close(word: &BraidWord) -> ClosedBraidLink {
    let n = word.strands;
    let perm = strand_permutation(word);

    // cycles of the closure permutation
    let mut comp_of = vec![usize::MAX; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let mut cycle = Vec::new();
        let mut s = start;
        while comp_of[s] == usize::MAX {
            comp_of[s] = cycles.len();
            cycle.push(s);
            s = perm[s];
        }
        cycles.push(cycle);
    }

    let mut writhe = vec![0i64; cycles.len()];
    let mut pos_cross = vec![0u64; cycles.len()];
    let mut neg_cross = vec![0u64; cycles.len()];
    let mut tally: BTreeMap<(usize, usize), i64> = BTreeMap::new();

    let mut strand_at: Vec<usize> = (0..n).collect();
    for l in &word.letters {
        let (u, v) = (strand_at[l.index - 1], strand_at[l.index]);
        let (cu, cv) = (comp_of[u], comp_of[v]);
        if cu == cv {
            writhe[cu] += l.sign as i64;
            if l.sign > 0 {
                pos_cross[cu] += 1;
            } else {
                neg_cross[cu] += 1;
            }
        } else {
            let key = (cu.min(cv), cu.max(cv));
            *tally.entry(key).or_insert(0) += l.sign as i64;
        }
        strand_at.swap(l.index - 1, l.index);
    }

    let components: Vec<Component> = cycles
        .iter()
        .enumerate()
        .map(|(i, cycle)| Component {
            id: *cycle.iter().min().expect("nonempty cycle"),
            strands: cycle.clone(),
            writhe: writhe[i],
            positive_crossings: pos_cross[i],
            negative_crossings: neg_cross[i],
        })
        .collect();

    let linking = tally
        .into_iter()
        .map(|((i, j), t)| {
            debug_assert_eq!(t.rem_euclid(2), 0, "inter-component tally must be even");
            ((components[i].id.min(components[j].id), components[i].id.max(components[j].id)), t / 2)
        })
        .collect();

    let mut components = components;
    components.sort_by_key(|c| c.id);
    ClosedBraidLink { word: word.clone(), components, linking }
}

impl ClosedBraidLink {
    pub fn component(&self, id: usize) -> Result<&Component, BraidError> {
        self.components
            .iter()
            .find(|c| c.id == id)
            .ok_or(BraidError::NoSuchComponent(id))
    }
}

/// Framing of a braided component induced by a reference normal that winds
/// `m` times: `ω(K) + m·n(K)`. The ambient solid torus is declared 0-framed
/// and unknotted by the caller.
pub fn framing_from_braid(link: &ClosedBraidLink, component: usize, m: i64) -> Result<i64, BraidError> {
    let k = link.component(component)?;
    Ok(k.writhe + m * k.strand_count() as i64)
}

/// Parity witness for one component: a cycle on n strands has permutation
/// signature (−1)^{n+1}, and the same cycle is a product of
/// (ω₊ + ω₋) self-crossing transpositions, so ω + n is odd.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityWitness {
    pub component: usize,
    pub writhe: i64,
    pub strand_count: usize,
    pub cycle_signature: i64,
    pub crossing_signature: i64,
    pub odd: bool,
}

/// Checks ω(K)+n(K) odd for every component and returns the witnesses.
///
/// A violation is mathematically impossible for data produced by [`close`];
/// the error signals an implementation bug.
pub fn parity_check(link: &ClosedBraidLink) -> Result<Vec<ParityWitness>, BraidError> {
    let mut out = Vec::new();
    for c in &link.components {
        let n = c.strand_count();
        let cycle_signature = if n % 2 == 1 { 1 } else { -1 };
        let crossings = c.positive_crossings + c.negative_crossings;
        let crossing_signature = if crossings % 2 == 0 { 1 } else { -1 };
        let odd = (c.writhe + n as i64).rem_euclid(2) == 1;
        if !odd || cycle_signature != crossing_signature {
            return Err(BraidError::ParityViolation(c.id, c.writhe, n));
        }
        out.push(ParityWitness {
            component: c.id,
            writhe: c.writhe,
            strand_count: n,
            cycle_signature,
            crossing_signature,
            odd,
        });
    }
    Ok(out)
}

/// One crossing in the brute-force re-simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    /// Letter position in the word.
    pub at: usize,
    /// Strand labels involved, (left, right) before the swap.
    pub strands: (usize, usize),
    pub sign: i8,
}

/// Independent oracle: re-simulates strand positions letter by letter and
/// returns the full crossing list. Uses the strand→position map (the
/// inverse bookkeeping of [`close`]) so the two paths only share the input.
pub fn crossing_oracle(word: &BraidWord) -> Vec<Crossing> {
    let n = word.strands;
    // pos_of[s] = position currently occupied by strand s
    let mut pos_of: Vec<usize> = (0..n).collect();
    let mut crossings = Vec::with_capacity(word.letters.len());
    for (at, l) in word.letters.iter().enumerate() {
        let left = (0..n)
            .find(|&s| pos_of[s] == l.index - 1)
            .expect("some strand occupies every position");
        let right = (0..n)
            .find(|&s| pos_of[s] == l.index)
            .expect("some strand occupies every position");
        crossings.push(Crossing { at, strands: (left, right), sign: l.sign });
        pos_of[left] = l.index;
        pos_of[right] = l.index - 1;
    }
    crossings
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn braid(n: usize, word: &[i64]) -> BraidWord {
        BraidWord::from_signed(n, word).unwrap()
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(strand_permutation(&braid(2, &[1])), vec![1, 0]);
        // σ₁σ₂ on 3 strands: 0→2? walk: strand 0 ends where…
        let p = strand_permutation(&braid(3, &[1, 2]));
        // hand oracle: positions [0,1,2] -> after σ₁ strands at [1,0,2]
        // -> after σ₂ [1,2,0]; strand 0 ends at position 2, 1 at 0, 2 at 1.
        assert_eq!(p, vec![2, 0, 1]);
        assert_eq!(strand_permutation(&braid(1, &[])), vec![0]);
    }

    #[test]
    fn close_single_positive_crossing() {
        let link = close(&braid(2, &[1]));
        assert_eq!(link.components.len(), 1);
        let k = &link.components[0];
        assert_eq!(k.strand_count(), 2);
        assert_eq!(k.writhe, 1);
        assert_eq!((k.writhe + k.strand_count() as i64) % 2, 1);
    }

    #[test]
    fn close_hopf_link() {
        let link = close(&braid(2, &[1, 1]));
        assert_eq!(link.components.len(), 2);
        for k in &link.components {
            assert_eq!(k.strand_count(), 1);
            assert_eq!(k.writhe, 0);
        }
        assert_eq!(link.linking.get(&(0, 1)), Some(&1));
    }

    #[test]
    fn close_trivial_strand() {
        let link = close(&braid(1, &[]));
        assert_eq!(link.components.len(), 1);
        assert_eq!(link.components[0].writhe, 0);
        assert_eq!(link.components[0].strand_count(), 1);
    }

    #[test]
    fn framing_examples() {
        let unknot = close(&braid(1, &[]));
        assert_eq!(framing_from_braid(&unknot, 0, 1).unwrap(), 1);

        let trefoil = close(&braid(2, &[1, 1, 1]));
        assert_eq!(trefoil.components.len(), 1);
        assert_eq!(framing_from_braid(&trefoil, 0, 0).unwrap(), 3);
        assert_eq!(framing_from_braid(&trefoil, 0, -1).unwrap(), 1);
        assert!(framing_from_braid(&trefoil, 1, 0).is_err());
    }

    #[test]
    fn framing_m_step_law() {
        let link = close(&braid(3, &[1, 2, 1, -2]));
        for c in &link.components {
            for m in -20..20 {
                let lo = framing_from_braid(&link, c.id, m).unwrap();
                let hi = framing_from_braid(&link, c.id, m + 1).unwrap();
                assert_eq!(hi - lo, c.strand_count() as i64);
            }
        }
    }

    #[test]
    fn parity_examples() {
        let w = parity_check(&close(&braid(2, &[1]))).unwrap();
        assert!(w[0].odd);
        assert_eq!(w[0].cycle_signature, w[0].crossing_signature);
        let w = parity_check(&close(&braid(1, &[]))).unwrap();
        assert!(w[0].odd);
    }

    #[test]
    fn oracle_examples() {
        let c = crossing_oracle(&braid(2, &[1]));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].strands, (0, 1));
        assert_eq!(c[0].sign, 1);

        let c = crossing_oracle(&braid(2, &[-1, 1]));
        assert_eq!(c.len(), 2);
        assert_eq!(c.iter().map(|x| x.sign as i64).sum::<i64>(), 0);
    }

    fn random_braid(rng: &mut ChaCha8Rng) -> BraidWord {
        let n = rng.gen_range(1..=8);
        let len = if n == 1 { 0 } else { rng.gen_range(0..=40) };
        let letters = (0..len)
            .map(|_| Letter { index: rng.gen_range(1..n.max(2)), sign: if rng.gen_bool(0.5) { 1 } else { -1 } })
            .collect();
        BraidWord::new(n, letters).unwrap()
    }

    /// Re-derives every tally of close() from the independent crossing list.
    fn tallies_from_oracle(word: &BraidWord) -> (BTreeMap<usize, (i64, u64, u64)>, BTreeMap<(usize, usize), i64>) {
        let link = close(word);
        let comp_of: BTreeMap<usize, usize> = link
            .components
            .iter()
            .flat_map(|c| c.strands.iter().map(move |&s| (s, c.id)))
            .collect();
        let mut per: BTreeMap<usize, (i64, u64, u64)> = BTreeMap::new();
        let mut inter: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for cr in crossing_oracle(word) {
            let (a, b) = (comp_of[&cr.strands.0], comp_of[&cr.strands.1]);
            if a == b {
                let e = per.entry(a).or_insert((0, 0, 0));
                e.0 += cr.sign as i64;
                if cr.sign > 0 {
                    e.1 += 1;
                } else {
                    e.2 += 1;
                }
            } else {
                *inter.entry((a.min(b), a.max(b))).or_insert(0) += cr.sign as i64;
            }
        }
        (per, inter)
    }

    #[test]
    fn close_matches_oracle_on_random_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xb1a1d);
        for _ in 0..1000 {
            let word = random_braid(&mut rng);
            let link = close(&word);
            let (per, inter) = tallies_from_oracle(&word);
            for c in &link.components {
                let (w, p, m) = per.get(&c.id).copied().unwrap_or((0, 0, 0));
                assert_eq!(c.writhe, w);
                assert_eq!(c.positive_crossings, p);
                assert_eq!(c.negative_crossings, m);
            }
            for (&pair, &t) in &inter {
                assert_eq!(t % 2, 0, "inter-component tally must be even");
                assert_eq!(link.linking.get(&pair), Some(&(t / 2)));
            }
            assert!(parity_check(&link).is_ok());
            let total: usize = link.components.iter().map(|c| c.strand_count()).sum();
            assert_eq!(total, word.strands);
        }
    }
}
