/// Fixed-size bitset over `[0, len)`, enough for finite-sum bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_sorted(elements: &[u64], len: usize) -> Self {
        let mut s = BitSet::new(len);
        for &e in elements {
            if (e as usize) < len {
                s.insert(e as usize);
            }
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// `self ∪= (other << shift)`, truncated to the set length.
    pub fn or_shifted(&mut self, other: &BitSet, shift: usize) {
        let word_shift = shift / 64;
        let bit_shift = shift % 64;
        for i in (word_shift..self.words.len()).rev() {
            let src = i - word_shift;
            let mut v = other.words.get(src).copied().unwrap_or(0) << bit_shift;
            if bit_shift > 0 && src > 0 {
                v |= other.words.get(src - 1).copied().unwrap_or(0) >> (64 - bit_shift);
            }
            self.words[i] |= v;
        }
        self.clear_tail();
    }

    /// Whether `(self << shift) ∩ other` is non-empty.
    pub fn shifted_intersects(&self, shift: usize, other: &BitSet) -> bool {
        let word_shift = shift / 64;
        let bit_shift = shift % 64;
        for i in word_shift..other.words.len() {
            let src = i - word_shift;
            let mut v = self.words.get(src).copied().unwrap_or(0) << bit_shift;
            if bit_shift > 0 && src > 0 {
                v |= self.words.get(src - 1).copied().unwrap_or(0) >> (64 - bit_shift);
            }
            if v & other.words[i] != 0 {
                return true;
            }
        }
        false
    }

    fn clear_tail(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_or_crosses_word_boundaries() {
        let mut a = BitSet::new(200);
        a.insert(0);
        a.insert(63);
        let mut b = BitSet::new(200);
        b.or_shifted(&a, 70);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![70, 133]);
        b.or_shifted(&a, 150);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![70, 133, 150]);
    }

    #[test]
    fn shifted_intersection() {
        let a = BitSet::from_sorted(&[1, 2], 100);
        let target = BitSet::from_sorted(&[67], 100);
        assert!(a.shifted_intersects(65, &target));
        assert!(!a.shifted_intersects(64, &target));
    }
}
