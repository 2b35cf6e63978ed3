/// Fixed-capacity bitset over `0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)] }
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersects(&self, other: &Bitset) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// `self ∩ other`, keeping only indices `> after`.
    pub fn and_above(&self, other: &Bitset, after: usize) -> Bitset {
        let mut words: Vec<u64> = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        let w = after / 64;
        for x in &mut words[..w] {
            *x = 0;
        }
        if w < words.len() {
            let keep = (after % 64) + 1;
            words[w] &= if keep == 64 { 0 } else { !0u64 << keep };
        }
        Bitset { words }
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = Vec::with_capacity(w.count_ones() as usize);
            let mut w = w;
            while w != 0 {
                bits.push(wi * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
            bits
        })
    }
}
