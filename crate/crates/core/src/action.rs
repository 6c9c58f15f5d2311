use std::fmt;

/// Set of legal action indices (up to 16 actions), stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ActionMask(u16);

impl ActionMask {
    pub const EMPTY: ActionMask = ActionMask(0);

    pub fn from_bits(bits: u16) -> Self {
        ActionMask(bits)
    }

    /// All of `0..n` legal.
    pub fn all(n: usize) -> Self {
        assert!(n <= 16);
        ActionMask(((1u32 << n) - 1) as u16)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut m = ActionMask::EMPTY;
        for i in it {
            m.insert(i);
        }
        m
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < 16);
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn contains(self, i: usize) -> bool {
        i < 16 && self.0 & (1 << i) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Legal indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..16).filter(move |&i| self.0 & (1 << i) != 0)
    }

    /// The `k`-th legal index in increasing order.
    pub fn nth(self, k: usize) -> Option<usize> {
        self.iter().nth(k)
    }
}

impl fmt::Debug for ActionMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for ActionMask {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ActionMask::from_indices(iter)
    }
}
