use std::fmt;

/// A set of players stored as a bitmask; bit `i` is player `i` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Coalition(u32);

/// Hard ceiling imposed by the bitmask width, independent of configurable caps.
pub const MAX_REPRESENTABLE_PLAYERS: usize = 20;

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_bits(bits: u32) -> Self {
        Coalition(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn grand(n: usize) -> Self {
        debug_assert!(n <= MAX_REPRESENTABLE_PLAYERS);
        Coalition(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(player: usize) -> Self {
        Coalition(1 << player)
    }

    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> Self {
        Coalition(players.into_iter().fold(0, |acc, p| acc | (1 << p)))
    }

    pub fn contains(self, player: usize) -> bool {
        player < 32 && self.0 & (1 << player) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, n: usize) -> Self {
        Coalition(Coalition::grand(n).0 & !self.0)
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    /// True when every member is a valid player index for an `n`-player game.
    pub fn fits(self, n: usize) -> bool {
        self.is_subset_of(Coalition::grand(n))
    }

    /// Members in ascending order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |&p| bits & (1 << p) != 0)
    }

    /// All `2^n` coalitions in ascending bitmask order.
    pub fn all(n: usize) -> impl Iterator<Item = Coalition> {
        (0..(1u32 << n)).map(Coalition)
    }

    /// Coalitions with `∅ ≠ S ⊊ N`, ascending.
    pub fn proper(n: usize) -> impl Iterator<Item = Coalition> {
        (1..(1u32 << n).saturating_sub(1)).map(Coalition)
    }
}

impl fmt::Display for Coalition {
    /// Renders with 1-based player numbers, e.g. `{1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p + 1)?;
        }
        f.write_str("}")
    }
}
