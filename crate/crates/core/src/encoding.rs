//! Board → 6×7×7 boolean input tensor.
//!
//! Channels: 0 red stones, 1 blue stones, 2 red chains touching East, 3 red
//! chains touching West, 4 blue chains touching North, 5 blue chains touching
//! South. The 3×3 board occupies rows/cols 2..=4; the two-cell border models
//! the edges:
//!
//! * channel 0 is true on the column bands (cols 0,1,5,6, every row),
//! * channel 1 is true on the row bands (rows 0,1,5,6, every column),
//! * each chain channel is true only on the band of the edge it is attached to
//!   (2: cols 5,6; 3: cols 0,1; 4: rows 0,1; 5: rows 5,6).
//!
//! Corner blocks belong to both stone channels.

use crate::error::{Error, Result};
use crate::hex::{Board, Edge, Player, SIZE};

pub const CHANNELS: usize = 6;
pub const PAD: usize = 2;
pub const WIDTH: usize = SIZE + 2 * PAD;
pub const PLANE: usize = WIDTH * WIDTH;
pub const LEN: usize = CHANNELS * PLANE;
/// Bytes of the packed golden-fixture layout.
pub const PACKED_LEN: usize = LEN.div_ceil(8);

/// Channel permutation that accompanies a transpose + color swap of the board.
pub const MIRROR_CHANNELS: [usize; CHANNELS] = [1, 0, 5, 4, 3, 2];

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncodedState {
    data: [bool; LEN],
}

impl std::fmt::Debug for EncodedState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for ch in 0..CHANNELS {
            writeln!(f, "channel {ch}:")?;
            for r in 0..WIDTH {
                let row: String = (0..WIDTH).map(|c| if self.get(ch, r, c) { '#' } else { '.' }).collect();
                writeln!(f, "  {row}")?;
            }
        }
        Ok(())
    }
}

fn idx(ch: usize, r: usize, c: usize) -> usize {
    ch * PLANE + r * WIDTH + c
}

fn is_band(i: usize) -> bool {
    !(PAD..PAD + SIZE).contains(&i)
}

impl EncodedState {
    pub fn get(&self, ch: usize, r: usize, c: usize) -> bool {
        self.data[idx(ch, r, c)]
    }

    fn set(&mut self, ch: usize, r: usize, c: usize, v: bool) {
        self.data[idx(ch, r, c)] = v;
    }

    /// Flat view in channel-major, row-major order.
    pub fn as_slice(&self) -> &[bool; LEN] {
        &self.data
    }

    /// Transposes every plane and permutes channels by [`MIRROR_CHANNELS`].
    pub fn mirrored(&self) -> EncodedState {
        let mut out = EncodedState { data: [false; LEN] };
        for ch in 0..CHANNELS {
            for r in 0..WIDTH {
                for c in 0..WIDTH {
                    out.set(MIRROR_CHANNELS[ch], c, r, self.get(ch, r, c));
                }
            }
        }
        out
    }

    /// 294 bits packed LSB-first within each byte, in flat-view order.
    pub fn to_bytes(&self) -> [u8; PACKED_LEN] {
        let mut out = [0u8; PACKED_LEN];
        for (k, &bit) in self.data.iter().enumerate() {
            if bit {
                out[k / 8] |= 1 << (k % 8);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<EncodedState> {
        if bytes.len() != PACKED_LEN {
            return Err(Error::format(format!("packed state must be {PACKED_LEN} bytes, got {}", bytes.len())));
        }
        if bytes[PACKED_LEN - 1] >> (LEN % 8) != 0 {
            return Err(Error::format("trailing padding bits must be zero"));
        }
        let mut data = [false; LEN];
        for (k, slot) in data.iter_mut().enumerate() {
            *slot = bytes[k / 8] >> (k % 8) & 1 == 1;
        }
        Ok(EncodedState { data })
    }
}

pub fn encode(b: &Board) -> EncodedState {
    let mut s = EncodedState { data: [false; LEN] };
    for r in 0..WIDTH {
        for c in 0..WIDTH {
            if is_band(c) {
                s.set(0, r, c, true);
            }
            if is_band(r) {
                s.set(1, r, c, true);
            }
            if c >= PAD + SIZE {
                s.set(2, r, c, true);
            }
            if c < PAD {
                s.set(3, r, c, true);
            }
            if r < PAD {
                s.set(4, r, c, true);
            }
            if r >= PAD + SIZE {
                s.set(5, r, c, true);
            }
        }
    }
    let chains = [
        (2, Player::Red, Edge::East),
        (3, Player::Red, Edge::West),
        (4, Player::Blue, Edge::North),
        (5, Player::Blue, Edge::South),
    ]
    .map(|(ch, p, e)| (ch, b.connected_to_edge(p, e).expect("edge owned by player")));
    for r in 0..SIZE {
        for c in 0..SIZE {
            let cell = crate::hex::Cell::from_index(r * SIZE + c);
            let (tr, tc) = (r + PAD, c + PAD);
            s.set(0, tr, tc, b.get(cell) == Some(Player::Red));
            s.set(1, tr, tc, b.get(cell) == Some(Player::Blue));
            for (ch, mask) in &chains {
                s.set(*ch, tr, tc, mask[r][c]);
            }
        }
    }
    s
}

/// Whether encoding commutes with mirroring: `encode(mirror(b))` equals the
/// transposed, channel-permuted `encode(b)`.
pub fn mirror_equivariance_check(b: &Board) -> bool {
    encode(&b.mirror_transpose()) == encode(b).mirrored()
}
