//! Rules-complete 3×3 Hex.
//!
//! Red connects West (column 0) to East (column 2); Blue connects North (row 0)
//! to South (row 2). Cells sit on a rhombus, so the neighbors of `(r, c)` are
//! `(r±1, c)`, `(r, c±1)`, `(r−1, c+1)` and `(r+1, c−1)`. Boards are immutable
//! values: [`Board::play`] returns a new board.

use std::fmt;
use std::str::FromStr;

use crate::action::ActionMask;
use crate::error::{Error, Result};

/// Board side length. Loops are written against it, but only 3 is supported.
pub const SIZE: usize = 3;
pub const CELLS: usize = SIZE * SIZE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Red,
    Blue,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Red => Player::Blue,
            Player::Blue => Player::Red,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Player::Red => 'R',
            Player::Blue => 'B',
        }
    }

    /// The pair of edges this player must connect.
    pub fn goal_edges(self) -> (Edge, Edge) {
        match self {
            Player::Red => (Edge::West, Edge::East),
            Player::Blue => (Edge::North, Edge::South),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Edge {
    West,
    East,
    North,
    South,
}

impl Edge {
    pub fn owner(self) -> Player {
        match self {
            Edge::West | Edge::East => Player::Red,
            Edge::North | Edge::South => Player::Blue,
        }
    }

    fn touches(self, cell: Cell) -> bool {
        let last = (SIZE - 1) as u8;
        match self {
            Edge::West => cell.col == 0,
            Edge::East => cell.col == last,
            Edge::North => cell.row == 0,
            Edge::South => cell.row == last,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    row: u8,
    col: u8,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Result<Cell> {
        if row >= SIZE || col >= SIZE {
            return Err(Error::usage(format!("cell ({row},{col}) is off the board")));
        }
        Ok(Cell {
            row: row as u8,
            col: col as u8,
        })
    }

    /// Cell with row-major index `i`; panics when `i >= 9`.
    pub fn from_index(i: usize) -> Cell {
        assert!(i < CELLS, "cell index {i} out of range");
        Cell {
            row: (i / SIZE) as u8,
            col: (i % SIZE) as u8,
        }
    }

    pub fn row(self) -> usize {
        self.row as usize
    }

    pub fn col(self) -> usize {
        self.col as usize
    }

    pub fn index(self) -> usize {
        self.row() * SIZE + self.col()
    }

    pub fn transpose(self) -> Cell {
        Cell {
            row: self.col,
            col: self.row,
        }
    }

    pub fn all() -> impl Iterator<Item = Cell> {
        (0..CELLS).map(Cell::from_index)
    }

    pub fn neighbors(self) -> impl Iterator<Item = Cell> {
        const OFFSETS: [(isize, isize); 6] = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, 1), (1, -1)];
        let (r, c) = (self.row as isize, self.col as isize);
        OFFSETS.into_iter().filter_map(move |(dr, dc)| {
            let (nr, nc) = (r + dr, c + dc);
            let n = SIZE as isize;
            (0..n).contains(&nr).then_some(())?;
            (0..n).contains(&nc).then_some(())?;
            Some(Cell {
                row: nr as u8,
                col: nc as u8,
            })
        })
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Ongoing,
    RedWins,
    BlueWins,
}

impl Outcome {
    pub fn winner(self) -> Option<Player> {
        match self {
            Outcome::Ongoing => None,
            Outcome::RedWins => Some(Player::Red),
            Outcome::BlueWins => Some(Player::Blue),
        }
    }

    pub fn won_by(p: Player) -> Outcome {
        match p {
            Player::Red => Outcome::RedWins,
            Player::Blue => Outcome::BlueWins,
        }
    }

    pub fn color_swap(self) -> Outcome {
        match self {
            Outcome::Ongoing => Outcome::Ongoing,
            Outcome::RedWins => Outcome::BlueWins,
            Outcome::BlueWins => Outcome::RedWins,
        }
    }
}

/// 3×3 boolean mask indexed `[row][col]`.
pub type CellMask = [[bool; SIZE]; SIZE];

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Board {
    grid: [Option<Player>; CELLS],
    to_move: Player,
}

impl Default for Board {
    fn default() -> Self {
        Board::new()
    }
}

impl Board {
    /// Empty board, Red to move.
    pub fn new() -> Board {
        Board::empty(Player::Red)
    }

    pub fn empty(to_move: Player) -> Board {
        Board {
            grid: [None; CELLS],
            to_move,
        }
    }

    /// Builds a board from explicit placements without checking reachability.
    pub fn from_stones(red: &[(usize, usize)], blue: &[(usize, usize)], to_move: Player) -> Result<Board> {
        let mut b = Board::empty(to_move);
        for (&(r, c), p) in red
            .iter()
            .map(|rc| (rc, Player::Red))
            .chain(blue.iter().map(|rc| (rc, Player::Blue)))
        {
            let cell = Cell::new(r, c)?;
            if b.grid[cell.index()].is_some() {
                return Err(Error::IllegalMove(cell));
            }
            b.grid[cell.index()] = Some(p);
        }
        Ok(b)
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn with_to_move(mut self, p: Player) -> Board {
        self.to_move = p;
        self
    }

    pub fn get(&self, cell: Cell) -> Option<Player> {
        self.grid[cell.index()]
    }

    pub fn stone_count(&self, p: Player) -> usize {
        self.grid.iter().filter(|&&s| s == Some(p)).count()
    }

    pub fn is_full(&self) -> bool {
        self.grid.iter().all(Option::is_some)
    }

    /// Empty cells in row-major order; empty when the game is over.
    pub fn legal_moves(&self) -> Vec<Cell> {
        if self.winner() != Outcome::Ongoing {
            return Vec::new();
        }
        Cell::all().filter(|&c| self.get(c).is_none()).collect()
    }

    pub fn legal_mask(&self) -> ActionMask {
        self.legal_moves().into_iter().map(Cell::index).collect()
    }

    pub fn play(&self, cell: Cell) -> Result<Board> {
        if self.get(cell).is_some() || self.winner() != Outcome::Ongoing {
            return Err(Error::IllegalMove(cell));
        }
        let mut next = *self;
        next.grid[cell.index()] = Some(self.to_move);
        next.to_move = self.to_move.opponent();
        Ok(next)
    }

    pub fn play_index(&self, i: usize) -> Result<Board> {
        if i >= CELLS {
            return Err(Error::usage(format!("action {i} is not a cell index")));
        }
        self.play(Cell::from_index(i))
    }

    /// Whether `p` has a chain joining both of its goal edges.
    pub fn has_chain(&self, p: Player) -> bool {
        let (a, b) = p.goal_edges();
        let mask = self.reach(p, a);
        Cell::all().any(|c| mask[c.row()][c.col()] && b.touches(c))
    }

    pub fn winner(&self) -> Outcome {
        if self.has_chain(Player::Red) {
            Outcome::RedWins
        } else if self.has_chain(Player::Blue) {
            Outcome::BlueWins
        } else {
            Outcome::Ongoing
        }
    }

    /// Cells holding `p`'s stones that are chain-connected to `edge`.
    pub fn connected_to_edge(&self, p: Player, edge: Edge) -> Result<CellMask> {
        if edge.owner() != p {
            return Err(Error::usage(format!("{edge:?} is not a goal edge of {p:?}")));
        }
        Ok(self.reach(p, edge))
    }

    fn reach(&self, p: Player, edge: Edge) -> CellMask {
        let mut mask = [[false; SIZE]; SIZE];
        let mut stack: Vec<Cell> = Cell::all().filter(|&c| edge.touches(c) && self.get(c) == Some(p)).collect();
        for c in &stack {
            mask[c.row()][c.col()] = true;
        }
        while let Some(c) = stack.pop() {
            for n in c.neighbors() {
                if self.get(n) == Some(p) && !mask[n.row()][n.col()] {
                    mask[n.row()][n.col()] = true;
                    stack.push(n);
                }
            }
        }
        mask
    }

    /// Transposes the grid, swaps colors and swaps the side to move.
    pub fn mirror_transpose(&self) -> Board {
        let mut grid = [None; CELLS];
        for c in Cell::all() {
            grid[c.transpose().index()] = self.get(c).map(Player::opponent);
        }
        Board {
            grid,
            to_move: self.to_move.opponent(),
        }
    }

    /// Base-3 index of the stone placement (Empty=0, Red=1, Blue=2), `0..3^9`.
    pub fn grid_key(&self) -> usize {
        self.grid.iter().rev().fold(0, |acc, s| {
            acc * 3
                + match s {
                    None => 0,
                    Some(Player::Red) => 1,
                    Some(Player::Blue) => 2,
                }
        })
    }

    pub fn from_grid_key(mut key: usize, to_move: Player) -> Board {
        let mut b = Board::empty(to_move);
        for slot in b.grid.iter_mut() {
            *slot = match key % 3 {
                0 => None,
                1 => Some(Player::Red),
                _ => Some(Player::Blue),
            };
            key /= 3;
        }
        b
    }

    /// Every position reachable from the empty board with `first` to move,
    /// terminal positions included, in breadth-first order.
    pub fn reachable(first: Player) -> Vec<Board> {
        let mut seen = std::collections::HashSet::new();
        let mut order = Vec::new();
        let mut frontier = vec![Board::empty(first)];
        seen.insert(Board::empty(first));
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for b in frontier {
                order.push(b);
                for c in b.legal_moves() {
                    let child = b.play(c).expect("legal move");
                    if seen.insert(child) {
                        next.push(child);
                    }
                }
            }
            frontier = next;
        }
        order
    }
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Board({})", self.to_string().replace('\n', "|"))
    }
}

/// Three skewed rows of `.`/`R`/`B` followed by `turn: R|B`.
impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..SIZE {
            write!(f, "{}", " ".repeat(r))?;
            for c in 0..SIZE {
                let ch = match self.grid[r * SIZE + c] {
                    None => '.',
                    Some(p) => p.symbol(),
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        write!(f, "turn: {}", self.to_move.symbol())
    }
}

impl FromStr for Board {
    type Err = Error;

    fn from_str(s: &str) -> Result<Board> {
        let lines: Vec<&str> = s.lines().filter(|l| !l.trim().is_empty()).collect();
        if lines.len() != SIZE + 1 {
            return Err(Error::format(format!("expected {} lines, found {}", SIZE + 1, lines.len())));
        }
        let mut b = Board::new();
        for (r, line) in lines[..SIZE].iter().enumerate() {
            let row = line.trim();
            if row.chars().count() != SIZE {
                return Err(Error::format(format!("row {r} must have {SIZE} cells: {line:?}")));
            }
            for (c, ch) in row.chars().enumerate() {
                b.grid[r * SIZE + c] = match ch {
                    '.' => None,
                    'R' => Some(Player::Red),
                    'B' => Some(Player::Blue),
                    other => return Err(Error::format(format!("unexpected cell symbol {other:?}"))),
                };
            }
        }
        let turn = lines[SIZE]
            .trim()
            .strip_prefix("turn:")
            .ok_or_else(|| Error::format("missing `turn:` line"))?
            .trim();
        b.to_move = match turn {
            "R" => Player::Red,
            "B" => Player::Blue,
            other => return Err(Error::format(format!("unknown side to move {other:?}"))),
        };
        Ok(b)
    }
}
