//! Bitboard Othello rules for square boards of size 4, 6 and 8.
//!
//! Every board size uses the same packing: bit `row * 8 + col`, row 0 being
//! the top row ("1") and col 0 the left column ("A"). A board smaller than
//! 8x8 occupies the top-left corner of the grid, which lets a single set of
//! shift masks serve every size.
//!
//! Positions are mover-relative. `mover` holds the stones of the side to
//! move and `opponent` the other side; playing a move swaps the two.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Final or estimated stone difference from the mover's point of view.
pub type Score = i32;

const NOT_A_FILE: u64 = 0xFEFE_FEFE_FEFE_FEFE;
const NOT_H_FILE: u64 = 0x7F7F_7F7F_7F7F_7F7F;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoardError {
    #[error("unsupported board size {0} (expected 4, 6 or 8)")]
    InvalidSize(usize),
    #[error("mover and opponent masks overlap")]
    OverlappingMasks,
    #[error("stones outside the {0}x{0} board")]
    OutOfBoard(u8),
    #[error("illegal move {mv} in position {position}")]
    IllegalMove { mv: String, position: String },
    #[error("pass is only legal when the mover has no move")]
    IllegalPass,
    #[error("position is not terminal")]
    NotTerminal,
    #[error("malformed token {token:?}: {reason}")]
    MalformedToken { token: String, reason: &'static str },
    #[error("malformed position text: {0}")]
    MalformedPosition(String),
}

/// A square on the board, stored as its bit index in the 8-stride layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square(u8);

impl Square {
    pub const fn new(row: u8, col: u8) -> Square {
        debug_assert!(row < 8 && col < 8);
        Square(row * 8 + col)
    }

    pub const fn from_bit_index(index: u8) -> Square {
        debug_assert!(index < 64);
        Square(index)
    }

    #[inline]
    pub const fn bit_index(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn bit(self) -> u64 {
        1u64 << self.0
    }

    pub const fn row(self) -> u8 {
        self.0 / 8
    }

    pub const fn col(self) -> u8 {
        self.0 % 8
    }

    /// Row-major index in `[0, size²)`.
    pub fn index(self, size: u8) -> usize {
        self.row() as usize * size as usize + self.col() as usize
    }

    pub fn from_index(index: usize, size: u8) -> Option<Square> {
        let n = size as usize;
        if index >= n * n {
            return None;
        }
        Some(Square::new((index / n) as u8, (index % n) as u8))
    }

    pub fn is_on_board(self, size: u8) -> bool {
        self.row() < size && self.col() < size
    }

    /// Parses a coordinate such as `F5` (column letter, row digit).
    pub fn parse(token: &str, size: u8) -> Result<Square, BoardError> {
        let malformed = |reason| BoardError::MalformedToken {
            token: token.to_string(),
            reason,
        };
        let bytes = token.as_bytes();
        if bytes.len() != 2 {
            return Err(malformed("expected a column letter and a row digit"));
        }
        let col = match bytes[0] {
            c @ b'A'..=b'Z' => c - b'A',
            c @ b'a'..=b'z' => c - b'a',
            _ => return Err(malformed("column must be a letter")),
        };
        let row = match bytes[1] {
            r @ b'1'..=b'9' => r - b'1',
            _ => return Err(malformed("row must be a digit 1-9")),
        };
        if col >= size || row >= size {
            return Err(malformed("coordinate lies outside the board"));
        }
        Ok(Square::new(row, col))
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'A' + self.col()) as char, self.row() + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Place(Square),
    Pass,
}

impl Move {
    pub fn square(self) -> Option<Square> {
        match self {
            Move::Place(sq) => Some(sq),
            Move::Pass => None,
        }
    }

    pub fn parse(token: &str, size: u8) -> Result<Move, BoardError> {
        if token.eq_ignore_ascii_case("pass") || token.eq_ignore_ascii_case("pa") {
            Ok(Move::Pass)
        } else {
            Square::parse(token, size).map(Move::Place)
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Place(sq) => sq.fmt(f),
            Move::Pass => f.write_str("PA"),
        }
    }
}

/// Side to move, used only for display; the rules engine never needs it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    /// Colour to move after `plies` moves (passes included) from the start.
    pub fn to_move_after(plies: usize) -> Color {
        if plies.is_multiple_of(2) {
            Color::Black
        } else {
            Color::White
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Black => "black",
            Color::White => "white",
        })
    }
}

/// Mask of the squares belonging to an `size`x`size` board.
pub const fn board_mask(size: u8) -> u64 {
    let row = (1u64 << size) - 1;
    let mut mask = 0u64;
    let mut r = 0;
    while r < size {
        mask |= row << (8 * r);
        r += 1;
    }
    mask
}

pub fn check_size(size: usize) -> Result<u8, BoardError> {
    match size {
        4 | 6 | 8 => Ok(size as u8),
        _ => Err(BoardError::InvalidSize(size)),
    }
}

#[inline(always)]
pub(crate) fn shift(x: u64, dir: usize) -> u64 {
    match dir {
        0 => (x << 1) & NOT_A_FILE,
        1 => (x >> 1) & NOT_H_FILE,
        2 => x << 8,
        3 => x >> 8,
        4 => (x << 9) & NOT_A_FILE,
        5 => (x << 7) & NOT_H_FILE,
        6 => (x >> 7) & NOT_A_FILE,
        _ => (x >> 9) & NOT_H_FILE,
    }
}

/// Squares adjacent (in any of the eight directions) to a square of `mask`.
#[inline]
pub fn neighbours(mask: u64) -> u64 {
    let mut out = 0;
    for dir in 0..8 {
        out |= shift(mask, dir);
    }
    out
}

/// Opponent stones that can sit inside a horizontal or diagonal run. Masking
/// out the A and H files stops shifted runs wrapping between rows.
const INNER_FILES: u64 = 0x7E7E_7E7E_7E7E_7E7E;

#[inline(always)]
fn moves_dir(mover: u64, opponent: u64, s: u32) -> u64 {
    let mut l = opponent & (mover << s);
    let mut r = opponent & (mover >> s);
    let pl = opponent & (opponent << s);
    let pr = opponent & (opponent >> s);
    l |= opponent & (l << s);
    r |= opponent & (r >> s);
    l |= pl & (l << (2 * s));
    r |= pr & (r >> (2 * s));
    l |= pl & (l << (2 * s));
    r |= pr & (r >> (2 * s));
    (l << s) | (r >> s)
}

/// Squares where the owner of `mover` may play.
#[inline]
pub fn moves_mask(mover: u64, opponent: u64, empty: u64) -> u64 {
    let inner = opponent & INNER_FILES;
    (moves_dir(mover, inner, 1) | moves_dir(mover, opponent, 8) | moves_dir(mover, inner, 7) | moves_dir(mover, inner, 9))
        & empty
}

#[inline(always)]
fn flips_dir(start: u64, mover: u64, opponent: u64, s: u32) -> u64 {
    let mut flipped = 0;
    let mut line = 0;
    let mut x = start << s;
    while x & opponent != 0 {
        line |= x;
        x <<= s;
    }
    if x & mover != 0 {
        flipped |= line;
    }
    line = 0;
    x = start >> s;
    while x & opponent != 0 {
        line |= x;
        x >>= s;
    }
    if x & mover != 0 {
        flipped |= line;
    }
    flipped
}

/// Opponent stones flipped by `mover` playing on `sq`; zero if the move is illegal.
#[inline]
pub fn flips_mask(mover: u64, opponent: u64, sq: Square) -> u64 {
    let start = sq.bit();
    let inner = opponent & INNER_FILES;
    flips_dir(start, mover, inner, 1)
        | flips_dir(start, mover, opponent, 8)
        | flips_dir(start, mover, inner, 7)
        | flips_dir(start, mover, inner, 9)
}

/// Iterates the squares of a bitmask in ascending index order.
pub fn squares(mut mask: u64) -> impl Iterator<Item = Square> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let index = mask.trailing_zeros() as u8;
            mask &= mask - 1;
            Some(Square(index))
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    mover: u64,
    opponent: u64,
    size: u8,
}

impl Position {
    /// Standard starting position: White on the top-left/bottom-right centre
    /// squares, Black on the other two, Black to move.
    pub fn initial(size: usize) -> Result<Position, BoardError> {
        let size = check_size(size)?;
        let c = size / 2;
        let white = Square::new(c - 1, c - 1).bit() | Square::new(c, c).bit();
        let black = Square::new(c - 1, c).bit() | Square::new(c, c - 1).bit();
        Ok(Position {
            mover: black,
            opponent: white,
            size,
        })
    }

    pub fn from_masks(mover: u64, opponent: u64, size: usize) -> Result<Position, BoardError> {
        let size = check_size(size)?;
        if mover & opponent != 0 {
            return Err(BoardError::OverlappingMasks);
        }
        if (mover | opponent) & !board_mask(size) != 0 {
            return Err(BoardError::OutOfBoard(size));
        }
        Ok(Position {
            mover,
            opponent,
            size,
        })
    }

    /// Caller guarantees the masks are disjoint and on the board.
    #[inline]
    pub(crate) const fn from_masks_unchecked(mover: u64, opponent: u64, size: u8) -> Position {
        Position {
            mover,
            opponent,
            size,
        }
    }

    #[inline]
    pub fn mover(&self) -> u64 {
        self.mover
    }

    #[inline]
    pub fn opponent(&self) -> u64 {
        self.opponent
    }

    #[inline]
    pub fn size(&self) -> u8 {
        self.size
    }

    /// Largest attainable absolute score, `size²`.
    #[inline]
    pub fn max_score(&self) -> Score {
        (self.size as Score) * (self.size as Score)
    }

    #[inline]
    pub fn board_mask(&self) -> u64 {
        board_mask(self.size)
    }

    #[inline]
    pub fn empty_mask(&self) -> u64 {
        !(self.mover | self.opponent) & board_mask(self.size)
    }

    #[inline]
    pub fn empties(&self) -> u32 {
        self.empty_mask().count_ones()
    }

    #[inline]
    pub fn stones(&self) -> u32 {
        (self.mover | self.opponent).count_ones()
    }

    #[inline]
    pub fn moves_mask(&self) -> u64 {
        moves_mask(self.mover, self.opponent, self.empty_mask())
    }

    #[inline]
    pub fn opponent_moves_mask(&self) -> u64 {
        moves_mask(self.opponent, self.mover, self.empty_mask())
    }

    /// Legal placements in ascending square order. Never contains `Pass`.
    pub fn legal_moves(&self) -> Vec<Move> {
        squares(self.moves_mask()).map(Move::Place).collect()
    }

    #[inline]
    pub fn has_moves(&self) -> bool {
        self.moves_mask() != 0
    }

    pub fn is_legal(&self, sq: Square) -> bool {
        self.moves_mask() & sq.bit() != 0
    }

    pub fn flips(&self, sq: Square) -> u64 {
        if self.empty_mask() & sq.bit() == 0 {
            return 0;
        }
        flips_mask(self.mover, self.opponent, sq)
    }

    /// Plays `sq` given its precomputed flip mask and returns the position
    /// from the new mover's perspective.
    #[inline]
    pub fn play_with_flips(&self, sq: Square, flipped: u64) -> Position {
        Position {
            mover: self.opponent ^ flipped,
            opponent: self.mover | flipped | sq.bit(),
            size: self.size,
        }
    }

    /// Plays a placement, skipping the legality check beyond a debug assertion.
    #[inline]
    pub fn play_unchecked(&self, sq: Square) -> Position {
        let flipped = flips_mask(self.mover, self.opponent, sq);
        debug_assert!(flipped != 0, "illegal move {sq}");
        self.play_with_flips(sq, flipped)
    }

    #[inline]
    pub fn pass(&self) -> Position {
        Position {
            mover: self.opponent,
            opponent: self.mover,
            size: self.size,
        }
    }

    pub fn apply_move(&self, mv: Move) -> Result<Position, BoardError> {
        match mv {
            Move::Pass => {
                if self.has_moves() {
                    Err(BoardError::IllegalPass)
                } else {
                    Ok(self.pass())
                }
            }
            Move::Place(sq) => {
                let flipped = self.flips(sq);
                if flipped == 0 || !sq.is_on_board(self.size) {
                    return Err(BoardError::IllegalMove {
                        mv: sq.to_string(),
                        position: self.to_string(),
                    });
                }
                Ok(self.play_with_flips(sq, flipped))
            }
        }
    }

    /// Neither side can move.
    pub fn is_terminal(&self) -> bool {
        let empty = self.empty_mask();
        moves_mask(self.mover, self.opponent, empty) == 0
            && moves_mask(self.opponent, self.mover, empty) == 0
    }

    /// Stone difference with the empty squares awarded to the side ahead; a
    /// level count scores zero.
    #[inline]
    pub fn score_now(&self) -> Score {
        let mine = self.mover.count_ones() as Score;
        let theirs = self.opponent.count_ones() as Score;
        let empties = self.max_score() - mine - theirs;
        let diff = mine - theirs;
        match diff.cmp(&0) {
            std::cmp::Ordering::Greater => diff + empties,
            std::cmp::Ordering::Less => diff - empties,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn final_score(&self) -> Result<Score, BoardError> {
        if self.is_terminal() {
            Ok(self.score_now())
        } else {
            Err(BoardError::NotTerminal)
        }
    }

    /// Some legal move leaves the opponent without stones.
    pub fn has_wipeout_move(&self) -> bool {
        squares(self.moves_mask()).any(|sq| flips_mask(self.mover, self.opponent, sq) == self.opponent)
    }

    /// One text line: `size²` cells row-major (`X` mover, `O` opponent,
    /// `-` empty), a space, and `X`.
    pub fn to_text(&self) -> String {
        let n = self.size;
        let mut out = String::with_capacity(n as usize * n as usize + 2);
        for row in 0..n {
            for col in 0..n {
                let bit = Square::new(row, col).bit();
                out.push(if self.mover & bit != 0 {
                    'X'
                } else if self.opponent & bit != 0 {
                    'O'
                } else {
                    '-'
                });
            }
        }
        out.push_str(" X");
        out
    }

    /// Multi-line board diagram with coordinates.
    pub fn diagram(&self, mover_color: Color) -> String {
        let (black, white) = match mover_color {
            Color::Black => (self.mover, self.opponent),
            Color::White => (self.opponent, self.mover),
        };
        let moves = self.moves_mask();
        let mut out = String::from("  ");
        for col in 0..self.size {
            out.push((b'A' + col) as char);
            out.push(' ');
        }
        out.push('\n');
        for row in 0..self.size {
            out.push_str(&format!("{} ", row + 1));
            for col in 0..self.size {
                let bit = Square::new(row, col).bit();
                out.push(if black & bit != 0 {
                    '*'
                } else if white & bit != 0 {
                    'O'
                } else if moves & bit != 0 {
                    '.'
                } else {
                    '-'
                });
                out.push(' ');
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Position {
    type Err = BoardError;

    /// Accepts the one-line text form. A trailing `O` instead of `X` means
    /// the `O` stones are to move.
    fn from_str(text: &str) -> Result<Position, BoardError> {
        let text = text.trim();
        let (cells, side) = match text.rsplit_once(char::is_whitespace) {
            Some((cells, side)) => (cells.trim_end(), side),
            None => (text, "X"),
        };
        let size = match cells.len() {
            16 => 4,
            36 => 6,
            64 => 8,
            len => {
                return Err(BoardError::MalformedPosition(format!(
                    "{len} cells is not a supported board"
                )))
            }
        };
        let (mut x, mut o) = (0u64, 0u64);
        for (i, c) in cells.chars().enumerate() {
            let bit = Square::from_index(i, size).expect("length checked").bit();
            match c {
                'X' | 'x' | '*' => x |= bit,
                'O' | 'o' => o |= bit,
                '-' | '.' => {}
                other => {
                    return Err(BoardError::MalformedPosition(format!(
                        "unexpected cell character {other:?}"
                    )))
                }
            }
        }
        match side {
            "X" | "x" => Position::from_masks(x, o, size as usize),
            "O" | "o" => Position::from_masks(o, x, size as usize),
            other => Err(BoardError::MalformedPosition(format!(
                "side to move must be X or O, got {other:?}"
            ))),
        }
    }
}

/// Parses a game record of concatenated coordinates such as
/// `F5D6C3D3 C4F4`. Whitespace is ignored; passes are implicit.
pub fn parse_record(text: &str, size: u8) -> Result<Vec<Square>, BoardError> {
    let compact: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if !compact.len().is_multiple_of(2) {
        let tail: String = compact[compact.len() - 1..].iter().collect();
        return Err(BoardError::MalformedToken {
            token: tail,
            reason: "dangling character at end of record",
        });
    }
    compact
        .chunks(2)
        .map(|pair| Square::parse(&pair.iter().collect::<String>(), size))
        .collect()
}

/// Formats a record as groups of four moves separated by single spaces.
pub fn format_record(moves: &[Square]) -> String {
    moves
        .chunks(4)
        .map(|group| group.iter().map(|sq| sq.to_string()).collect::<String>())
        .collect::<Vec<_>>()
        .join(" ")
}
