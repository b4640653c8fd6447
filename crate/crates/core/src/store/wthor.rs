//! WTHOR game databases.
//!
//! Layout: a 16-byte header (creation century, year, month, day; game
//! count as little-endian `u32` at bytes 4-7; record count as `u16` at
//! 8-9; the games' year as `u16` at 10-11; board size at 12, 0 or 8; game
//! type at 13; search depth at 14; byte 15 reserved), then one 68-byte
//! record per game: tournament, black player and white player ids as
//! little-endian `u16`, Black's actual disc count, Black's theoretical
//! score, and 60 move bytes `10 * row + column` (1-based), zero-padded
//! after the last move.

use std::fs;
use std::path::Path;

use crate::board::{Move, Position, Square};
use crate::frontier::FrequencyTable;
use crate::store::StoreError;

pub const HEADER_BYTES: usize = 16;
pub const GAME_BYTES: usize = 68;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WthorHeader {
    pub created: [u8; 4],
    pub game_count: u32,
    pub record_count: u16,
    pub year: u16,
    pub board_size: u8,
    pub game_type: u8,
    pub depth: u8,
    pub reserved: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WthorGame {
    pub tournament: u16,
    pub black: u16,
    pub white: u16,
    pub actual_score: u8,
    pub theoretical_score: u8,
    pub moves: [u8; 60],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WthorFile {
    pub header: WthorHeader,
    pub games: Vec<WthorGame>,
}

fn u16_at(b: &[u8], i: usize) -> u16 {
    u16::from_le_bytes([b[i], b[i + 1]])
}

/// Decodes a move byte; `None` for bytes outside `11..=88` or with a zero
/// or nine digit.
pub fn decode_move(byte: u8) -> Option<Square> {
    let (row, col) = (byte / 10, byte % 10);
    ((1..=8).contains(&row) && (1..=8).contains(&col)).then(|| Square::new(row - 1, col - 1))
}

pub fn encode_move(sq: Square) -> u8 {
    10 * (sq.row() + 1) + sq.col() + 1
}

pub fn parse_wthor(bytes: &[u8]) -> Result<WthorFile, StoreError> {
    if bytes.len() < HEADER_BYTES {
        return Err(StoreError::Truncated(format!("{} header bytes", bytes.len())));
    }
    let h = &bytes[..HEADER_BYTES];
    let header = WthorHeader {
        created: [h[0], h[1], h[2], h[3]],
        game_count: u32::from_le_bytes([h[4], h[5], h[6], h[7]]),
        record_count: u16_at(h, 8),
        year: u16_at(h, 10),
        board_size: h[12],
        game_type: h[13],
        depth: h[14],
        reserved: h[15],
    };
    if header.board_size != 0 && header.board_size != 8 {
        return Err(StoreError::BoardSize(header.board_size));
    }
    let body = &bytes[HEADER_BYTES..];
    if !body.len().is_multiple_of(GAME_BYTES) {
        return Err(StoreError::Truncated(format!(
            "{} trailing bytes after the last full game",
            body.len() % GAME_BYTES
        )));
    }
    let found = body.len() / GAME_BYTES;
    if found != header.game_count as usize {
        return Err(StoreError::GameCount {
            header: header.game_count as usize,
            found,
        });
    }
    let games = body
        .chunks_exact(GAME_BYTES)
        .map(|g| WthorGame {
            tournament: u16_at(g, 0),
            black: u16_at(g, 2),
            white: u16_at(g, 4),
            actual_score: g[6],
            theoretical_score: g[7],
            moves: g[8..].try_into().expect("60 move bytes"),
        })
        .collect();
    Ok(WthorFile { header, games })
}

impl WthorFile {
    /// A file holding `games` whose header counts match.
    pub fn new(year: u16, games: Vec<WthorGame>) -> Self {
        WthorFile {
            header: WthorHeader {
                game_count: games.len() as u32,
                year,
                board_size: 8,
                ..WthorHeader::default()
            },
            games,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::with_capacity(HEADER_BYTES + GAME_BYTES * self.games.len());
        out.extend_from_slice(&h.created);
        out.extend_from_slice(&h.game_count.to_le_bytes());
        out.extend_from_slice(&h.record_count.to_le_bytes());
        out.extend_from_slice(&h.year.to_le_bytes());
        out.extend_from_slice(&[h.board_size, h.game_type, h.depth, h.reserved]);
        for g in &self.games {
            out.extend_from_slice(&g.tournament.to_le_bytes());
            out.extend_from_slice(&g.black.to_le_bytes());
            out.extend_from_slice(&g.white.to_le_bytes());
            out.push(g.actual_score);
            out.push(g.theoretical_score);
            out.extend_from_slice(&g.moves);
        }
        out
    }
}

impl WthorGame {
    /// A game with the given moves and zero ids and scores.
    pub fn from_squares(moves: &[Square]) -> WthorGame {
        let mut bytes = [0u8; 60];
        for (b, sq) in bytes.iter_mut().zip(moves) {
            *b = encode_move(*sq);
        }
        WthorGame {
            tournament: 0,
            black: 0,
            white: 0,
            actual_score: 0,
            theoretical_score: 0,
            moves: bytes,
        }
    }

    /// The move list up to the first zero byte; `Err(i)` if byte `i` is
    /// not a square.
    pub fn squares(&self) -> Result<Vec<Square>, usize> {
        self.moves
            .iter()
            .take_while(|&&b| b != 0)
            .enumerate()
            .map(|(i, &b)| decode_move(b).ok_or(i))
            .collect()
    }

    /// Every position from the start on, passes included, each with the
    /// side to move as mover. `Err(i)` if move `i` is illegal or undecodable.
    pub fn replay(&self) -> Result<Vec<Position>, usize> {
        let squares = self.squares()?;
        let mut p = Position::initial(8).expect("8x8");
        let mut out = vec![p];
        for (i, sq) in squares.into_iter().enumerate() {
            if !p.has_moves() {
                if p.is_terminal() {
                    return Err(i);
                }
                p = p.apply_move(Move::Pass).map_err(|_| i)?;
                out.push(p);
            }
            p = p.apply_move(Move::Place(sq)).map_err(|_| i)?;
            out.push(p);
        }
        if !p.has_moves() && !p.is_terminal() {
            out.push(p.pass());
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WthorImport {
    pub file: WthorFile,
    /// Canonical positions with `e1` empties and the mover able to move,
    /// counted once per legal game that reaches them.
    pub frequencies: FrequencyTable,
    /// Indices of games that do not replay legally.
    pub illegal: Vec<usize>,
}

/// Replays every game of `file`, counting the `e1`-empties positions of
/// the legal ones.
pub fn frequencies(file: &WthorFile, e1: u32) -> (FrequencyTable, Vec<usize>) {
    let mut table = FrequencyTable::new();
    let mut illegal = Vec::new();
    for (i, g) in file.games.iter().enumerate() {
        match g.replay() {
            Ok(positions) => {
                if let Some(p) = positions.iter().find(|p| p.empties() == e1 && p.has_moves()) {
                    table.add(p, 1);
                }
            }
            Err(_) => illegal.push(i),
        }
    }
    (table, illegal)
}

pub fn import_wthor(path: &Path, e1: u32) -> Result<WthorImport, StoreError> {
    let file = parse_wthor(&fs::read(path)?)?;
    let (frequencies, illegal) = frequencies(&file, e1);
    Ok(WthorImport {
        file,
        frequencies,
        illegal,
    })
}
