//! Persistence: the proof book, WTHOR game databases and run statistics.

mod book;
mod stats;
pub mod wthor;

use std::io;

use thiserror::Error;

pub use book::{load_book, save_book, Book, BookEntry, Source};
pub use stats::{export_stats, rows_from_text, rows_to_text, StatRow, StatsExport};
pub use wthor::{import_wthor, parse_wthor, WthorFile, WthorGame, WthorHeader, WthorImport, GAME_BYTES, HEADER_BYTES};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("conflicting proofs for {position}: {stored} vs {new}")]
    Conflict { position: String, stored: String, new: String },
    #[error("WTHOR file truncated: {0}")]
    Truncated(String),
    #[error("WTHOR header announces {header} games but the file holds {found}")]
    GameCount { header: usize, found: usize },
    #[error("WTHOR board size byte {0} is not 8×8")]
    BoardSize(u8),
}
