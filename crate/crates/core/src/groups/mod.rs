//! Free groups, free products and small-cancellation quotients.

mod cayley;
mod presentation;
mod word;

pub use cayley::{cayley_ball, free_words, CayleyBall, DEFAULT_BALL_CAP};
pub use presentation::{DehnStep, DehnTrace, Dehn, GroupKind, PieceRatio, Presentation};
pub use word::{char_letter, letter_char, letter_rank, Letter, Word};
