use std::fmt;

use crate::board::Score;

/// Proven interval containing a position's game-theoretic value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SolveBounds {
    pub lower: Score,
    pub upper: Score,
}

impl SolveBounds {
    pub fn new(lower: Score, upper: Score) -> Option<SolveBounds> {
        (lower <= upper).then_some(SolveBounds { lower, upper })
    }

    pub fn exact(value: Score) -> SolveBounds {
        SolveBounds {
            lower: value,
            upper: value,
        }
    }

    pub fn unknown(max_score: Score) -> SolveBounds {
        SolveBounds {
            lower: -max_score,
            upper: max_score,
        }
    }

    /// Interprets a fail-soft search result obtained with window
    /// `(alpha, beta)`.
    pub fn from_fail_soft(value: Score, alpha: Score, beta: Score, max_score: Score) -> SolveBounds {
        if value <= alpha {
            SolveBounds {
                lower: -max_score,
                upper: value.max(-max_score),
            }
        } else if value >= beta {
            SolveBounds {
                lower: value.min(max_score),
                upper: max_score,
            }
        } else {
            SolveBounds::exact(value)
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, value: Score) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn is_within(&self, max_score: Score) -> bool {
        -max_score <= self.lower && self.lower <= self.upper && self.upper <= max_score
    }

    /// Tightest interval implied by both; `None` when they are disjoint.
    pub fn intersect(&self, other: &SolveBounds) -> Option<SolveBounds> {
        SolveBounds::new(self.lower.max(other.lower), self.upper.min(other.upper))
    }

    /// Bounds seen from the other side of the board.
    pub fn negate(&self) -> SolveBounds {
        SolveBounds {
            lower: -self.upper,
            upper: -self.lower,
        }
    }
}

impl fmt::Display for SolveBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lower)
        } else {
            write!(f, "[{}, {}]", self.lower, self.upper)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fail_soft_classification() {
        assert_eq!(SolveBounds::from_fail_soft(-5, -3, 3, 64), SolveBounds { lower: -64, upper: -5 });
        assert_eq!(SolveBounds::from_fail_soft(-3, -3, 3, 64), SolveBounds { lower: -64, upper: -3 });
        assert_eq!(SolveBounds::from_fail_soft(2, -3, 3, 64), SolveBounds::exact(2));
        assert_eq!(SolveBounds::from_fail_soft(12, -3, 3, 64), SolveBounds { lower: 12, upper: 64 });
    }

    #[test]
    fn intersection() {
        let a = SolveBounds::new(-4, 10).unwrap();
        let b = SolveBounds::new(2, 30).unwrap();
        assert_eq!(a.intersect(&b), SolveBounds::new(2, 10));
        assert_eq!(a.intersect(&SolveBounds::exact(12)), None);
        assert!(SolveBounds::new(3, 2).is_none());
    }
}
