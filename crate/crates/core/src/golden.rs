//! Reference word lists shipped with the crate.

use crate::error::Result;
use crate::word::{parse_word_list, Word};

/// Every binary word avoiding `Z_2`, one per line (the first line, empty, is ε).
pub const Z2_AVOIDERS: &str = include_str!("../golden/z2_avoiders.txt");

/// Every binary word of length 28 avoiding `Z_3`.
pub const Z3_MAXIMAL_AVOIDERS: &str = include_str!("../golden/z3_maximal_avoiders.txt");

pub fn z2_avoiders() -> Result<Vec<Word>> {
    parse_word_list(Z2_AVOIDERS, 2)
}

pub fn z3_maximal_avoiders() -> Result<Vec<Word>> {
    parse_word_list(Z3_MAXIMAL_AVOIDERS, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_sizes() {
        assert_eq!(z2_avoiders().unwrap().len(), 13);
        let z3 = z3_maximal_avoiders().unwrap();
        assert_eq!(z3.len(), 48);
        assert!(z3.iter().all(|w| w.len() == 28));
    }
}
