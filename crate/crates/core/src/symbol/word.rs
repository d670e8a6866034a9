use std::cmp::Ordering;
use std::fmt;

/// An element of the free semigroup on `n` generators.
///
/// Letters are stored 0-based; the text and JSON forms are 1-based. Words
/// order length-first, then lexicographically by letter.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i])
    }

    /// Builds a word from 1-based letters; `None` if any letter is 0.
    pub fn from_one_based(letters: &[usize]) -> Option<Self> {
        letters
            .iter()
            .map(|&l| l.checked_sub(1))
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|l| l + 1).collect()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest letter plus one, i.e. the smallest alphabet containing the word.
    pub fn alphabet_bound(&self) -> usize {
        self.0.iter().max().map_or(0, |m| m + 1)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `g_i α`.
    pub fn prepend(&self, letter: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn map_letters(&self, f: impl Fn(usize) -> usize) -> Word {
        Word(self.0.iter().map(|&l| f(l)).collect())
    }

    /// Per-letter counts `|α|_i`.
    pub fn counts(&self, n: usize) -> Vec<u32> {
        let mut c = vec![0u32; n];
        for &l in &self.0 {
            c[l] += 1;
        }
        c
    }

    pub fn split_at(&self, mid: usize) -> (Word, Word) {
        (Word(self.0[..mid].to_vec()), Word(self.0[mid..].to_vec()))
    }

    /// All words over `n` letters of length exactly `len`, in lex order.
    pub fn all_of_length(n: usize, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| (0..n).map(move |l| {
                    let mut v = w.0.clone();
                    v.push(l);
                    Word(v)
                }))
                .collect();
        }
        out
    }

    /// All words over `n` letters of length at most `max_len`, length-lex.
    pub fn all_up_to(n: usize, max_len: usize) -> Vec<Word> {
        (0..=max_len).flat_map(|l| Word::all_of_length(n, l)).collect()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "X{}", l + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_one_based())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_lex_order() {
        let mut ws = [
            Word::new(vec![1, 0]),
            Word::new(vec![1]),
            Word::new(vec![0, 1]),
            Word::empty(),
            Word::new(vec![0]),
        ];
        ws.sort();
        let shown: Vec<_> = ws.iter().map(|w| w.to_one_based()).collect();
        assert_eq!(
            shown,
            vec![vec![], vec![1], vec![2], vec![1, 2], vec![2, 1]]
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(Word::all_up_to(2, 3).len(), 15);
        assert_eq!(Word::all_up_to(1, 4).len(), 5);
        let ws = Word::all_up_to(3, 2);
        assert!(ws.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn one_based_round_trip() {
        let w = Word::from_one_based(&[2, 1, 3]).unwrap();
        assert_eq!(w.letters(), &[1, 0, 2]);
        assert_eq!(w.to_one_based(), vec![2, 1, 3]);
        assert!(Word::from_one_based(&[0]).is_none());
        assert_eq!(w.to_string(), "X2*X1*X3");
        assert_eq!(w.counts(3), vec![1, 1, 1]);
    }
}
