use std::cmp::Ordering;
use std::fmt;

/// A monomial in the free algebra: a sequence of letters `1..=n`.
///
/// The empty word is the unit monomial. The alphabet size is not stored;
/// it is carried by the enclosing polynomial or basis.
///
/// Words are ordered graded-lexicographically: shorter words first, then
/// letter by letter with `1 < 2 < ... < n`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: u8) -> Self {
        debug_assert!(i >= 1);
        Word(vec![i])
    }

    /// Builds a word from its letters. Letters are 1-based.
    pub fn new(letters: impl Into<Vec<u8>>) -> Self {
        let letters = letters.into();
        debug_assert!(letters.iter().all(|&l| l >= 1));
        Word(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_letter(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn transpose(&self) -> Word {
        let mut letters = self.0.clone();
        letters.reverse();
        Word(letters)
    }

    pub fn is_palindrome(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// `self · X_letter · other`, the shape of every Gram-matrix entry.
    pub fn sandwich(&self, letter: u8, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len() + 1);
        letters.extend_from_slice(&self.0);
        letters.push(letter);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Relabels letters through a 1-based image table (`images[i - 1]` is the image of `i`).
    pub fn relabel(&self, images: &[u8]) -> Word {
        Word(self.0.iter().map(|&l| images[l as usize - 1]).collect())
    }

    /// Relabels letters in order of first occurrence, giving the
    /// lexicographically least word in the orbit of `self` under letter
    /// permutations.
    pub fn pattern(&self) -> Word {
        let mut map = [0u8; 256];
        let mut next = 0u8;
        let letters = self
            .0
            .iter()
            .map(|&l| {
                let slot = &mut map[l as usize];
                if *slot == 0 {
                    next += 1;
                    *slot = next;
                }
                *slot
            })
            .collect();
        Word(letters)
    }

    pub fn has_distinct_letters(&self) -> bool {
        let mut seen = [false; 256];
        self.0.iter().all(|&l| !std::mem::replace(&mut seen[l as usize], true))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
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
            write!(f, "X{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// All words of length exactly `len` over `n` letters, in canonical order.
pub fn words_of_length(n: usize, len: usize) -> Vec<Word> {
    let mut out = Vec::with_capacity(n.pow(len as u32));
    let mut current = vec![1u8; len];
    if len == 0 {
        return vec![Word::unit()];
    }
    loop {
        out.push(Word(current.clone()));
        // odometer increment from the last position
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if (current[pos] as usize) < n {
                current[pos] += 1;
                for slot in current.iter_mut().skip(pos + 1) {
                    *slot = 1;
                }
                break;
            }
        }
    }
}

/// All words of degree at most `max_len` over `n` letters, in canonical order.
pub fn words_up_to(n: usize, max_len: usize) -> Vec<Word> {
    (0..=max_len).flat_map(|len| words_of_length(n, len)).collect()
}
