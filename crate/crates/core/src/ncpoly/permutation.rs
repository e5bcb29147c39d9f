use crate::error::{Error, Result};

/// A permutation of the letters `1..=n`, stored as its image table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    /// `images[i - 1]` is the image of letter `i`.
    pub fn new(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        if n == 0 || n > u8::MAX as usize {
            return Err(Error::param(format!("permutation size {n} outside 1..=255")));
        }
        let mut seen = vec![false; n];
        for &img in &images {
            let k = img as usize;
            if k == 0 || k > n || std::mem::replace(&mut seen[k - 1], true) {
                return Err(Error::param(format!("{images:?} is not a bijection on 1..={n}")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n as u8).collect(),
        }
    }

    /// The transposition swapping letters `i` and `j`.
    pub fn transposition(n: usize, i: u8, j: u8) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(i as usize - 1, j as usize - 1);
        p
    }

    /// The cycle `1 -> 2 -> ... -> n -> 1`.
    pub fn cycle(n: usize) -> Self {
        Permutation {
            images: (1..=n as u8).map(|i| i % n as u8 + 1).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn apply(&self, letter: u8) -> u8 {
        self.images[letter as usize - 1]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.size(), other.size(), "permutations act on different alphabets");
        Permutation {
            images: other.images.iter().map(|&i| self.apply(i)).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u8; self.size()];
        for (k, &img) in self.images.iter().enumerate() {
            images[img as usize - 1] = k as u8 + 1;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &i)| i as usize == k + 1)
    }

    /// Every permutation of `1..=n` in lexicographic order of image tables.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut current: Vec<u8> = (1..=n as u8).collect();
        let mut out = vec![Permutation {
            images: current.clone(),
        }];
        while next_lex(&mut current) {
            out.push(Permutation {
                images: current.clone(),
            });
        }
        out
    }
}

fn next_lex(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::new(vec![1, 1, 3]).is_err());
        assert!(Permutation::new(vec![1, 4, 3]).is_err());
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::new(vec![2, 3, 1]).is_ok());
    }

    #[test]
    fn enumerates_symmetric_group() {
        assert_eq!(Permutation::all(1).len(), 1);
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::all(5).len(), 120);
    }

    #[test]
    fn compose_and_inverse() {
        let s = Permutation::cycle(4);
        assert_eq!(s.apply(4), 1);
        assert!(s.compose(&s.inverse()).is_identity());
        let t = Permutation::transposition(4, 1, 2);
        // (t ∘ s)(1) = t(s(1)) = t(2) = 1
        assert_eq!(t.compose(&s).apply(1), 1);
    }
}
