use std::collections::HashMap;

use super::SimilarityError;

/// Boundary marker used to pad words shorter than the shingle size.
pub const SENTINEL: char = '\u{E000}';

/// Character n-gram counts. Words shorter than `n` are padded with `n - 1`
/// sentinels on each side first.
pub fn shingles(word: &[char], n: usize) -> HashMap<Vec<char>, u32> {
    let padded: Vec<char>;
    let chars = if word.len() < n {
        let pad = n - 1;
        padded = std::iter::repeat(SENTINEL)
            .take(pad)
            .chain(word.iter().copied())
            .chain(std::iter::repeat(SENTINEL).take(pad))
            .collect();
        &padded[..]
    } else {
        word
    };
    let mut counts = HashMap::new();
    for gram in chars.windows(n) {
        *counts.entry(gram.to_vec()).or_insert(0) += 1;
    }
    counts
}

/// Cosine between character n-gram count vectors.
pub fn shingle_cosine(a: &str, b: &str, n: usize) -> Result<f64, SimilarityError> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    shingle_cosine_chars(&a, &b, n)
}

pub fn shingle_cosine_chars(a: &[char], b: &[char], n: usize) -> Result<f64, SimilarityError> {
    if n == 0 {
        return Err(SimilarityError::ShingleSize);
    }
    if a == b {
        return Ok(1.0);
    }
    let sa = shingles(a, n);
    let sb = shingles(b, n);
    // Integer accumulation keeps x·x == |x|² exact.
    let dot: u64 = sa.iter().filter_map(|(g, &ca)| sb.get(g).map(|&cb| u64::from(ca) * u64::from(cb))).sum();
    let norm = |s: &HashMap<Vec<char>, u32>| s.values().map(|&c| u64::from(c) * u64::from(c)).sum::<u64>();
    let (na, nb) = (norm(&sa), norm(&sb));
    if na == 0 || nb == 0 {
        return Ok(0.0);
    }
    let cos = dot as f64 / ((na as f64) * (nb as f64)).sqrt();
    Ok(cos.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_is_one() {
        assert_eq!(shingle_cosine("abcd", "abcd", 2).unwrap(), 1.0);
        assert_eq!(shingle_cosine("a", "a", 3).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_is_zero() {
        assert_eq!(shingle_cosine("abcd", "wxyz", 2).unwrap(), 0.0);
    }

    #[test]
    fn bigram_example() {
        let got = shingle_cosine("abcd", "abce", 2).unwrap();
        assert!((got - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn counts_not_sets() {
        // {aa: 2} vs {aa: 1, ab: 1}: dot 2, norms 2 and sqrt 2.
        let got = shingle_cosine("aaa", "aab", 2).unwrap();
        assert!((got - 2.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn short_words_are_padded() {
        let grams = shingles(&['क'], 2);
        assert_eq!(grams.len(), 2);
        assert!(grams.contains_key(&vec![SENTINEL, 'क']));
        assert_eq!(shingle_cosine("क", "ख", 2).unwrap(), 0.0);
        // Padding the short side only: "ab" has no sentinel grams.
        assert_eq!(shingle_cosine("a", "ab", 2).unwrap(), 0.0);
    }

    #[test]
    fn zero_size_rejected() {
        assert!(matches!(shingle_cosine("a", "b", 0), Err(SimilarityError::ShingleSize)));
    }

    #[test]
    fn empty_with_unigrams() {
        assert_eq!(shingle_cosine("", "a", 1).unwrap(), 0.0);
        assert_eq!(shingle_cosine("", "", 1).unwrap(), 1.0);
    }
}
