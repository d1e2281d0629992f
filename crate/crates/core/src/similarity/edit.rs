/// Levenshtein distance over codepoints with unit costs.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    edit_distance_chars(&a, &b)
}

pub fn edit_distance_chars(a: &[char], b: &[char]) -> usize {
    // Keep the shorter string along the row.
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(ca != cb);
            curr[j + 1] = substitute.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Weighted edit distance with unit insert/delete and a caller-supplied
/// substitution cost in `[0, 1]`.
pub fn weighted_edit_distance<T, F>(a: &[T], b: &[T], substitution: F) -> f64
where
    F: Fn(&T, &T) -> f64,
{
    let mut prev: Vec<f64> = (0..=b.len()).map(|j| j as f64).collect();
    let mut curr = vec![0.0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        curr[0] = (i + 1) as f64;
        for (j, y) in b.iter().enumerate() {
            let substitute = prev[j] + substitution(x, y);
            curr[j + 1] = substitute.min(prev[j + 1] + 1.0).min(curr[j] + 1.0);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert_eq!(edit_distance("", "abc"), 3);
        assert_eq!(edit_distance("abc", ""), 3);
        assert_eq!(edit_distance("", ""), 0);
        assert_eq!(edit_distance("kitten", "sitting"), 3);
        assert_eq!(edit_distance("flaw", "lawn"), 2);
        assert_eq!(edit_distance("शिक्षा", "शिक्षण"), 1);
    }

    #[test]
    fn weighted_matches_unit_costs() {
        let a: Vec<char> = "kitten".chars().collect();
        let b: Vec<char> = "sitting".chars().collect();
        let d = weighted_edit_distance(&a, &b, |x, y| if x == y { 0.0 } else { 1.0 });
        assert_eq!(d, 3.0);
    }
}
