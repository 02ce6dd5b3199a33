//! Rank of bit-packed matrices over GF(2).

/// Rank of a row-major bit matrix, destroying `rows` in the process.
///
/// `rows.len()` must be a multiple of `row_words`.
pub fn rank_in_place(rows: &mut [u64], row_words: usize) -> usize {
    if row_words == 0 {
        return 0;
    }
    debug_assert_eq!(rows.len() % row_words, 0);
    let nrows = rows.len() / row_words;
    let mut rank = 0;
    for i in 0..nrows {
        let base = i * row_words;
        let Some(pw) = (0..row_words).find(|&w| rows[base + w] != 0) else {
            continue;
        };
        rank += 1;
        let bit = rows[base + pw] & rows[base + pw].wrapping_neg();
        let (head, tail) = rows.split_at_mut(base + row_words);
        let pivot = &head[base..];
        for other in tail.chunks_exact_mut(row_words) {
            if other[pw] & bit != 0 {
                for (o, p) in other[pw..].iter_mut().zip(&pivot[pw..]) {
                    *o ^= p;
                }
            }
        }
    }
    rank
}

/// Rank of a matrix given as rows of booleans. Convenience for tests and
/// small inputs.
pub fn rank_of_bool_rows(rows: &[Vec<bool>]) -> usize {
    let Some(cols) = rows.first().map(Vec::len) else {
        return 0;
    };
    let w = cols.div_ceil(64).max(1);
    let mut packed = vec![0u64; rows.len() * w];
    for (r, row) in rows.iter().enumerate() {
        for (c, &b) in row.iter().enumerate() {
            if b {
                packed[r * w + c / 64] |= 1 << (c % 64);
            }
        }
    }
    rank_in_place(&mut packed, w)
}
