//! Mixed-radix helpers for enumerating `base^len` tuples in lexicographic
//! order (first coordinate most significant).

/// Lexicographic successor of `t` in `[0, base)^len`. Returns false after
/// the last tuple (and leaves `t` all zeros).
#[inline]
pub fn advance(t: &mut [usize], base: usize) -> bool {
    for i in (0..t.len()).rev() {
        t[i] += 1;
        if t[i] < base {
            return true;
        }
        t[i] = 0;
    }
    false
}

/// Calls `f` on every tuple of `[0, base)^len`, in order.
pub fn for_each(base: usize, len: usize, mut f: impl FnMut(&[usize])) {
    if len > 0 && base == 0 {
        return;
    }
    let mut t = vec![0; len];
    loop {
        f(&t);
        if !advance(&mut t, base) {
            break;
        }
    }
}

/// Position of `t` in the lexicographic order of `[0, base)^len`.
#[inline]
pub fn encode(t: &[usize], base: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * base + x)
}

pub fn decode(mut index: usize, base: usize, len: usize, out: &mut [usize]) {
    debug_assert_eq!(out.len(), len);
    for i in (0..len).rev() {
        out[i] = index % base;
        index /= base;
    }
}

/// `base^len` in `usize`, or `None` on overflow.
pub fn count(base: usize, len: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..len {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// All `len`-tuples as vectors.
pub fn all(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each(base, len, |t| out.push(t.to_vec()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_agree_with_enumeration_order() {
        let mut seen = 0;
        let mut buf = vec![0; 3];
        for_each(3, 3, |t| {
            assert_eq!(encode(t, 3), seen);
            decode(seen, 3, 3, &mut buf);
            assert_eq!(buf, t);
            seen += 1;
        });
        assert_eq!(seen, 27);
    }

    #[test]
    fn empty_base_has_only_the_empty_tuple() {
        assert_eq!(all(0, 0), vec![Vec::<usize>::new()]);
        assert!(all(0, 2).is_empty());
    }
}
