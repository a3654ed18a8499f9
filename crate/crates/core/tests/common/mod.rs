//! Naive reference implementations, written independently of the library.
#![allow(dead_code)]

/// Channel selection, one event at a time, straight from the definition:
/// add the increment, wrap by subtraction, and if the result is unused walk
/// the channel list counting used entries.
pub fn naive_channels(used: &[bool; 37], h_inc: u32, luc: u32, n: usize) -> Vec<u32> {
    let mut last = luc;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut unmapped = last + h_inc;
        while unmapped >= 37 {
            unmapped -= 37;
        }
        last = unmapped;
        if used[unmapped as usize] {
            out.push(unmapped);
            continue;
        }
        let count = used.iter().filter(|&&u| u).count() as u32;
        let mut want = unmapped;
        while want >= count {
            want -= count;
        }
        let mut seen = 0;
        for (ch, &u) in used.iter().enumerate() {
            if u {
                if seen == want {
                    out.push(ch as u32);
                    break;
                }
                seen += 1;
            }
        }
    }
    out
}

/// Unmapped values only.
pub fn naive_unmapped(h_inc: u32, luc: u32, n: usize) -> Vec<u32> {
    let mut v = Vec::with_capacity(n);
    let mut last = luc;
    for _ in 0..n {
        last = (last + h_inc) % 37;
        v.push(last);
    }
    v
}

/// Inverse modulo 37 by trying every candidate.
pub fn naive_inverse(x: u32) -> Option<u32> {
    (1..37).find(|y| (x * y) % 37 == 1)
}

pub fn bits_of(used: &[bool; 37]) -> u64 {
    used.iter()
        .enumerate()
        .filter(|(_, &u)| u)
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

pub fn used_from_bits(bits: u64) -> [bool; 37] {
    std::array::from_fn(|i| bits >> i & 1 == 1)
}

/// Smallest p > 0 with s[i] == s[i + p] for every i in range.
pub fn smallest_period(s: &[u32]) -> usize {
    (1..s.len())
        .find(|&p| (0..s.len() - p).all(|i| s[i] == s[i + p]))
        .unwrap_or(s.len())
}
