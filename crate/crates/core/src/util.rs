/// k-subsets of `0..n` as sorted index vectors, in lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    cur: Vec<usize>,
    done: bool,
}

pub(crate) fn combinations(n: usize, k: usize) -> Combinations {
    Combinations { n, cur: (0..k).collect(), done: k > n }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let k = self.cur.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.cur[i] < self.n - k + i {
                self.cur[i] += 1;
                for t in i + 1..k {
                    self.cur[t] = self.cur[t - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// SplitMix64 step; used to derive independent per-attempt seeds.
pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
