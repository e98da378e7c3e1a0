use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Stirling number of the second kind: partitions of a `p`-set into `k`
/// nonempty blocks.
pub fn stirling2(p: usize, k: usize) -> BigUint {
    if k > p {
        return BigUint::zero();
    }
    // row[j] = S(i, j), updated in place from the right.
    let mut row = vec![BigUint::zero(); k + 1];
    row[0] = BigUint::one();
    for i in 1..=p {
        let top = i.min(k);
        for j in (1..=top).rev() {
            let carried = &row[j] * BigUint::from(j) + &row[j - 1];
            row[j] = carried;
        }
        row[0] = BigUint::zero();
    }
    row[k].clone()
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}
