//! Streaming enumeration of the index sets the trigonometric sums run over:
//! lexicographic k-subsets with combinadic unranking (so a sum can be split
//! into blocks that start anywhere without replaying the stream), and the
//! strictly decreasing weight chains used by the conformal-block sum.

/// `C(n, k)` in 128 bits, or `None` on overflow.
pub fn binomial_checked(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n-k+i) / i is exact at every step; dividing the shared
        // factors out of acc first keeps the intermediate product no larger
        // than the result, so checked_mul fails only on true overflow
        let f = (n - k + i) as u128;
        let g = gcd_u128(acc, i as u128);
        acc = (acc / g).checked_mul(f / (i as u128 / g))?;
    }
    Some(acc)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `C(n, k)`; panics if the count does not fit in 128 bits.
pub fn binomial(n: u64, k: u64) -> u128 {
    binomial_checked(n, k).expect("binomial overflows u128")
}

/// All k-element subsets of `{0, …, n-1}` in lexicographic order, as sorted
/// vectors.
pub struct Subsets {
    n: u32,
    k: u32,
    state: Option<Vec<u32>>,
    started: bool,
}

impl Subsets {
    pub fn new(n: u32, k: u32) -> Self {
        Subsets {
            n,
            k,
            state: None,
            started: false,
        }
    }

    pub fn count(n: u32, k: u32) -> u128 {
        binomial(n as u64, k as u64)
    }

    /// Subset at position `rank` of the lexicographic order (combinadic
    /// decomposition).
    pub fn unrank(n: u32, k: u32, mut rank: u128) -> Vec<u32> {
        debug_assert!(rank < Self::count(n, k));
        let mut out = Vec::with_capacity(k as usize);
        let mut c = 0u32;
        for i in 0..k {
            loop {
                // subsets with element i fixed to c: choose the rest above c
                let rest = binomial((n - 1 - c) as u64, (k - 1 - i) as u64);
                if rank < rest {
                    break;
                }
                rank -= rest;
                c += 1;
            }
            out.push(c);
            c += 1;
        }
        out
    }

    /// Advances `state` to the next subset in place; false when exhausted.
    pub fn advance(n: u32, k: u32, state: &mut [u32]) -> bool {
        debug_assert_eq!(state.len(), k as usize);
        for i in (0..k as usize).rev() {
            if state[i] < n - k + i as u32 {
                state[i] += 1;
                for j in i + 1..k as usize {
                    state[j] = state[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for Subsets {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if !self.started {
            self.started = true;
            if self.k > self.n {
                return None;
            }
            let first: Vec<u32> = (0..self.k).collect();
            self.state = Some(first.clone());
            return Some(first);
        }
        let state = self.state.as_mut()?;
        if Subsets::advance(self.n, self.k, state) {
            Some(state.clone())
        } else {
            self.state = None;
            None
        }
    }
}

/// Complement of a sorted subset inside `{0, …, n-1}`.
pub fn complement(n: u32, subset: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(n as usize - subset.len());
    let mut it = subset.iter().copied().peekable();
    for v in 0..n {
        if it.peek() == Some(&v) {
            it.next();
        } else {
            out.push(v);
        }
    }
    out
}

/// Strictly decreasing chains `t_1 > t_2 > … > t_len = 0` with `t_1 < bound`,
/// in a fixed deterministic order.  There are `C(bound-1, len-1)` of them:
/// the nonzero entries are an arbitrary subset of `{1, …, bound-1}`.
pub struct WeightChains {
    inner: Subsets,
    len: u32,
}

impl WeightChains {
    pub fn new(len: u32, bound: u32) -> Self {
        assert!(len >= 1, "chains contain at least the trailing zero");
        assert!(bound >= 1, "the trailing zero needs 0 < bound");
        WeightChains {
            inner: Subsets::new(bound - 1, len - 1),
            len,
        }
    }

    pub fn count(len: u32, bound: u32) -> u128 {
        assert!(len >= 1 && bound >= 1);
        binomial(bound as u64 - 1, len as u64 - 1)
    }

    pub fn unrank(len: u32, bound: u32, rank: u128) -> Vec<u32> {
        let subset = Subsets::unrank(bound - 1, len - 1, rank);
        Self::from_subset(len, &subset)
    }

    fn from_subset(len: u32, subset: &[u32]) -> Vec<u32> {
        let mut chain = Vec::with_capacity(len as usize);
        for &s in subset.iter().rev() {
            chain.push(s + 1);
        }
        chain.push(0);
        chain
    }
}

impl Iterator for WeightChains {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let subset = self.inner.next()?;
        Some(Self::from_subset(self.len, &subset))
    }
}

/// Centers a chain to mean zero: returns numerators over the denominator
/// `chain.len()`, i.e. `len * t_i - Σt`.  For the chain `(2, 1, 0)` this is
/// `([3, 0, -3], 3)`, the scaled form of `(1, 0, -1)`.
pub fn centered_numerators(chain: &[u32]) -> (Vec<i64>, u32) {
    let len = chain.len() as i64;
    let total: i64 = chain.iter().map(|&t| t as i64).sum();
    let nums = chain.iter().map(|&t| len * t as i64 - total).collect();
    (nums, chain.len() as u32)
}

/// A strictly decreasing zero-sum weight: coordinates `ν_i = numerators_i /
/// denominator` with integer pairwise differences `t_i - t_j` and spread
/// `ν_1 - ν_N < bound`.  Stored through the integer chain plus the centering
/// offset so the enumerator never touches rational arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    chain: Vec<u32>,
    numerators: Vec<i64>,
}

impl WeightVector {
    pub fn from_chain(chain: Vec<u32>) -> Self {
        let (numerators, _) = centered_numerators(&chain);
        WeightVector { chain, numerators }
    }

    /// The underlying integer chain `t_1 > … > t_N = 0`.
    pub fn chain(&self) -> &[u32] {
        &self.chain
    }

    /// Scaled coordinates: `ν_i = numerators()[i] / denominator()`.
    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn denominator(&self) -> u32 {
        self.chain.len() as u32
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }
}

/// Every weight vector of length `len` with spread below `bound`, in the
/// deterministic [`WeightChains`] order.
pub fn weight_vectors(len: u32, bound: u32) -> impl Iterator<Item = WeightVector> {
    WeightChains::new(len, bound).map(WeightVector::from_chain)
}
