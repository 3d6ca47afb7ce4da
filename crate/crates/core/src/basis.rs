//! Dense monomial bases in graded-lex order, cached per variable count.
//!
//! Monomials of degree `d` occupy the contiguous block
//! `upto[d-1]..upto[d]`, so a jet truncated at order `k` is a prefix of the
//! basis for any larger order.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

pub(crate) const NONE: u32 = u32::MAX;

pub(crate) struct Basis {
    pub nvars: usize,
    pub max_order: usize,
    pub exps: Vec<Vec<u8>>,
    pub degs: Vec<usize>,
    /// `upto[d]` = number of monomials of degree `<= d`.
    pub upto: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// `mul[i][j]` = index of `m_i * m_j`, defined for `j < upto[max_order - deg i]`.
    mul: Vec<Vec<u32>>,
    /// `dec[i * nvars + v]` = index of `m_i / x_v` or `NONE`.
    dec: Vec<u32>,
}

impl Basis {
    fn build(nvars: usize, max_order: usize) -> Basis {
        let mut exps = Vec::new();
        let mut degs = Vec::new();
        let mut upto = Vec::with_capacity(max_order + 1);
        for d in 0..=max_order {
            let mut cur = vec![0u8; nvars];
            push_degree(nvars, d, 0, &mut cur, &mut exps);
            while degs.len() < exps.len() {
                degs.push(d);
            }
            upto.push(exps.len());
        }
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let mut mul = Vec::with_capacity(exps.len());
        for (i, ei) in exps.iter().enumerate() {
            let room = max_order - degs[i];
            let len = upto[room];
            let mut row = Vec::with_capacity(len);
            let mut buf = vec![0u8; nvars];
            for ej in exps.iter().take(len) {
                for v in 0..nvars {
                    buf[v] = ei[v] + ej[v];
                }
                row.push(index[&buf] as u32);
            }
            mul.push(row);
        }
        let mut dec = vec![NONE; exps.len() * nvars];
        for (i, e) in exps.iter().enumerate() {
            for v in 0..nvars {
                if e[v] > 0 {
                    let mut f = e.clone();
                    f[v] -= 1;
                    dec[i * nvars + v] = index[&f] as u32;
                }
            }
        }
        Basis {
            nvars,
            max_order,
            exps,
            degs,
            upto,
            index,
            mul,
            dec,
        }
    }

    pub fn len_upto(&self, order: usize) -> usize {
        self.upto[order]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    #[inline]
    pub fn mul_index(&self, i: usize, j: usize) -> usize {
        self.mul[i][j] as usize
    }

    #[inline]
    pub fn dec_index(&self, i: usize, v: usize) -> u32 {
        self.dec[i * self.nvars + v]
    }
}

fn push_degree(nvars: usize, d: usize, v: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if v == nvars - 1 {
        cur[v] = d as u8;
        out.push(cur.clone());
        cur[v] = 0;
        return;
    }
    for e in (0..=d).rev() {
        cur[v] = e as u8;
        push_degree(nvars, d - e, v + 1, cur, out);
    }
    cur[v] = 0;
}

thread_local! {
    static CACHE: RefCell<HashMap<usize, Rc<Basis>>> = RefCell::new(HashMap::new());
}

/// Basis for `nvars` variables covering at least `order`.
pub(crate) fn basis(nvars: usize, order: usize) -> Rc<Basis> {
    CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some(b) = cache.get(&nvars) {
            if b.max_order >= order {
                return b.clone();
            }
        }
        let b = Rc::new(Basis::build(nvars, order));
        cache.insert(nvars, b.clone());
        b
    })
}

/// Number of monomials of degree `<= order` in `nvars` variables.
pub(crate) fn count_upto(nvars: usize, order: usize) -> usize {
    binomial(order + nvars, nvars) as usize
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_blocks_and_counts() {
        let b = basis(3, 4);
        assert_eq!(b.len_upto(4), count_upto(3, 4));
        assert_eq!(b.exps[0], vec![0, 0, 0]);
        assert_eq!(b.exps[1], vec![1, 0, 0]);
        assert_eq!(b.exps[3], vec![0, 0, 1]);
        assert_eq!(b.exps[4], vec![2, 0, 0]);
        for w in b.degs.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn multiplication_table_adds_exponents() {
        let b = basis(2, 5);
        let x = b.index_of(&[1, 0]).unwrap();
        let y2 = b.index_of(&[0, 2]).unwrap();
        assert_eq!(b.exps[b.mul_index(x, y2)], vec![1, 2]);
    }

    #[test]
    fn zero_variables() {
        let b = basis(0, 3);
        assert_eq!(b.len_upto(3), 1);
        assert_eq!(count_upto(0, 7), 1);
    }
}
