//! Isomorphism search between multiplication tables: backtracking over
//! element images with invariant pruning (idempotent flag, index/period
//! profile, row and column invariant multisets) and forced-product
//! propagation. Deterministic: the lexicographically least assignment is
//! found first.

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::semigroup::{FiniteSemigroup, Homomorphism};

/// Per-element invariant vector, preserved by any isomorphism.
fn invariants(s: &FiniteSemigroup) -> Vec<(bool, (usize, usize), Vec<usize>, Vec<usize>)> {
    let n = s.n();
    let ip: Vec<(usize, usize)> = s.elements().map(|x| s.index_period(x)).collect();
    let idem: Vec<bool> = s.elements().map(|x| s.is_idempotent(x)).collect();
    // row/column profiles: sorted multisets of (idempotent?, index, period)
    // of the products, which are label-independent.
    let key = |x: usize| (idem[x] as usize, ip[x].0, ip[x].1);
    let mut out = Vec::with_capacity(n);
    for x in 0..n {
        let mut row: Vec<usize> = (0..n).map(|y| {
            let p = s.mul(x, y);
            let (a, b, c) = key(p);
            a * n * n * 4 + b * n * 2 + c
        }).collect();
        row.sort_unstable();
        let mut col: Vec<usize> = (0..n).map(|y| {
            let p = s.mul(y, x);
            let (a, b, c) = key(p);
            a * n * n * 4 + b * n * 2 + c
        }).collect();
        col.sort_unstable();
        out.push((idem[x], ip[x], row, col));
    }
    out
}

struct Search<'a> {
    s: &'a FiniteSemigroup,
    t: &'a FiniteSemigroup,
    candidates: Vec<Vec<usize>>,
    img: Vec<usize>,
    used: Vec<bool>,
    collect_all: bool,
    found: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    /// Checks every product among currently assigned elements; images of
    /// products that are themselves assigned must match.
    fn consistent(&self, fresh: usize) -> bool {
        let n = self.s.n();
        for other in 0..n {
            if self.img[other] == usize::MAX {
                continue;
            }
            for (a, b) in [(fresh, other), (other, fresh)] {
                let p = self.s.mul(a, b);
                let q = self.t.mul(self.img[a], self.img[b]);
                if self.img[p] != usize::MAX {
                    if self.img[p] != q {
                        return false;
                    }
                } else if self.used[q] && !self.candidates[p].contains(&q) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, pos: usize) -> bool {
        let n = self.s.n();
        if pos == n {
            self.found.push(self.img.clone());
            return !self.collect_all;
        }
        for k in 0..self.candidates[pos].len() {
            let c = self.candidates[pos][k];
            if self.used[c] {
                continue;
            }
            self.img[pos] = c;
            self.used[c] = true;
            if self.consistent(pos) && self.run(pos + 1) {
                return true;
            }
            self.used[c] = false;
            self.img[pos] = usize::MAX;
        }
        false
    }
}

fn search_all(
    s: &FiniteSemigroup,
    t: &FiniteSemigroup,
    collect_all: bool,
) -> Vec<Vec<usize>> {
    if s.n() != t.n() {
        return Vec::new();
    }
    let inv_s = invariants(s);
    let inv_t = invariants(t);
    let candidates: Vec<Vec<usize>> = (0..s.n())
        .map(|x| (0..t.n()).filter(|&y| inv_s[x] == inv_t[y]).collect())
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Vec::new();
    }
    let mut search = Search {
        s,
        t,
        candidates,
        img: vec![usize::MAX; s.n()],
        used: vec![false; t.n()],
        collect_all,
        found: Vec::new(),
    };
    search.run(0);
    search.found
}

/// Finds one isomorphism between the tables if any exists; the returned
/// map is verified to be bijective and multiplicative before being
/// reported. Lexicographically least over candidate images.
pub fn find_isomorphism(
    s: &FiniteSemigroup,
    t: &FiniteSemigroup,
    caps: &Caps,
) -> Result<Option<Homomorphism>> {
    if s.n() > caps.max_iso || t.n() > caps.max_iso {
        return Err(Error::cap("isomorphism search", s.n().max(t.n()), caps.max_iso));
    }
    match search_all(s, t, false).into_iter().next() {
        None => Ok(None),
        Some(map) => {
            let hom = Homomorphism::new(s, t, map)?;
            if !hom.is_injective() || !hom.is_surjective_onto(t.n()) {
                return Err(Error::InternalInvariantViolation(
                    "isomorphism search returned a non-bijective map".into(),
                ));
            }
            Ok(Some(hom))
        }
    }
}

/// All isomorphisms between the tables, in lexicographic order.
pub fn all_isomorphisms(
    s: &FiniteSemigroup,
    t: &FiniteSemigroup,
    caps: &Caps,
) -> Result<Vec<Homomorphism>> {
    if s.n() > caps.max_iso || t.n() > caps.max_iso {
        return Err(Error::cap("isomorphism search", s.n().max(t.n()), caps.max_iso));
    }
    search_all(s, t, true)
        .into_iter()
        .map(|m| Homomorphism::new(s, t, m))
        .collect()
}

/// All automorphisms of a table.
pub fn all_automorphisms(s: &FiniteSemigroup, caps: &Caps) -> Result<Vec<Homomorphism>> {
    all_isomorphisms(s, s, caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn identity_on_e2() {
        let s = instances::e2();
        let hom = find_isomorphism(&s, &s, &Caps::default()).unwrap().unwrap();
        assert_eq!(hom.map, vec![0, 1]);
    }

    #[test]
    fn z4_is_not_klein() {
        let z4 = instances::cyclic(4);
        let k4 = instances::z2z2();
        assert!(find_isomorphism(&z4, &k4, &Caps::default()).unwrap().is_none());
    }

    #[test]
    fn z3_automorphisms() {
        let z3 = instances::cyclic(3);
        let autos = all_automorphisms(&z3, &Caps::default()).unwrap();
        assert_eq!(autos.len(), 2);
    }

    #[test]
    fn klein_automorphisms() {
        let k4 = instances::z2z2();
        let autos = all_automorphisms(&k4, &Caps::default()).unwrap();
        assert_eq!(autos.len(), 6);
    }

    #[test]
    fn cap_is_enforced() {
        let s = instances::e2();
        let caps = Caps { max_iso: 1, ..Caps::default() };
        assert!(matches!(
            find_isomorphism(&s, &s, &caps),
            Err(Error::SizeCapExceeded { .. })
        ));
    }
}
