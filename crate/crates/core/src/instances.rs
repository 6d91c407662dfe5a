//! Small named semigroups used across tests, the corpus files and the
//! generator suite, plus a strong-semilattice-of-groups builder.

use crate::semigroup::FiniteSemigroup;

/// The 2-element meet-semilattice, element 0 the top idempotent.
pub fn e2() -> FiniteSemigroup {
    FiniteSemigroup::new(2, vec![0, 1, 1, 1]).unwrap()
}

/// The cyclic group of order 2.
pub fn z2() -> FiniteSemigroup {
    FiniteSemigroup::new(2, vec![0, 1, 1, 0]).unwrap()
}

/// The cyclic group of order n, identity at index 0.
pub fn cyclic(n: usize) -> FiniteSemigroup {
    let mut table = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            table[i * n + j] = (i + j) % n;
        }
    }
    FiniteSemigroup::new(n, table).unwrap()
}

/// The Klein four-group as pairs (bit, bit) in row-major index order.
pub fn z2z2() -> FiniteSemigroup {
    let mut table = vec![0usize; 16];
    for i in 0..4 {
        for j in 0..4 {
            table[i * 4 + j] = (i ^ j) as usize;
        }
    }
    FiniteSemigroup::new(4, table).unwrap()
}

/// Chain semilattice with k elements, 0 the top: i*j = max(i,j).
pub fn chain(k: usize) -> FiniteSemigroup {
    let mut table = vec![0usize; k * k];
    for i in 0..k {
        for j in 0..k {
            table[i * k + j] = i.max(j);
        }
    }
    FiniteSemigroup::new(k, table).unwrap()
}

/// The V-shaped semilattice: two incomparable idempotents 0, 1 over a
/// bottom 2. Not a monoid.
pub fn v3() -> FiniteSemigroup {
    FiniteSemigroup::new(3, vec![0, 2, 2, 2, 1, 2, 2, 2, 2]).unwrap()
}

/// The 3-element Clifford semigroup with trivial top component {0} and
/// bottom component {1, 2} isomorphic to Z2.
pub fn three_element_clifford() -> FiniteSemigroup {
    strong_semilattice_chain(&[1, 2], &[vec![0]]).unwrap()
}

/// Index of the empty map in `i2()`.
pub const I2_ZERO: usize = 0;
/// Index of the transposition in `i2()`.
pub const I2_SWAP: usize = 6;

/// The symmetric inverse monoid on two points: all partial injective
/// maps {1,2} -> {1,2}, composed as functions. Elements:
/// 0 empty, 1 {1->1}, 2 {1->2}, 3 {2->1}, 4 {2->2}, 5 identity, 6 swap.
pub fn i2() -> FiniteSemigroup {
    // maps encoded as [image of 1, image of 2], 0 = undefined
    let maps: [[usize; 2]; 7] = [
        [0, 0],
        [1, 0],
        [2, 0],
        [0, 1],
        [0, 2],
        [1, 2],
        [2, 1],
    ];
    let compose = |f: &[usize; 2], g: &[usize; 2]| -> [usize; 2] {
        let mut h = [0usize; 2];
        for p in 0..2 {
            let gp = g[p];
            if gp != 0 {
                h[p] = f[gp - 1];
            }
        }
        h
    };
    let mut table = vec![0usize; 49];
    for (i, f) in maps.iter().enumerate() {
        for (j, g) in maps.iter().enumerate() {
            let h = compose(f, g);
            let k = maps.iter().position(|m| *m == h).unwrap();
            table[i * 7 + j] = k;
        }
    }
    FiniteSemigroup::new(7, table).unwrap()
}

/// The five-element combinatorial Brandt semigroup (2x2 matrix units
/// with zero): 0 zero, 1 e11, 2 e12, 3 e21, 4 e22.
pub fn b2() -> FiniteSemigroup {
    let pairs: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];
    let mut table = vec![0usize; 25];
    for i in 0..4 {
        for j in 0..4 {
            let (r1, c1) = pairs[i];
            let (r2, c2) = pairs[j];
            table[(i + 1) * 5 + (j + 1)] = if c1 == r2 {
                1 + pairs.iter().position(|&p| p == (r1, c2)).unwrap()
            } else {
                0
            };
        }
    }
    FiniteSemigroup::new(5, table).unwrap()
}

/// Strong semilattice of groups over a chain of idempotents.
///
/// `component_sizes[k]` is the order of the cyclic group at level k
/// (level 0 on top); `links[k]` is the k-th linking homomorphism
/// A_k -> A_{k+1}, given as an image table on 0..component_sizes[k].
/// Elements are numbered level by level. Multiplication pushes both
/// factors down to the lower level through the composed links.
pub fn strong_semilattice_chain(
    component_sizes: &[usize],
    links: &[Vec<usize>],
) -> Result<FiniteSemigroup, String> {
    let k = component_sizes.len();
    if links.len() + 1 != k {
        return Err("need one link per covering pair".into());
    }
    for (lvl, link) in links.iter().enumerate() {
        if link.len() != component_sizes[lvl] {
            return Err(format!("link {lvl} has wrong domain size"));
        }
        let m = component_sizes[lvl];
        let m2 = component_sizes[lvl + 1];
        if link.iter().any(|&v| v >= m2) {
            return Err(format!("link {lvl} image out of range"));
        }
        for a in 0..m {
            for b in 0..m {
                if link[(a + b) % m] != (link[a] + link[b]) % m2 {
                    return Err(format!("link {lvl} is not a homomorphism"));
                }
            }
        }
    }
    let offsets: Vec<usize> = component_sizes
        .iter()
        .scan(0, |acc, &sz| {
            let o = *acc;
            *acc += sz;
            Some(o)
        })
        .collect();
    let n: usize = component_sizes.iter().sum();
    let level_of = |x: usize| offsets.iter().rposition(|&o| o <= x).unwrap();
    let push_down = |x: usize, target: usize| -> usize {
        let mut lvl = level_of(x);
        let mut val = x - offsets[lvl];
        while lvl < target {
            val = links[lvl][val];
            lvl += 1;
        }
        offsets[target] + val
    };
    let mut table = vec![0usize; n * n];
    for x in 0..n {
        for y in 0..n {
            let target = level_of(x).max(level_of(y));
            let a = push_down(x, target) - offsets[target];
            let b = push_down(y, target) - offsets[target];
            table[x * n + y] = offsets[target] + (a + b) % component_sizes[target];
        }
    }
    FiniteSemigroup::new(n, table).map_err(|e| e.to_string())
}

/// Strong semilattice of groups over the V poset (0 and 1 incomparable
/// over bottom 2), cyclic components, with linking homomorphisms from
/// levels 0 and 1 into the bottom.
pub fn strong_semilattice_v(
    sizes: [usize; 3],
    link0: &[usize],
    link1: &[usize],
) -> Result<FiniteSemigroup, String> {
    for (link, top, name) in [(link0, 0usize, "link0"), (link1, 1, "link1")] {
        if link.len() != sizes[top] {
            return Err(format!("{name} has wrong domain size"));
        }
        let m = sizes[top];
        for a in 0..m {
            for b in 0..m {
                if link[(a + b) % m] != (link[a] + link[b]) % sizes[2] {
                    return Err(format!("{name} is not a homomorphism"));
                }
            }
        }
    }
    let offsets = [0, sizes[0], sizes[0] + sizes[1]];
    let n = sizes[0] + sizes[1] + sizes[2];
    let node_of = |x: usize| {
        if x < offsets[1] {
            0
        } else if x < offsets[2] {
            1
        } else {
            2
        }
    };
    let to_bottom = |x: usize| -> usize {
        match node_of(x) {
            0 => link0[x - offsets[0]],
            1 => link1[x - offsets[1]],
            _ => x - offsets[2],
        }
    };
    let mut table = vec![0usize; n * n];
    for x in 0..n {
        for y in 0..n {
            let (nx, ny) = (node_of(x), node_of(y));
            table[x * n + y] = if nx == ny && nx != 2 {
                offsets[nx] + ((x - offsets[nx]) + (y - offsets[ny])) % sizes[nx]
            } else {
                offsets[2] + (to_bottom(x) + to_bottom(y)) % sizes[2]
            };
        }
    }
    FiniteSemigroup::new(n, table).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::inverse_structure;

    #[test]
    fn named_instances_are_inverse() {
        for s in [e2(), z2(), cyclic(3), z2z2(), v3(), three_element_clifford(), i2(), b2()] {
            inverse_structure(&s).unwrap();
        }
    }

    #[test]
    fn b2_has_three_idempotents_and_a_zero() {
        let s = b2();
        assert_eq!(s.idempotents(), vec![0, 1, 4]);
        for x in s.elements() {
            assert_eq!(s.mul(0, x), 0);
            assert_eq!(s.mul(x, 0), 0);
        }
    }

    #[test]
    fn three_element_clifford_components() {
        let s = three_element_clifford();
        assert_eq!(s.idempotents(), vec![0, 1]);
        assert_eq!(s.mul(2, 2), 1);
        assert_eq!(s.mul(0, 2), 2);
    }

    #[test]
    fn v_semilattice_with_group_bottom() {
        let s = strong_semilattice_v([1, 1, 2], &[0], &[0]).unwrap();
        assert_eq!(s.n(), 4);
        inverse_structure(&s).unwrap();
    }
}
