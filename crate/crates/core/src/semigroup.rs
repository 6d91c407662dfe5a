//! Finite semigroups given by multiplication tables, and the structure
//! theory of inverse semigroups built on top of them: idempotents, the
//! natural partial order, congruences, the minimum group congruence and
//! its quotient, E-unitary and F-inverse tests, kernel normal systems.
//!
//! Elements are opaque indices `0..n`; all structure lives in tables.

use crate::error::{Error, Result};

/// A finite semigroup: `n` elements and an `n x n` Cayley table,
/// `table[i*n + j]` being the index of the product of `i` and `j`.
/// Associativity is verified exhaustively at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSemigroup {
    n: usize,
    table: Vec<usize>,
}

impl FiniteSemigroup {
    pub fn new(n: usize, table: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedInput("element count must be positive".into()));
        }
        if table.len() != n * n {
            return Err(Error::MalformedInput(format!(
                "table has {} entries, expected {}",
                table.len(),
                n * n
            )));
        }
        if let Some((k, &v)) = table.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(Error::MalformedInput(format!(
                "entry at row {} column {} is {}, out of range [0,{})",
                k / n,
                k % n,
                v,
                n
            )));
        }
        let s = FiniteSemigroup { n, table };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if s.mul(s.mul(i, j), k) != s.mul(i, s.mul(j, k)) {
                        return Err(Error::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(s)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.n + j]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn is_idempotent(&self, e: usize) -> bool {
        self.mul(e, e) == e
    }

    pub fn idempotents(&self) -> Vec<usize> {
        self.elements().filter(|&e| self.is_idempotent(e)).collect()
    }

    /// Identity element, if one exists. Detected, never assumed at index 0.
    pub fn identity(&self) -> Option<usize> {
        self.elements()
            .find(|&e| self.elements().all(|s| self.mul(e, s) == s && self.mul(s, e) == s))
    }

    /// Index and period of the cyclic subsemigroup generated by `s`:
    /// the least `(i, p)` with `s^(i+p) = s^i`, `i >= 1`, `p >= 1`.
    pub fn index_period(&self, s: usize) -> (usize, usize) {
        let mut seen = vec![usize::MAX; self.n];
        let mut cur = s;
        let mut k = 1usize;
        loop {
            if seen[cur] != usize::MAX {
                let i = seen[cur];
                return (i, k - i);
            }
            seen[cur] = k;
            cur = self.mul(cur, s);
            k += 1;
        }
    }

    /// Multiply out a word of element indices (must be nonempty).
    pub fn product(&self, word: &[usize]) -> usize {
        let mut acc = word[0];
        for &w in &word[1..] {
            acc = self.mul(acc, w);
        }
        acc
    }
}

/// An inverse semigroup: a finite semigroup in which every element has a
/// unique inverse, equivalently regular with commuting idempotents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseSemigroup {
    base: FiniteSemigroup,
    inv: Vec<usize>,
    idempotents: Vec<usize>,
}

/// Computes the unique inverse of every element and the idempotent set,
/// certifying regularity, uniqueness of inverses and that idempotents
/// commute. Witnesses are reported on failure.
pub fn inverse_structure(s: &FiniteSemigroup) -> Result<InverseSemigroup> {
    let n = s.n();
    let mut inv = vec![usize::MAX; n];
    for a in 0..n {
        let mut candidates = (0..n).filter(|&b| {
            s.mul(s.mul(a, b), a) == a && s.mul(s.mul(b, a), b) == b
        });
        match (candidates.next(), candidates.next()) {
            (None, _) => return Err(Error::NotRegular(a)),
            (Some(b), None) => inv[a] = b,
            (Some(b), Some(c)) => {
                return Err(Error::NotInverse(format!(
                    "element {a} has at least two inverses: {b} and {c}"
                )))
            }
        }
    }
    let idempotents = s.idempotents();
    for &e in &idempotents {
        for &f in &idempotents {
            if s.mul(e, f) != s.mul(f, e) {
                return Err(Error::NotInverse(format!(
                    "idempotents {e} and {f} do not commute"
                )));
            }
        }
    }
    Ok(InverseSemigroup {
        base: s.clone(),
        inv,
        idempotents,
    })
}

impl InverseSemigroup {
    pub fn base(&self) -> &FiniteSemigroup {
        &self.base
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.base.n()
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.base.mul(i, j)
    }

    #[inline]
    pub fn inv(&self, i: usize) -> usize {
        self.inv[i]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        self.base.elements()
    }

    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }

    pub fn is_idempotent(&self, e: usize) -> bool {
        self.base.is_idempotent(e)
    }

    /// s s^-1, the domain idempotent of `s`.
    #[inline]
    pub fn dom_idem(&self, s: usize) -> usize {
        self.mul(s, self.inv[s])
    }

    /// s^-1 s, the range idempotent of `s`.
    #[inline]
    pub fn ran_idem(&self, s: usize) -> usize {
        self.mul(self.inv[s], s)
    }

    /// Multiply out a word of element indices (must be nonempty).
    pub fn product(&self, word: &[usize]) -> usize {
        self.base.product(word)
    }

    /// Natural partial order: `s <= t` iff `s = e t` for some idempotent
    /// `e`. Both characterizations (`s = e t` and `s = t f`) are computed
    /// and cross-checked.
    pub fn natural_leq(&self, s: usize, t: usize) -> bool {
        let left = self.idempotents.iter().any(|&e| self.mul(e, t) == s);
        let right = self.idempotents.iter().any(|&f| self.mul(t, f) == s);
        assert_eq!(
            left, right,
            "natural order characterizations disagree at ({s},{t}); table corrupted"
        );
        left
    }

    /// Pairs (s, t) with s < t covering-free; the full order minus
    /// reflexive pairs, for reporting.
    pub fn strict_order_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for s in self.elements() {
            for t in self.elements() {
                if s != t && self.natural_leq(s, t) {
                    out.push((s, t));
                }
            }
        }
        out
    }
}

/// A congruence stored as a partition: `class_of[s]` is the class id of
/// `s`, `classes[c]` lists the members of class `c` in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

impl Congruence {
    /// Builds a congruence from a `class_of` labelling, renumbering the
    /// classes by first occurrence; verifies compatibility with the table.
    pub fn from_labels(s: &FiniteSemigroup, labels: &[usize]) -> Result<Congruence> {
        let n = s.n();
        assert_eq!(labels.len(), n);
        let mut remap = std::collections::HashMap::new();
        let mut class_of = vec![0usize; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let c = *remap.entry(labels[i]).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            class_of[i] = c;
            classes[c].push(i);
        }
        let cong = Congruence { class_of, classes };
        cong.check_compatibility(s)?;
        Ok(cong)
    }

    pub fn size(&self) -> usize {
        self.classes.len()
    }

    /// Compatibility: class(s)=class(s') and class(t)=class(t') imply
    /// class(st)=class(s't'). Checked in the one-sided-at-a-time form,
    /// which is equivalent and O(n^2 * class size).
    pub fn check_compatibility(&self, s: &FiniteSemigroup) -> Result<()> {
        for a in 0..s.n() {
            for b in 0..s.n() {
                let ab = self.class_of[s.mul(a, b)];
                for &a2 in &self.classes[self.class_of[a]] {
                    if self.class_of[s.mul(a2, b)] != ab {
                        return Err(Error::axiom("congruence-compatibility", &[a, a2, b]));
                    }
                }
                for &b2 in &self.classes[self.class_of[b]] {
                    if self.class_of[s.mul(a, b2)] != ab {
                        return Err(Error::axiom("congruence-compatibility", &[a, b, b2]));
                    }
                }
            }
        }
        Ok(())
    }

    /// The quotient semigroup and the natural map.
    pub fn quotient(&self, s: &FiniteSemigroup) -> Result<(FiniteSemigroup, Homomorphism)> {
        let m = self.classes.len();
        let mut table = vec![0usize; m * m];
        for c in 0..m {
            for d in 0..m {
                let p = s.mul(self.classes[c][0], self.classes[d][0]);
                table[c * m + d] = self.class_of[p];
            }
        }
        let q = FiniteSemigroup::new(m, table)?;
        let hom = Homomorphism::new(s, &q, self.class_of.clone())?;
        Ok((q, hom))
    }

    /// True iff every class of `self` is contained in a class of `other`.
    pub fn refines(&self, other: &Congruence) -> bool {
        self.classes.iter().all(|cls| {
            let c = other.class_of[cls[0]];
            cls.iter().all(|&x| other.class_of[x] == c)
        })
    }
}

/// A semigroup homomorphism stored as a total map on element indices,
/// validated against both tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn new(src: &FiniteSemigroup, dst: &FiniteSemigroup, map: Vec<usize>) -> Result<Self> {
        if map.len() != src.n() {
            return Err(Error::MalformedInput(format!(
                "homomorphism map has length {}, expected {}",
                map.len(),
                src.n()
            )));
        }
        if let Some(&v) = map.iter().find(|&&v| v >= dst.n()) {
            return Err(Error::MalformedInput(format!(
                "homomorphism value {v} out of range"
            )));
        }
        for a in src.elements() {
            for b in src.elements() {
                if map[src.mul(a, b)] != dst.mul(map[a], map[b]) {
                    return Err(Error::axiom("homomorphism", &[a, b]));
                }
            }
        }
        Ok(Homomorphism { map })
    }

    #[inline]
    pub fn apply(&self, s: usize) -> usize {
        self.map[s]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.map.iter().all(|&v| seen.insert(v))
    }

    pub fn is_surjective_onto(&self, m: usize) -> bool {
        let mut hit = vec![false; m];
        for &v in &self.map {
            hit[v] = true;
        }
        hit.iter().all(|&b| b)
    }

    pub fn compose(&self, then: &Homomorphism) -> Homomorphism {
        Homomorphism {
            map: self.map.iter().map(|&v| then.map[v]).collect(),
        }
    }
}

/// The minimum group congruence sigma: (s,t) in sigma iff es = et for
/// some idempotent e. The result is certified to be a congruence whose
/// quotient is a group.
pub fn sigma_congruence(s: &InverseSemigroup) -> Result<Congruence> {
    let n = s.n();
    let mut labels: Vec<usize> = (0..n).collect();
    // union-find over the generated relation; sigma as defined is already
    // transitive, which the congruence check below confirms.
    fn find(labels: &mut Vec<usize>, x: usize) -> usize {
        if labels[x] != x {
            let r = find(labels, labels[x]);
            labels[x] = r;
        }
        labels[x]
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if s.idempotents().iter().any(|&e| s.mul(e, a) == s.mul(e, b)) {
                let ra = find(&mut labels, a);
                let rb = find(&mut labels, b);
                if ra != rb {
                    labels[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let flat: Vec<usize> = (0..n).map(|x| find(&mut labels, x)).collect();
    let cong = Congruence::from_labels(s.base(), &flat).map_err(|_| {
        Error::InternalInvariantViolation("sigma relation is not a congruence".into())
    })?;
    let (q, _) = cong.quotient(s.base())?;
    certify_group(&q).map_err(|e| {
        Error::InternalInvariantViolation(format!("sigma quotient is not a group: {e}"))
    })?;
    Ok(cong)
}

/// Quotient by sigma; the result is certified to be a group.
pub fn max_group_image(s: &InverseSemigroup) -> Result<(FiniteSemigroup, Homomorphism)> {
    let sigma = sigma_congruence(s)?;
    sigma.quotient(s.base())
}

/// Certifies a finite semigroup is a group: unique idempotent and every
/// element invertible against it.
pub fn certify_group(s: &FiniteSemigroup) -> Result<()> {
    let idems = s.idempotents();
    if idems.len() != 1 {
        return Err(Error::NotGroup(format!(
            "{} idempotents: {:?}",
            idems.len(),
            idems
        )));
    }
    let e = idems[0];
    if s.identity() != Some(e) {
        return Err(Error::NotGroup(format!("idempotent {e} is not an identity")));
    }
    for a in s.elements() {
        if !s.elements().any(|b| s.mul(a, b) == e && s.mul(b, a) == e) {
            return Err(Error::NotGroup(format!("element {a} is not invertible")));
        }
    }
    Ok(())
}

/// E-unitary test. Evaluates the definition (e <= s with e idempotent
/// forces s idempotent) and the sigma characterization ((s,t) in sigma
/// iff s^-1 t and s t^-1 are idempotent), asserts both agree, and
/// returns the common verdict.
pub fn is_e_unitary(s: &InverseSemigroup) -> Result<bool> {
    let by_def = s.idempotents().iter().all(|&e| {
        s.elements()
            .all(|t| !s.natural_leq(e, t) || s.is_idempotent(t))
    });
    let sigma = sigma_congruence(s)?;
    let by_sigma = s.elements().all(|a| {
        s.elements().all(|b| {
            let related = sigma.class_of[a] == sigma.class_of[b];
            let idem_pair = s.is_idempotent(s.mul(s.inv(a), b))
                && s.is_idempotent(s.mul(a, s.inv(b)));
            related == idem_pair
        })
    });
    if by_def != by_sigma {
        return Err(Error::InternalInvariantViolation(format!(
            "E-unitary characterizations disagree: definition={by_def} sigma-form={by_sigma}"
        )));
    }
    Ok(by_def)
}

/// F-inverse test: true iff every sigma-class has a maximum element
/// under the natural order. Returns the per-class maxima when true.
pub fn is_f_inverse(s: &InverseSemigroup) -> Result<Option<Vec<usize>>> {
    let sigma = sigma_congruence(s)?;
    let mut maxima = Vec::with_capacity(sigma.size());
    for cls in &sigma.classes {
        match cls
            .iter()
            .copied()
            .find(|&m| cls.iter().all(|&t| s.natural_leq(t, m)))
        {
            Some(m) => maxima.push(m),
            None => return Ok(None),
        }
    }
    Ok(Some(maxima))
}

/// A kernel normal system: one subgroup N_e per idempotent e, with e its
/// identity. `groups[k]` pairs the k-th idempotent with its subgroup.
#[derive(Debug, Clone)]
pub struct KernelNormalSystem {
    pub groups: Vec<(usize, Vec<usize>)>,
}

impl KernelNormalSystem {
    /// Validates the group kernel normal system laws: each N_e is a
    /// subgroup with identity e, the union N is a subsemigroup, and
    /// s N s^-1 is contained in N for every s.
    pub fn validate(&self, s: &InverseSemigroup) -> Result<()> {
        let idems: Vec<usize> = self.groups.iter().map(|(e, _)| *e).collect();
        if idems != s.idempotents() {
            return Err(Error::InvalidKns(format!(
                "expected one subgroup per idempotent {:?}, got {:?}",
                s.idempotents(),
                idems
            )));
        }
        for (e, members) in &self.groups {
            if !members.contains(e) {
                return Err(Error::InvalidKns(format!("N_{e} does not contain {e}")));
            }
            for &a in members {
                if s.dom_idem(a) != *e || s.ran_idem(a) != *e {
                    return Err(Error::InvalidKns(format!(
                        "element {a} of N_{e} does not have identity {e}"
                    )));
                }
                if !members.contains(&s.inv(a)) {
                    return Err(Error::InvalidKns(format!(
                        "N_{e} is not closed under inverses at {a}"
                    )));
                }
                for &b in members {
                    if !members.contains(&s.mul(a, b)) {
                        return Err(Error::InvalidKns(format!(
                            "N_{e} is not closed under products at ({a},{b})"
                        )));
                    }
                }
            }
        }
        let union: Vec<usize> = self.groups.iter().flat_map(|(_, m)| m.iter().copied()).collect();
        let in_union = |x: usize| union.contains(&x);
        for &a in &union {
            for &b in &union {
                if !in_union(s.mul(a, b)) {
                    return Err(Error::InvalidKns(format!(
                        "union is not a subsemigroup: {a}*{b} escapes"
                    )));
                }
            }
        }
        for t in s.elements() {
            for &a in &union {
                let conj = s.product(&[t, a, s.inv(t)]);
                if !in_union(conj) {
                    return Err(Error::InvalidKns(format!(
                        "conjugation closure fails: {t} {a} {t}^-1 escapes"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn group_at(&self, e: usize) -> Option<&[usize]> {
        self.groups
            .iter()
            .find(|(f, _)| *f == e)
            .map(|(_, m)| m.as_slice())
    }
}

/// Builds the idempotent-separating congruence induced by a kernel
/// normal system: the class of s is s N_{s^-1 s} = N_{s s^-1} s.
/// Returns the congruence and the natural quotient map, and verifies the
/// uniqueness law: t = u s with u in N_{s s^-1} determines u = t s^-1.
pub fn congruence_from_kns(
    s: &InverseSemigroup,
    kns: &KernelNormalSystem,
) -> Result<(Congruence, FiniteSemigroup, Homomorphism)> {
    kns.validate(s)?;
    let n = s.n();
    let mut labels = vec![usize::MAX; n];
    for a in 0..n {
        if labels[a] != usize::MAX {
            continue;
        }
        let right = kns.group_at(s.ran_idem(a)).expect("validated");
        let mut class: Vec<usize> = right.iter().map(|&v| s.mul(a, v)).collect();
        class.sort_unstable();
        class.dedup();
        let left = kns.group_at(s.dom_idem(a)).expect("validated");
        let mut class2: Vec<usize> = left.iter().map(|&u| s.mul(u, a)).collect();
        class2.sort_unstable();
        class2.dedup();
        if class != class2 {
            return Err(Error::InvalidKns(format!(
                "left and right class descriptions differ at {a}"
            )));
        }
        for &x in &class {
            if labels[x] != usize::MAX {
                return Err(Error::InvalidKns(format!(
                    "classes are not disjoint at {x}"
                )));
            }
            labels[x] = a;
        }
    }
    let cong = Congruence::from_labels(s.base(), &labels)?;
    let (q, nat) = cong.quotient(s.base())?;
    // idempotent-separating: distinct idempotents land in distinct classes
    for &e in s.idempotents() {
        for &f in s.idempotents() {
            if e != f && nat.apply(e) == nat.apply(f) {
                return Err(Error::InvalidKns(format!(
                    "quotient is not idempotent-separating: {e} and {f} collide"
                )));
            }
        }
    }
    // uniqueness: t = u s forces u = t s^-1 (and t = s v forces v = s^-1 t)
    for a in 0..n {
        let left = kns.group_at(s.dom_idem(a)).expect("validated");
        for &u in left {
            let t = s.mul(u, a);
            if u != s.mul(t, s.inv(a)) {
                return Err(Error::InternalInvariantViolation(format!(
                    "kns uniqueness fails: t=us at ({u},{a}) but u != t s^-1"
                )));
            }
        }
        let right = kns.group_at(s.ran_idem(a)).expect("validated");
        for &v in right {
            let t = s.mul(a, v);
            if v != s.mul(s.inv(a), t) {
                return Err(Error::InternalInvariantViolation(format!(
                    "kns uniqueness fails: t=sv at ({a},{v}) but v != s^-1 t"
                )));
            }
        }
    }
    Ok((cong, q, nat))
}

/// The kernel of an idempotent-separating quotient map read back off the
/// congruence: per idempotent e, the class of e.
pub fn kns_from_congruence(s: &InverseSemigroup, cong: &Congruence) -> KernelNormalSystem {
    let groups = s
        .idempotents()
        .iter()
        .map(|&e| (e, cong.classes[cong.class_of[e]].clone()))
        .collect();
    KernelNormalSystem { groups }
}

/// Enumerates all congruences of a small semigroup by brute force over
/// partitions (restricted growth strings), keeping the compatible ones.
/// Intended for n <= 8 oracle checks.
pub fn enumerate_congruences(s: &FiniteSemigroup) -> Vec<Congruence> {
    let n = s.n();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        if let Ok(c) = Congruence::from_labels(s, &rgs) {
            out.push(c);
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i == 1 {
                return out;
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for v in rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn two_element_semilattice() {
        let s = instances::e2();
        let inv = inverse_structure(&s).unwrap();
        assert_eq!(inv.inv, vec![0, 1]);
        assert_eq!(inv.idempotents(), &[0, 1]);
        // semilattice order: 1 <= 0 since 1 = 1*0
        assert!(inv.natural_leq(1, 0));
        assert!(!inv.natural_leq(0, 1));
        let sigma = sigma_congruence(&inv).unwrap();
        assert_eq!(sigma.size(), 1);
        assert!(is_e_unitary(&inv).unwrap());
        let maxima = is_f_inverse(&inv).unwrap().expect("E2 is F-inverse");
        assert_eq!(maxima, vec![0]);
    }

    #[test]
    fn cyclic_group_z2() {
        let s = instances::z2();
        let inv = inverse_structure(&s).unwrap();
        assert_eq!(inv.inv, vec![0, 1]);
        assert_eq!(inv.idempotents(), &[0]);
        assert!(!inv.natural_leq(1, 0));
        let sigma = sigma_congruence(&inv).unwrap();
        assert_eq!(sigma.size(), 2);
        let (g, hom) = max_group_image(&inv).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(hom.map, vec![0, 1]);
        assert!(is_e_unitary(&inv).unwrap());
        assert!(is_f_inverse(&inv).unwrap().is_some());
    }

    #[test]
    fn right_trivial_band_is_associative_but_not_inverse() {
        // "2 / 0 1 / 0 1": accepted by the table check, rejected here
        let s = FiniteSemigroup::new(2, vec![0, 1, 0, 1]).unwrap();
        let err = inverse_structure(&s).unwrap_err();
        assert!(matches!(err, Error::NotInverse(_)));
    }

    #[test]
    fn symmetric_inverse_monoid_i2() {
        let s = instances::i2();
        let inv = inverse_structure(&s).unwrap();
        assert_eq!(inv.idempotents().len(), 4);
        // the empty map is below every element
        let zero = instances::I2_ZERO;
        for t in inv.elements() {
            assert!(inv.natural_leq(zero, t));
        }
        assert!(!is_e_unitary(&inv).unwrap());
        let (g, _) = max_group_image(&inv).unwrap();
        assert_eq!(g.n(), 1, "sigma is universal because of the zero");
    }

    #[test]
    fn inverse_laws_hold_exhaustively() {
        for s in [instances::e2(), instances::z2(), instances::i2(), instances::b2()] {
            let inv = inverse_structure(&s).unwrap();
            for a in inv.elements() {
                assert_eq!(inv.inv(inv.inv(a)), a);
                for b in inv.elements() {
                    assert_eq!(
                        inv.inv(inv.mul(a, b)),
                        inv.mul(inv.inv(b), inv.inv(a)),
                        "(st)^-1 = t^-1 s^-1 fails"
                    );
                }
            }
        }
    }

    #[test]
    fn natural_order_is_a_partial_order() {
        for s in [instances::e2(), instances::i2(), instances::b2()] {
            let inv = inverse_structure(&s).unwrap();
            for a in inv.elements() {
                assert!(inv.natural_leq(a, a));
                for b in inv.elements() {
                    if inv.natural_leq(a, b) && inv.natural_leq(b, a) {
                        assert_eq!(a, b);
                    }
                    for c in inv.elements() {
                        if inv.natural_leq(a, b) && inv.natural_leq(b, c) {
                            assert!(inv.natural_leq(a, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_kns_gives_identity_congruence() {
        let s = instances::i2();
        let inv = inverse_structure(&s).unwrap();
        let kns = KernelNormalSystem {
            groups: inv.idempotents().iter().map(|&e| (e, vec![e])).collect(),
        };
        let (cong, _, _) = congruence_from_kns(&inv, &kns).unwrap();
        assert_eq!(cong.size(), inv.n());
    }

    #[test]
    fn group_kns_is_classical_quotient() {
        // Z4 with N = {0, 2}
        let z4 = instances::cyclic(4);
        let inv = inverse_structure(&z4).unwrap();
        let kns = KernelNormalSystem {
            groups: vec![(0, vec![0, 2])],
        };
        let (cong, q, _) = congruence_from_kns(&inv, &kns).unwrap();
        assert_eq!(cong.size(), 2);
        certify_group(&q).unwrap();
    }

    #[test]
    fn kns_roundtrip_through_congruence() {
        let s = instances::three_element_clifford();
        let inv = inverse_structure(&s).unwrap();
        let kns = KernelNormalSystem {
            groups: inv
                .idempotents()
                .iter()
                .map(|&e| {
                    let members = inv
                        .elements()
                        .filter(|&a| inv.dom_idem(a) == e && inv.ran_idem(a) == e)
                        .collect();
                    (e, members)
                })
                .collect(),
        };
        let (cong, _, _) = congruence_from_kns(&inv, &kns).unwrap();
        let back = kns_from_congruence(&inv, &cong);
        for ((e1, g1), (e2, g2)) in kns.groups.iter().zip(back.groups.iter()) {
            assert_eq!(e1, e2);
            let mut g1 = g1.clone();
            let mut g2 = g2.clone();
            g1.sort_unstable();
            g2.sort_unstable();
            assert_eq!(g1, g2);
        }
    }

    #[test]
    fn invalid_kns_is_rejected() {
        let s = instances::i2();
        let inv = inverse_structure(&s).unwrap();
        // lump a non-group subset in at the identity
        let mut groups: Vec<(usize, Vec<usize>)> =
            inv.idempotents().iter().map(|&e| (e, vec![e])).collect();
        let id = s.identity().unwrap();
        for g in groups.iter_mut() {
            if g.0 == id {
                g.1 = vec![id, instances::I2_SWAP];
            }
        }
        let kns = KernelNormalSystem { groups };
        assert!(matches!(
            congruence_from_kns(&inv, &kns),
            Err(Error::InvalidKns(_))
        ));
    }

    #[test]
    fn sigma_minimality_micro() {
        for s in [instances::e2(), instances::z2(), instances::three_element_clifford()] {
            let inv = inverse_structure(&s).unwrap();
            let sigma = sigma_congruence(&inv).unwrap();
            for cong in enumerate_congruences(&s) {
                let (q, _) = cong.quotient(&s).unwrap();
                if certify_group(&q).is_ok() {
                    assert!(sigma.refines(&cong), "sigma not minimal");
                }
            }
        }
    }
}
