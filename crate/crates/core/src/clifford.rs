//! Semilattices of groups (Clifford semigroups): certification, the
//! component decomposition, ideals, multipliers (the translational
//! hull), relatively invertible endomorphisms, and the isomorphism
//! between iend(A) and the inverse semigroup of isomorphisms between
//! unital ideals.

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::iso::all_isomorphisms;
use crate::semigroup::{inverse_structure, FiniteSemigroup, InverseSemigroup};

/// An inverse semigroup certified as a semilattice of groups, with the
/// component map e -> A_e = {a : a a^-1 = e}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordAlgebra {
    base: InverseSemigroup,
    components: Vec<(usize, Vec<usize>)>,
    comp_of: Vec<usize>,
}

/// Certifies the two Clifford properties (a a^-1 = a^-1 a for all a,
/// idempotents central) and builds the component decomposition, checking
/// A_e A_f is contained in A_{ef} exhaustively.
pub fn certify_clifford(s: &InverseSemigroup) -> Result<CliffordAlgebra> {
    for a in s.elements() {
        if s.dom_idem(a) != s.ran_idem(a) {
            return Err(Error::NotClifford(format!(
                "a a^-1 != a^-1 a at element {a}"
            )));
        }
    }
    for &e in s.idempotents() {
        for a in s.elements() {
            if s.mul(e, a) != s.mul(a, e) {
                return Err(Error::NotClifford(format!(
                    "idempotent {e} is not central: witness {a}"
                )));
            }
        }
    }
    let mut components = Vec::new();
    let mut comp_of = vec![usize::MAX; s.n()];
    for &e in s.idempotents() {
        let members: Vec<usize> = s.elements().filter(|&a| s.dom_idem(a) == e).collect();
        for &a in &members {
            comp_of[a] = e;
        }
        components.push((e, members));
    }
    if comp_of.iter().any(|&c| c == usize::MAX) {
        return Err(Error::NotClifford("components do not cover".into()));
    }
    let alg = CliffordAlgebra {
        base: s.clone(),
        components,
        comp_of,
    };
    for a in alg.elements() {
        for b in alg.elements() {
            let want = alg.mul(alg.comp_of[a], alg.comp_of[b]);
            if alg.comp_of[alg.mul(a, b)] != want {
                return Err(Error::NotClifford(format!(
                    "component multiplicativity fails at ({a},{b})"
                )));
            }
        }
    }
    Ok(alg)
}

impl CliffordAlgebra {
    pub fn base(&self) -> &InverseSemigroup {
        &self.base
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.base.n()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.base.mul(a, b)
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.base.inv(a)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        self.base.elements()
    }

    /// Multiply out a word of element indices (must be nonempty).
    pub fn product(&self, word: &[usize]) -> usize {
        self.base.product(word)
    }

    pub fn idempotents(&self) -> &[usize] {
        self.base.idempotents()
    }

    pub fn is_idempotent(&self, e: usize) -> bool {
        self.base.is_idempotent(e)
    }

    #[inline]
    pub fn dom_idem(&self, a: usize) -> usize {
        self.base.dom_idem(a)
    }

    #[inline]
    pub fn ran_idem(&self, a: usize) -> usize {
        self.base.ran_idem(a)
    }

    /// The idempotent indexing the component of `a`.
    #[inline]
    pub fn component_of(&self, a: usize) -> usize {
        self.comp_of[a]
    }

    pub fn components(&self) -> &[(usize, Vec<usize>)] {
        &self.components
    }

    pub fn component(&self, e: usize) -> &[usize] {
        &self
            .components
            .iter()
            .find(|(f, _)| *f == e)
            .expect("component index must be an idempotent")
            .1
    }

    /// The principal ideal eA as a sorted element list.
    pub fn principal_ideal(&self, e: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.elements().filter(|&a| self.mul(e, a) == a).collect();
        out.sort_unstable();
        out
    }

    /// Product of two element sets, as a sorted deduplicated list.
    pub fn set_product(&self, i: &[usize], j: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = i
            .iter()
            .flat_map(|&a| j.iter().map(move |&b| self.mul(a, b)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks that a sorted element list is a two-sided ideal.
    pub fn is_ideal(&self, i: &[usize]) -> bool {
        !i.is_empty()
            && i.iter().all(|&s| {
                self.elements()
                    .all(|a| i.binary_search(&self.mul(a, s)).is_ok()
                        && i.binary_search(&self.mul(s, a)).is_ok())
            })
    }

    /// The semilattice of idempotents as a Clifford algebra of its own,
    /// together with the embedding of new indices into `self`.
    pub fn idempotent_subalgebra(&self) -> (CliffordAlgebra, Vec<usize>) {
        let embed: Vec<usize> = self.idempotents().to_vec();
        let k = embed.len();
        let mut table = vec![0usize; k * k];
        for (i, &e) in embed.iter().enumerate() {
            for (j, &f) in embed.iter().enumerate() {
                let p = self.mul(e, f);
                table[i * k + j] = embed.binary_search(&p).expect("closed");
            }
        }
        let sg = FiniteSemigroup::new(k, table).expect("semilattice table");
        let inv = inverse_structure(&sg).expect("semilattice is inverse");
        let alg = certify_clifford(&inv).expect("semilattice is Clifford");
        (alg, embed)
    }
}

/// An ideal of a Clifford algebra: a union of components over a
/// down-closed idempotent set, with its computed flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    pub elements: Vec<usize>,
    /// I^2 = I (always true for ideals of inverse semigroups; computed,
    /// not assumed).
    pub idempotent: bool,
    /// The central idempotent 1_I with I = 1_I A, when one exists.
    pub unit: Option<usize>,
}

impl Ideal {
    pub fn from_elements(alg: &CliffordAlgebra, mut elements: Vec<usize>) -> Result<Ideal> {
        elements.sort_unstable();
        elements.dedup();
        if !alg.is_ideal(&elements) {
            return Err(Error::MalformedInput(format!(
                "element set {elements:?} is not an ideal"
            )));
        }
        let square = alg.set_product(&elements, &elements);
        let idempotent = square == elements;
        let unit = elements
            .iter()
            .copied()
            .find(|&e| alg.is_idempotent(e) && alg.principal_ideal(e) == elements);
        Ok(Ideal {
            elements,
            idempotent,
            unit,
        })
    }

    pub fn contains(&self, a: usize) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn idempotents_in(&self, alg: &CliffordAlgebra) -> Vec<usize> {
        self.elements
            .iter()
            .copied()
            .filter(|&e| alg.is_idempotent(e))
            .collect()
    }
}

/// Enumerates all ideals (unions of components over nonempty down-closed
/// idempotent sets), marks the idempotent/unital flags, and checks the
/// inverse-semigroup identity I ∩ J = IJ for every pair.
pub fn ideals(alg: &CliffordAlgebra) -> Result<Vec<Ideal>> {
    let idems = alg.idempotents();
    let k = idems.len();
    let mut out = Vec::new();
    for mask in 1u64..(1 << k) {
        let chosen: Vec<usize> = (0..k)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| idems[i])
            .collect();
        let down_closed = chosen.iter().all(|&e| {
            idems
                .iter()
                .all(|&f| !alg.base().natural_leq(f, e) || chosen.contains(&f))
        });
        if !down_closed {
            continue;
        }
        let elements: Vec<usize> = chosen
            .iter()
            .flat_map(|&e| alg.component(e).iter().copied())
            .collect();
        out.push(Ideal::from_elements(alg, elements)?);
    }
    out.sort_by(|a, b| (a.len(), &a.elements).cmp(&(b.len(), &b.elements)));
    for i in &out {
        for j in &out {
            let prod = alg.set_product(&i.elements, &j.elements);
            let meet: Vec<usize> = i
                .elements
                .iter()
                .copied()
                .filter(|a| j.contains(*a))
                .collect();
            if prod != meet {
                return Err(Error::InternalInvariantViolation(
                    "I ∩ J != IJ for a pair of ideals".into(),
                ));
            }
        }
    }
    Ok(out)
}

/// A multiplier of an ideal: a linked pair of left and right
/// translations, stored as explicit maps over the sorted ideal elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiplier {
    pub domain: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Multiplier {
    pub fn new(domain: Vec<usize>, left: Vec<usize>, right: Vec<usize>) -> Multiplier {
        assert_eq!(domain.len(), left.len());
        assert_eq!(domain.len(), right.len());
        Multiplier { domain, left, right }
    }

    pub fn identity(domain: Vec<usize>) -> Multiplier {
        let left = domain.clone();
        let right = domain.clone();
        Multiplier { domain, left, right }
    }

    #[inline]
    fn pos(&self, a: usize) -> usize {
        self.domain
            .binary_search(&a)
            .unwrap_or_else(|_| panic!("element {a} outside multiplier domain"))
    }

    /// w * a
    #[inline]
    pub fn left_apply(&self, a: usize) -> usize {
        self.left[self.pos(a)]
    }

    /// a * w
    #[inline]
    pub fn right_apply(&self, a: usize) -> usize {
        self.right[self.pos(a)]
    }

    pub fn left_table(&self) -> &[usize] {
        &self.left
    }

    pub fn right_table(&self) -> &[usize] {
        &self.right
    }

    pub fn is_identity(&self) -> bool {
        self.left == self.domain && self.right == self.domain
    }

    /// Monoid composition (L, R)(L', R') = (L ∘ L', R' ∘ R).
    pub fn compose(&self, other: &Multiplier) -> Multiplier {
        assert_eq!(self.domain, other.domain, "multiplier domains differ");
        let left = self
            .domain
            .iter()
            .map(|&a| self.left_apply(other.left_apply(a)))
            .collect();
        let right = self
            .domain
            .iter()
            .map(|&a| other.right_apply(self.right_apply(a)))
            .collect();
        Multiplier {
            domain: self.domain.clone(),
            left,
            right,
        }
    }

    /// The translation laws (i')-(iii') plus closure into the domain.
    pub fn validate(&self, alg: &CliffordAlgebra) -> Result<()> {
        for &v in self.left.iter().chain(self.right.iter()) {
            if self.domain.binary_search(&v).is_err() {
                return Err(Error::axiom("multiplier-closure", &[v]));
            }
        }
        for &s in &self.domain {
            for &t in &self.domain {
                let st = alg.mul(s, t);
                if self.left_apply(st) != alg.mul(self.left_apply(s), t) {
                    return Err(Error::axiom("multiplier-(i')", &[s, t]));
                }
                if self.right_apply(st) != alg.mul(s, self.right_apply(t)) {
                    return Err(Error::axiom("multiplier-(ii')", &[s, t]));
                }
                if alg.mul(s, self.left_apply(t)) != alg.mul(self.right_apply(s), t) {
                    return Err(Error::axiom("multiplier-(iii')", &[s, t]));
                }
            }
        }
        Ok(())
    }

    /// Two-sided inverse, when the translation maps are bijections.
    pub fn inverse(&self, alg: &CliffordAlgebra) -> Option<Multiplier> {
        let n = self.domain.len();
        let mut left_inv = vec![usize::MAX; n];
        let mut right_inv = vec![usize::MAX; n];
        for k in 0..n {
            let lp = self.domain.binary_search(&self.left[k]).ok()?;
            let rp = self.domain.binary_search(&self.right[k]).ok()?;
            if left_inv[lp] != usize::MAX || right_inv[rp] != usize::MAX {
                return None;
            }
            left_inv[lp] = self.domain[k];
            right_inv[rp] = self.domain[k];
        }
        let w = Multiplier {
            domain: self.domain.clone(),
            left: left_inv,
            right: right_inv,
        };
        w.validate(alg).ok()?;
        Some(w)
    }
}

/// The translational hull of an ideal: all multipliers with their
/// composition structure and the group of invertibles.
pub struct MultiplierMonoid {
    pub elements: Vec<Multiplier>,
    pub identity: usize,
    pub invertible: Vec<usize>,
}

/// Enumerates every multiplier of the ideal. A left translation is
/// determined by its values on the idempotents of I (L(s) = L(ss^-1)s),
/// and centrality of idempotents pins the right translation to
/// R(s) = s L(s^-1 s); candidates are generated that way and filtered
/// through the translation laws.
pub fn multiplier_monoid(
    alg: &CliffordAlgebra,
    ideal: &Ideal,
    caps: &Caps,
) -> Result<MultiplierMonoid> {
    if ideal.len() > caps.max_mult {
        return Err(Error::cap("multiplier enumeration", ideal.len(), caps.max_mult));
    }
    let idems = ideal.idempotents_in(alg);
    let slots: Vec<Vec<usize>> = idems
        .iter()
        .map(|&e| {
            ideal
                .elements
                .iter()
                .copied()
                .filter(|&b| alg.mul(b, e) == b)
                .collect()
        })
        .collect();
    let mut elements: Vec<Multiplier> = Vec::new();
    let mut choice = vec![0usize; idems.len()];
    'outer: loop {
        let left: Vec<usize> = ideal
            .elements
            .iter()
            .map(|&s| {
                let k = idems.iter().position(|&e| e == alg.dom_idem(s)).unwrap();
                alg.mul(slots[k][choice[k]], s)
            })
            .collect();
        let right: Vec<usize> = ideal
            .elements
            .iter()
            .map(|&s| {
                let k = idems.iter().position(|&e| e == alg.ran_idem(s)).unwrap();
                alg.mul(s, slots[k][choice[k]])
            })
            .collect();
        let w = Multiplier::new(ideal.elements.clone(), left, right);
        if w.validate(alg).is_ok() && !elements.contains(&w) {
            elements.push(w);
        }
        for k in 0..idems.len() {
            choice[k] += 1;
            if choice[k] < slots[k].len() {
                continue 'outer;
            }
            choice[k] = 0;
        }
        break;
    }
    let identity = elements
        .iter()
        .position(|w| w.is_identity())
        .expect("identity multiplier always exists");
    let invertible = elements
        .iter()
        .enumerate()
        .filter(|(_, w)| w.inverse(alg).is_some())
        .map(|(k, _)| k)
        .collect();
    Ok(MultiplierMonoid {
        elements,
        identity,
        invertible,
    })
}

impl MultiplierMonoid {
    /// When the ideal is unital, w -> w*1 is an isomorphism of monoids
    /// onto the ideal; verified element by element.
    pub fn check_unital_isomorphism(&self, alg: &CliffordAlgebra, unit: usize) -> Result<()> {
        let mut images = Vec::new();
        for w in &self.elements {
            let l = w.left_apply(unit);
            let r = w.right_apply(unit);
            if l != r {
                return Err(Error::InternalInvariantViolation(
                    "w*1 != 1*w on a unital ideal".into(),
                ));
            }
            images.push(l);
        }
        let mut sorted = images.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != self.elements[0].domain {
            return Err(Error::InternalInvariantViolation(
                "w -> w*1 is not a bijection onto the ideal".into(),
            ));
        }
        for (i, wi) in self.elements.iter().enumerate() {
            for (j, wj) in self.elements.iter().enumerate() {
                let composed = wi.compose(wj);
                let k = self
                    .elements
                    .iter()
                    .position(|w| *w == composed)
                    .ok_or_else(|| {
                        Error::InternalInvariantViolation("multipliers not closed".into())
                    })?;
                if alg.mul(images[i], images[j]) != images[k] {
                    return Err(Error::InternalInvariantViolation(
                        "w -> w*1 is not multiplicative".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A relatively invertible endomorphism with its partner and idempotent:
/// bar(map(a)) = e a, map(bar(a)) = map(e) a, e the identity of bar(A)
/// and map(e) the identity of map(A).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelInvertibleEndo {
    pub map: Vec<usize>,
    pub bar: Vec<usize>,
    pub e: usize,
}

/// All endomorphisms of the multiplication table, by backtracking over
/// images with forced-product propagation.
pub fn all_endomorphisms(s: &FiniteSemigroup, caps: &Caps) -> Result<Vec<Vec<usize>>> {
    if s.n() > caps.max_endo {
        return Err(Error::cap("endomorphism enumeration", s.n(), caps.max_endo));
    }
    let n = s.n();
    let mut out = Vec::new();
    let mut img = vec![usize::MAX; n];

    fn propagate(
        s: &FiniteSemigroup,
        img: &mut Vec<usize>,
        trail: &mut Vec<usize>,
        mut queue: Vec<usize>,
    ) -> bool {
        while let Some(_) = queue.pop() {
            for a in 0..s.n() {
                if img[a] == usize::MAX {
                    continue;
                }
                for b in 0..s.n() {
                    if img[b] == usize::MAX {
                        continue;
                    }
                    let p = s.mul(a, b);
                    let q = s.mul(img[a], img[b]);
                    if img[p] == usize::MAX {
                        img[p] = q;
                        trail.push(p);
                        queue.push(p);
                    } else if img[p] != q {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn rec(s: &FiniteSemigroup, img: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let next = match img.iter().position(|&v| v == usize::MAX) {
            None => {
                out.push(img.clone());
                return;
            }
            Some(k) => k,
        };
        for v in 0..s.n() {
            let mut trail = vec![next];
            img[next] = v;
            if propagate(s, img, &mut trail, vec![next]) {
                rec(s, img, out);
            }
            for t in trail {
                img[t] = usize::MAX;
            }
        }
    }

    rec(s, &mut img, &mut out);
    out.sort_unstable();
    Ok(out)
}

fn image_set(map: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = map.to_vec();
    out.sort_unstable();
    out.dedup();
    out
}

/// Tests relative invertibility of an endomorphism against the supplied
/// endomorphism list, returning the normalized (bar, e) pair. The
/// weakened form of condition (ii) is used for the search ("it is
/// enough that map(e) is the identity of map(A)"), and the returned bar
/// is corrected to e*bar so the full definition holds.
fn relative_inverse(
    alg: &CliffordAlgebra,
    endos: &[Vec<usize>],
    map: &[usize],
) -> Option<(Vec<usize>, usize)> {
    let image = image_set(map);
    let mut hits: Vec<(Vec<usize>, usize)> = Vec::new();
    for &e in alg.idempotents() {
        // weakened (ii): map(e) is the identity of map(A)
        if !image.iter().all(|&y| alg.mul(map[e], y) == y) {
            continue;
        }
        for bar in endos {
            let cond_i = alg.elements().all(|a| {
                bar[map[a]] == alg.mul(e, a) && map[bar[a]] == alg.mul(map[e], a)
            });
            if cond_i {
                let normalized: Vec<usize> =
                    alg.elements().map(|a| alg.mul(e, bar[a])).collect();
                if !hits.contains(&(normalized.clone(), e)) {
                    hits.push((normalized, e));
                }
            }
        }
    }
    hits.sort();
    hits.dedup();
    match hits.len() {
        0 => None,
        1 => hits.pop(),
        _ => {
            let es: Vec<usize> = hits.iter().map(|(_, e)| *e).collect();
            panic!("relative inverse is not unique: idempotents {es:?}");
        }
    }
}

/// The inverse semigroup iend(A) of relatively invertible endomorphisms,
/// together with its composition table.
pub struct IendStructure {
    pub endos: Vec<RelInvertibleEndo>,
    pub table: InverseSemigroup,
}

/// Enumerates all endomorphisms, filters the relatively invertible ones,
/// and certifies that the result is closed under composition and forms
/// an inverse semigroup.
pub fn rel_invertible_endos(alg: &CliffordAlgebra, caps: &Caps) -> Result<IendStructure> {
    let endos = all_endomorphisms(alg.base().base(), caps)?;
    let mut members: Vec<RelInvertibleEndo> = Vec::new();
    for map in &endos {
        if let Some((bar, e)) = relative_inverse(alg, &endos, map) {
            check_rel_invertible(alg, map, &bar, e)?;
            members.push(RelInvertibleEndo {
                map: map.clone(),
                bar,
                e,
            });
        }
    }
    let m = members.len();
    let mut table = vec![0usize; m * m];
    for (i, phi) in members.iter().enumerate() {
        for (j, psi) in members.iter().enumerate() {
            let composed: Vec<usize> = alg.elements().map(|a| phi.map[psi.map[a]]).collect();
            let k = members
                .iter()
                .position(|m| m.map == composed)
                .ok_or_else(|| {
                    Error::InternalInvariantViolation(
                        "iend(A) is not closed under composition".into(),
                    )
                })?;
            table[i * m + j] = k;
        }
    }
    let sg = FiniteSemigroup::new(m, table)?;
    let inv = inverse_structure(&sg)
        .map_err(|e| Error::InternalInvariantViolation(format!("iend(A) not inverse: {e}")))?;
    // the inverse of phi in iend(A) is its bar
    for (i, phi) in members.iter().enumerate() {
        let j = inv.inv(i);
        if members[j].map != phi.bar {
            return Err(Error::InternalInvariantViolation(
                "inverse in iend(A) differs from the relative inverse".into(),
            ));
        }
    }
    Ok(IendStructure {
        endos: members,
        table: inv,
    })
}

/// Full definition of relative invertibility, checked literally.
pub fn check_rel_invertible(
    alg: &CliffordAlgebra,
    map: &[usize],
    bar: &[usize],
    e: usize,
) -> Result<()> {
    for a in alg.elements() {
        for b in alg.elements() {
            if map[alg.mul(a, b)] != alg.mul(map[a], map[b]) {
                return Err(Error::axiom("endomorphism", &[a, b]));
            }
            if bar[alg.mul(a, b)] != alg.mul(bar[a], bar[b]) {
                return Err(Error::axiom("endomorphism-bar", &[a, b]));
            }
        }
        if bar[map[a]] != alg.mul(e, a) {
            return Err(Error::axiom("rel-inv-(i)-left", &[a]));
        }
        if map[bar[a]] != alg.mul(map[e], a) {
            return Err(Error::axiom("rel-inv-(i)-right", &[a]));
        }
    }
    for &y in &image_set(bar) {
        if alg.mul(e, y) != y {
            return Err(Error::axiom("rel-inv-(ii)-bar", &[y]));
        }
    }
    for &y in &image_set(map) {
        if alg.mul(map[e], y) != y {
            return Err(Error::axiom("rel-inv-(ii)-map", &[y]));
        }
    }
    Ok(())
}

/// The inner endomorphism a -> b a b^-1.
pub fn inner_endo(alg: &CliffordAlgebra, b: usize) -> Vec<usize> {
    alg.elements()
        .map(|a| alg.mul(alg.mul(b, a), alg.inv(b)))
        .collect()
}

/// An isomorphism between unital ideals eA -> fA, stored with its
/// defining idempotents and the map on the domain elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialIso {
    pub dom_e: usize,
    pub ran_e: usize,
    /// pairs (a, image of a), sorted by a, covering eA
    pub map: Vec<(usize, usize)>,
}

impl PartialIso {
    pub fn apply(&self, a: usize) -> usize {
        self.map[self
            .map
            .binary_search_by_key(&a, |p| p.0)
            .expect("outside domain")]
        .1
    }

    pub fn domain(&self) -> Vec<usize> {
        self.map.iter().map(|p| p.0).collect()
    }

    /// Composition "self after other", with the usual partial-map domain
    /// restriction to other^-1(ran(other) ∩ dom(self)).
    pub fn compose(&self, alg: &CliffordAlgebra, other: &PartialIso) -> PartialIso {
        let e = alg.mul(self.dom_e, other.ran_e);
        let dom_e = other
            .map
            .iter()
            .find(|&&(_, img)| img == e)
            .map(|&(a, _)| a)
            .expect("ef' lies in the range of the first factor");
        let dom = alg.principal_ideal(dom_e);
        let map: Vec<(usize, usize)> = dom
            .into_iter()
            .map(|a| (a, self.apply(other.apply(a))))
            .collect();
        PartialIso {
            dom_e,
            ran_e: self.apply(e),
            map,
        }
    }
}

/// The inverse semigroup I_ui(A) of isomorphisms between unital ideals,
/// enumerated independently of iend(A).
pub struct IuiStructure {
    pub isos: Vec<PartialIso>,
    pub table: InverseSemigroup,
}

pub fn unital_ideal_isos(alg: &CliffordAlgebra, caps: &Caps) -> Result<IuiStructure> {
    let mut isos: Vec<PartialIso> = Vec::new();
    for &e in alg.idempotents() {
        let dom = alg.principal_ideal(e);
        let dom_table = sub_table(alg, &dom);
        for &f in alg.idempotents() {
            let ran = alg.principal_ideal(f);
            if dom.len() != ran.len() {
                continue;
            }
            let ran_table = sub_table(alg, &ran);
            for hom in all_isomorphisms(&dom_table, &ran_table, caps)? {
                let map: Vec<(usize, usize)> = dom
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| (a, ran[hom.apply(k)]))
                    .collect();
                isos.push(PartialIso { dom_e: e, ran_e: f, map });
            }
        }
    }
    isos.sort_by(|a, b| (a.dom_e, &a.map).cmp(&(b.dom_e, &b.map)));
    let m = isos.len();
    let mut table = vec![0usize; m * m];
    for (i, psi) in isos.iter().enumerate() {
        for (j, chi) in isos.iter().enumerate() {
            let composed = psi.compose(alg, chi);
            let k = isos
                .iter()
                .position(|c| *c == composed)
                .ok_or_else(|| {
                    Error::InternalInvariantViolation(
                        "I_ui(A) is not closed under composition".into(),
                    )
                })?;
            table[i * m + j] = k;
        }
    }
    let sg = FiniteSemigroup::new(m, table)?;
    let inv = inverse_structure(&sg)
        .map_err(|e| Error::InternalInvariantViolation(format!("I_ui(A) not inverse: {e}")))?;
    Ok(IuiStructure { isos, table: inv })
}

fn sub_table(alg: &CliffordAlgebra, elements: &[usize]) -> FiniteSemigroup {
    let k = elements.len();
    let mut table = vec![0usize; k * k];
    for (i, &a) in elements.iter().enumerate() {
        for (j, &b) in elements.iter().enumerate() {
            table[i * k + j] = elements
                .binary_search(&alg.mul(a, b))
                .expect("ideal is closed");
        }
    }
    FiniteSemigroup::new(k, table).expect("sub-table of a semigroup")
}

/// The verified bijection iend(A) -> I_ui(A): phi restricted to e_phi A.
/// Both sides are enumerated independently; the map is checked to be a
/// multiplicative bijection, its inverse psi -> phi_psi is checked to be
/// a homomorphism, and the idempotents of iend(A) are checked to be
/// exactly the multiplications a -> ea.
pub fn iend_iui_isomorphism(
    alg: &CliffordAlgebra,
    caps: &Caps,
) -> Result<(IendStructure, IuiStructure, Vec<usize>)> {
    let iend = rel_invertible_endos(alg, caps)?;
    let iui = unital_ideal_isos(alg, caps)?;
    if iend.endos.len() != iui.isos.len() {
        return Err(Error::InternalInvariantViolation(format!(
            "|iend(A)| = {} but |I_ui(A)| = {}",
            iend.endos.len(),
            iui.isos.len()
        )));
    }
    let mut pairing = Vec::with_capacity(iend.endos.len());
    for phi in &iend.endos {
        let dom = alg.principal_ideal(phi.e);
        let restricted = PartialIso {
            dom_e: phi.e,
            ran_e: phi.map[phi.e],
            map: dom.iter().map(|&a| (a, phi.map[a])).collect(),
        };
        let k = iui
            .isos
            .iter()
            .position(|c| *c == restricted)
            .ok_or_else(|| {
                Error::InternalInvariantViolation(
                    "restriction of a relatively invertible endo is missing from I_ui".into(),
                )
            })?;
        pairing.push(k);
    }
    let mut seen = pairing.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != pairing.len() {
        return Err(Error::InternalInvariantViolation(
            "iend -> I_ui is not injective".into(),
        ));
    }
    // multiplicativity of the inverse direction psi -> phi_psi, as in the
    // proof: check the pairing transports the composition tables.
    for i in 0..iend.endos.len() {
        for j in 0..iend.endos.len() {
            let k = iend.table.mul(i, j);
            if iui.table.mul(pairing[i], pairing[j]) != pairing[k] {
                return Err(Error::InternalInvariantViolation(
                    "iend -> I_ui is not multiplicative".into(),
                ));
            }
        }
    }
    // idempotents of iend(A) are exactly the multiplications a -> ea
    let mut mult_maps: Vec<Vec<usize>> = alg
        .idempotents()
        .iter()
        .map(|&e| alg.elements().map(|a| alg.mul(e, a)).collect())
        .collect();
    mult_maps.sort_unstable();
    let mut idem_maps: Vec<Vec<usize>> = iend
        .table
        .idempotents()
        .iter()
        .map(|&k| iend.endos[k].map.clone())
        .collect();
    idem_maps.sort_unstable();
    if mult_maps != idem_maps {
        return Err(Error::InternalInvariantViolation(
            "idempotents of iend(A) are not the idempotent multiplications".into(),
        ));
    }
    // each phi respects the component decomposition below e_phi
    for phi in &iend.endos {
        for &f in alg.idempotents() {
            if alg.base().natural_leq(f, phi.e) {
                let mut image: Vec<usize> =
                    alg.component(f).iter().map(|&a| phi.map[a]).collect();
                image.sort_unstable();
                if image != alg.component(phi.map[f]) {
                    return Err(Error::InternalInvariantViolation(
                        "phi does not map A_f onto A_{phi(f)}".into(),
                    ));
                }
            }
        }
    }
    Ok((iend, iui, pairing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::semigroup::inverse_structure;

    fn clifford(s: &FiniteSemigroup) -> CliffordAlgebra {
        certify_clifford(&inverse_structure(s).unwrap()).unwrap()
    }

    #[test]
    fn e2_components() {
        let alg = clifford(&instances::e2());
        assert_eq!(alg.components(), &[(0, vec![0]), (1, vec![1])]);
    }

    #[test]
    fn z2_single_component() {
        let alg = clifford(&instances::z2());
        assert_eq!(alg.components().len(), 1);
        assert_eq!(alg.component(0), &[0, 1]);
    }

    #[test]
    fn i2_is_not_clifford() {
        let inv = inverse_structure(&instances::i2()).unwrap();
        assert!(matches!(certify_clifford(&inv), Err(Error::NotClifford(_))));
    }

    #[test]
    fn e2_ideals() {
        let alg = clifford(&instances::e2());
        let ids = ideals(&alg).unwrap();
        let sets: Vec<Vec<usize>> = ids.iter().map(|i| i.elements.clone()).collect();
        assert_eq!(sets, vec![vec![1], vec![0, 1]]);
        assert!(ids.iter().all(|i| i.unit.is_some()));
        assert!(ids.iter().all(|i| i.idempotent));
    }

    #[test]
    fn z2_single_ideal() {
        let alg = clifford(&instances::z2());
        let ids = ideals(&alg).unwrap();
        assert_eq!(ids.len(), 1);
        assert_eq!(ids[0].elements, vec![0, 1]);
    }

    #[test]
    fn three_element_clifford_ideals() {
        let alg = clifford(&instances::three_element_clifford());
        let ids = ideals(&alg).unwrap();
        let sizes: Vec<usize> = ids.iter().map(|i| i.len()).collect();
        assert_eq!(sizes, vec![2, 3]);
    }

    #[test]
    fn singleton_multiplier_monoid_is_trivial() {
        let alg = clifford(&instances::e2());
        let ideal = Ideal::from_elements(&alg, vec![1]).unwrap();
        let m = multiplier_monoid(&alg, &ideal, &Caps::default()).unwrap();
        assert_eq!(m.elements.len(), 1);
    }

    #[test]
    fn unital_ideal_multipliers_match_the_ideal() {
        let alg = clifford(&instances::three_element_clifford());
        for ideal in ideals(&alg).unwrap() {
            let m = multiplier_monoid(&alg, &ideal, &Caps::default()).unwrap();
            let unit = ideal.unit.expect("chain ideals are unital");
            assert_eq!(m.elements.len(), ideal.len());
            m.check_unital_isomorphism(&alg, unit).unwrap();
        }
    }

    #[test]
    fn z2_component_invertible_multipliers() {
        let alg = clifford(&instances::three_element_clifford());
        let ideal = Ideal::from_elements(&alg, vec![1, 2]).unwrap();
        let m = multiplier_monoid(&alg, &ideal, &Caps::default()).unwrap();
        assert_eq!(m.invertible.len(), 2, "U(M(Z2)) is Z2");
    }

    #[test]
    fn invertible_multiplier_fixes_ideals() {
        let alg = clifford(&instances::three_element_clifford());
        let whole = Ideal::from_elements(&alg, (0..3).collect()).unwrap();
        let m = multiplier_monoid(&alg, &whole, &Caps::default()).unwrap();
        for &k in &m.invertible {
            let w = &m.elements[k];
            let winv = w.inverse(&alg).unwrap();
            for ideal in ideals(&alg).unwrap() {
                let mut conj: Vec<usize> = ideal
                    .elements
                    .iter()
                    .map(|&s| winv.right_apply(w.left_apply(s)))
                    .collect();
                conj.sort_unstable();
                assert_eq!(conj, ideal.elements, "w I w^-1 = I");
            }
            for &s in &whole.elements {
                // (ws)^-1 = s^-1 w^-1 and (sw)^-1 = w^-1 s^-1
                assert_eq!(alg.inv(w.left_apply(s)), winv.right_apply(alg.inv(s)));
                assert_eq!(alg.inv(w.right_apply(s)), winv.left_apply(alg.inv(s)));
            }
        }
    }

    #[test]
    fn e2_iend_has_two_elements() {
        let alg = clifford(&instances::e2());
        let endos = all_endomorphisms(alg.base().base(), &Caps::default()).unwrap();
        assert_eq!(endos.len(), 3, "id, constant-to-bottom, collapse");
        let iend = rel_invertible_endos(&alg, &Caps::default()).unwrap();
        assert_eq!(iend.endos.len(), 2);
    }

    #[test]
    fn group_iend_is_aut() {
        let alg = clifford(&instances::z2());
        let iend = rel_invertible_endos(&alg, &Caps::default()).unwrap();
        assert_eq!(iend.endos.len(), 1, "Aut(Z2) is trivial");
        let alg3 = clifford(&instances::cyclic(3));
        let iend3 = rel_invertible_endos(&alg3, &Caps::default()).unwrap();
        assert_eq!(iend3.endos.len(), 2, "Aut(Z3) has order 2");
    }

    #[test]
    fn inner_endos_are_relatively_invertible() {
        let alg = clifford(&instances::three_element_clifford());
        let iend = rel_invertible_endos(&alg, &Caps::default()).unwrap();
        for b in alg.elements() {
            let xi = inner_endo(&alg, b);
            let found = iend.endos.iter().find(|m| m.map == xi).expect("xi_b in iend");
            assert_eq!(found.e, alg.dom_idem(b));
            assert_eq!(found.bar, inner_endo(&alg, alg.inv(b)));
        }
    }

    #[test]
    fn iend_iui_match_on_small_algebras() {
        for s in [
            instances::e2(),
            instances::z2(),
            instances::three_element_clifford(),
        ] {
            let alg = clifford(&s);
            let (iend, iui, _) = iend_iui_isomorphism(&alg, &Caps::default()).unwrap();
            assert_eq!(iend.endos.len(), iui.isos.len());
        }
    }

    #[test]
    fn e2_iui_has_two_elements() {
        let alg = clifford(&instances::e2());
        let iui = unital_ideal_isos(&alg, &Caps::default()).unwrap();
        assert_eq!(iui.isos.len(), 2);
    }
}
