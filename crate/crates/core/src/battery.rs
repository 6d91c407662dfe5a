//! The property battery: named checks over semigroups, modules,
//! actions, extensions and the generated suite. The command-line
//! verifier prints these as CHECK lines; the acceptance suite
//! aggregates them per criterion.

use crate::caps::Caps;
use crate::clifford::certify_clifford;
use crate::correspond::{
    check_phi_equivalence, lambda_equivalence_transfers, lambda_from_theta, roundtrip_lambda,
    roundtrip_theta, theta_equivalence_transfers, theta_from_lambda,
};
use crate::error::Result;
use crate::iso::find_isomorphism;
use crate::paction::{
    check_tau_rho_correspondence, crossed_product_action, find_tpa_equivalence, is_admissible,
    refine_extension, restrict_to_idempotents, z2_on_z2, z2_on_z3, ExtensionByG,
    TwistedPartialAction,
};
use crate::tmodule::ExtensionByS;
use crate::semigroup::{
    certify_group, enumerate_congruences, inverse_structure, is_e_unitary,
    max_group_image, sigma_congruence, FiniteSemigroup,
};
use crate::tmodule::{
    crossed_product_module, enumerate_transversals, find_module_equivalence,
    module_from_extension, module_invariants, natural_transversal_module_check, TwistedModule,
};

/// One named check; passing means no witness.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub witness: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    fn ok(name: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            witness: None,
        }
    }

    fn of(name: impl Into<String>, outcome: Result<()>) -> Check {
        Check {
            name: name.into(),
            witness: outcome.err().map(|e| e.to_string()),
        }
    }

    pub fn render(&self) -> String {
        match &self.witness {
            None => format!("CHECK {}: PASS", self.name),
            Some(w) => format!("CHECK {}: FAIL witness={}", self.name, w),
        }
    }
}

fn guard<T>(name: &str, r: Result<T>, out: &mut Vec<Check>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            out.push(Check {
                name: name.to_string(),
                witness: Some(e.to_string()),
            });
            None
        }
    }
}

/// Structure checks for a raw multiplication table: inverse structure,
/// the inverse laws, the natural order, sigma and its group quotient,
/// agreement of the two E-unitary characterizations, and (for n <= 8)
/// minimality of sigma among group congruences by brute force.
pub fn semigroup_checks(tag: &str, s: &FiniteSemigroup) -> Vec<Check> {
    let mut out = Vec::new();
    let inv = match guard(&format!("{tag}/inverse-structure"), inverse_structure(s), &mut out) {
        Some(v) => v,
        None => return out,
    };
    out.push(Check::ok(format!("{tag}/inverse-structure")));
    let mut laws = None;
    'laws: for a in inv.elements() {
        if inv.inv(inv.inv(a)) != a {
            laws = Some(format!("(s^-1)^-1 != s at {a}"));
            break;
        }
        for b in inv.elements() {
            if inv.inv(inv.mul(a, b)) != inv.mul(inv.inv(b), inv.inv(a)) {
                laws = Some(format!("(st)^-1 != t^-1 s^-1 at ({a},{b})"));
                break 'laws;
            }
        }
    }
    out.push(Check {
        name: format!("{tag}/inverse-laws"),
        witness: laws,
    });
    let mut order = None;
    'order: for a in inv.elements() {
        if !inv.natural_leq(a, a) {
            order = Some(format!("not reflexive at {a}"));
            break;
        }
        for b in inv.elements() {
            if a != b && inv.natural_leq(a, b) && inv.natural_leq(b, a) {
                order = Some(format!("not antisymmetric at ({a},{b})"));
                break 'order;
            }
            for c in inv.elements() {
                if inv.natural_leq(a, b) && inv.natural_leq(b, c) && !inv.natural_leq(a, c) {
                    order = Some(format!("not transitive at ({a},{b},{c})"));
                    break 'order;
                }
            }
        }
    }
    out.push(Check {
        name: format!("{tag}/natural-order"),
        witness: order,
    });
    out.push(Check::of(
        format!("{tag}/sigma-group-quotient"),
        max_group_image(&inv).map(|_| ()),
    ));
    out.push(Check::of(
        format!("{tag}/e-unitary-agreement"),
        is_e_unitary(&inv).map(|_| ()),
    ));
    if s.n() <= 8 {
        let check = (|| -> Result<()> {
            let sigma = sigma_congruence(&inv)?;
            for cong in enumerate_congruences(s) {
                let (q, _) = cong.quotient(s)?;
                if certify_group(&q).is_ok() && !sigma.refines(&cong) {
                    return Err(crate::error::Error::InternalInvariantViolation(
                        "sigma is not contained in a group congruence".into(),
                    ));
                }
            }
            Ok(())
        })();
        out.push(Check::of(format!("{tag}/sigma-minimality"), check));
    }
    out
}

/// Checks for a verified twisted module: the derived identities, the
/// natural-transversal formulas, crossed-product soundness, and the
/// round trip when the module is Sieben over an E-unitary semigroup.
pub fn module_checks(tag: &str, m: &TwistedModule) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check::of(
        format!("{tag}/module-invariants"),
        module_invariants(m),
    ));
    out.push(Check::of(
        format!("{tag}/natural-transversal"),
        natural_transversal_module_check(m),
    ));
    out.push(Check::of(
        format!("{tag}/crossed-product"),
        crossed_product_module(m).map(|_| ()),
    ));
    let applicable = m.is_sieben().holds && matches!(is_e_unitary(&m.s), Ok(true));
    if applicable {
        let check = roundtrip_lambda(m).map(|rep| {
            if rep.verdict {
                Ok(())
            } else {
                Err(crate::error::Error::InternalInvariantViolation(format!(
                    "failing identities: {:?}",
                    rep.diagnostics
                        .iter()
                        .filter(|(_, w)| w.is_some())
                        .collect::<Vec<_>>()
                )))
            }
        });
        out.push(Check::of(
            format!("{tag}/roundtrip-lambda"),
            check.and_then(|r| r),
        ));
    }
    out
}

/// Checks for a verified twisted partial action: crossed-product
/// soundness (including the displayed inverse formula), the inversion
/// formula, restriction to idempotents, refinement isomorphism, the
/// phi-equivalence of the two crossed products, and the exact round
/// trip through the module side.
pub fn action_checks(tag: &str, tpa: &TwistedPartialAction, caps: &Caps) -> Vec<Check> {
    let mut out = Vec::new();
    let cp = match guard(
        &format!("{tag}/crossed-soundness"),
        crossed_product_action(tpa),
        &mut out,
    ) {
        Some(cp) => cp,
        None => return out,
    };
    out.push(Check::ok(format!("{tag}/crossed-soundness")));
    let inv_formula = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        for x in tpa.group.elements() {
            for &a in tpa.domain(x) {
                tpa.theta_inverse(x, a);
            }
        }
    }));
    out.push(Check {
        name: format!("{tag}/theta-inverse-formula"),
        witness: inv_formula.err().map(|_| "formula mismatch".to_string()),
    });
    out.push(Check::of(
        format!("{tag}/restriction"),
        restrict_to_idempotents(tpa).map(|_| ()),
    ));
    let refinement_check = (|| -> Result<()> {
        let refinement = refine_extension(&cp.ext)?;
        let (restricted, _) = restrict_to_idempotents(tpa)?;
        let rcp = crossed_product_action(&restricted)?;
        let iso = find_isomorphism(refinement.ext_s.s.base(), rcp.u.base(), caps)?;
        if iso.is_none() {
            return Err(crate::error::Error::InternalInvariantViolation(
                "refinement is not isomorphic to the idempotent crossed product".into(),
            ));
        }
        Ok(())
    })();
    out.push(Check::of(format!("{tag}/refinement-iso"), refinement_check));
    let phi_check = (|| -> Result<()> {
        let lft = lambda_from_theta(tpa)?;
        let built = theta_from_lambda(&lft.module)?;
        check_phi_equivalence(&lft.module, &built)
    })();
    out.push(Check::of(format!("{tag}/phi-equivalence"), phi_check));
    let rt = roundtrip_theta(tpa).map(|rep| {
        if rep.verdict {
            Ok(())
        } else {
            Err(crate::error::Error::InternalInvariantViolation(format!(
                "failing identities: {:?}",
                rep.diagnostics
                    .iter()
                    .filter(|(_, w)| w.is_some())
                    .collect::<Vec<_>>()
            )))
        }
    });
    out.push(Check::of(
        format!("{tag}/roundtrip-theta"),
        rt.and_then(|r| r),
    ));
    out
}

/// Checks for an extension by an inverse semigroup: enumerate the
/// transversals (within the cap), verify Sieben iff order-preserving
/// per transversal, and verify any two extracted modules equivalent.
pub fn ext_s_checks(tag: &str, ext: &ExtensionByS, caps: &Caps) -> Vec<Check> {
    let mut out = Vec::new();
    let result = (|| -> Result<()> {
        let all = enumerate_transversals(ext, caps)?;
        let mut modules = Vec::with_capacity(all.len());
        for rho in &all {
            let m = module_from_extension(ext, rho)?;
            if m.is_sieben().holds != rho.is_order_preserving(ext) {
                return Err(crate::error::Error::InternalInvariantViolation(
                    "Sieben does not match order-preservation".into(),
                ));
            }
            modules.push(m);
        }
        for m2 in &modules[1..] {
            if find_module_equivalence(&modules[0], m2, caps)?.is_none() {
                return Err(crate::error::Error::InternalInvariantViolation(
                    "transversal modules are not equivalent".into(),
                ));
            }
        }
        Ok(())
    })();
    out.push(Check::of(
        format!("{tag}/sieben-iff-order-preserving"),
        result,
    ));
    out
}

/// Checks for an extension by a group: refinement soundness, the
/// tau-rho correspondence round trips, admissibility search, and the
/// crossed-product resolution when admissible.
pub fn ext_g_checks(tag: &str, ext: &ExtensionByG, caps: &Caps) -> Vec<Check> {
    let mut out = Vec::new();
    let refinement = match guard(&format!("{tag}/refinement"), refine_extension(ext), &mut out) {
        Some(r) => r,
        None => return out,
    };
    out.push(Check::ok(format!("{tag}/refinement")));
    out.push(Check::of(
        format!("{tag}/tau-rho-roundtrip"),
        check_tau_rho_correspondence(ext, &refinement, caps).map(|_| ()),
    ));
    let adm_check = (|| -> Result<()> {
        let adm = is_admissible(ext, caps)?;
        if adm.tau.is_some() {
            crate::correspond::admissible_to_crossed_product(ext, None, caps)?;
        }
        Ok(())
    })();
    out.push(Check::of(format!("{tag}/admissibility"), adm_check));
    out
}

/// Criterion: equivalence preservation in both directions, on three
/// constructed equivalent action pairs, plus the certified negative
/// (twisted against untwisted Z2-on-Z2, separated by an element-order
/// census of the crossed products).
pub fn equivalence_preservation_checks(caps: &Caps) -> Vec<Check> {
    let mut out = Vec::new();
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    for (c1, c2) in pairs {
        let result = (|| -> Result<()> {
            let t1 = z2_on_z3(c1);
            let t2 = z2_on_z3(c2);
            let eps = find_tpa_equivalence(&t1, &t2, caps)?.ok_or_else(|| {
                crate::error::Error::InternalInvariantViolation("pair not equivalent".into())
            })?;
            let g = theta_equivalence_transfers(&t1, &t2, &eps)?;
            let l1 = lambda_from_theta(&t1)?;
            let l2 = lambda_from_theta(&t2)?;
            lambda_equivalence_transfers(&l1.module, &l2.module, &g)?;
            Ok(())
        })();
        out.push(Check::of(
            format!("equivalence-preserved[z2-on-z3:{c1}vs{c2}]"),
            result,
        ));
    }
    let negative = (|| -> Result<()> {
        let t1 = z2_on_z2(true);
        let t2 = z2_on_z2(false);
        if find_tpa_equivalence(&t1, &t2, caps)?.is_some() {
            return Err(crate::error::Error::InternalInvariantViolation(
                "twisted and untwisted must not be equivalent".into(),
            ));
        }
        let cp1 = crossed_product_action(&t1)?;
        let cp2 = crossed_product_action(&t2)?;
        let census = |u: &crate::semigroup::InverseSemigroup| {
            let mut orders: Vec<usize> =
                u.elements().map(|p| u.base().index_period(p).1).collect();
            orders.sort_unstable();
            orders
        };
        if census(&cp1.u) == census(&cp2.u) {
            return Err(crate::error::Error::InternalInvariantViolation(
                "order censuses must differ".into(),
            ));
        }
        if find_isomorphism(cp1.u.base(), cp2.u.base(), caps)?.is_some() {
            return Err(crate::error::Error::InternalInvariantViolation(
                "Z4 and Z2xZ2 must not be isomorphic".into(),
            ));
        }
        Ok(())
    })();
    out.push(Check::of("equivalence-negative[z2-on-z2]", negative));
    out
}

/// Criterion: the classical extension sanity check. The twisted global
/// Z2-on-Z2 crossed product is Z4 (an element of order 4 exists); the
/// untwisted one is the Klein group (no element of order 4).
pub fn classical_sanity_checks() -> Vec<Check> {
    let result = (|| -> Result<()> {
        let twisted = crossed_product_action(&z2_on_z2(true))?;
        let plain = crossed_product_action(&z2_on_z2(false))?;
        let order4 = |u: &crate::semigroup::InverseSemigroup| {
            u.elements().any(|p| u.base().index_period(p).1 == 4)
        };
        if twisted.u.n() != 4 || plain.u.n() != 4 {
            return Err(crate::error::Error::InternalInvariantViolation(
                "crossed products must have 4 elements".into(),
            ));
        }
        if !order4(&twisted.u) {
            return Err(crate::error::Error::InternalInvariantViolation(
                "twisted product must contain an element of order 4".into(),
            ));
        }
        if order4(&plain.u) {
            return Err(crate::error::Error::InternalInvariantViolation(
                "untwisted product must not contain an element of order 4".into(),
            ));
        }
        Ok(())
    })();
    vec![Check::of("classical-extension-sanity", result)]
}

/// Criterion: independent enumerations of iend(A) and I_ui(A) match
/// through the restriction bijection, for every chain algebra with at
/// most five elements.
pub fn iend_iui_checks(caps: &Caps) -> Vec<Check> {
    crate::suite::chain_catalog(5)
        .iter()
        .map(|entry| {
            Check::of(
                format!("iend-iui[{}]", entry.label),
                crate::clifford::iend_iui_isomorphism(&entry.algebra, caps).map(|_| ()),
            )
        })
        .collect()
}

/// The extension-by-S corpus derived from a crossed product: the module
/// crossed product over each enumerated transversal of the refinement.
pub fn derived_ext_s(tpa: &TwistedPartialAction) -> Result<ExtensionByS> {
    let cp = crossed_product_action(tpa)?;
    let refinement = refine_extension(&cp.ext)?;
    Ok(refinement.ext_s)
}

/// Idempotent-structure checks on a certified Clifford table: ideals
/// with their flags and pairwise meet law, multiplier monoids on every
/// ideal within the cap.
pub fn clifford_checks(tag: &str, s: &FiniteSemigroup, caps: &Caps) -> Vec<Check> {
    let mut out = Vec::new();
    let alg = match inverse_structure(s).and_then(|i| certify_clifford(&i)) {
        Ok(a) => a,
        Err(_) => return out, // not a Clifford table; nothing to check here
    };
    let result = (|| -> Result<()> {
        let ideals = crate::clifford::ideals(&alg)?;
        for ideal in &ideals {
            if ideal.len() <= caps.max_mult {
                let monoid = crate::clifford::multiplier_monoid(&alg, ideal, caps)?;
                if let Some(unit) = ideal.unit {
                    monoid.check_unital_isomorphism(&alg, unit)?;
                }
            }
        }
        Ok(())
    })();
    out.push(Check::of(format!("{tag}/ideals-and-multipliers"), result));
    out
}
