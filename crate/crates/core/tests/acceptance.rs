//! Acceptance suite: one check per criterion, each printed as a
//! PASS/FAIL line, with the stated instance counts and time budgets
//! pinned in the assertions.

use std::path::PathBuf;
use std::time::{Duration, Instant};
use tpact_core::battery;
use tpact_core::caps::Caps;
use tpact_core::clifford::iend_iui_isomorphism;
use tpact_core::correspond::{
    check_phi_equivalence, lambda_from_theta, roundtrip_lambda, roundtrip_theta,
    theta_from_lambda,
};
use tpact_core::io;
use tpact_core::iso::find_isomorphism;
use tpact_core::paction::{
    crossed_product_action, refine_extension, restrict_to_idempotents, TwistedPartialAction,
};
use tpact_core::semigroup::{certify_group, enumerate_congruences, sigma_congruence};
use tpact_core::suite::{chain_catalog, generate_suite};
use tpact_core::tmodule::{enumerate_transversals, module_from_extension};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn data_files(ext: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(data_dir())
        .expect("data directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            if path.extension().and_then(|x| x.to_str()) == Some(ext) {
                let name = path.file_name()?.to_str()?.to_string();
                Some((name, std::fs::read_to_string(&path).ok()?))
            } else {
                None
            }
        })
        .collect();
    out.sort();
    out
}

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate { failures: Vec::new() }
    }

    fn criterion(&mut self, id: usize, name: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => println!("ACCEPTANCE {id:02} {name}: PASS ({detail})"),
            Err(why) => {
                println!("ACCEPTANCE {id:02} {name}: FAIL ({why})");
                self.failures.push(format!("{id:02} {name}: {why}"));
            }
        }
    }

    fn finish(self) {
        assert!(
            self.failures.is_empty(),
            "failed criteria:\n{}",
            self.failures.join("\n")
        );
    }
}

fn suite_instances(caps: &Caps) -> Vec<TwistedPartialAction> {
    generate_suite(0, 200, caps).expect("suite generation")
}

#[test]
fn acceptance() {
    let caps = Caps::default();
    let mut gate = Gate::new();
    let suite = suite_instances(&caps);

    // 1: round trip Theta -> Lambda -> Theta', exact, canonical nu
    let t0 = Instant::now();
    let c1 = (|| -> Result<String, String> {
        if suite.len() < 50 {
            return Err(format!("only {} instances", suite.len()));
        }
        for (k, tpa) in suite.iter().enumerate() {
            let rep = roundtrip_theta(tpa).map_err(|e| format!("instance {k}: {e}"))?;
            if !rep.verdict {
                return Err(format!("instance {k}: {:?}", rep.diagnostics));
            }
        }
        let elapsed = t0.elapsed();
        if elapsed > Duration::from_secs(30) {
            return Err(format!("took {elapsed:?}, budget 30s"));
        }
        Ok(format!("{} instances in {elapsed:?}", suite.len()))
    })();
    gate.criterion(1, "roundtrip-theta", c1);

    // 2: round trip Lambda -> Theta -> Lambda' over suite-derived and
    // hand-built Sieben modules
    let t0 = Instant::now();
    let c2 = (|| -> Result<String, String> {
        let mut modules = Vec::new();
        for (k, tpa) in suite.iter().enumerate() {
            let lft = lambda_from_theta(tpa).map_err(|e| format!("instance {k}: {e}"))?;
            modules.push((format!("suite[{k}]"), lft.module));
        }
        let mut handbuilt = 0usize;
        for (name, text) in data_files("tsm") {
            let m = match io::parse_tsm(&text) {
                Ok(m) => m,
                Err(_) => continue, // the corrupted bundle
            };
            let applicable = m.is_sieben().holds
                && tpact_core::semigroup::is_e_unitary(&m.s).map_err(|e| e.to_string())?;
            if applicable {
                handbuilt += 1;
                modules.push((name, m));
            }
        }
        if handbuilt < 10 {
            return Err(format!("only {handbuilt} hand-built Sieben bundles"));
        }
        let total = modules.len();
        for (name, m) in modules {
            let rep = roundtrip_lambda(&m).map_err(|e| format!("{name}: {e}"))?;
            if !rep.verdict {
                return Err(format!("{name}: {:?}", rep.diagnostics));
            }
        }
        let elapsed = t0.elapsed();
        if elapsed > Duration::from_secs(30) {
            return Err(format!("took {elapsed:?}, budget 30s"));
        }
        Ok(format!(
            "{total} modules ({handbuilt} hand-built) in {elapsed:?}"
        ))
    })();
    gate.criterion(2, "roundtrip-lambda", c2);

    // 3: crossed-product soundness (associativity, unique inverses,
    // commuting idempotents, the displayed inverse formula)
    let c3 = (|| -> Result<String, String> {
        for (k, tpa) in suite.iter().enumerate() {
            crossed_product_action(tpa).map_err(|e| format!("instance {k}: {e}"))?;
        }
        Ok(format!("{} crossed products", suite.len()))
    })();
    gate.criterion(3, "crossed-product-soundness", c3);

    // 4: refinement is E-unitary with ker kappa = sigma and isomorphic
    // to the idempotent crossed product
    let c4 = (|| -> Result<String, String> {
        for (k, tpa) in suite.iter().enumerate() {
            let cp = crossed_product_action(tpa).map_err(|e| format!("instance {k}: {e}"))?;
            let refinement =
                refine_extension(&cp.ext).map_err(|e| format!("instance {k}: {e}"))?;
            let (restricted, _) =
                restrict_to_idempotents(tpa).map_err(|e| format!("instance {k}: {e}"))?;
            let rcp =
                crossed_product_action(&restricted).map_err(|e| format!("instance {k}: {e}"))?;
            let iso = find_isomorphism(refinement.ext_s.s.base(), rcp.u.base(), &caps)
                .map_err(|e| format!("instance {k}: {e}"))?;
            if iso.is_none() {
                return Err(format!("instance {k}: refinement not isomorphic"));
            }
        }
        Ok(format!("{} refinements", suite.len()))
    })();
    gate.criterion(4, "extension-refinement", c4);

    // 5: phi-equivalence of the two crossed products for every
    // suite-derived Sieben module
    let c5 = (|| -> Result<String, String> {
        for (k, tpa) in suite.iter().enumerate() {
            let lft = lambda_from_theta(tpa).map_err(|e| format!("instance {k}: {e}"))?;
            let built =
                theta_from_lambda(&lft.module).map_err(|e| format!("instance {k}: {e}"))?;
            check_phi_equivalence(&lft.module, &built)
                .map_err(|e| format!("instance {k}: {e}"))?;
        }
        Ok(format!("{} equivalences", suite.len()))
    })();
    gate.criterion(5, "phi-equivalence", c5);

    // 6: iend(A) and I_ui(A) matched by the restriction bijection over
    // the chain catalog with |A| <= 5
    let c6 = (|| -> Result<String, String> {
        let catalog = chain_catalog(5);
        for entry in &catalog {
            iend_iui_isomorphism(&entry.algebra, &caps)
                .map_err(|e| format!("{}: {e}", entry.label))?;
        }
        Ok(format!("{} algebras", catalog.len()))
    })();
    gate.criterion(6, "iend-iui-isomorphism", c6);

    // 7: Sieben iff order-preserving, for every corpus extension by an
    // inverse semigroup with at most 200 enumerable transversals
    let c7 = (|| -> Result<String, String> {
        let mut ext_count = 0usize;
        let mut rho_count = 0usize;
        let mut non_op = 0usize;
        for (name, text) in data_files("ext") {
            let bundle = io::parse_ext(&text).map_err(|e| format!("{name}: {e}"))?;
            let ext = match bundle {
                io::ExtBundle::ByS(ext) => ext,
                io::ExtBundle::ByG(_) => continue,
            };
            let bounded = Caps { max_witness: 200, ..caps };
            let all = enumerate_transversals(&ext, &bounded)
                .map_err(|e| format!("{name}: {e}"))?;
            ext_count += 1;
            for rho in &all {
                rho_count += 1;
                let m = module_from_extension(&ext, rho)
                    .map_err(|e| format!("{name}: {e}"))?;
                let op = rho.is_order_preserving(&ext);
                non_op += usize::from(!op);
                if m.is_sieben().holds != op {
                    return Err(format!("{name}: disagreement on a transversal"));
                }
            }
        }
        if ext_count == 0 {
            return Err("no by-S extensions in the corpus".into());
        }
        if non_op == 0 {
            return Err("no non-order-preserving transversal exercised".into());
        }
        Ok(format!(
            "{ext_count} extensions, {rho_count} transversals ({non_op} not order-preserving)"
        ))
    })();
    gate.criterion(7, "sieben-iff-order-preserving", c7);

    // 8: equivalence preservation in both directions plus the certified
    // negative pair
    let c8 = (|| -> Result<String, String> {
        let checks = battery::equivalence_preservation_checks(&caps);
        for check in &checks {
            if !check.passed() {
                return Err(check.render());
            }
        }
        Ok(format!("{} pairs", checks.len()))
    })();
    gate.criterion(8, "equivalence-preservation", c8);

    // 9: classical extension sanity (Z4 against Klein)
    let c9 = (|| -> Result<String, String> {
        for check in battery::classical_sanity_checks() {
            if !check.passed() {
                return Err(check.render());
            }
        }
        Ok("Z4 and Klein separated by order census".into())
    })();
    gate.criterion(9, "classical-extension-sanity", c9);

    // 10: sigma is contained in every group congruence, brute force
    // over all corpus tables with n <= 8
    let t0 = Instant::now();
    let c10 = (|| -> Result<String, String> {
        let mut tables = 0usize;
        for (name, text) in data_files("sgp") {
            let table = io::parse_sgp(&text).map_err(|e| format!("{name}: {e}"))?;
            if table.n() > 8 {
                continue;
            }
            let inv = match tpact_core::semigroup::inverse_structure(&table) {
                Ok(inv) => inv,
                Err(_) => continue,
            };
            tables += 1;
            let sigma = sigma_congruence(&inv).map_err(|e| format!("{name}: {e}"))?;
            for cong in enumerate_congruences(&table) {
                let (q, _) = cong.quotient(&table).map_err(|e| format!("{name}: {e}"))?;
                if certify_group(&q).is_ok() && !sigma.refines(&cong) {
                    return Err(format!("{name}: sigma not minimal"));
                }
            }
        }
        let elapsed = t0.elapsed();
        if elapsed > Duration::from_secs(60) {
            return Err(format!("took {elapsed:?}, budget 60s"));
        }
        Ok(format!("{tables} tables in {elapsed:?}"))
    })();
    gate.criterion(10, "sigma-minimality", c10);

    gate.finish();
}
