//! One-off generator for the data/ corpus files.

use tpact_core::clifford::certify_clifford;
use tpact_core::correspond::lambda_from_theta;
use tpact_core::instances;
use tpact_core::io;
use tpact_core::paction::{
    crossed_product_action, e2_z2_partial, trivial_action, z2_on_z2, z2_on_z3, FiniteGroup,
    TwistedPartialAction, WPair,
};
use tpact_core::semigroup::{inverse_structure, FiniteSemigroup};
use tpact_core::tmodule::{
    enumerate_transversals, idempotent_extension, idempotent_module, module_from_extension,
    ExtensionByS,
};
use tpact_core::Caps;

fn save(name: &str, comment: &str, body: String) {
    let text = format!("# {comment}\n{body}");
    let path = format!("data/{name}");
    std::fs::write(&path, text).unwrap();
    println!("wrote {path}");
}

fn clifford(s: &FiniteSemigroup) -> tpact_core::clifford::CliffordAlgebra {
    certify_clifford(&inverse_structure(s).unwrap()).unwrap()
}

/// Partial action of Z2 on the 3-element Clifford algebra, acting as
/// the identity on the bottom Z2 component.
fn clifford3_z2_partial() -> TwistedPartialAction {
    let a = clifford(&instances::three_element_clifford());
    let g = FiniteGroup::new(instances::z2()).unwrap();
    let domains = vec![vec![0, 1, 2], vec![1, 2]];
    let theta = vec![vec![0, 1, 2], vec![usize::MAX, 1, 2]];
    let w = vec![
        vec![WPair::identity(vec![0, 1, 2]), WPair::identity(vec![1, 2])],
        vec![WPair::identity(vec![1, 2]), WPair::identity(vec![1, 2])],
    ];
    TwistedPartialAction::verify(g, a, domains, theta, w).unwrap()
}

/// Global action of Z2 on the V semilattice swapping the two maximal
/// idempotents.
fn v3_swap() -> TwistedPartialAction {
    let a = clifford(&instances::v3());
    let g = FiniteGroup::new(instances::z2()).unwrap();
    let domains = vec![vec![0, 1, 2], vec![0, 1, 2]];
    let theta = vec![vec![0, 1, 2], vec![1, 0, 2]];
    let w = vec![
        vec![WPair::identity(vec![0, 1, 2]); 2],
        vec![WPair::identity(vec![0, 1, 2]); 2],
    ];
    TwistedPartialAction::verify(g, a, domains, theta, w).unwrap()
}

/// Global action of Z2 on Z3 by inversion, untwisted.
fn z3_inversion() -> TwistedPartialAction {
    let a = clifford(&instances::cyclic(3));
    let g = FiniteGroup::new(instances::z2()).unwrap();
    let domains = vec![vec![0, 1, 2], vec![0, 1, 2]];
    let theta = vec![vec![0, 1, 2], vec![0, 2, 1]];
    let w = vec![
        vec![WPair::identity(vec![0, 1, 2]); 2],
        vec![WPair::identity(vec![0, 1, 2]); 2],
    ];
    TwistedPartialAction::verify(g, a, domains, theta, w).unwrap()
}

fn main() {
    std::fs::create_dir_all("data").unwrap();
    let caps = Caps::default();

    // plain tables
    save("e2.sgp", "two-element meet-semilattice, top at 0", io::write_sgp(&instances::e2()));
    save("z2.sgp", "cyclic group of order 2", io::write_sgp(&instances::z2()));
    save("z3.sgp", "cyclic group of order 3", io::write_sgp(&instances::cyclic(3)));
    save("z4.sgp", "cyclic group of order 4", io::write_sgp(&instances::cyclic(4)));
    save("z2z2.sgp", "Klein four-group", io::write_sgp(&instances::z2z2()));
    save("chain3.sgp", "three-element chain semilattice", io::write_sgp(&instances::chain(3)));
    save("v3.sgp", "V semilattice: two maximal idempotents over a bottom", io::write_sgp(&instances::v3()));
    save(
        "clifford3.sgp",
        "three-element semilattice of groups: trivial top, Z2 bottom",
        io::write_sgp(&instances::three_element_clifford()),
    );
    save(
        "i2.sgp",
        "symmetric inverse monoid on two points (7 elements)",
        io::write_sgp(&instances::i2()),
    );
    save(
        "b2.sgp",
        "five-element combinatorial Brandt semigroup",
        io::write_sgp(&instances::b2()),
    );

    // actions
    save(
        "e2_z2.tpa",
        "partial action of Z2 on the two-chain: the generator fixes the bottom ideal",
        io::write_tpa(&e2_z2_partial()),
    );
    save(
        "z2_twist.tpa",
        "global Z2-on-Z2 action with the nontrivial twist (crossed product Z4)",
        io::write_tpa(&z2_on_z2(true)),
    );
    save(
        "z2_plain.tpa",
        "global Z2-on-Z2 action, untwisted (crossed product Klein)",
        io::write_tpa(&z2_on_z2(false)),
    );
    save(
        "z2_on_z3_c1.tpa",
        "global Z2-on-Z3 action twisted by translation",
        io::write_tpa(&z2_on_z3(1)),
    );
    save(
        "clifford3_z2_partial.tpa",
        "partial action of Z2 on the three-element Clifford algebra",
        io::write_tpa(&clifford3_z2_partial()),
    );
    save(
        "v3_swap.tpa",
        "global Z2 action on the V semilattice swapping the maximal idempotents",
        io::write_tpa(&v3_swap()),
    );
    save(
        "z3_inversion.tpa",
        "global Z2 action on Z3 by inversion",
        io::write_tpa(&z3_inversion()),
    );

    // modules
    let a_e2 = clifford(&instances::e2());
    let a_chain3 = clifford(&instances::chain(3));
    let a_v3 = clifford(&instances::v3());
    let a_c3 = clifford(&instances::three_element_clifford());
    save(
        "m01_idem_e2.tsm",
        "idempotent module over the two-chain",
        io::write_tsm(&idempotent_module(&a_e2).unwrap()),
    );
    save(
        "m02_idem_chain3.tsm",
        "idempotent module over the three-chain",
        io::write_tsm(&idempotent_module(&a_chain3).unwrap()),
    );
    save(
        "m03_idem_v3.tsm",
        "idempotent module over the V semilattice",
        io::write_tsm(&idempotent_module(&a_v3).unwrap()),
    );
    save(
        "m04_idem_clifford3.tsm",
        "idempotent module of the three-element Clifford algebra over its semilattice",
        io::write_tsm(&idempotent_module(&a_c3).unwrap()),
    );
    let from_action = |tpa: &TwistedPartialAction| lambda_from_theta(tpa).unwrap().module;
    save(
        "m05_e2_z2.tsm",
        "module of the E2/Z2 partial action",
        io::write_tsm(&from_action(&e2_z2_partial())),
    );
    save(
        "m06_z2_twist.tsm",
        "module of the twisted Z2-on-Z2 action (crossed product Z4)",
        io::write_tsm(&from_action(&z2_on_z2(true))),
    );
    save(
        "m07_z2_plain.tsm",
        "module of the untwisted Z2-on-Z2 action",
        io::write_tsm(&from_action(&z2_on_z2(false))),
    );
    save(
        "m08_z2_on_z3.tsm",
        "module of the translated Z2-on-Z3 action",
        io::write_tsm(&from_action(&z2_on_z3(1))),
    );
    save(
        "m09_clifford3_z2.tsm",
        "module of the partial Z2 action on the three-element Clifford algebra",
        io::write_tsm(&from_action(&clifford3_z2_partial())),
    );
    save(
        "m10_v3_swap.tsm",
        "module of the V-swap action",
        io::write_tsm(&from_action(&v3_swap())),
    );
    save(
        "m11_klein_on_clifford3.tsm",
        "module of the trivial Klein action on the three-element Clifford algebra",
        io::write_tsm(&from_action(&trivial_action(
            FiniteGroup::new(instances::z2z2()).unwrap(),
            a_c3.clone(),
        ))),
    );
    save(
        "m12_z3_inversion.tsm",
        "module of the Z2-on-Z3 inversion action",
        io::write_tsm(&from_action(&z3_inversion())),
    );

    // extensions by an inverse semigroup
    save(
        "x_clifford3_over_ea.ext",
        "the extension A -> A -> E(A) for the three-element Clifford algebra",
        io::write_ext_s(&idempotent_extension(&a_c3).unwrap()),
    );
    {
        let a = clifford(&instances::z2());
        let z4 = inverse_structure(&instances::cyclic(4)).unwrap();
        let s = inverse_structure(&instances::z2()).unwrap();
        let ext = ExtensionByS::new(a, z4, s, vec![0, 2], vec![0, 1, 0, 1]).unwrap();
        save(
            "x_z4_over_z2.ext",
            "the classical extension Z2 -> Z4 -> Z2",
            io::write_ext_s(&ext),
        );
    }
    {
        // global Z2 action on the three-element Clifford algebra; the
        // refinement has comparable non-idempotent fibers, so one of
        // the two transversals is not order-preserving
        let tpa = trivial_action(FiniteGroup::new(instances::z2()).unwrap(), a_c3.clone());
        let cp = crossed_product_action(&tpa).unwrap();
        let refinement = tpact_core::paction::refine_extension(&cp.ext).unwrap();
        save(
            "x_clifford3_global_z2.ext",
            "refined crossed product of the global Z2 action on the three-element Clifford algebra",
            io::write_ext_s(&refinement.ext_s),
        );
        let all = enumerate_transversals(&refinement.ext_s, &caps).unwrap();
        let bad = all
            .iter()
            .find(|rho| !rho.is_order_preserving(&refinement.ext_s))
            .expect("a non-order-preserving transversal exists");
        let m = module_from_extension(&refinement.ext_s, bad).unwrap();
        assert!(!m.is_sieben().holds);
        save(
            "m13_nonsieben.tsm",
            "a valid module that fails the Sieben condition (from a non-order-preserving transversal)",
            io::write_tsm(&m),
        );
    }
    {
        let a = clifford(&instances::cyclic(3));
        let tpa = z3_inversion();
        let _ = &a;
        let cp = crossed_product_action(&tpa).unwrap();
        let refinement = tpact_core::paction::refine_extension(&cp.ext).unwrap();
        save(
            "x_s3_over_z2.ext",
            "refined crossed product of the Z2-on-Z3 inversion action (U is the symmetric group S3)",
            io::write_ext_s(&refinement.ext_s),
        );
    }

    // extensions by a group
    {
        let cp = crossed_product_action(&e2_z2_partial()).unwrap();
        save(
            "g_e2_z2.ext",
            "the E2/Z2 crossed product as an extension by the group Z2",
            io::write_ext_g(&cp.ext),
        );
        let cp2 = crossed_product_action(&clifford3_z2_partial()).unwrap();
        save(
            "g_clifford3_z2.ext",
            "admissible extension of the three-element Clifford algebra by Z2",
            io::write_ext_g(&cp2.ext),
        );
    }

    // a deliberately corrupted bundle for the failure path
    {
        let m = from_action(&z2_on_z2(true));
        let mut text = io::write_tsm(&m);
        // swap the two entries of the last F row; this breaks axiom (v)
        let lines: Vec<&str> = text.trim_end().lines().collect();
        let mut lines: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
        let last = lines.last().unwrap().clone();
        let toks: Vec<&str> = last.split_whitespace().collect();
        *lines.last_mut().unwrap() = format!("{} {}", toks[1], toks[0]);
        text = lines.join("\n");
        text.push('\n');
        save(
            "bad_corrupted_f.tsm",
            "corrupted twist table: fails the module axioms (kept for the failure-path tests)",
            text,
        );
    }
    println!("done");
}
