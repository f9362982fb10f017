use proptest::prelude::*;
use serde::Deserialize;

use slaglab::algebra::{
    contract, cross, hodge_star, multiplication_table, oct_mul, phi0, phi0_eval, psi0, wedge, FormError,
    ImOctonion, KForm, Octonion, TableEntry,
};

fn golden_table() -> Vec<TableEntry> {
    serde_json::from_str(include_str!("golden/octonion_table.json")).unwrap()
}

#[derive(Deserialize)]
struct GoldenForms {
    phi0: KForm,
    contract_phi0_e5: KForm,
    psi0: KForm,
}

fn golden_forms() -> GoldenForms {
    serde_json::from_str(include_str!("golden/forms.json")).unwrap()
}

fn table_product(t: &[TableEntry], i: usize, j: usize) -> Octonion {
    let e = t[(i - 1) * 8 + (j - 1)];
    Octonion::basis(e.k as usize).scale(e.sign as f64)
}

fn e(l: usize) -> ImOctonion {
    ImOctonion::basis(l)
}

#[test]
fn multiplication_matches_golden_table() {
    assert_eq!(multiplication_table(), golden_table());
}

#[test]
fn basis_products() {
    let t = golden_table();
    let i2 = oct_mul(&Octonion::basis(2), &Octonion::basis(2));
    assert_eq!(i2, Octonion::ONE.scale(-1.0));
    assert_eq!(oct_mul(&Octonion::basis(2), &Octonion::basis(5)), table_product(&t, 2, 5));
    for i in 1..=8 {
        assert_eq!(oct_mul(&Octonion::ONE, &Octonion::basis(i)), Octonion::basis(i));
        assert_eq!(oct_mul(&Octonion::basis(i), &Octonion::ONE), Octonion::basis(i));
    }
}

#[test]
fn cross_of_basis_from_table() {
    let t = golden_table();
    // Im(ē₃ e₂) = −Im(e₃ e₂)
    let expect = table_product(&t, 3, 2).scale(-1.0).imag();
    assert_eq!(cross(&e(2), &e(3)), expect);
    assert!((cross(&e(2), &e(3)) - e(4)).norm() < 1e-15);
}

#[test]
fn phi0_terms() {
    let p = phi0();
    assert_eq!(p.coeff(&[2, 3, 4]), 1.0);
    assert_eq!(p.coeff(&[2, 7, 8]), -1.0);
    assert_eq!(p.coeff(&[2, 3, 5]), 0.0);
    assert!(p.max_abs_diff(&golden_forms().phi0) < 1e-15);
    assert_eq!(p.terms().count(), 7);
}

#[test]
fn wedge_examples() {
    let e2 = KForm::basis(&[2]).unwrap();
    let e3 = KForm::basis(&[3]).unwrap();
    assert!(wedge(&e2, &e2).unwrap().is_zero(0.0));
    assert_eq!(wedge(&e2, &e3).unwrap(), KForm::basis(&[2, 3]).unwrap());
    let a = wedge(&KForm::basis(&[2, 3]).unwrap(), &KForm::basis(&[4, 5]).unwrap()).unwrap();
    let b = wedge(&KForm::basis(&[2, 4]).unwrap(), &KForm::basis(&[3, 5]).unwrap()).unwrap();
    assert_eq!(a, KForm::basis(&[2, 3, 4, 5]).unwrap());
    // (2,4,3,5) is one transposition from (2,3,4,5)
    assert_eq!(b, a.scale(-1.0));
    assert_eq!(
        wedge(&KForm::volume(), &e2),
        Err(FormError::DegreeOverflow(7, 1))
    );
}

#[test]
fn contraction_examples() {
    let c = contract(&KForm::basis(&[2, 3, 4]).unwrap(), &e(2)).unwrap();
    assert_eq!(c, KForm::basis(&[3, 4]).unwrap());
    let omega = contract(&phi0(), &e(5)).unwrap();
    assert!(omega.max_abs_diff(&golden_forms().contract_phi0_e5) < 1e-15);
    assert!(contract(&omega, &e(5)).unwrap().is_zero(1e-15));
    assert_eq!(contract(&KForm::scalar(1.0), &e(2)), Err(FormError::ZeroDegree));
}

#[test]
fn hodge_examples() {
    let s = hodge_star(&KForm::basis(&[2, 3, 4]).unwrap());
    assert_eq!(s, KForm::basis(&[5, 6, 7, 8]).unwrap());
    assert!(psi0().max_abs_diff(&golden_forms().psi0) < 1e-15);
    assert!(hodge_star(&KForm::scalar(1.0)).max_abs_diff(&KForm::volume()) < 1e-15);
}

#[test]
fn kform_json_shape() {
    let v: serde_json::Value = serde_json::to_value(KForm::basis(&[2, 3]).unwrap().scale(2.5)).unwrap();
    assert_eq!(v, serde_json::json!({"degree": 2, "terms": [{"idx": [2, 3], "c": 2.5}]}));
    let bad = r#"{"degree": 2, "terms": [{"idx": [3, 2], "c": 1.0}]}"#;
    assert!(serde_json::from_str::<KForm>(bad).is_err());
}

fn im() -> impl Strategy<Value = ImOctonion> {
    prop::array::uniform7(-3.0f64..3.0).prop_map(ImOctonion)
}

fn oct() -> impl Strategy<Value = Octonion> {
    prop::array::uniform8(-3.0f64..3.0).prop_map(Octonion)
}

fn form(degree: usize) -> impl Strategy<Value = KForm> {
    prop::collection::vec(-2.0f64..2.0, 35).prop_map(move |c| {
        let mut f = KForm::zero(degree);
        let idx: Vec<Vec<u8>> = combos(degree);
        for (i, t) in idx.iter().enumerate() {
            f = f.add(&KForm::basis(t).unwrap().scale(c[i % c.len()]));
        }
        f
    })
}

fn combos(k: usize) -> Vec<Vec<u8>> {
    fn go(start: u8, k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for l in start..=8 {
            cur.push(l);
            go(l + 1, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(2, k, &mut Vec::new(), &mut out);
    out
}

proptest! {
    #[test]
    fn phi_is_cross_inner(x in im(), y in im(), z in im()) {
        prop_assert!((phi0_eval(&x, &y, &z) - cross(&x, &y).dot(&z)).abs() < 1e-10);
    }

    #[test]
    fn double_cross(x in im(), y in im(), z in im()) {
        prop_assume!(x.norm() > 0.1);
        let u = x.normalized();
        let w = y.axpy(-y.dot(&u), &u);
        prop_assert!((cross(&u, &cross(&u, &w)) + w).norm() < 1e-10);
        prop_assert!((phi0_eval(&u, &cross(&u, &w), &z) + w.dot(&z)).abs() < 1e-10);
    }

    #[test]
    fn cross_is_antisymmetric_and_orthogonal(x in im(), y in im()) {
        prop_assert!((cross(&x, &y) + cross(&y, &x)).norm() < 1e-12);
        prop_assert!(cross(&x, &x).norm() < 1e-12);
        let c = cross(&x, &y);
        prop_assert!(c.dot(&x).abs() < 1e-10 && c.dot(&y).abs() < 1e-10);
    }

    #[test]
    fn norm_is_multiplicative(a in oct(), b in oct()) {
        prop_assert!(((a * b).norm() - a.norm() * b.norm()).abs() < 1e-10);
    }

    #[test]
    fn conjugation_negates_imaginary_part(x in im()) {
        let o = x.to_octonion();
        prop_assert_eq!(o.real(), 0.0);
        prop_assert_eq!(o.conj().imag(), -x);
    }

    #[test]
    fn contraction_is_nondegenerate(x in im()) {
        prop_assume!(x.norm() > 0.1);
        let n = contract(&phi0(), &x.normalized()).unwrap().norm();
        prop_assert!((n * n - 3.0).abs() < 1e-10);
    }

    #[test]
    fn hodge_is_an_involution(a in form(3), b in form(2)) {
        prop_assert!(hodge_star(&hodge_star(&a)).max_abs_diff(&a) < 1e-12);
        prop_assert!(hodge_star(&hodge_star(&b)).max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn wedge_is_graded_commutative_and_associative(a in form(2), b in form(1), c in form(3)) {
        let ab = wedge(&a, &b).unwrap();
        prop_assert!(ab.max_abs_diff(&wedge(&b, &a).unwrap()) < 1e-12);
        let bc = wedge(&b, &c).unwrap();
        prop_assert!(bc.max_abs_diff(&wedge(&c, &b).unwrap().scale(-1.0)) < 1e-12);
        let l = wedge(&ab, &c).unwrap();
        let r = wedge(&a, &bc).unwrap();
        prop_assert!(l.max_abs_diff(&r) < 1e-10);
    }

    #[test]
    fn contraction_matches_evaluation(v in im(), w1 in im(), w2 in im()) {
        let c = contract(&phi0(), &v).unwrap();
        prop_assert!((c.eval(&[w1, w2]).unwrap() - phi0_eval(&v, &w1, &w2)).abs() < 1e-10);
        prop_assert!(contract(&c, &v).unwrap().is_zero(1e-10));
    }
}
