use involutor_core::involution::{
    complete, delta_regular_change, formally_integrable, involution_check,
};
use involutor_core::jets::{jet_key, JetSystem};
use involutor_core::kernel::MultiIndex;
use involutor_core::text::parse_opmatrix;

fn system(n: usize, eqs: &[&str]) -> JetSystem {
    let xs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let body: String = eqs.iter().map(|e| format!("eq: {e} = 0;\n")).collect();
    let text = format!("system t {{ indep: {}; dep: y;\n{body}}}", xs.join(" "));
    JetSystem::from_opmatrix(&parse_opmatrix(&text).unwrap())
        .autoreduce()
        .unwrap()
}

fn names(s: &JetSystem) -> Vec<String> {
    s.leader_names()
}

#[test]
fn janet_two_equations_complete_after_reversal() {
    let s = system(3, &["d(y,1,1)", "d(y,1,3) - d(y,2)"]);
    let r = complete(&s).unwrap();
    assert_eq!(r.order, 2);
    assert!(!r.formally_integrable);
    assert_eq!(
        r.change,
        involutor_core::CoordChange::permutation(&[3, 2, 1])
    );
    assert_eq!(names(&r.system), vec!["y33", "y23", "y22", "y13"]);
    let board = r.system.janet_board().unwrap();
    assert_eq!(board.classes(), vec![3, 2, 2, 1]);
    assert!(involution_check(&r.system).unwrap().involutive);
    assert_eq!(names(&r.original_frame), vec!["y22", "y13", "y12", "y11"]);
    let ch = r.system.characters();
    assert_eq!(ch.alpha, vec![2, 0, 0]);
    assert!(!ch.provisional);
}

#[test]
fn janet_two_equations_first_obstruction_is_y12() {
    let s = system(3, &["d(y,1,1)", "d(y,1,3) - d(y,2)"]);
    let c = involution_check(&s).unwrap();
    assert!(!c.involutive);
    let y12 = jet_key(0, &MultiIndex(vec![1, 1, 0]));
    assert!(c
        .obstructions
        .iter()
        .any(|o| o.residue.lead_key() == Some(y12)));
    assert!(!formally_integrable(&s).unwrap());
}

#[test]
fn completed_janet_system_needs_reversal() {
    let s = system(3, &["d(y,1,1)", "d(y,1,3) - d(y,2)"]);
    let r = complete(&s).unwrap();
    let c = delta_regular_change(&r.original_frame).unwrap();
    assert_eq!(c, involutor_core::CoordChange::permutation(&[3, 2, 1]));
    assert!(!involution_check(&r.original_frame).unwrap().involutive);
}

#[test]
fn airy_is_involutive_as_given() {
    let s = system(2, &["d(y,2,2)", "-d(y,1,2)", "d(y,1,1)"]);
    assert!(involution_check(&s).unwrap().involutive);
    let r = complete(&s).unwrap();
    assert_eq!((r.order, r.jet_order), (2, 2));
    assert!(r.change.is_identity());
}

#[test]
fn finite_type_example_becomes_involutive_at_order_four() {
    let s = system(3, &["d(y,3,3)", "d(y,2,3) - d(y,1,1)", "d(y,2,2)"]);
    assert!(!involution_check(&s).unwrap().involutive);
    let r = complete(&s).unwrap();
    assert!(r.formally_integrable);
    assert_eq!(r.order, 4);
    let dims = s.solution_dims(2);
    assert_eq!(dims[1].dim, 8);
    assert_eq!(dims[2].dim, 8);
    let par: Vec<String> = dims[1]
        .parametric
        .iter()
        .map(|(k, mu)| involutor_core::jets::jet_name(*k, mu, 1))
        .collect();
    let mut par = par;
    par.sort();
    assert_eq!(
        par,
        vec!["y", "y1", "y11", "y111", "y12", "y13", "y2", "y3"]
    );
}

#[test]
fn homogeneous_full_order_symbol_is_trivially_involutive() {
    let s = system(2, &["d(y,1,1)", "d(y,1,2)", "d(y,2,2)"]);
    let r = complete(&s).unwrap();
    assert_eq!(r.order, 2);
    assert!(r.formally_integrable);
}
