use torex::presets::{hirzebruch, simplex, square};
use torex::rational::q;
use torex_metrics::ansatz::{AmbitoricSolution, HyperbolicCase};
use torex_metrics::verify::{abreu_residual_on, interior_grid};

fn sparse_points(sol: &AmbitoricSolution) -> Vec<torex::Pt> {
    interior_grid(sol, 20, 4e-3).into_iter().step_by(37).collect()
}

#[test]
fn hyperbolic_residual_is_second_order_at_small_steps() {
    let sol = AmbitoricSolution::solve_hyperbolic(2, &q(1), &q(12), HyperbolicCase::FibreOnly).unwrap();
    let pts = sparse_points(&sol);
    let coarse = abreu_residual_on(&sol, &pts, 20, 1e-3).unwrap().max_abs;
    let fine = abreu_residual_on(&sol, &pts, 20, 5e-4).unwrap().max_abs;
    let finer = abreu_residual_on(&sol, &pts, 20, 2.5e-4).unwrap().max_abs;
    assert!(coarse < 1e-5);
    for ratio in [coarse / fine, fine / finer] {
        assert!((3.5..=4.5).contains(&ratio), "{coarse:e} {fine:e} {finer:e}");
    }
}

#[test]
fn rational_solutions_have_zero_residual() {
    let sols = [
        AmbitoricSolution::product_from_polytope(&square().with_cusps(&[0]).unwrap()).unwrap().unwrap(),
        AmbitoricSolution::bryant([q(1), q(2)]).unwrap(),
        AmbitoricSolution::bryant_from_standard(&simplex().with_cusps(&[1]).unwrap()).unwrap(),
    ];
    for sol in &sols {
        let r = abreu_residual_on(sol, &sparse_points(sol), 20, 1e-3).unwrap();
        assert!(r.exact);
        assert_eq!(r.max_abs, 0.0);
    }
}

#[test]
fn calabi_identities_hold_on_section_cusps() {
    for m in [1, 2, 3] {
        let p = hirzebruch(m, &q(3)).unwrap().with_cusps(&[1, 3]).unwrap();
        let sol = AmbitoricSolution::calabi_from_polytope(&p).unwrap().unwrap();
        for id in sol.identities().unwrap() {
            assert!(id.holds, "m={m}: {} {}", id.name, id.detail);
        }
        let pts = sparse_points(&sol);
        let coarse = abreu_residual_on(&sol, &pts, 20, 1e-3).unwrap().max_abs;
        let fine = abreu_residual_on(&sol, &pts, 20, 5e-4).unwrap().max_abs;
        assert!(coarse < 1e-5 && (3.5..=4.5).contains(&(coarse / fine)), "m={m}: {coarse:e} {fine:e}");
    }
}
