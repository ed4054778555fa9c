use epsilon_core::frontend::parse_problem;
use epsilon_core::history::validate;
use epsilon_core::hproc::{extract_witness, run, Outcome, RunConfig};
use epsilon_core::subst::is_correct;
use proptest::prelude::*;

fn solve(text: &str) -> (epsilon_core::frontend::Problem, Outcome) {
    let p = parse_problem(text).expect("problem parses");
    let rc = RunConfig { max_steps: 10_000, check: true };
    let outcome = run(&p.lang, &p.critical, rc, &mut |_| {});
    (p, outcome)
}

#[test]
fn sample_problems_solve() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../problems");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let (p, outcome) = solve(&text);
        assert!(outcome.is_solved(), "{}: {:?}", path.display(), outcome);
        let state = outcome.state();
        assert!(is_correct(&p.lang, &state.s), "{}", path.display());
        assert!(validate(state, &p.lang).is_empty(), "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn inductive_definition_builds_up_from_zero() {
    let text = "(clause (y x) (or (not (< y x)) (in y)))\n(crit inddef 0)\n(crit inddef 1)\n(crit inddef 2)\n";
    let (_, outcome) = solve(text);
    let p = outcome.state().hist.p().iter().map(|n| n.to_string()).collect::<Vec<_>>();
    assert_eq!(p, ["0", "1", "2"]);
}

#[test]
fn goal_witness_satisfies_the_goal() {
    let (p, outcome) = solve("(goal (exists x (= (* x x) 9)) 3)\n");
    let goal = &p.goals[0];
    let w = extract_witness(&p.lang, &outcome.state().s, &goal.phi, goal.var).unwrap();
    assert_eq!(w.to_string(), "3");
}

proptest! {
    #[test]
    fn epsilon_problems_solve_correctly(a in 0u32..6, b in 0u32..6, k in 1u32..4) {
        // x is a multiple of k in [a, a + b]; the instance at t need not hold.
        let text = format!(
            "(crit eps {t} x (and (not (< x {a})) (and (< x {hi}) (exists y (= x (* y {k}))))))\n",
            t = (a + b) / k * k,
            a = a,
            hi = a + b + 1,
            k = k,
        );
        let (p, outcome) = solve(&text);
        prop_assert!(outcome.is_solved());
        prop_assert!(is_correct(&p.lang, &outcome.state().s));
    }

    #[test]
    fn source_round_trips(n in 0u32..8, m in 0u32..8) {
        let text = format!(
            "(clause (y x) (or (not (< y x)) (in y)))\n(crit inddef {n})\n(crit ind {m} x (< x {m}))\n(goal (exists x (= x {n})) {n})\n",
            n = n,
            m = m,
        );
        let p = parse_problem(&text).unwrap();
        let q = parse_problem(&p.to_source()).unwrap();
        prop_assert_eq!(p.to_source(), q.to_source());
        prop_assert_eq!(p.critical.len(), q.critical.len());
    }
}
