//! Acceptance gate: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see them). Randomized suites use a fixed
//! seed, and independent oracles provide the expected answers.

use std::time::{Duration, Instant};

use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vsqe::engine::{run, Algorithm};
use vsqe::formula::{eval_qf, mentions_var, nnf, Formula, Rel, UniAtom};
use vsqe::frontend::bench::{run_dir, BenchOptions};
use vsqe::frontend::smtlib::parse_smtlib;
use vsqe::frontend::Answer;
use vsqe::oracle::{below_all_roots, decide_closed_conjunction, epsilon_witness, QuadNum};
use vsqe::polyarith::{rat, Polynomial, Rat, Valuation};
use vsqe::transform::{push_forall, simpfm, unpower_all};
use vsqe::vsub::{elim_var, subst_epsilon, subst_neg_infinity, LinRoot, Root};

/// Prints the criterion verdict even when an assertion unwinds.
struct Verdict {
    label: &'static str,
    passed: bool,
    started: Instant,
}

impl Verdict {
    fn start(label: &'static str) -> Verdict {
        Verdict {
            label,
            passed: false,
            started: Instant::now(),
        }
    }

    fn finish(mut self, limit: Duration) {
        let elapsed = self.started.elapsed();
        assert!(
            elapsed < limit,
            "{} exceeded the {:?} budget ({:?})",
            self.label,
            limit,
            elapsed
        );
        self.passed = true;
    }
}

impl Drop for Verdict {
    fn drop(&mut self) {
        println!(
            "{}: {} ({} ms)",
            self.label,
            if self.passed { "pass" } else { "FAIL" },
            self.started.elapsed().as_millis()
        );
    }
}

fn rat_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Rat {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(lo * den..=hi * den);
    Rat::new(BigInt::from(num), BigInt::from(den))
}

fn rand_rel(rng: &mut ChaCha8Rng) -> Rel {
    match rng.gen_range(0..4) {
        0 => Rel::Less,
        1 => Rel::Eq,
        2 => Rel::Leq,
        _ => Rel::Neq,
    }
}

fn rand_uniatom(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> UniAtom {
    UniAtom::new(
        rand_rel(rng),
        rat_in(rng, lo, hi, max_den),
        rat_in(rng, lo, hi, max_den),
        rat_in(rng, lo, hi, max_den),
    )
}

/// Random polynomial over `vars` variables with degree at most 2 in
/// variable 0 and small integer coefficients.
fn rand_poly(rng: &mut ChaCha8Rng, vars: usize) -> Polynomial {
    let mut p = Polynomial::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let mut m = Polynomial::constant(rat(rng.gen_range(-3..=3)));
        let e0 = rng.gen_range(0..=2);
        m = m * Polynomial::var(0).pow(e0);
        for v in 1..vars {
            let e = rng.gen_range(0..=2);
            m = m * Polynomial::var(v).pow(e);
        }
        p = p + m;
    }
    p
}

fn rand_qf(rng: &mut ChaCha8Rng, vars: usize, atoms_left: &mut usize, depth: usize) -> Formula {
    if *atoms_left == 0 {
        return if rng.gen_bool(0.5) {
            Formula::True
        } else {
            Formula::False
        };
    }
    match if depth == 0 { 3 } else { rng.gen_range(0..6) } {
        0 => Formula::and(
            rand_qf(rng, vars, atoms_left, depth - 1),
            rand_qf(rng, vars, atoms_left, depth - 1),
        ),
        1 => Formula::or(
            rand_qf(rng, vars, atoms_left, depth - 1),
            rand_qf(rng, vars, atoms_left, depth - 1),
        ),
        2 => Formula::neg(rand_qf(rng, vars, atoms_left, depth - 1)),
        _ => {
            *atoms_left -= 1;
            Formula::atom(rand_rel(rng), rand_poly(rng, vars))
        }
    }
}

fn rand_valuation(rng: &mut ChaCha8Rng, n: usize) -> Valuation {
    Valuation::new((0..n).map(|_| rat_in(rng, -5, 5, 3)).collect())
}

fn fold_bool(f: &Formula) -> bool {
    match simpfm(f) {
        Formula::True => true,
        Formula::False => false,
        other => panic!("expected a ground formula, got {other}"),
    }
}

#[test]
fn criterion_1_neg_infinity_oracle() {
    let v = Verdict::start("criterion 1 (univariate -inf oracle suite)");
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..10_000 {
        let at = rand_uniatom(&mut rng, -10, 10, 4);
        let atom = at.to_atom();
        let folded = fold_bool(&subst_neg_infinity(0, &atom).unwrap());
        let point = if atom.poly.is_zero() {
            rat(-1)
        } else {
            below_all_roots(std::slice::from_ref(&atom.poly)).unwrap()
        };
        assert_eq!(folded, at.holds_at(&point), "atom {:?} at {}", at, point);
    }
    v.finish(Duration::from_secs(60));
}

#[test]
fn criterion_2_epsilon_oracle() {
    let v = Verdict::start("criterion 2 (univariate epsilon oracle suite)");
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..10_000 {
        let at = rand_uniatom(&mut rng, -10, 10, 4);
        let r = rat_in(&mut rng, -10, 10, 4);
        let root = Root::Lin(LinRoot {
            num: Polynomial::constant(r.clone()),
            den: Polynomial::one(),
        });
        let folded = fold_bool(&subst_epsilon(0, &root, &at.to_atom()).unwrap());
        let delta =
            epsilon_witness(&QuadNum::from_rat(r.clone()), &[at.to_atom().poly]).unwrap();
        let sample = &r + &delta;
        assert_eq!(folded, at.holds_at(&sample), "atom {:?} at {} + {}", at, r, delta);
    }
    v.finish(Duration::from_secs(120));
}

#[test]
fn criterion_3_general_theorem_equivalence() {
    let v = Verdict::start("criterion 3 (general-theorem equivalence)");
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..5_000 {
        let atoms: Vec<UniAtom> = (0..rng.gen_range(1..=4))
            .map(|_| rand_uniatom(&mut rng, -4, 4, 2))
            .collect();
        let f = Formula::exq(Formula::and_all(
            atoms.iter().map(|a| Formula::Atom(a.to_atom())),
        ));
        let report = run(Algorithm::General, &f, None);
        let expect = decide_closed_conjunction(&atoms);
        assert_eq!(report.decided, Some(expect), "conjunction {:?}", atoms);
    }
    v.finish(Duration::from_secs(300));
}

#[test]
fn criterion_4_equality_direct_substitution() {
    let v = Verdict::start("criterion 4 (equality-VS direct substitution)");
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..2_000 {
        let r = rat_in(&mut rng, -5, 5, 3);
        let mut atoms_left = rng.gen_range(1..=6);
        let g = rand_qf(&mut rng, 4, &mut atoms_left, 3);
        let f = Formula::exq(Formula::and(
            Formula::atom(Rel::Eq, Polynomial::var(0) - Polynomial::constant(r.clone())),
            g.clone(),
        ));
        let report = run(Algorithm::Equality, &f, None);
        assert!(report.result.is_quantifier_free(), "residual for {g}");
        for _ in 0..100 {
            let free = rand_valuation(&mut rng, 3);
            let with_x = free.push_front(r.clone());
            assert_eq!(
                eval_qf(&report.result, &free).unwrap(),
                eval_qf(&g, &with_x).unwrap(),
                "formula {g} with x = {r}"
            );
        }
    }
    v.finish(Duration::from_secs(300));
}

#[test]
fn criterion_5_pass_soundness() {
    let v = Verdict::start("criterion 5 (pass-soundness suite)");
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let passes: [(&str, fn(&Formula) -> Formula); 4] = [
        ("nnf", |f| nnf(f)),
        ("unpower", |f| unpower_all(f)),
        ("simpfm", |f| simpfm(f)),
        ("push_forall", |f| push_forall(f)),
    ];
    for _ in 0..1_000 {
        let mut atoms_left = rng.gen_range(1..=5);
        let f = rand_qf(&mut rng, 3, &mut atoms_left, 3);
        let images: Vec<(&str, Formula)> =
            passes.iter().map(|(n, p)| (*n, p(&f))).collect();
        for _ in 0..100 {
            let val = rand_valuation(&mut rng, 3);
            let reference = eval_qf(&f, &val).unwrap();
            for (name, image) in &images {
                assert_eq!(
                    eval_qf(image, &val).unwrap(),
                    reference,
                    "{name} changed the truth of {f}"
                );
            }
        }
    }
    v.finish(Duration::from_secs(120));
}

#[test]
fn criterion_6_variable_removal() {
    let v = Verdict::start("criterion 6 (variable-removal invariant)");
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..2_000 {
        let atoms: Vec<_> = (0..rng.gen_range(1..=3))
            .map(|_| {
                vsqe::formula::Atom::new(rand_rel(&mut rng), rand_poly(&mut rng, 3))
            })
            .collect();
        let ctx: Vec<Formula> = (0..rng.gen_range(0..=1))
            .map(|_| {
                let mut atoms_left = 2;
                rand_qf(&mut rng, 3, &mut atoms_left, 2)
            })
            .collect();
        let out = elim_var(0, &atoms, &ctx).unwrap();
        assert!(!mentions_var(&out, 0), "variable left in output of {:?}", atoms);
    }
    v.finish(Duration::from_secs(60));
}

#[test]
fn criterion_7_worked_examples() {
    let v = Verdict::start("criterion 7 (worked examples)");

    // normalization: x^3 + x^2 + x + 1 = x^3 stores as x^2 + x + 1 = 0
    let p = parse_smtlib(
        "norm",
        "(declare-const x Real)(assert (= (+ (* x x x) (* x x) x 1) (* x x x)))(check-sat)",
    )
    .unwrap();
    let x = Polynomial::var(0);
    assert_eq!(
        p.formula,
        Formula::exq(Formula::atom(Rel::Eq, x.pow(2) + &x + Polynomial::one()))
    );

    // nested quantifiers: exists x. (x = 0 /\ exists y. x y^3 + y = 0)
    let inner = Formula::atom(
        Rel::Eq,
        Polynomial::var(1) * Polynomial::var(0).pow(3) + Polynomial::var(0),
    );
    let nested = Formula::exq(Formula::and(
        Formula::atom(Rel::Eq, Polynomial::var(0)),
        Formula::exq(inner),
    ));
    assert_eq!(run(Algorithm::Leg, &nested, None).result, Formula::True);

    // push_forall: forall y. (y^3 + x = 0 /\ x = 0) narrows to
    // (forall y. y^3 + x = 0) /\ x = 0
    let cubic = Formula::atom(Rel::Eq, Polynomial::var(0).pow(3) + Polynomial::var(1));
    let body = Formula::allq(Formula::and(
        cubic.clone(),
        Formula::atom(Rel::Eq, Polynomial::var(1)),
    ));
    assert_eq!(
        push_forall(&body),
        Formula::and(
            Formula::allq(cubic),
            Formula::atom(Rel::Eq, Polynomial::var(0))
        )
    );
    // ... which lets the engine decide it (forall y. y^3 = 0 fails)
    assert_eq!(run(Algorithm::Leg, &Formula::exq(body), None).result, Formula::False);

    // constant folding: 5 = 0 becomes FalseF
    assert_eq!(
        simpfm(&Formula::atom(Rel::Eq, Polynomial::from_int(5))),
        Formula::False
    );

    v.finish(Duration::from_secs(1));
}

#[test]
fn criterion_8_negation_consistency_corpus() {
    let v = Verdict::start("criterion 8 (negation consistency on the corpus)");
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks");
    let opts = BenchOptions {
        algorithm: Algorithm::Leg,
        timeout: Duration::from_secs(30),
        check_negation: true,
    };
    let outcome = run_dir(&dir, &opts).unwrap();
    assert!(outcome.results.len() >= 35, "corpus too small");
    let cubics = outcome
        .results
        .iter()
        .filter(|r| r.record.name.starts_with("cubic_"))
        .count();
    assert!(cubics >= 5, "need at least 5 cubic problems");
    assert!(outcome.contradictions().is_empty(), "{:?}", outcome.contradictions());
    assert!(
        outcome.expected_mismatches().is_empty(),
        "{:?}",
        outcome.expected_mismatches()
    );
    for r in &outcome.results {
        if r.record.name.starts_with("cubic_") {
            assert_eq!(r.record.answer, Answer::Unknown, "{}", r.record.name);
        } else {
            assert_ne!(r.record.answer, Answer::Unknown, "{}", r.record.name);
        }
    }
    v.finish(Duration::from_secs(60));
}

#[test]
fn criterion_9_polynomial_kernel() {
    let v = Verdict::start("criterion 9 (polynomial kernel suite)");
    let mut rng = ChaCha8Rng::seed_from_u64(909);

    // reconstruction from the nested decomposition
    for _ in 0..1_000 {
        let p = rand_poly(&mut rng, 3);
        let var = rng.gen_range(0..3);
        let coeffs = p.nested_decompose(var);
        let mut rebuilt = Polynomial::zero();
        for (i, c) in coeffs.iter().enumerate() {
            rebuilt = rebuilt + c * Polynomial::var(var).pow(i as u32);
        }
        assert_eq!(rebuilt, p);
    }

    // lift/lower round trip
    for _ in 0..1_000 {
        let p = rand_poly(&mut rng, 3);
        let d = rng.gen_range(0..3);
        let a = rng.gen_range(0..3);
        assert_eq!(p.lift_poly(d, a).lower_poly(d, a).unwrap(), p);
    }

    // insertion is a ring homomorphism
    for _ in 0..1_000 {
        let p = rand_poly(&mut rng, 3);
        let q = rand_poly(&mut rng, 3);
        let val = rand_valuation(&mut rng, 3);
        assert_eq!((&p + &q).insertion(&val), p.insertion(&val) + q.insertion(&val));
        assert_eq!((&p * &q).insertion(&val), p.insertion(&val) * q.insertion(&val));
    }

    // first-order Taylor remainder: u(x + h) - u(x) - h u'(x) = O(h^2),
    // checked symbolically as divisibility by h^2
    for _ in 0..1_000 {
        let coeffs: Vec<Rat> = (0..=rng.gen_range(1..=4))
            .map(|_| rat_in(&mut rng, -5, 5, 3))
            .collect();
        let u: Polynomial = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| Polynomial::var(0).pow(i as u32).scale(c))
            .fold(Polynomial::zero(), |a, b| a + b);
        let x0 = rat_in(&mut rng, -5, 5, 3);
        let at_x0 = u.insertion(&Valuation::new(vec![x0.clone()]));
        let slope = u
            .derivative(0)
            .insertion(&Valuation::new(vec![x0.clone()]));
        // compose u(x0 + h) with h as variable 0
        let shift = Polynomial::constant(x0) + Polynomial::var(0);
        let mut composed = Polynomial::zero();
        for (i, c) in coeffs.iter().enumerate() {
            composed = composed + shift.pow(i as u32).scale(c);
        }
        let remainder = composed
            - Polynomial::constant(at_x0)
            - Polynomial::var(0).scale(&slope);
        assert!(remainder.is_zero() || remainder.min_exponent(0) >= 2);
    }

    v.finish(Duration::from_secs(30));
}
