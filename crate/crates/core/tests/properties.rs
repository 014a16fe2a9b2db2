use boundwidth::bp::parse_bp;
use boundwidth::circuit::{layer, parse_circuit, restrict};
use boundwidth::convert::{
    black_pebbling_to_circuit, bw_pebbling_to_circuit, circuit_to_bp, cut_to_bounded_width, gate_depth_without,
    realize_circuit, valiant_cut,
};
use boundwidth::generate::{deep_circuit, layered_circuit, random_circuit, random_cnf, random_dag};
use boundwidth::pebbling::{
    guess_then_verify, search_min_space, topological_black, validate, Mode, Move, PebbleGraph, Pebbling,
};
use boundwidth::sat::{
    bounded_width_sat, brute_force_sat, choose_read_k_vars, EnumerationBackend, Fraction, SatCaps, SatOptions,
};
use boundwidth::{Assignment, EvalMode};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Plain re-simulation of the four pebbling rules; `true` iff legal.
fn simulate(g: &PebbleGraph, moves: &[Move], black_only: bool) -> bool {
    // 0 empty, 1 black, 2 white
    let mut config = vec![0u8; g.len()];
    let covered = |config: &[u8], v: usize| g.preds(v).iter().all(|&u| config[u] != 0);
    for &m in moves {
        let v = m.vertex();
        if v >= g.len() || (black_only && m.is_white()) {
            return false;
        }
        let ok = match m {
            Move::PlaceBlack(_) => config[v] == 0 && covered(&config, v),
            Move::RemoveBlack(_) => config[v] == 1,
            Move::PlaceWhite(_) => config[v] == 0,
            Move::RemoveWhite(_) => config[v] == 2 && covered(&config, v),
        };
        if !ok {
            return false;
        }
        config[v] = match m {
            Move::PlaceBlack(_) => 1,
            Move::PlaceWhite(_) => 2,
            _ => 0,
        };
    }
    (0..g.len()).all(|v| config[v] == u8::from(v == g.sink()))
}

fn binary_dag(seed: u64, vertices: usize) -> PebbleGraph {
    random_dag(&mut rng(seed), vertices, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuit_text_round_trip(seed: u64, n in 1usize..6, m in 0usize..3, s in 1usize..30) {
        let c = random_circuit(&mut rng(seed), n, m, s, 6);
        prop_assert_eq!(parse_circuit(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn layering_keeps_size_and_function(seed: u64, n in 1usize..6, m in 0usize..3, s in 1usize..40) {
        let c = random_circuit(&mut rng(seed), n, m, s, 12);
        let lc = layer(&c);
        prop_assert_eq!(lc.circuit().size(), c.size());
        prop_assert_eq!(lc.circuit().truth_table(), c.truth_table());
        prop_assert!(lc.layers().iter().all(|l| !l.is_empty() && l.len() <= lc.width()));
    }

    #[test]
    fn restriction_is_sound(seed: u64, n in 2usize..7, s in 1usize..30, mask: u8, values: u8) {
        let c = random_circuit(&mut rng(seed), n, 1, s, 6);
        let partial: Assignment = c
            .actual_vars()
            .iter()
            .enumerate()
            .filter(|(i, _)| (mask >> i) & 1 == 1)
            .map(|(i, v)| (v.clone(), (values >> i) & 1 == 1))
            .collect();
        let r = restrict(&c, &partial).unwrap();
        prop_assert!(r.size() <= c.size());
        for i in 0..1u64 << r.num_actual() {
            let free = Assignment::from_index(r.actual_vars(), i);
            let full = free.union(&partial).unwrap();
            prop_assert_eq!(r.evaluate_nondet(&free, 4).unwrap(), c.evaluate_nondet(&full, 4).unwrap());
        }
    }

    #[test]
    fn lowering_is_equivalent_and_bounded(seed: u64, n in 1usize..5, m in 0usize..3, s in 1usize..25, w in 1usize..5) {
        let lc = layered_circuit(&mut rng(seed), n, m, s, w);
        let (bp, report) = circuit_to_bp(&lc).unwrap();
        prop_assert!(report.ok());
        let c = lc.circuit();
        for i in 0..1u64 << n {
            let a = Assignment::from_index(c.actual_vars(), i);
            prop_assert_eq!(bp.evaluate(&a, EvalMode::Strict).unwrap(), c.evaluate_nondet(&a, 4).unwrap());
        }
        let counts = bp.max_read_counts();
        let multiplicity = c.read_multiplicities();
        for v in c.actual_vars() {
            prop_assert!(counts[v] <= multiplicity[v]);
        }
        prop_assert_eq!(parse_bp(&bp.to_text()).unwrap().to_text(), bp.to_text());
    }

    #[test]
    fn sat_agrees_and_is_partition_independent(seed: u64, n in 1usize..9, m in 0usize..4, s in 1usize..35, cnf: bool) {
        let c = if cnf {
            random_cnf(&mut rng(seed), n.clamp(2, 5), m, 3 + s % 7, 2)
        } else {
            random_circuit(&mut rng(seed), n, m, s, 8)
        };
        let n = c.num_actual();
        let brute = brute_force_sat(&c, SatCaps::default()).unwrap();
        let one = bounded_width_sat(&c, &EnumerationBackend, SatOptions::default()).unwrap();
        let many = bounded_width_sat(&c, &EnumerationBackend, SatOptions { jobs: 4, ..SatOptions::default() }).unwrap();
        prop_assert_eq!(one.is_satisfiable(), brute.is_satisfiable());
        prop_assert_eq!(&one, &many);
        if let Some(w) = &one.witness {
            prop_assert!(c.evaluate_with_guesses(w).unwrap());
        }
        let canonical = SatOptions { lex_first_witness: true, ..SatOptions::default() };
        prop_assert_eq!(bounded_width_sat(&c, &EnumerationBackend, canonical).unwrap().witness, brute.witness);
        let choice = choose_read_k_vars(&c, Fraction::HALF);
        prop_assert!(choice.k <= choice.averaging_bound(n));
    }

    #[test]
    fn topological_black_is_legal(seed: u64, vertices in 1usize..16) {
        let g = random_dag(&mut rng(seed), vertices, 3);
        let p = topological_black(&g);
        prop_assert!(simulate(&g, &p.moves, true));
        let measures = validate(&g, &p, Mode::Black).unwrap();
        prop_assert_eq!(measures, p.measures());
    }

    #[test]
    fn validator_matches_simulation_under_mutation(seed: u64, vertices in 2usize..10, at: usize, kind in 0u8..4, target: usize) {
        let g = random_dag(&mut rng(seed), vertices, 2);
        let whites: Vec<usize> = (0..g.len()).filter(|&v| v != g.sink() && !g.preds(v).is_empty()).take(1).collect();
        let p = guess_then_verify(&g, &whites).unwrap();
        let mut moves = p.moves.clone();
        let i = at % moves.len();
        let v = target % g.len();
        moves[i] = match kind {
            0 => Move::PlaceBlack(v),
            1 => Move::RemoveBlack(v),
            2 => Move::PlaceWhite(v),
            _ => Move::RemoveWhite(v),
        };
        let mutated = Pebbling::new(moves);
        for (mode, black_only) in [(Mode::BlackWhite, false), (Mode::Black, true)] {
            prop_assert_eq!(validate(&g, &mutated, mode).is_ok(), simulate(&g, &mutated.moves, black_only));
        }
    }

    #[test]
    fn white_pebbles_never_cost_space(seed: u64, vertices in 1usize..9) {
        let g = random_dag(&mut rng(seed), vertices, 2);
        let black = search_min_space(&g, Mode::Black, vertices, 14).unwrap();
        let bw = search_min_space(&g, Mode::BlackWhite, vertices, 10).unwrap();
        prop_assert!(bw.space <= black.space);
        prop_assert!(simulate(&g, &black.witness.moves, true));
        prop_assert!(simulate(&g, &bw.witness.moves, false));
    }

    #[test]
    fn compiled_pebblings_compute_the_circuit(seed: u64, vertices in 2usize..9) {
        let g = binary_dag(seed, vertices);
        prop_assume!((0..g.len()).all(|v| g.preds(v).len() <= 2));
        let c = realize_circuit(&g).unwrap();
        let h = PebbleGraph::from_circuit(&c);
        let black = topological_black(&g).translate(&g, &h).unwrap();
        let (lc, report) = black_pebbling_to_circuit(&c, &black).unwrap();
        prop_assert!(report.ok());
        prop_assert_eq!(lc.circuit().truth_table(), c.truth_table());

        let whites: Vec<usize> = (0..g.len()).filter(|&v| v != g.sink()).step_by(2).collect();
        let bw = guess_then_verify(&g, &whites).unwrap().translate(&g, &h).unwrap();
        let (lc, report) = bw_pebbling_to_circuit(&c, &bw).unwrap();
        prop_assert!(report.ok());
        prop_assert_eq!(lc.circuit().truth_table(), c.truth_table());
    }

    #[test]
    fn cuts_reach_their_target(seed: u64, depth in 1usize..14, extra in 0usize..60, n in 1usize..8) {
        let c = deep_circuit(&mut rng(seed), n, depth + extra, depth);
        let target = depth.div_ceil(2);
        let cut = valiant_cut(&c, target);
        prop_assert!(gate_depth_without(&c, &cut) <= target);
        let (lc, report) = cut_to_bounded_width(&c, &cut).unwrap();
        prop_assert!(report.ok());
        prop_assert_eq!(lc.circuit().truth_table(), c.truth_table());
    }
}
