//! Structured results checked against brute-force oracles.

mod common;

use std::f64::consts::PI;

use common::{dense_spectrum, explicit_qpe, test_state, Circuit};
use gengrover::dynamics::{grover_iterate, IterationOrder, Propagator};
use gengrover::experiments::hadamard_trials;
use gengrover::instance::{hadamard_row, make_instance};
use gengrover::numerics::max_entry;
use gengrover::qpe::{phase_of_energy, register_size, PhaseEstimator};
use gengrover::seed;
use gengrover::structure::{block_decompose, verify_identities, Eigenbasis};
use gengrover::{pair_spectrum, Complex64, InstanceRecipe, SearchInstance, StateVector};
use rand::Rng;

fn random_instances(count: usize, seed_base: u64) -> Vec<SearchInstance> {
    (0..count)
        .map(|i| {
            let mut rng = seed::substream_rng(seed_base, i as u64);
            let d = [8usize, 16, 32, 64][i % 4];
            let m = rng.random_range(1..=8.min(d - 1));
            let n = rng.random_range(1..=m.min(d - m));
            InstanceRecipe::random(d, n, m, rng.random())
                .build()
                .unwrap()
        })
        .collect()
}

#[test]
fn qft_gate_sequence_matches_dft() {
    for n in 1..=4u32 {
        let size = 1usize << n;
        for j in 0..size {
            let mut basis = vec![Complex64::new(0.0, 0.0); size];
            basis[j] = Complex64::new(1.0, 0.0);
            // dim-1 system so the register carries the whole state
            let mut c = Circuit {
                qubits: n,
                dim: 1,
                amps: basis,
            };
            c.forward_qft();
            for m in 0..size {
                let expect = Complex64::from_polar(
                    1.0 / (size as f64).sqrt(),
                    2.0 * PI * (j * m) as f64 / size as f64,
                );
                assert!((c.amps[m] - expect).norm() < 1e-12, "n={n} j={j} m={m}");
            }
            c.inverse_qft();
            for m in 0..size {
                let expect = if m == j { 1.0 } else { 0.0 };
                assert!((c.amps[m] - expect).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn pair_spectrum_matches_dense_eigensolver() {
    for inst in random_instances(40, 1) {
        let s = pair_spectrum(&inst);
        let structured = s.eigenvalues();
        let dense = dense_spectrum(&inst);
        assert_eq!(structured.len(), dense.len());
        for (a, b) in structured.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        let total = s.zero_dim + s.unpaired_t.len() + s.unpaired_not_t.len() + 2 * s.pairs.len();
        assert_eq!(total, inst.dim());
    }
}

#[test]
fn documented_random_case() {
    let inst = InstanceRecipe::random(32, 5, 5, 2024).build().unwrap();
    let s = pair_spectrum(&inst);
    assert_eq!(s.pairs.len(), 5);
    let ev = s.eigenvalues();
    assert!(ev[..22].iter().all(|&e| e == 0.0));
    for (a, b) in ev.iter().zip(dense_spectrum(&inst)) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn projector_identities_on_random_instances() {
    for inst in random_instances(100, 2) {
        let r = verify_identities(&inst);
        assert!(r.max() < 1e-10, "{r:?}");
        let b = block_decompose(&inst);
        assert_eq!(b.a.nrows(), inst.dim() - inst.m());
        assert_eq!(b.b.ncols(), inst.m());
    }
}

#[test]
fn blocks_reproduce_projector_products() {
    let inst = InstanceRecipe::random(12, 3, 4, 8).build().unwrap();
    let blocks = block_decompose(&inst);
    let d = inst.dim();
    let mut ps = gengrover::numerics::ComplexMatrix::zeros(d, d);
    for psi in inst.sources() {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        ps += &v * v.adjoint();
    }
    let nt = &blocks.non_targets;
    let t = &blocks.targets;
    for (i, &x) in nt.iter().enumerate() {
        for (j, &y) in nt.iter().enumerate() {
            assert!((blocks.a[(i, j)] - ps[(x, y)]).norm() < 1e-12);
        }
        for (j, &y) in t.iter().enumerate() {
            assert!((blocks.b[(i, j)] - ps[(x, y)]).norm() < 1e-12);
        }
    }
    for (i, &x) in t.iter().enumerate() {
        for (j, &y) in t.iter().enumerate() {
            let id = if i == j { 1.0 } else { 0.0 };
            assert!((blocks.c[(i, j)] - ps[(x, y)] - id).norm() < 1e-12);
        }
    }
}

#[test]
fn hamiltonian_spectrum_lies_in_unit_band() {
    for inst in random_instances(20, 3) {
        let ev = dense_spectrum(&inst);
        assert!(ev.iter().all(|&e| (-1e-10..=2.0 + 1e-10).contains(&e)));
        let tr: f64 = (0..inst.dim()).map(|i| inst.hamiltonian()[(i, i)].re).sum();
        assert!((tr - (inst.n() + inst.m()) as f64).abs() < 1e-10);
    }
}

#[test]
fn hadamard_overlap_entries_bounded() {
    for seed in 0..10 {
        let inst = InstanceRecipe::hadamard(32, 6, 5, seed).build().unwrap();
        let k = inst.target_overlap_matrix();
        assert!(max_entry(&k) <= inst.n() as f64 / inst.dim() as f64 + 1e-15);
    }
}

#[test]
fn hadamard_overlaps_respect_bound() {
    for (d, n, m) in [(16, 3, 3), (32, 4, 6), (64, 8, 8)] {
        for rec in hadamard_trials(d, n, m, 25, 5).unwrap() {
            let bound = ((n * m) as f64 / d as f64).sqrt();
            assert!(rec
                .c_values
                .iter()
                .all(|&c| c > 0.0 && c <= bound.min(1.0) + 1e-10));
            assert!(rec.c_values.len() <= n.min(m));
        }
    }
}

#[test]
fn evolution_matches_dense_propagator() {
    for inst in random_instances(8, 4) {
        let prop = Propagator::new(&inst);
        let s = test_state(inst.dim(), 3);
        for t in [0.7, 5.0, 31.4] {
            let u = common::dense_propagator(&inst, t);
            let v = nalgebra::DVector::from_column_slice(s.amplitudes());
            let dense = u * v;
            let structured = prop.evolve(&s, t);
            for (a, b) in dense.iter().zip(structured.amplitudes()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn ideal_evolution_stays_in_pair_plane() {
    let inst = InstanceRecipe::random(40, 4, 4, 17).build().unwrap();
    let spec = pair_spectrum(&inst);
    let prop = Propagator::new(&inst);
    for p in &spec.pairs {
        let ideal = p.ideal_initial_state();
        for t in [0.0, 1.0, 10.0, 77.7] {
            let s = prop.evolve(&ideal, t);
            let inside = s.fidelity(&p.eps_t) + s.fidelity(&p.eps_not_t);
            assert!((1.0 - inside).abs() < 1e-10);
        }
        let mut state = ideal.clone();
        for _ in 0..30 {
            state = grover_iterate(&inst, &state, 1, IterationOrder::OracleFirst).0;
            let inside = state.fidelity(&p.eps_t) + state.fidelity(&p.eps_not_t);
            assert!((1.0 - inside).abs() < 1e-10);
        }
    }
}

#[test]
fn closed_form_qpe_matches_register_circuit() {
    let mut cases: Vec<SearchInstance> = vec![make_instance(
        2,
        &[vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]],
        &[1],
    )
    .unwrap()];
    cases.push(make_instance(4, &[hadamard_row(4, 0)], &[3]).unwrap());
    cases.push(make_instance(8, &[hadamard_row(8, 1), hadamard_row(8, 6)], &[0, 2, 5]).unwrap());
    cases.push(InstanceRecipe::random(8, 2, 2, 3).build().unwrap());
    cases.push(InstanceRecipe::random(8, 3, 2, 4).build().unwrap());
    cases.push(InstanceRecipe::random(6, 1, 3, 5).build().unwrap());
    for inst in &cases {
        for r in 1..=5 {
            for tau in [1.0, 0.37, 2.5] {
                let est = PhaseEstimator::new(inst, r, tau).unwrap();
                let inputs = [inst.sources()[0].clone(), test_state(inst.dim(), r as u64)];
                for input in &inputs {
                    let closed = est.distribution(input);
                    let circuit = explicit_qpe(inst, input, r, tau);
                    let explicit = circuit.register_probabilities();
                    for (m, (a, b)) in closed.iter().zip(&explicit).enumerate() {
                        assert!(
                            (a - b).abs() < 1e-9,
                            "D={} r={r} m={m}: {a} vs {b}",
                            inst.dim()
                        );
                    }
                    // collapsed states agree up to global phase
                    let m = (0..closed.len())
                        .max_by(|&a, &b| closed[a].total_cmp(&closed[b]))
                        .unwrap();
                    let (post, p) = est.collapse(input, m).unwrap();
                    assert!((p - explicit[m]).abs() < 1e-9);
                    let cond = StateVector::new(circuit.conditional_state(m)).unwrap();
                    assert!((post.fidelity(&cond) - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn sources_lie_in_pair_span_when_targets_dominate() {
    for (d, n, m, seed) in [(32, 3, 5, 1), (64, 4, 4, 2), (20, 2, 7, 3)] {
        let inst = InstanceRecipe::random(d, n, m, seed).build().unwrap();
        let spec = pair_spectrum(&inst);
        let pair_vectors: Vec<StateVector> = spec
            .pairs
            .iter()
            .flat_map(|p| {
                let (a, b) = p.eigenvectors();
                [a, b]
            })
            .collect();
        for psi in inst.sources() {
            let mut residual = psi.amplitudes().to_vec();
            for v in &pair_vectors {
                let ov = v.inner(psi);
                for (r, a) in residual.iter_mut().zip(v.amplitudes()) {
                    *r -= ov * a;
                }
            }
            let norm: f64 = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(norm < 1e-10, "residual {norm}");
        }
    }
}

#[test]
fn collapsed_state_concentrates_near_measured_phase() {
    let inst = InstanceRecipe::hadamard(64, 4, 4, 7).build().unwrap();
    let spec = pair_spectrum(&inst);
    let c_av = spec.c_values().iter().sum::<f64>() / inst.n() as f64;
    let p = 0.75;
    let r = register_size(2.0 * c_av, p, 1.0).unwrap();
    let est = PhaseEstimator::new(&inst, r, 1.0).unwrap();
    let basis = Eigenbasis::new(&spec);
    let delta_phi = 2.0 * c_av / (2.0 * PI);
    let grid = (1usize << r) as f64;
    let mut total = 0.0;
    let mut count = 0.0;
    for psi in inst.sources() {
        let dist = est.distribution(psi);
        // expectation over outcomes of the in-window weight
        for (m, &pm) in dist.iter().enumerate() {
            if pm < 1e-12 {
                continue;
            }
            let (post, _) = est.collapse(psi, m).unwrap();
            let parts = basis.decompose(post.amplitudes());
            let mut inside = 0.0;
            for (mode, a) in basis.modes.iter().zip(&parts.coefficients) {
                let d = phase_of_energy(mode.energy, 1.0) - m as f64 / grid;
                if (d - d.round()).abs() <= delta_phi {
                    inside += a.norm_sqr();
                }
            }
            total += pm * inside;
            count += pm;
        }
    }
    assert!(
        total / count >= p,
        "mean in-window weight {}",
        total / count
    );
}
