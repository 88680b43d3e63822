use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use votebound::minimizer::{margin_operator, project_slice, solve_slice};
use votebound::oracle::{generate, InstanceSpec};
use votebound::LabelKind;

fn random_spec(rng: &mut ChaCha8Rng) -> InstanceSpec {
    InstanceSpec {
        label_kind: LabelKind::Multiclass,
        q: rng.random_range(2..=5),
        voters: rng.random_range(1..=10),
        examples: rng.random_range(1..=50),
        seed: rng.next_u64(),
        voter_accuracy: rng.random_range(0.35..=1.0),
    }
}

#[test]
fn second_moment_form_is_positive_semidefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let spec = random_spec(&mut rng);
        let (ds, ens) = generate(&spec).unwrap();
        let omega = [2.0, 3.0, spec.q as f64][rng.random_range(0..3)];
        let op = margin_operator(&ds, &ens.voters, omega).unwrap();
        let (_, gram) = op.quadratic_form();
        let n = gram.len();
        let g = DMatrix::from_fn(n, n, |i, j| gram[i][j]);
        assert!((&g - g.transpose()).abs().max() < 1e-15);
        let eigen = SymmetricEigen::new(g);
        let smallest = eigen.eigenvalues.min();
        assert!(
            smallest >= -1e-10,
            "seed {}: eigenvalue {smallest}",
            spec.seed
        );
    }
}

#[test]
fn slice_solutions_are_feasible_and_descend() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut solved = 0;
    for _ in 0..300 {
        let spec = random_spec(&mut rng);
        let (ds, ens) = generate(&spec).unwrap();
        let op = margin_operator(&ds, &ens.voters, 2.0).unwrap();
        let (abar, gram) = op.quadratic_form();
        let lo = abar.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = abar.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mu = lo + rng.random::<f64>() * (hi - lo);
        let start: Vec<f64> = (0..abar.len()).map(|_| rng.random::<f64>()).collect();
        let s = solve_slice(&gram, &abar, mu, &start, 10_000, 1e-12)
            .expect("mu within the vertex range");
        solved += 1;
        assert!(s.rho.iter().all(|r| *r >= 0.0));
        assert!((s.rho.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let achieved: f64 = abar.iter().zip(&s.rho).map(|(a, r)| a * r).sum();
        assert!(
            (achieved - mu).abs() < 1e-9,
            "seed {}: {achieved} vs {mu}",
            spec.seed
        );
        assert!(s.objective_history.windows(2).all(|w| w[1] <= w[0]));

        let margins = op.margins(&s.rho);
        let mu2: f64 = margins
            .iter()
            .zip(&op.weights)
            .map(|(m, w)| w * m * m)
            .sum();
        assert!((mu2 - s.mu2).abs() < 1e-9);
    }
    assert_eq!(solved, 300);
}

#[test]
fn slice_projection_outside_range_is_none() {
    let abar = [0.1, 0.3];
    assert!(project_slice(&[0.5, 0.5], &abar, 0.35).is_none());
    assert!(project_slice(&[0.5, 0.5], &abar, 0.05).is_none());
    let p = project_slice(&[0.9, 0.1], &abar, 0.2).unwrap();
    assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
}
