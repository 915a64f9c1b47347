//! Scenario circuits against the path-enumeration oracle.

use twophoton::detection::coincidence_probability;
use twophoton::oracle::{max_pattern_difference, oracle_joint_distribution};
use twophoton::scenarios::{Scenario, ScenarioKind};

#[test]
fn hom_coincidence_law() {
    let s = Scenario::with_defaults(ScenarioKind::HomDip, 1.0).unwrap();
    let circuit = s.circuit().unwrap();
    for v in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let input = s.input_state(v).unwrap();
        let output = circuit.run(&input).unwrap();
        let detectors = circuit.detectors();
        let coincidence = coincidence_probability(&output, &detectors[0], &detectors[1]).unwrap();
        assert!((coincidence - (1.0 - v * v) / 2.0).abs() < 1e-12);

        let oracle = oracle_joint_distribution(&circuit, &input).unwrap();
        let split: f64 = oracle
            .iter()
            .filter(|((x, y), _)| x != y)
            .map(|(_, p)| p)
            .sum();
        assert!((split - (1.0 - v * v) / 2.0).abs() < 1e-12);
    }
}

#[test]
fn every_scenario_agrees_with_the_oracle() {
    let kinds = [
        ScenarioKind::HomDip,
        ScenarioKind::Cascade,
        ScenarioKind::Bell {
            a1_deg: 45.0,
            a2_deg: 45.0,
        },
        ScenarioKind::Bell {
            a1_deg: 45.0,
            a2_deg: -45.0,
        },
        ScenarioKind::Bell {
            a1_deg: 10.0,
            a2_deg: 70.0,
        },
        ScenarioKind::Deterministic { phase_rad: 0.0 },
        ScenarioKind::Deterministic { phase_rad: 1.1 },
    ];
    for kind in kinds {
        let s = Scenario::with_defaults(kind, 1.0).unwrap();
        let circuit = s.circuit().unwrap();
        for v in [0.0, 0.3, 0.9, 1.0] {
            let input = s.input_state(v).unwrap();
            let fock = circuit.run(&input).unwrap().occupation_patterns().unwrap();
            let oracle = oracle_joint_distribution(&circuit, &input).unwrap();
            let diff = max_pattern_difference(&fock, &oracle);
            assert!(diff < 1e-12, "{kind:?} at v={v}: {diff:e}");
        }
    }
}
