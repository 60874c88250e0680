use std::collections::BTreeSet;

use homothet::compile::{compile_pattern, CompileConfig, Safety};
use homothet::copies::{enumerate_copies_with, execution, Execution, Mode};
use homothet::testkit::{generate, oracle_copies, planted_instance, InstanceSpec};
use homothet::{enumerate_squares, EngineOptions, Occurrence, Pattern, PointSet, Scalar};

fn copies(points: &PointSet, pattern: &Pattern, negative: bool, mode: Mode, threshold: Option<usize>) -> Vec<Vec<usize>> {
    let compiled = compile_pattern(
        pattern,
        CompileConfig {
            allow_negative_scale: negative,
        },
    )
    .unwrap();
    let options = EngineOptions {
        threshold,
        ..EngineOptions::default()
    };
    let mut out = Vec::new();
    enumerate_copies_with(points, &compiled, mode, &options, &mut |o: &Occurrence<'_>| {
        assert!(o.is_exact());
        out.push(o.vertex_indices())
    })
    .unwrap();
    out
}

fn as_set(found: Vec<Vec<usize>>) -> BTreeSet<Vec<usize>> {
    let n = found.len();
    let set: BTreeSet<_> = found.into_iter().collect();
    assert_eq!(set.len(), n, "a copy was reported twice");
    set
}

fn patterns() -> Vec<(&'static str, Pattern)> {
    vec![
        ("triangle", Pattern::from_ints(&[[0, 0], [1, 0], [0, 1]]).unwrap()),
        ("trapezoid", Pattern::from_ints(&[[0, 0], [3, 0], [1, 1], [2, 1]]).unwrap()),
        ("collinear-quad", Pattern::from_ints(&[[0, 0], [2, 0], [1, 0], [0, 1]]).unwrap()),
        ("square", Pattern::unit_cube(2)),
        ("kite", Pattern::from_ints(&[[0, 0], [2, 1], [1, 3], [-1, 1]]).unwrap()),
    ]
}

#[test]
fn planar_patterns_match_the_oracle() {
    for (name, pattern) in patterns() {
        for seed in 0..6u64 {
            let sets = [
                generate(&InstanceSpec::Random {
                    n: 300,
                    ranges: vec![16, 16],
                    seed,
                })
                .unwrap(),
                planted_instance(&pattern, 10, 5, 150, 30, seed).unwrap(),
            ];
            for set in &sets {
                let want = oracle_copies(set, &pattern, false).unwrap();
                for mode in [Mode::Auto, Mode::Safe] {
                    assert_eq!(as_set(copies(set, &pattern, false, mode, None)), want, "{name} seed {seed} {mode:?}");
                }
            }
        }
    }
}

#[test]
fn adversarial_lines_and_thresholds() {
    let sets = [
        generate(&InstanceSpec::PaddedGrid { side: 5, pad: 12, dim: 2 }).unwrap(),
        generate(&InstanceSpec::TallColumns {
            columns: 6,
            height: 30,
            spacing: 2,
        })
        .unwrap(),
        generate(&InstanceSpec::Grid { side: 7, dim: 2 }).unwrap(),
    ];
    for (name, pattern) in patterns() {
        for set in &sets {
            let want = oracle_copies(set, &pattern, false).unwrap();
            for threshold in [None, Some(0), Some(1), Some(3)] {
                let got = as_set(copies(set, &pattern, false, Mode::Safe, threshold));
                assert_eq!(got, want, "{name} threshold {threshold:?}");
            }
        }
    }
}

#[test]
fn simplex_in_three_dimensions() {
    let simplex = Pattern::from_ints(&[[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap();
    let compiled = compile_pattern(&simplex, CompileConfig::default()).unwrap();
    assert_eq!(execution(&compiled, Mode::Auto), Execution::Safe);
    for seed in 0..4u64 {
        let set = generate(&InstanceSpec::Random {
            n: 400,
            ranges: vec![7, 7, 7],
            seed,
        })
        .unwrap();
        let want = oracle_copies(&set, &simplex, false).unwrap();
        assert_eq!(as_set(copies(&set, &simplex, false, Mode::Auto, None)), want);
    }
}

#[test]
fn modes_agree_on_deletion_safe_patterns() {
    let cube = Pattern::unit_cube(3);
    let prism = Pattern::from_ints(&[[0, 0], [2, 0], [0, 1], [2, 1], [1, 0], [1, 1]]).unwrap();
    assert_eq!(compile_pattern(&prism, CompileConfig::default()).unwrap().safety, Safety::DeletionSafe);
    for seed in 0..5u64 {
        let planar = generate(&InstanceSpec::Random {
            n: 300,
            ranges: vec![10, 10],
            seed,
        })
        .unwrap();
        for pattern in [Pattern::unit_cube(2), prism.clone()] {
            let paper = as_set(copies(&planar, &pattern, false, Mode::Paper, None));
            let safe = as_set(copies(&planar, &pattern, false, Mode::Safe, None));
            assert_eq!(paper, safe);
            assert_eq!(paper, oracle_copies(&planar, &pattern, false).unwrap());
        }
        let space = generate(&InstanceSpec::Random {
            n: 300,
            ranges: vec![5, 5, 5],
            seed,
        })
        .unwrap();
        let paper = as_set(copies(&space, &cube, false, Mode::Paper, None));
        assert_eq!(paper, as_set(copies(&space, &cube, false, Mode::Safe, None)));
        assert_eq!(paper, oracle_copies(&space, &cube, false).unwrap());
    }
}

#[test]
fn unit_square_pattern_equals_square_engine() {
    for seed in 0..10u64 {
        let set = generate(&InstanceSpec::Random {
            n: 400,
            ranges: vec![20, 20],
            seed,
        })
        .unwrap();
        let mut squares = Vec::new();
        enumerate_squares(&set, &mut |o: &Occurrence<'_>| squares.push(o.vertex_indices())).unwrap();
        assert_eq!(as_set(copies(&set, &Pattern::unit_cube(2), false, Mode::Auto, None)), as_set(squares));
    }
}

#[test]
fn negative_scale_is_the_union_with_the_reflection() {
    for (name, pattern) in patterns() {
        let set = generate(&InstanceSpec::Random {
            n: 250,
            ranges: vec![12, 12],
            seed: 42,
        })
        .unwrap();
        let both = as_set(copies(&set, &pattern, true, Mode::Auto, None));
        let mut union = as_set(copies(&set, &pattern, false, Mode::Auto, None));
        union.extend(as_set(copies(&set, &pattern.reflected(), false, Mode::Auto, None)));
        assert_eq!(both, union, "{name}");
        assert_eq!(both, oracle_copies(&set, &pattern, true).unwrap(), "{name}");
    }
}

#[test]
fn homothety_invariance() {
    let s = Scalar::ratio(3, 7);
    let t = [Scalar::ratio(-5, 2), Scalar::from_int(11)];
    for (name, pattern) in patterns() {
        let set = planted_instance(&pattern, 8, 4, 100, 25, 7).unwrap();
        let moved = set.map_points(|p| p.iter().zip(&t).map(|(x, t)| &(x * &s) + t).collect());
        assert_eq!(
            as_set(copies(&set, &pattern, false, Mode::Auto, None)),
            as_set(copies(&moved, &pattern, false, Mode::Auto, None)),
            "{name}"
        );
    }
}

// Deleting the points of short lines loses copies of patterns that are not
// deletion-safe: a vertex with no parallel partner can be removed while the
// copy has no short witness yet. Safe mode keeps them.
#[test]
fn deletion_loses_copies_only_for_unsafe_patterns() {
    let tri = Pattern::from_ints(&[[0, 0], [1, 0], [0, 1]]).unwrap();
    let mut lost = 0;
    for seed in 0..30u64 {
        let set = generate(&InstanceSpec::Random {
            n: 120,
            ranges: vec![12, 12],
            seed,
        })
        .unwrap();
        let want = oracle_copies(&set, &tri, false).unwrap();
        for threshold in [1, 2, 3] {
            let paper = as_set(copies(&set, &tri, false, Mode::Paper, Some(threshold)));
            assert!(paper.is_subset(&want));
            lost += want.len() - paper.len();
            assert_eq!(as_set(copies(&set, &tri, false, Mode::Safe, Some(threshold))), want);
        }
    }
    assert!(lost > 0, "expected paper mode to drop some triangle copies");
}
