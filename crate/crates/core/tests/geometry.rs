use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recspec::geometry::*;
use recspec::symbolic::{repetition_time_of, Word};
use recspec::Error;

fn word(s: &str) -> Word {
    Word::parse(s, 2).unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, map: &MarkovExpandingMap, len: usize) -> Vec<u32> {
    let sft = map.sft();
    let mut w = vec![rng.random_range(0..sft.alphabet_size() as u32)];
    while w.len() < len {
        let succ = sft.successors(*w.last().unwrap());
        w.push(succ[rng.random_range(0..succ.len())]);
    }
    w
}

#[test]
fn coding_examples() {
    let d = MarkovExpandingMap::doubling();
    assert_eq!(d.code(1.0 / 3.0, 6).unwrap().to_string(), "010101");
    assert_eq!(d.code(0.0, 6).unwrap().to_string(), "000000");
    let c = MarkovExpandingMap::cantor3();
    assert_eq!(c.code(2.0 / 3.0, 4).unwrap().to_string(), "1000");
    assert!(matches!(d.code(0.5, 3), Err(Error::BoundaryOrbit { step: 0, .. })));
    assert!(matches!(d.code(0.25, 3), Err(Error::BoundaryOrbit { step: 1, .. })));
    assert!(matches!(c.code(0.5, 3), Err(Error::Escaped { step: 0, .. })));
}

#[test]
fn decoding_examples() {
    let d = MarkovExpandingMap::doubling();
    assert_eq!(d.decode(&word("01")).unwrap(), [0.25, 0.5]);
    assert_eq!(d.decode(&word("101")).unwrap(), [0.625, 0.75]);
    let c = MarkovExpandingMap::cantor3();
    let [lo, hi] = c.decode(&word("0")).unwrap();
    assert!(lo == 0.0 && (hi - 1.0 / 3.0).abs() < 1e-16);
    let g = MarkovExpandingMap::golden();
    assert!(matches!(g.decode(&word("11")), Err(Error::InadmissibleWord(_))));
}

#[test]
fn coding_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for map in [MarkovExpandingMap::doubling(), MarkovExpandingMap::golden(), MarkovExpandingMap::sine_doubling(0.2).unwrap()] {
        for _ in 0..1000 {
            let x: f64 = rng.random();
            let w = map.code(x, 21).unwrap();
            let [lo, hi] = map.decode(&Word::new(w.symbols()[..20].to_vec(), 2).unwrap()).unwrap();
            assert!(lo - 1e-12 <= x && x <= hi + 1e-12, "{} {x}", map.name());
            let shifted = map.code(map.apply(x).unwrap(), 20).unwrap();
            assert_eq!(shifted.symbols(), &w.symbols()[1..]);
        }
    }
}

#[test]
fn linear_cylinder_lengths() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for map in [MarkovExpandingMap::slopes24(), MarkovExpandingMap::cantor3(), MarkovExpandingMap::golden()] {
        for _ in 0..200 {
            let w = Word::new(random_word(&mut rng, &map, 12), 2).unwrap();
            let [lo, hi] = map.decode(&w).unwrap();
            let s = map.birkhoff_sum_word(&w, 11).unwrap();
            let expected_len = (-s).exp() * (map.branches()[w.symbols()[11] as usize].domain[1] - map.branches()[w.symbols()[11] as usize].domain[0]);
            // Endpoints carry absolute rounding error near 1e-16.
            assert!(((hi - lo) / expected_len - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn birkhoff_examples() {
    let d = MarkovExpandingMap::doubling();
    let orbit = d.orbit(0.1234, 10).unwrap();
    assert!((d.birkhoff_sum(&orbit, 10).unwrap() - 10.0 * 2f64.ln()).abs() < 1e-12);
    assert_eq!(d.birkhoff_sum(&orbit, 0).unwrap(), 0.0);
    let s = MarkovExpandingMap::slopes24();
    let sum = s.birkhoff_sum_word(&word("0101010101"), 10).unwrap();
    assert!((sum - 5.0 * 2f64.ln() - 5.0 * 4f64.ln()).abs() < 1e-12);
}

#[test]
fn return_time_examples() {
    let d = MarkovExpandingMap::doubling();
    let orbit = d.orbit(1.0 / 3.0, 10).unwrap();
    for r in [0.3, 0.1, 1e-6] {
        assert_eq!(tau_r(&orbit, r, 10), ReturnTime::Found(2));
    }
    let fixed = d.orbit(0.0, 5).unwrap();
    assert_eq!(tau_r(&fixed, 1e-12, 5), ReturnTime::Found(1));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = random_word(&mut rng, &d, 1_000_000);
    let orbit = d.shadow_orbit(&w).unwrap();
    let brute = (1..orbit.len()).find(|&n| (orbit[n] - orbit[0]).abs() < 1e-3);
    assert_eq!(tau_r(&orbit, 1e-3, 1_000_000).found(), brute);
    assert_eq!(tau_r(&orbit, 1e-3, 10), ReturnTime::Censored(10));
}

#[test]
fn tau_grid_matches_scans_and_is_monotone() {
    let d = MarkovExpandingMap::doubling();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let w = random_word(&mut rng, &d, 200_000);
        let orbit = d.shadow_orbit(&w).unwrap();
        let radii: Vec<f64> = (1..=16).map(|j| 2f64.powi(-j)).collect();
        let grid = tau_grid(&orbit, &radii, 200_000);
        for (r, t) in radii.iter().zip(&grid) {
            assert_eq!(*t, tau_r(&orbit, *r, 200_000));
        }
        let found: Vec<usize> = grid.iter().filter_map(|t| t.found()).collect();
        assert!(found.windows(2).all(|p| p[0] <= p[1]));
    }
}

#[test]
fn shadow_orbit_tracks_the_code() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for map in [MarkovExpandingMap::doubling(), MarkovExpandingMap::slopes24(), MarkovExpandingMap::sine_doubling(0.3).unwrap()] {
        let w = random_word(&mut rng, &map, 5000);
        let orbit = map.shadow_orbit(&w).unwrap();
        for j in (0..4900).step_by(97) {
            // Forward iteration loses up to two bits per step on the slope-4 branch.
            let code = map.code(orbit[j], 16).unwrap();
            assert_eq!(code.symbols(), &w[j..j + 16]);
        }
    }
}

#[test]
fn distortion() {
    for map in [MarkovExpandingMap::cantor3(), MarkovExpandingMap::slopes24()] {
        let dd = distortion_constants(&map, 10).unwrap();
        assert_eq!(dd.d, 1.0);
        assert!(!dd.full_branch_adjacent);
    }
    let dd = distortion_constants(&MarkovExpandingMap::cantor3(), 6).unwrap();
    assert!((dd.delta - 1.0 / 3.0).abs() < 1e-12 && (dd.kappa - 1.0 / 3.0).abs() < 1e-12);
    let dd = distortion_constants(&MarkovExpandingMap::slopes24(), 6).unwrap();
    assert!((dd.delta - 1.0 / 6.0).abs() < 1e-12);
    let dd = distortion_constants(&MarkovExpandingMap::doubling(), 6).unwrap();
    assert!(dd.full_branch_adjacent && dd.delta == 0.0 && dd.kappa == 0.25);
    let bent = MarkovExpandingMap::sine_doubling(0.1).unwrap();
    let d8 = distortion_constants(&bent, 8).unwrap().d;
    let d12 = distortion_constants(&bent, 12).unwrap().d;
    assert!(d8 > 1.0 && d8.is_finite());
    assert!((d12 / d8 - 1.0).abs() < 0.05);
}

#[test]
fn ball_cylinder_inclusions() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for map in [MarkovExpandingMap::slopes24(), MarkovExpandingMap::cantor3()] {
        let dd = distortion_constants(&map, 8).unwrap();
        for _ in 0..100 {
            let w = random_word(&mut rng, &map, 80);
            for n in 1..=20 {
                let rep = ball_cylinder_check(&map, &w, n, &dd).unwrap();
                assert!(rep.holds(), "{} n = {n}: {rep:?}", map.name());
            }
        }
    }
    let d = MarkovExpandingMap::doubling();
    let dd = distortion_constants(&d, 6).unwrap();
    let w = random_word(&mut rng, &d, 80);
    let rep = ball_cylinder_check(&d, &w, 10, &dd).unwrap();
    assert!((rep.inner_radius - 0.25 * 2f64.powi(-10)).abs() < 1e-18);
    assert!(rep.outer_holds);
}

#[test]
fn recurrence_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for map in [MarkovExpandingMap::slopes24(), MarkovExpandingMap::cantor3()] {
        let dd = distortion_constants(&map, 8).unwrap();
        for _ in 0..20 {
            let w = Word::new(random_word(&mut rng, &map, 200_000), 2).unwrap();
            for k in 1..=12 {
                let rep = recurrence_sandwich_check(&map, &w, k, &dd).unwrap();
                assert_ne!(rep.holds(), Some(false), "{rep:?}");
            }
        }
    }
    let d = MarkovExpandingMap::doubling();
    let dd = distortion_constants(&d, 6).unwrap();
    let periodic = Word::new((0..200).map(|i| i % 2).collect(), 2).unwrap();
    let rep = recurrence_sandwich_check(&d, &periodic, 4, &dd).unwrap();
    assert_eq!(rep.repetition, Some(2));
    assert_eq!((rep.tau_small, rep.tau_large), (ReturnTime::Found(2), ReturnTime::Found(2)));
    let w = Word::new(random_word(&mut rng, &d, 100_000), 2).unwrap();
    let rep = recurrence_sandwich_check(&d, &w, 8, &dd).unwrap();
    assert_eq!(rep.repetition, repetition_time_of(w.symbols(), 8).unwrap());
}

#[test]
fn bowen_dimensions() {
    let s = MarkovExpandingMap::doubling().bowen_dimension(1).unwrap();
    assert!((s.dimension - 1.0).abs() < 1e-12);
    let s = MarkovExpandingMap::cantor3().bowen_dimension(1).unwrap();
    assert!((s.dimension - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    let s = MarkovExpandingMap::slopes24().bowen_dimension(2).unwrap();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((s.dimension - golden.ln() / 2f64.ln()).abs() < 1e-12);
    assert!(s.refinement_gap < 1e-12);
    let g = MarkovExpandingMap::golden().bowen_dimension(1).unwrap();
    assert!((g.dimension - 1.0).abs() < 1e-12);
    let bent = MarkovExpandingMap::sine_doubling(0.1).unwrap();
    let a = bent.bowen_dimension(6).unwrap().dimension;
    let b = bent.bowen_dimension(8).unwrap().dimension;
    assert!((a - b).abs() < 1e-3);
    assert!((b - 1.0).abs() < 1e-3);
}

#[test]
fn endpoint_codes() {
    let codes = MarkovExpandingMap::doubling().hull_endpoint_codes();
    let text: Vec<(Vec<u32>, Vec<u32>)> = codes.iter().map(|c| (c.prefix.clone(), c.period.clone())).collect();
    assert_eq!(text, vec![(vec![], vec![0]), (vec![0], vec![1]), (vec![1], vec![0]), (vec![], vec![1])]);
}

#[test]
fn boundary_frequency_is_zero() {
    let d = MarkovExpandingMap::doubling();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let hits = (0..10_000).filter(|_| d.code(rng.random::<f64>(), 20).is_err()).count();
    assert_eq!(hits, 0);
}

#[test]
fn toml_configs() {
    let m = map_from_toml("preset = \"cantor3\"").unwrap();
    assert_eq!(m.name(), "cantor3");
    let m = map_from_toml(
        "name = \"two-slopes\"\n[[branch]]\ndomain = [0.0, 0.5]\nimage = [0.0, 1.0]\n[[branch]]\ndomain = [0.5, 0.75]\nimage = [0.0, 1.0]\n",
    )
    .unwrap();
    assert_eq!(m.sft().edge_count(), 4);
    assert!(map_from_toml("preset = \"nope\"").is_err());
    assert!(map_from_toml("[[branch]]\ndomain = [0.0, 0.5]\nimage = [0.0, 0.4]\n[[branch]]\ndomain = [0.5, 1.0]\nimage = [0.0, 1.0]\n").is_err());
    let slow = "[[branch]]\ndomain = [0.0, 0.5]\nimage = [0.0, 0.5]\n[[branch]]\ndomain = [0.5, 1.0]\nimage = [0.0, 1.0]\n";
    assert!(matches!(map_from_toml(slow), Err(Error::NotExpanding { .. })));
}
