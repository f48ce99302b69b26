use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stft_dereverb::lsq::Matrix;
use stft_dereverb::solver::{
    bin_residual, bin_system, shifted_channel_stfts, solve_filter_bank, target_stfts,
};
use stft_dereverb::stft::{make_window, WindowKind};
use stft_dereverb::{FilterBank, ImpulseResponseF64, StftConfigF64};

type C = Complex<f64>;

fn random_channel(rng: &mut ChaCha8Rng, m: usize) -> ImpulseResponseF64 {
    let mut taps: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.5..0.5)).collect();
    taps[rng.gen_range(0..m.min(3))] = 1.0;
    ImpulseResponseF64::new(taps, 8000).unwrap()
}

/// STFT of `x` at frame `l` by direct summation.
fn naive_frame(x: &[f64], w: &[f64], hop: usize, l: isize) -> Vec<C> {
    let n = w.len();
    (0..n)
        .map(|k| {
            (0..n).fold(C::new(0.0, 0.0), |acc, m| {
                let t = l * hop as isize + m as isize;
                let v = if t >= 0 && (t as usize) < x.len() { x[t as usize] } else { 0.0 };
                let ang = -2.0 * std::f64::consts::PI * (k * m) as f64 / n as f64;
                acc + C::from_polar(v * w[m], ang)
            })
        })
        .collect()
}

/// Solves `(A^H A) g = A^H b` per bin with every frame that can be nonzero.
fn oracle(h: &ImpulseResponseF64, w: &[f64], hop: usize, a: usize, b: usize) -> Vec<Vec<C>> {
    let n = w.len();
    let m = h.len();
    let nd = h.direct_index();
    let lo = -((n / hop) as isize) - a as isize - 2;
    let hi = ((m + hop) / hop) as isize + b as isize + 2;
    let unknowns = a + b + 1;
    let mut probes = Vec::new();
    for lambda in 0..hop {
        let mut x = vec![0.0; lambda];
        x.extend_from_slice(h.taps());
        let mut t = vec![0.0; lambda + m];
        t[lambda + nd] = h.taps()[nd];
        let frames = |s: &[f64]| {
            (lo - b as isize..=hi + a as isize)
                .map(|l| (l, naive_frame(s, w, hop, l)))
                .collect::<std::collections::BTreeMap<_, _>>()
        };
        probes.push((frames(&x), frames(&t)));
    }
    (0..n)
        .map(|k| {
            let mut ata = vec![vec![C::new(0.0, 0.0); unknowns + 1]; unknowns];
            for (hs, ts) in &probes {
                for l in lo..=hi {
                    let row: Vec<C> = (0..unknowns)
                        .map(|j| hs[&(l - (j as isize - a as isize))][k])
                        .collect();
                    let rhs = ts[&l][k];
                    for i in 0..unknowns {
                        for j in 0..unknowns {
                            ata[i][j] += row[i].conj() * row[j];
                        }
                        ata[i][unknowns] += row[i].conj() * rhs;
                    }
                }
            }
            for c in 0..unknowns {
                let p = (c..unknowns)
                    .max_by(|&x, &y| ata[x][c].norm().partial_cmp(&ata[y][c].norm()).unwrap())
                    .unwrap();
                ata.swap(c, p);
                for r in 0..unknowns {
                    if r != c {
                        let f = ata[r][c] / ata[c][c];
                        for q in c..=unknowns {
                            let v = ata[c][q];
                            ata[r][q] -= f * v;
                        }
                    }
                }
            }
            (0..unknowns).map(|i| ata[i][unknowns] / ata[i][i]).collect()
        })
        .collect()
}

#[test]
fn tiny_configuration_matches_oracle() {
    let config: StftConfigF64 = make_window(WindowKind::SqrtHann, 2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let h = random_channel(&mut rng, 8);
        let ch = shifted_channel_stfts(&h, &config, 1, 1);
        let tg = target_stfts(&h, &config, 1, 1);
        let solved = solve_filter_bank(&ch, &tg, 1, 1).unwrap();
        let expected = oracle(&h, config.window(), 4, 1, 1);
        for (k, coeffs) in expected.iter().enumerate() {
            for (j, &e) in coeffs.iter().enumerate() {
                let got = solved.bank.coeff(k, j as isize - 1);
                assert!((got - e).norm() < 1e-8, "bin {k} tap {j}: {got} vs {e}");
            }
        }
    }
}

fn perturbed(bank: &FilterBank<f64>, rng: &mut ChaCha8Rng, scale: f64) -> FilterBank<f64> {
    let n = bank.n_bins();
    let half: Vec<Vec<C>> = (0..=n / 2)
        .map(|k| {
            bank.bin(k)
                .iter()
                .map(|&c| c + C::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
                .collect()
        })
        .collect();
    FilterBank::from_half_spectrum(bank.config(), bank.future(), bank.past(), half).unwrap()
}

#[test]
fn solution_beats_alternatives() {
    let config: StftConfigF64 = make_window(WindowKind::SqrtHann, 4, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let h = random_channel(&mut rng, 40);
        let ch = shifted_channel_stfts(&h, &config, 2, 3);
        let tg = target_stfts(&h, &config, 2, 3);
        let solved = solve_filter_bank(&ch, &tg, 2, 3).unwrap();
        let others = [
            FilterBank::delta(&config, 2, 3),
            FilterBank::zeros(&config, 2, 3),
            perturbed(&solved.bank, &mut rng, 1e-3),
        ];
        for k in 0..=config.n_bins() / 2 {
            let best = bin_residual(&ch, &tg, &solved.bank, k);
            assert!((best - solved.residuals[k]).abs() <= 1e-9 * best.max(1.0));
            for other in &others {
                assert!(best <= bin_residual(&ch, &tg, other, k) + 1e-12);
            }
        }
    }
}

#[test]
fn solution_is_invariant_to_channel_gain() {
    let config: StftConfigF64 = make_window(WindowKind::SqrtHann, 4, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h = random_channel(&mut rng, 30);
    let a = solve_filter_bank(
        &shifted_channel_stfts(&h, &config, 2, 2),
        &target_stfts(&h, &config, 2, 2),
        2,
        2,
    )
    .unwrap();
    let h2 = h.scaled(2.0);
    let b = solve_filter_bank(
        &shifted_channel_stfts(&h2, &config, 2, 2),
        &target_stfts(&h2, &config, 2, 2),
        2,
        2,
    )
    .unwrap();
    for (x, y) in a.bank.coefficients().iter().zip(b.bank.coefficients()) {
        assert!((x - y).norm() < 1e-9);
    }
}

#[test]
fn bank_is_conjugate_symmetric_and_system_shape_holds() {
    let config: StftConfigF64 = make_window(WindowKind::SqrtHann, 4, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = random_channel(&mut rng, 50);
    let ch = shifted_channel_stfts(&h, &config, 3, 2);
    let tg = target_stfts(&h, &config, 3, 2);
    let solved = solve_filter_bank(&ch, &tg, 3, 2).unwrap();
    assert!(solved.bank.symmetry_deviation() < 1e-12);
    for k in [0, config.n_bins() / 2] {
        for &c in solved.bank.bin(k) {
            assert_eq!(c.im, 0.0);
        }
    }
    let (m, rhs): (Matrix<C>, Vec<C>) = bin_system(&ch, &tg, ch.problem(), 3);
    assert_eq!(m.rows(), (2 + 3 + 2 + 4) * 8 + 50 - 1);
    assert_eq!(m.cols(), 6);
    assert_eq!(rhs.len(), m.rows());
}
