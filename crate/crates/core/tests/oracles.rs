//! Library outputs checked against independent reference computations.

mod common;

use std::f64::consts::PI;

use common::*;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use tdsv::audio::{read_wav, synth_utterance, wav_bytes, write_wav, SynthSpeakerSpec, Waveform};
use tdsv::augment::{
    add_noise_snr, apply_ir, convolve_truncated, gated_power, harmonic_distort, noise_gain, pitch_shift, sound_mix,
    wow_resample, VadMask, WowParams,
};
use tdsv::eval::{
    compute_eer, compute_min_dcf, det_points, evaluate_trials, DcfParams, ScoreSet, Trial, TrialList, TrialType,
};
use tdsv::features::{
    append_deltas, cmvn, energy_vad, frame_signal, hamming, pre_emphasis, rasta_filter, FeatureMatrix,
    FrontendConfig, MfccAnalyzer,
};
use tdsv::gmm::{gmm_log_likelihood, llr_score, map_adapt, train_ubm, DiagGmm, EmConfig, MapConfig};

fn column(m: &FeatureMatrix, d: usize) -> Vec<f64> {
    (0..m.n_rows()).map(|t| m.get(t, d)).collect()
}

#[test]
fn quantized_payload_round_trips_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(11);
    let payload: Vec<i16> = (0..3000).map(|_| r.random()).collect();
    let data_len = payload.len() as u32 * 2;
    let mut bytes = Vec::new();
    bytes.extend_from_slice(b"RIFF");
    bytes.extend_from_slice(&(36 + data_len).to_le_bytes());
    bytes.extend_from_slice(b"WAVEfmt ");
    for v in [16u32.to_le_bytes().as_slice(), &1u16.to_le_bytes(), &1u16.to_le_bytes()] {
        bytes.extend_from_slice(v);
    }
    bytes.extend_from_slice(&16000u32.to_le_bytes());
    bytes.extend_from_slice(&32000u32.to_le_bytes());
    bytes.extend_from_slice(&2u16.to_le_bytes());
    bytes.extend_from_slice(&16u16.to_le_bytes());
    bytes.extend_from_slice(b"data");
    bytes.extend_from_slice(&data_len.to_le_bytes());
    payload.iter().for_each(|v| bytes.extend_from_slice(&v.to_le_bytes()));

    let src = dir.path().join("in.wav");
    std::fs::write(&src, &bytes).unwrap();
    let wave = read_wav(&src).unwrap();
    for (s, &p) in wave.samples.iter().zip(&payload) {
        assert_eq!(*s, p as f64 / 32768.0);
    }
    let dst = dir.path().join("out.wav");
    write_wav(&wave, &dst).unwrap();
    assert_eq!(std::fs::read(&dst).unwrap(), bytes);
}

#[test]
fn float_round_trip_within_one_lsb() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(12);
    for trial in 0..20 {
        let samples: Vec<f64> = (0..500).map(|_| r.random_range(-1.0..1.0)).collect();
        let w = Waveform::new(samples, 8000).unwrap();
        let p = dir.path().join(format!("{trial}.wav"));
        write_wav(&w, &p).unwrap();
        let back = read_wav(&p).unwrap();
        assert_eq!(back.len(), w.len());
        for (a, b) in w.samples.iter().zip(&back.samples) {
            assert!((a - b).abs() <= 1.0 / 32768.0);
        }
    }
}

/// Autocorrelation pitch estimate over the loudest half second.
fn autocorr_f0(x: &[f64], sr: u32) -> f64 {
    let win = sr as usize / 2;
    let start = (0..x.len() - win)
        .step_by(win / 4)
        .max_by(|&a, &b| {
            let e = |s: usize| x[s..s + win].iter().map(|v| v * v).sum::<f64>();
            e(a).partial_cmp(&e(b)).unwrap()
        })
        .unwrap();
    let seg = &x[start..start + win];
    let ac = |lag: usize| seg[..win - lag].iter().zip(&seg[lag..]).map(|(a, b)| a * b).sum::<f64>();
    let (lo, hi) = (sr as usize / 320, sr as usize / 75);
    let best = (lo..=hi).max_by(|&a, &b| ac(a).partial_cmp(&ac(b)).unwrap()).unwrap();
    let (a, b, c) = (ac(best - 1), ac(best), ac(best + 1));
    let lag = best as f64 + 0.5 * (a - c) / (a - 2.0 * b + c);
    sr as f64 / lag
}

#[test]
fn synthetic_speakers_differ_by_their_f0_gap() {
    let spec = |id: &str, f0: f64| SynthSpeakerSpec {
        speaker_id: id.into(),
        f0,
        formant_offsets: [0.0; 3],
        seed: 5,
    };
    let lo = synth_utterance(&spec("s1", 120.0), "phrase00", 2.0, 16000).unwrap();
    let hi = synth_utterance(&spec("s2", 200.0), "phrase00", 2.0, 16000).unwrap();
    let gap = autocorr_f0(&hi.samples, 16000) - autocorr_f0(&lo.samples, 16000);
    assert!((gap - 80.0).abs() <= 0.03 * 80.0, "estimated gap {gap}");
}

#[test]
fn pre_emphasis_of_constant() {
    let x = vec![0.4; 800];
    let y = pre_emphasis(&x, 0.97);
    assert_eq!(y[0], 0.4);
    for v in &y[1..] {
        assert!((v - 0.03 * 0.4).abs() < 1e-15);
    }
    let frames = frame_signal(&Waveform::new(x, 16000).unwrap(), &FrontendConfig::default()).unwrap();
    let w = hamming(frames.frame_len);
    for i in 0..frames.len() {
        for (n, v) in frames.frame(i).iter().enumerate() {
            let expect = if i == 0 && n == 0 { 0.4 } else { 0.012 } * w[n];
            assert!((v - expect).abs() < 1e-15);
        }
    }
}

#[test]
fn sine_at_filter_center_peaks_that_filter() {
    let cfg = FrontendConfig::default();
    let an = MfccAnalyzer::new(&cfg, 400, 16000).unwrap();
    let w = hamming(400);
    let bin = 16000.0 / 512.0;
    let centers = an.filterbank().centers().to_vec();
    let mut checked = 0;
    for (m, &hz) in centers.iter().enumerate() {
        // filters narrower than the window's main lobe cannot isolate a tone
        let width = if m + 1 < centers.len() { centers[m + 1] - hz } else { 8000.0 - hz };
        if width < 4.0 * bin {
            continue;
        }
        let frame: Vec<f64> = sine(400, 16000, hz, 0.5).iter().zip(&w).map(|(a, b)| a * b).collect();
        let e = an.log_mel_energies(&frame);
        let top = (0..e.len()).max_by(|&a, &b| e[a].partial_cmp(&e[b]).unwrap()).unwrap();
        assert_eq!(top, m, "tone at {hz:.1} Hz");
        checked += 1;
    }
    assert!(checked >= 18);
}

#[test]
fn rasta_matches_recursion() {
    let mut r = rng(21);
    for _ in 0..100 {
        let m = random_matrix(&mut r, 20, 3, 5.0);
        let y = rasta_filter(&m);
        for d in 0..3 {
            for (a, b) in column(&y, d).iter().zip(naive_rasta(&column(&m, d))) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn deltas_match_summation() {
    let mut r = rng(22);
    for _ in 0..100 {
        let m = random_matrix(&mut r, 10, 4, 3.0);
        let out = append_deltas(&m, 2);
        assert_eq!(out.n_dims(), 12);
        for d in 0..4 {
            let c = column(&m, d);
            let d1 = naive_delta(&c, 2);
            let d2 = naive_delta(&d1, 2);
            assert_eq!(column(&out, d), c);
            assert_eq!(column(&out, 4 + d), d1);
            assert_eq!(column(&out, 8 + d), d2);
        }
    }
}

#[test]
fn vad_keeps_only_tone_frames() {
    let sr = 16000;
    let mut x = sine(8000, sr, 300.0, 1e-4 * 0.5);
    x.extend(sine(8000, sr, 300.0, 0.5));
    let cfg = FrontendConfig::default();
    let frames = frame_signal(&Waveform::new(x, sr).unwrap(), &cfg).unwrap();
    let sel = energy_vad(&frames, &cfg);
    for (i, &s) in sel.iter().enumerate() {
        let (start, end) = (i * frames.hop, i * frames.hop + frames.frame_len);
        if end <= 8000 {
            assert!(!s, "silent frame {i} selected");
        } else if start >= 8000 {
            assert!(s, "tone frame {i} dropped");
        }
    }
}

#[test]
fn cmvn_two_frames() {
    let m = FeatureMatrix::from_rows(&[vec![0.0], vec![2.0]]).unwrap();
    let n = cmvn(&m).unwrap();
    assert_eq!(column(&n, 0), vec![-1.0, 1.0]);
}

#[test]
fn octave_up_doubles_peak() {
    let sr = 16000;
    let w = Waveform::new(sine(16000, sr, 440.0, 0.5), sr).unwrap();
    let up = pitch_shift(&w, 12).unwrap();
    assert_eq!(up.len(), w.len());
    let mid = &up.samples[2000..14000];
    let f = peak_frequency(mid, sr);
    assert!((f / 880.0 - 1.0).abs() < 0.02, "peak at {f}");

    let semi = pitch_shift(&w, 1).unwrap();
    let ratio = peak_frequency(&semi.samples[2000..14000], sr) / peak_frequency(&w.samples[2000..14000], sr);
    assert!((ratio / 2f64.powf(1.0 / 12.0) - 1.0).abs() < 0.02, "ratio {ratio}");
}

#[test]
fn wow_matches_pointwise_warp() {
    let sr = 16000u32;
    let n = 2 * sr as usize;
    let chirp: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / sr as f64;
            0.8 * (2.0 * PI * (200.0 * t + 150.0 * t * t)).sin()
        })
        .collect();
    let w = Waveform::new(chirp.clone(), sr).unwrap();
    let (a, f) = (3.0, 2.0);
    let out = wow_resample(&w, WowParams { a, f }).unwrap();
    for (i, y) in out.samples.iter().enumerate() {
        let x = i as f64 / sr as f64;
        let phi = x + a * (2.0 * PI * f * x).sin() / (2.0 * PI * f);
        let pos = (phi * sr as f64).clamp(0.0, (n - 1) as f64);
        let k = pos.floor() as usize;
        let expect = if k + 1 >= n { chirp[n - 1] } else { chirp[k] + (pos - k as f64) * (chirp[k + 1] - chirp[k]) };
        assert!((y - expect).abs() < 1e-9, "sample {i}");
    }
}

fn dft_magnitude(x: &[f64], sr: u32, hz: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (n, v) in x.iter().enumerate() {
        let ph = 2.0 * PI * hz * n as f64 / sr as f64;
        re += v * ph.cos();
        im -= v * ph.sin();
    }
    (re * re + im * im).sqrt()
}

#[test]
fn distortion_adds_odd_harmonics() {
    let sr = 16000;
    let w = Waveform::new(sine(16000, sr, 200.0, 1.0), sr).unwrap();
    let y = harmonic_distort(&w, 5);
    for (a, b) in y.samples.iter().zip(&w.samples) {
        assert_eq!(*a, naive_distort(*b, 5));
    }
    let fund = dft_magnitude(&y.samples, sr, 200.0);
    for h in [600.0, 1000.0] {
        let db = 20.0 * (dft_magnitude(&y.samples, sr, h) / fund).log10();
        assert!(db > -40.0, "{h} Hz at {db:.1} dB");
    }
}

#[test]
fn long_ir_matches_direct_convolution() {
    let mut r = rng(31);
    for _ in 0..100 {
        let x: Vec<f64> = (0..512).map(|_| r.random_range(-1.0..1.0)).collect();
        let h: Vec<f64> = (0..64).map(|_| r.random_range(-0.2..0.2)).collect();
        for (a, b) in convolve_truncated(&x, &h).iter().zip(naive_convolve(&x, &h)) {
            assert!((a - b).abs() < 1e-10);
        }
    }
    let x: Vec<f64> = (0..512).map(|_| r.random_range(-0.1..0.1)).collect();
    let h: Vec<f64> = (0..64).map(|_| r.random_range(-0.05..0.05)).collect();
    let y = apply_ir(&Waveform::new(x.clone(), 8000).unwrap(), &Waveform::new(h.clone(), 8000).unwrap()).unwrap();
    for (a, b) in y.samples.iter().zip(naive_convolve(&x, &h)) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn sound_mix_formula() {
    let mut r = rng(41);
    for _ in 0..100 {
        let n = r.random_range(50..300);
        let m = r.random_range(10..400);
        let scale = r.random_range(0.5..2.0);
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let p: Vec<f64> = (0..m).map(|_| r.random_range(-scale..scale)).collect();
        let y = sound_mix(&Waveform::new(x.clone(), 8000).unwrap(), &Waveform::new(p.clone(), 8000).unwrap()).unwrap();
        let raw: Vec<f64> = (0..n).map(|i| 0.5 * (x[i] + p[i % m])).collect();
        let peak = raw.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let g = if peak > 1.0 { 0.99 / peak } else { 1.0 };
        for (a, b) in y.samples.iter().zip(&raw) {
            assert!((a - g * b).abs() < 1e-12);
        }
    }
}

#[test]
fn measured_snr_hits_target() {
    let mut r = rng(51);
    let cfg = FrontendConfig::default();
    let sr = 16000;
    for _ in 0..30 {
        let mut speech = vec![0.0; 4000];
        speech.extend(sine(12000, sr, r.random_range(100.0..800.0), r.random_range(0.05..0.8)));
        speech.extend(vec![0.0; 4000]);
        let speech = Waveform::new(speech, sr).unwrap();
        let noise = Waveform::new((0..7000).map(|_| r.random_range(-0.3..0.3)).collect(), sr).unwrap();
        let snr = r.random_range(-5.0..20.0);
        let vad = VadMask::from_waveform(&speech, &cfg).unwrap();
        let noisy = add_noise_snr(&speech, &noise, snr, &vad).unwrap();
        let gate = vad.sample_gate(speech.len());
        let added: Vec<f64> = noisy.samples.iter().zip(&speech.samples).map(|(a, b)| a - b).collect();
        let measured = 10.0 * (gated_power(&speech.samples, &gate) / gated_power(&added, &gate)).log10();
        assert!((measured - snr).abs() <= 0.1, "{measured} vs {snr}");
    }
}

#[test]
fn unit_powers_give_unit_gain() {
    let sr = 16000;
    let n = 400 + 160 * 99;
    let speech = Waveform::new(sine(n, sr, 1000.0, 2f64.sqrt()), sr).unwrap();
    let noise = Waveform::new((0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(), sr).unwrap();
    let vad = VadMask::from_waveform(&speech, &FrontendConfig::default()).unwrap();
    assert!(vad.sample_gate(n).iter().all(|&g| g));
    let g = noise_gain(&speech, &noise, 0.0, &vad).unwrap();
    assert!((g - 1.0).abs() < 1e-6, "gain {g}");
}

#[test]
fn log_likelihood_matches_direct_sum() {
    let mut r = rng(61);
    for _ in 0..100 {
        let m = random_gmm(&mut r, 8, 5);
        let x: Vec<f64> = (0..5).map(|_| r.random_range(-3.0..3.0)).collect();
        let got = gmm_log_likelihood(&m, &x).unwrap();
        assert!((got - naive_log_likelihood(&m, &x)).abs() < 1e-10);
    }
}

#[test]
fn llr_matches_frame_sum() {
    let mut r = rng(62);
    for _ in 0..100 {
        let spk = random_gmm(&mut r, 4, 3);
        let ubm = random_gmm(&mut r, 4, 3);
        let x = random_matrix(&mut r, 7, 3, 2.0);
        let got = llr_score(&spk, &ubm, &x).unwrap();
        assert!((got - naive_llr(&spk, &ubm, &x)).abs() < 1e-12);
    }
}

#[test]
fn single_gaussian_em_is_sample_mle() {
    let mut r = rng(71);
    let dist = [Normal::new(1.5, 0.7).unwrap(), Normal::new(-2.0, 2.0).unwrap()];
    let rows: Vec<Vec<f64>> = (0..10000).map(|_| dist.iter().map(|d| d.sample(&mut r)).collect()).collect();
    let data = FeatureMatrix::from_rows(&rows).unwrap();
    let m = train_ubm(&data, 1, &EmConfig::default()).unwrap();
    for j in 0..2 {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
        assert!((m.mean(0)[j] - mean).abs() < 1e-9);
        assert!((m.variance(0)[j] - var).abs() < 1e-9);
    }
    assert!((m.weights()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn two_separated_clusters() {
    let mut r = rng(72);
    let left = Normal::new(0.0, 1.0).unwrap();
    let right = Normal::new(10.0, 1.0).unwrap();
    let a: Vec<f64> = (0..3000).map(|_| left.sample(&mut r)).collect();
    let b: Vec<f64> = (0..3000).map(|_| right.sample(&mut r)).collect();
    let rows: Vec<Vec<f64>> = a.iter().chain(&b).map(|&v| vec![v]).collect();
    let m = train_ubm(&FeatureMatrix::from_rows(&rows).unwrap(), 2, &EmConfig::default()).unwrap();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut got: Vec<(f64, f64)> = (0..2).map(|c| (m.mean(c)[0], m.weights()[c])).collect();
    got.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    assert!((got[0].0 - mean(&a)).abs() < 0.05);
    assert!((got[1].0 - mean(&b)).abs() < 0.05);
    for (_, w) in got {
        assert!((w - 0.5).abs() < 0.02);
    }
}

#[test]
fn map_single_component_closed_form() {
    let ubm = DiagGmm::new(vec![1.0], vec![0.0], vec![1.0]).unwrap();
    let data = FeatureMatrix::from_rows(&vec![vec![1.0]; 10]).unwrap();
    let cfg = MapConfig { iterations: 1, ..Default::default() };
    let m = map_adapt(&ubm, &data, &cfg).unwrap();
    assert!((m.mean(0)[0] - 0.5).abs() < 1e-12);
}

#[test]
fn eer_matches_sweep() {
    let mut r = rng(81);
    for _ in 0..100 {
        let tar = random_scores(&mut r, 50, 1.0);
        let non = random_scores(&mut r, 50, 0.0);
        let got = compute_eer(&tar, &non).unwrap().percent;
        assert!((got - brute_eer(&tar, &non)).abs() < 1e-9);
    }
}

#[test]
fn min_dcf_matches_sweep() {
    let mut r = rng(82);
    let p = DcfParams::default();
    for _ in 0..100 {
        let tar = random_scores(&mut r, 50, 1.5);
        let non = random_scores(&mut r, 50, 0.0);
        let got = compute_min_dcf(&tar, &non, &p).unwrap().value;
        assert_eq!(got, brute_min_dcf(&tar, &non, p.c_miss, p.c_fa, p.p_target));
    }
}

#[test]
fn det_curve_passes_near_eer() {
    let mut r = rng(83);
    for _ in 0..100 {
        let nt = r.random_range(5..60);
        let nn = r.random_range(5..60);
        // continuous scores: every sweep step moves one rate by one trial
        let tar: Vec<f64> = (0..nt).map(|_| r.random_range(-2.0..3.0)).collect();
        let non: Vec<f64> = (0..nn).map(|_| r.random_range(-3.0..2.0)).collect();
        let eer = compute_eer(&tar, &non).unwrap().percent / 100.0;
        let step = (1.0 / nt as f64).max(1.0 / nn as f64);
        let pts = det_points(&tar, &non).unwrap();
        assert!(
            pts.iter().any(|p| (p.p_miss - eer).abs() <= step + 1e-12 && (p.p_fa - eer).abs() <= step + 1e-12),
            "no DET point within {step} of {eer}"
        );
    }
}

#[test]
fn per_type_report_composes_metric_calls() {
    let mut r = rng(91);
    let mut trials = Vec::new();
    let mut scores = ScoreSet::new("x");
    let mut by_type: [Vec<f64>; 4] = Default::default();
    let shifts = [2.0, 0.5, 1.0, -0.5];
    for (k, kind) in TrialType::ALL.into_iter().enumerate() {
        for i in 0..40 {
            let (model, utt) = (format!("m{}", i % 5), format!("{}_{i}", kind.as_str()));
            let s = random_scores(&mut r, 1, shifts[k])[0];
            scores.insert(&model, &utt, s).unwrap();
            by_type[k].push(s);
            trials.push(Trial { model_id: model, utterance_id: utt, kind });
        }
    }
    let list = TrialList::new(trials).unwrap();
    let p = DcfParams::default();
    let rep = evaluate_trials(&list, &scores, &p).unwrap();
    assert_eq!(rep.genuine_trials, 40);
    for (k, kind) in TrialType::ALL.into_iter().enumerate().skip(1) {
        let res = rep.result(kind).unwrap();
        assert_eq!(res.eer_percent, compute_eer(&by_type[0], &by_type[k]).unwrap().percent);
        assert_eq!(res.min_dcf, compute_min_dcf(&by_type[0], &by_type[k], &p).unwrap().value);
        assert_eq!(res.trials, 40);
    }
    let avg = rep.per_type.iter().map(|t| t.eer_percent).sum::<f64>() / 3.0;
    assert_eq!(rep.average_eer, avg);
}

#[test]
fn wav_image_header_is_canonical() {
    let w = Waveform::new(vec![0.0; 10], 8000).unwrap();
    let b = wav_bytes(&w);
    assert_eq!(b.len(), 64);
    assert_eq!(&b[36..40], b"data");
}
