//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p genreason --test acceptance` (add `--release` for timings
//! representative of an optimised build).

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{random_dataset, random_formula, rational};
use genreason::engine::marginal_affine;
use genreason::formula::models_of;
use genreason::mnist::{
    binarize_all, complete_image, evaluate_method, generate_class_image, knn_predict,
    learning_curve, nearest_neighbours, predict_digit, read_idx, row_prefix, BinarizedItem, Method,
    PixelBits, DEFAULT_THRESHOLD, DIGITS, PIXELS,
};
use genreason::worlds::possible_models;
use genreason::{
    entails_classical, entails_empirical, prob_conditional, prob_marginal, AtomUniverse, Dataset,
    Execution, Formula, MuMode, QueryResult,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

const RAIN: usize = 0;
const WET: usize = 1;

fn rain() -> Formula {
    Formula::atom(RAIN)
}

fn wet() -> Formula {
    Formula::atom(WET)
}

fn table1() -> Dataset {
    // worlds (rain, wet): 00, 01, 10, 11 with 4, 2, 1, 3 data
    Dataset::from_index_counts(2, &[(0b00, 4), (0b10, 2), (0b01, 1), (0b11, 3)]).unwrap()
}

fn table2() -> Dataset {
    // p(M) = (0.5, 0.2, 0, 0.3)
    Dataset::from_index_counts(2, &[(0b00, 5), (0b10, 2), (0b11, 3)]).unwrap()
}

fn criterion_1() -> Outcome {
    let ds = table1();
    let alpha = Formula::implies(rain(), wet());
    let affine = marginal_affine(&ds, &alpha).map_err(|e| e.to_string())?;
    for (n, d) in [(6, 10), (75, 100), (9, 10)] {
        let mu = rational(n, d);
        let want = rational(1, 10) + rational(8, 10) * &mu;
        ensure(
            affine.eval(&mu) == want,
            format!("mu = {mu}: got {}", affine.eval(&mu)),
        )?;
        let float = prob_marginal(&ds, &alpha, MuMode::numeric(n as f64 / d as f64).unwrap())
            .unwrap()
            .value()
            .unwrap();
        let want_f = 0.1 + 0.8 * n as f64 / d as f64;
        ensure(
            (float - want_f).abs() < 1e-15,
            format!("float at mu = {mu}: {float}"),
        )?;
    }
    for mode in [MuMode::ExactOne, MuMode::Limit] {
        let p = prob_marginal(&ds, &alpha, mode).unwrap();
        ensure(
            p.exact() == Some(&rational(9, 10)),
            format!("{mode}: {p:?}"),
        )?;
    }
    Ok("p(rain -> wet) = 1/10 + 8/10 mu exactly; 9/10 at mu = 1 and mu -> 1".into())
}

fn criterion_2() -> Outcome {
    let ds = table2();
    let u = AtomUniverse::frozen(["rain", "wet"]).unwrap();
    let one = QueryResult::Exact(rational(1, 1));
    let p = prob_conditional(&ds, &wet(), &[rain()], MuMode::ExactOne).unwrap();
    ensure(p == one, format!("p(wet | rain) = {p:?}"))?;
    let p = prob_conditional(&ds, &wet(), &[rain(), !rain()], MuMode::ExactOne).unwrap();
    ensure(p.is_undefined(), format!("p(wet | rain, !rain) = {p:?}"))?;
    let not_rain_or_wet = Formula::or(!rain(), wet());
    let p = prob_marginal(&ds, &not_rain_or_wet, MuMode::ExactOne).unwrap();
    ensure(p == one, format!("p(!rain or wet) = {p:?}"))?;
    let rows: [(&[Formula], &Formula); 2] = [(&[rain()], &wet()), (&[], &not_rain_or_wet)];
    for (delta, alpha) in rows {
        ensure(
            !entails_classical(delta, alpha, &u).unwrap(),
            "classical entailment should fail",
        )?;
        ensure(
            entails_empirical(&ds, delta, alpha).unwrap(),
            "empirical entailment should hold",
        )?;
    }
    Ok("p(wet|rain)=1, p(wet|rain,!rain) undefined, p(!rain or wet)=1; classical no, empirical yes".into())
}

/// 1-based pixel numbers of a 5x5 image.
fn toy(ones: &[usize]) -> PixelBits {
    PixelBits::from_indices(25, ones.iter().map(|j| j - 1))
}

fn span(a: usize, b: usize) -> impl Iterator<Item = usize> {
    a..=b
}

fn toy_set(parts: &[&[usize]], ranges: &[(usize, usize)]) -> PixelBits {
    let mut ones: Vec<usize> = parts.concat();
    for &(a, b) in ranges {
        ones.extend(span(a, b));
    }
    toy(&ones)
}

fn criterion_3() -> Outcome {
    let two = toy_set(&[&[1, 10, 11, 15, 16, 25]], &[(4, 8), (18, 22)]);
    let seven = toy_set(&[&[1, 24, 25]], &[(5, 8), (10, 13), (15, 17), (19, 22)]);
    let test = toy_set(&[&[1, 25]], &[(4, 8), (10, 12), (14, 16), (18, 21)]);
    ensure(
        two.hamming(&test) == 3 && seven.hamming(&test) == 7,
        "toy mismatch counts",
    )?;
    let train = [
        BinarizedItem::new(two, Some(2)),
        BinarizedItem::new(seven, Some(7)),
    ];
    let d = predict_digit(&train, &test, MuMode::Limit).map_err(|e| e.to_string())?;
    let exact = d.exact().ok_or("no exact values")?;
    let zero = rational(0, 1);
    ensure(exact[2] == rational(1, 1), format!("p2 = {}", exact[2]))?;
    ensure(exact[7] == zero, format!("p7 = {}", exact[7]))?;
    ensure(
        exact
            .iter()
            .enumerate()
            .all(|(i, p)| i == 2 || i == 7 || *p == zero),
        "other digits nonzero",
    )?;
    Ok("(p2, p7, p_other) = (1, 0, 0)".into())
}

/// Four items labelled 2 at distance 2 from an empty test image and one
/// labelled 7 at distance 1.
fn five_image_toy() -> (Vec<BinarizedItem>, PixelBits) {
    let mut train: Vec<BinarizedItem> = (0..4)
        .map(|i| BinarizedItem::new(PixelBits::from_indices(25, [2 * i, 2 * i + 1]), Some(2)))
        .collect();
    train.push(BinarizedItem::new(
        PixelBits::from_indices(25, [20]),
        Some(7),
    ));
    (train, PixelBits::zeros(25))
}

fn criterion_4() -> Outcome {
    let (train, test) = five_image_toy();
    let p2 = |mu: f64| 5.0 * mu * (1.0 - mu) / (4.0 * (1.0 - mu) + mu);
    let p7 = |mu: f64| (4.0 * (1.0 - mu).powi(2) + mu * mu) / (4.0 * (1.0 - mu) + mu);
    let predict = |mu: f64| {
        predict_digit(&train, &test, MuMode::numeric(mu).unwrap())
            .map(|d| *d.conditionals())
            .map_err(|e| e.to_string())
    };
    let mut worst: f64 = 0.0;
    for mu in [0.6, 0.7, 0.8, 0.95] {
        let c = predict(mu)?;
        worst = worst.max((c[2] - p2(mu)).abs()).max((c[7] - p7(mu)).abs());
    }
    ensure(worst <= 1e-9, format!("max deviation {worst:e}"))?;
    let c = predict(0.7)?;
    ensure(
        (c[2] - 1.05 / 1.9).abs() <= 1e-9 && (c[7] - 0.85 / 1.9).abs() <= 1e-9,
        "values at mu = 0.7",
    )?;
    for k in 1..30 {
        let mu = 0.5 + 0.01 * k as f64;
        let c = predict(mu)?;
        ensure(c[2] >= c[7], format!("p2 < p7 at mu = {mu}"))?;
    }
    let c = predict(0.8)?;
    ensure((c[2] - c[7]).abs() <= 1e-12, "p2 != p7 at mu = 0.8")?;
    let c = predict(0.95)?;
    ensure(c[7] > c[2], "p7 <= p2 at mu = 0.95")?;
    Ok(format!(
        "closed forms matched within {worst:.1e}; p2 >= p7 on (0.5, 0.8], p7 > p2 at 0.95"
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_oracle: f64 = 0.0;
    let mut worst_limit: f64 = 0.0;
    for _ in 0..200 {
        let width = rng.random_range(1..=10);
        let ds = random_dataset(&mut rng, width, 50);
        let alpha = random_formula(&mut rng, width, 3);
        let n_delta = rng.random_range(0..=4);
        let delta: Vec<Formula> = (0..n_delta)
            .map(|_| random_formula(&mut rng, width, 3))
            .collect();
        let mu = 0.8;
        let got = prob_conditional(&ds, &alpha, &delta, MuMode::numeric(mu).unwrap())
            .unwrap()
            .value()
            .unwrap();
        worst_oracle =
            worst_oracle.max((got - common::brute_conditional(&ds, &alpha, &delta, mu)).abs());
        let limit = prob_conditional(&ds, &alpha, &delta, MuMode::Limit)
            .unwrap()
            .value()
            .unwrap();
        let near = prob_conditional(&ds, &alpha, &delta, MuMode::numeric(1.0 - 1e-6).unwrap())
            .unwrap()
            .value()
            .unwrap();
        worst_limit = worst_limit.max((limit - near).abs());
    }
    ensure(
        worst_oracle <= 1e-12,
        format!("oracle deviation {worst_oracle:e}"),
    )?;
    ensure(
        worst_limit <= 1e-3,
        format!("limit deviation {worst_limit:e}"),
    )?;
    Ok(format!(
        "200 instances: data path vs enumeration {worst_oracle:.1e}, limit vs 1-1e-6 {worst_limit:.1e}"
    ))
}

fn full_support(rng: &mut ChaCha8Rng, width: usize) -> Dataset {
    let counts: Vec<(u64, u64)> = (0..1u64 << width)
        .map(|i| (i, rng.random_range(1..=4)))
        .collect();
    Dataset::from_index_counts(width, &counts).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut applied = [0usize; 4];
    for i in 0..500 {
        let width = rng.random_range(1..=6);
        let ds = if i % 2 == 0 {
            full_support(&mut rng, width)
        } else {
            random_dataset(&mut rng, width, 30)
        };
        let u = AtomUniverse::frozen((0..width).map(|i| format!("x{i}"))).unwrap();
        let alpha = random_formula(&mut rng, width, 3);
        let n_delta = rng.random_range(0..=3);
        let delta: Vec<Formula> = (0..n_delta)
            .map(|_| random_formula(&mut rng, width, 2))
            .collect();
        let not_alpha = !alpha.clone();

        for mode in [MuMode::ExactOne, MuMode::Limit] {
            let p = prob_marginal(&ds, &alpha, mode).unwrap();
            let q = prob_marginal(&ds, &not_alpha, mode).unwrap();
            ensure(
                p.exact().unwrap() + q.exact().unwrap() == rational(1, 1),
                format!("duality failed at check {i}"),
            )?;
        }
        let mode = MuMode::numeric(rng.random_range(0.51..0.99)).unwrap();
        let p = prob_marginal(&ds, &alpha, mode).unwrap().value().unwrap();
        let q = prob_marginal(&ds, &not_alpha, mode)
            .unwrap()
            .value()
            .unwrap();
        ensure(
            (p + q - 1.0).abs() <= 1e-12,
            format!("numeric duality failed at check {i}"),
        )?;
        applied[0] += 1;

        let classical = entails_classical(&delta, &alpha, &u).unwrap();
        let empirical = entails_empirical(&ds, &delta, &alpha).unwrap();
        ensure(
            !classical || empirical,
            format!("monotonicity failed at check {i}"),
        )?;
        applied[1] += 1;

        let models = models_of(&delta, &u).unwrap();
        let possible = possible_models(&ds, &delta).unwrap();
        let certain = prob_conditional(&ds, &alpha, &delta, MuMode::ExactOne)
            .unwrap()
            .is_certain();
        if models == possible && !models.is_empty() {
            ensure(
                certain == classical,
                format!("classical corollary failed at check {i}"),
            )?;
            applied[2] += 1;
        }
        if !possible.is_empty() {
            ensure(
                certain == empirical,
                format!("empirical corollary failed at check {i}"),
            )?;
            applied[3] += 1;
        }
    }
    Ok(format!(
        "500 checks, 0 failures (duality {}, monotonicity {}, classical corollary {}, empirical corollary {})",
        applied[0], applied[1], applied[2], applied[3]
    ))
}

fn desk_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist-desk")
}

fn load_desk() -> Result<(Vec<BinarizedItem>, Vec<BinarizedItem>), String> {
    let dir = desk_dir();
    let read = |images: &str, labels: &str, n: usize| {
        read_idx(dir.join(images), dir.join(labels))
            .map(|mut raw| {
                raw.truncate(n);
                binarize_all(&raw, DEFAULT_THRESHOLD)
            })
            .map_err(|e| format!("{}: {e}", dir.display()))
    };
    let train = read("train-images-idx3-ubyte", "train-labels-idx1-ubyte", 1000)?;
    let test = read("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte", 200)?;
    ensure(
        train.len() == 1000 && test.len() == 200,
        "desk split needs 1000 + 200 images",
    )?;
    Ok((train, test))
}

/// Criterion 7 (a) and (b); (c) is reported separately as a soft check.
fn criterion_7() -> Outcome {
    let (train, test) = load_desk()?;
    let mut unique = 0;
    for (i, t) in test.iter().enumerate() {
        let (_, nearest) = nearest_neighbours(&train, &t.pixels).map_err(|e| e.to_string())?;
        if nearest.len() != 1 {
            continue;
        }
        unique += 1;
        let limit = predict_digit(&train, &t.pixels, MuMode::Limit).map_err(|e| e.to_string())?;
        let one_nn = knn_predict(&train, &t.pixels, 1).map_err(|e| e.to_string())?;
        ensure(
            limit.argmax() == one_nn.argmax(),
            format!("test image {i}: limit vs 1NN"),
        )?;
    }
    let numeric = evaluate_method(
        &train,
        &test,
        Method::Reasoning(MuMode::numeric(0.99).unwrap()),
        Execution::Parallel,
    )
    .map_err(|e| e.to_string())?;
    let knn = evaluate_method(&train, &test, Method::Knn(5), Execution::Parallel)
        .map_err(|e| e.to_string())?;
    let detail = format!(
        "limit = 1NN on {unique}/200 unique-neighbour images; AUC mu=0.99 {:.4}, knn=5 {:.4}",
        numeric.auc.value, knn.auc.value
    );
    ensure(
        numeric.auc.value >= 0.90 && knn.auc.value >= 0.90,
        detail.clone(),
    )?;
    Ok(detail)
}

/// A size point is on trend when its AUC is at least every AUC at smaller
/// sizes; the first point is on trend by definition.
fn criterion_7c() -> Outcome {
    let (train, test) = load_desk()?;
    let sizes = [100, 500, 1000];
    let methods = [
        Method::Reasoning(MuMode::numeric(0.99).unwrap()),
        Method::Reasoning(MuMode::Limit),
        Method::Knn(1),
        Method::Knn(5),
    ];
    let rows = learning_curve(&train, &test, &sizes, &methods, Execution::Parallel)
        .map_err(|e| e.to_string())?;
    let mut report = Vec::new();
    let mut ok = true;
    for m in methods {
        let aucs: Vec<f64> = rows
            .iter()
            .filter(|r| r.method == m)
            .map(|r| r.auc)
            .collect();
        let on_trend = (0..aucs.len())
            .filter(|&i| aucs[..i].iter().all(|&a| aucs[i] >= a))
            .count();
        ok &= on_trend >= 2;
        report.push(format!("{m} {on_trend}/3"));
    }
    let detail = report.join(", ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8() -> Outcome {
    let (train, _) = load_desk()?;
    let items = &train[..500];
    for digit in 0..DIGITS as u8 {
        let class: Vec<&BinarizedItem> = items.iter().filter(|i| i.label == Some(digit)).collect();
        let img = generate_class_image(items, digit, MuMode::Limit).map_err(|e| e.to_string())?;
        let exact = img.exact.ok_or("no exact values")?;
        for (j, value) in exact.iter().enumerate() {
            let on = class.iter().filter(|i| i.pixels.get(j)).count();
            let mean = BigRational::new(BigInt::from(on), BigInt::from(class.len()));
            ensure(
                *value == mean,
                format!("digit {digit} pixel {j}: {value} vs {mean}"),
            )?;
        }
    }
    let target = &train[0].pixels;
    let all = row_prefix(target, 28);
    ensure(all.len() == PIXELS, "28 rows should observe every pixel")?;
    let done = complete_image(items, &all, MuMode::Limit).map_err(|e| e.to_string())?;
    ensure(done.is_empty(), "full observation left pixels to complete")?;
    let sixteen = row_prefix(target, 16);
    let observed: Vec<usize> = sixteen.iter().map(|&(j, _)| j).collect();
    ensure(
        observed == (0..448).collect::<Vec<_>>(),
        "16 rows should observe pixels 0..448",
    )?;
    let filled = complete_image(items, &sixteen, MuMode::Limit).map_err(|e| e.to_string())?;
    ensure(filled.len() == PIXELS - 448, "completion size")?;
    Ok(format!(
        "class images equal class means on 500 images; 784 observed -> empty; 16 rows -> 448 pixels ({:.1}%)",
        100.0 * 448.0 / PIXELS as f64
    ))
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    limit: Duration,
    hard: bool,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: "1",
            title: "marginal of rain -> wet",
            limit: secs(1),
            hard: true,
            run: criterion_1,
        },
        Criterion {
            id: "2",
            title: "conditionals and consequence on p(M)=(.5,.2,0,.3)",
            limit: secs(1),
            hard: true,
            run: criterion_2,
        },
        Criterion {
            id: "3",
            title: "toy digit prediction, mu -> 1",
            limit: secs(1),
            hard: true,
            run: criterion_3,
        },
        Criterion {
            id: "4",
            title: "toy digit prediction, numeric mu",
            limit: secs(1),
            hard: true,
            run: criterion_4,
        },
        Criterion {
            id: "5",
            title: "data path vs model enumeration",
            limit: secs(30),
            hard: true,
            run: criterion_5,
        },
        Criterion {
            id: "6",
            title: "duality and consequence properties",
            limit: secs(30),
            hard: true,
            run: criterion_6,
        },
        Criterion {
            id: "7ab",
            title: "MNIST desk scale: 1NN agreement and AUC",
            limit: secs(300),
            hard: true,
            run: criterion_7,
        },
        Criterion {
            id: "7c",
            title: "MNIST desk scale: learning-curve trend (soft)",
            limit: secs(300),
            hard: false,
            run: criterion_7c,
        },
        Criterion {
            id: "8",
            title: "class images and completion",
            limit: secs(60),
            hard: true,
            run: criterion_8,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => {
                Err(format!("{detail}; took {elapsed:.2?}, limit {:?}", c.limit))
            }
            other => other,
        };
        let (status, detail) = match (&outcome, c.hard) {
            (Ok(d), true) => ("PASS", d),
            (Ok(d), false) => ("PASS (soft)", d),
            (Err(d), true) => ("FAIL", d),
            (Err(d), false) => ("WARN (soft)", d),
        };
        if outcome.is_err() && c.hard {
            failed += 1;
        }
        println!("{status} [{}] {} ({elapsed:.2?}): {detail}", c.id, c.title);
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
