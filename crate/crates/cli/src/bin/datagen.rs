//! `fairsel-datagen`: regenerate the bundled synthetic datasets.
//!
//! The two bundled data files mirror the column layout, vocabularies, sizes
//! and file formats of the UCI Adult and German Credit files (so the same
//! manifests load either the bundled data or user-downloaded originals), but
//! every row is sampled from a fixed seeded generator. Each dataset plants a
//! gender gap in the outcome, partly direct and partly through proxy
//! columns, which is what the optimizers are supposed to find and trade off.
//!
//! Output is byte-deterministic; the 200-row sample files are fixed
//! label-stratified subsamples of the full files with missing-value rows
//! excluded.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn pick<'a, R: Rng>(rng: &mut R, options: &[(&'a str, f64)]) -> &'a str {
    let total: f64 = options.iter().map(|o| o.1).sum();
    let mut roll = rng.random::<f64>() * total;
    for (name, weight) in options {
        if roll < *weight {
            return name;
        }
        roll -= weight;
    }
    options.last().expect("non-empty options").0
}

struct Generated {
    /// Raw field rows, in file order.
    rows: Vec<Vec<String>>,
    /// Latent scores, used to assign labels by rank.
    scores: Vec<f64>,
}

// ---------------------------------------------------------------------------
// German credit replica: 1000 rows, 20 attributes + label (1 good / 2 bad),
// space separated.
// ---------------------------------------------------------------------------

fn generate_german() -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6765_726d_616e); // "german"
    let mut generated = Generated {
        rows: Vec::with_capacity(1000),
        scores: Vec::with_capacity(1000),
    };

    for _ in 0..1000 {
        let mut score = 0.0;

        let personal_status = pick(
            &mut rng,
            &[("A91", 0.05), ("A92", 0.31), ("A93", 0.55), ("A94", 0.09)],
        );
        let male = personal_status != "A92";
        if male {
            score += 0.35; // direct gender gap
        }

        let checking = pick(
            &mut rng,
            &[("A11", 0.27), ("A12", 0.27), ("A13", 0.06), ("A14", 0.40)],
        );
        score += match checking {
            "A11" => -0.9,
            "A12" => -0.2,
            "A13" => 0.3,
            _ => 0.8,
        };

        // numeric channels tilt by gender so the gap is linearly readable
        let duration =
            4 + (rng.random::<f64>().powf(1.6) * 52.0).floor() as i64 + if male { 0 } else { 7 };
        score -= (duration as f64 - 18.0) / 12.0 * 0.35;

        let credit_history = pick(
            &mut rng,
            &[
                ("A30", 0.04),
                ("A31", 0.05),
                ("A32", 0.53),
                ("A33", 0.09),
                ("A34", 0.29),
            ],
        );
        score += match credit_history {
            "A30" => -0.6,
            "A31" => -0.4,
            "A32" => 0.1,
            "A33" => 0.0,
            _ => 0.45,
        };

        let purpose = pick(
            &mut rng,
            &[
                ("A40", 0.23),
                ("A41", 0.10),
                ("A42", 0.18),
                ("A43", 0.28),
                ("A44", 0.01),
                ("A45", 0.02),
                ("A46", 0.05),
                ("A48", 0.01),
                ("A49", 0.10),
                ("A410", 0.02),
            ],
        );
        score += match purpose {
            "A41" => 0.25,
            "A43" => 0.15,
            "A46" => -0.2,
            "A40" => -0.1,
            _ => 0.0,
        };

        let amount = (7.0 + 0.9 * standard_normal(&mut rng) + if male { 0.0 } else { 0.4 })
            .exp()
            .clamp(250.0, 18424.0)
            .round() as i64;
        score -= ((amount as f64).ln() - 7.8) * 0.3;

        let savings = pick(
            &mut rng,
            &[
                ("A61", 0.60),
                ("A62", 0.10),
                ("A63", 0.06),
                ("A64", 0.05),
                ("A65", 0.19),
            ],
        );
        score += match savings {
            "A61" => -0.25,
            "A62" => -0.05,
            "A63" => 0.2,
            "A64" => 0.4,
            _ => 0.3,
        };

        // employment length skews longer for men: a proxy column
        let employment = if male {
            pick(
                &mut rng,
                &[
                    ("A71", 0.04),
                    ("A72", 0.12),
                    ("A73", 0.33),
                    ("A74", 0.20),
                    ("A75", 0.31),
                ],
            )
        } else {
            pick(
                &mut rng,
                &[
                    ("A71", 0.10),
                    ("A72", 0.28),
                    ("A73", 0.36),
                    ("A74", 0.13),
                    ("A75", 0.13),
                ],
            )
        };
        score += match employment {
            "A71" => -0.45,
            "A72" => -0.15,
            "A73" => 0.05,
            "A74" => 0.25,
            _ => 0.3,
        };

        let installment = 1 + (rng.random::<f64>() * 4.0).floor() as i64;
        score -= (installment as f64 - 2.5) * 0.08;

        let other_parties = pick(&mut rng, &[("A101", 0.91), ("A102", 0.04), ("A103", 0.05)]);
        if other_parties == "A103" {
            score += 0.3;
        }

        let residence = 1 + (rng.random::<f64>() * 4.0).floor() as i64;

        let property = pick(
            &mut rng,
            &[
                ("A121", 0.28),
                ("A122", 0.23),
                ("A123", 0.33),
                ("A124", 0.16),
            ],
        );
        score += match property {
            "A121" => 0.3,
            "A124" => -0.3,
            _ => 0.0,
        };

        let age = if male {
            21.0 + standard_normal(&mut rng).abs() * 11.0 + rng.random::<f64>() * 22.0
        } else {
            19.0 + standard_normal(&mut rng).abs() * 8.0 + rng.random::<f64>() * 14.0
        }
        .floor()
        .clamp(19.0, 75.0) as i64;
        score += ((age as f64 - 33.0) / 12.0).clamp(-0.5, 0.7) * 0.35;

        let payment_plans = pick(&mut rng, &[("A141", 0.14), ("A142", 0.05), ("A143", 0.81)]);
        score += match payment_plans {
            "A141" => -0.3,
            "A143" => 0.15,
            _ => 0.0,
        };

        // housing: home ownership skews male, another proxy
        let housing = if male {
            pick(&mut rng, &[("A151", 0.14), ("A152", 0.76), ("A153", 0.10)])
        } else {
            pick(&mut rng, &[("A151", 0.33), ("A152", 0.57), ("A153", 0.10)])
        };
        score += match housing {
            "A151" => -0.15,
            "A152" => 0.25,
            _ => -0.1,
        };

        let existing_credits = 1 + (rng.random::<f64>().powf(2.0) * 3.2).floor() as i64;

        let job = if male {
            pick(
                &mut rng,
                &[
                    ("A171", 0.02),
                    ("A172", 0.18),
                    ("A173", 0.62),
                    ("A174", 0.18),
                ],
            )
        } else {
            pick(
                &mut rng,
                &[
                    ("A171", 0.04),
                    ("A172", 0.28),
                    ("A173", 0.58),
                    ("A174", 0.10),
                ],
            )
        };
        score += match job {
            "A174" => 0.2,
            "A171" => -0.2,
            _ => 0.0,
        };

        let dependents = if rng.random::<f64>() < 0.845 { 1 } else { 2 };
        let telephone = pick(&mut rng, &[("A191", 0.60), ("A192", 0.40)]);
        let foreign = pick(&mut rng, &[("A201", 0.963), ("A202", 0.037)]);

        score += standard_normal(&mut rng) * 0.9;

        generated.rows.push(vec![
            checking.to_string(),
            duration.to_string(),
            credit_history.to_string(),
            purpose.to_string(),
            amount.to_string(),
            savings.to_string(),
            employment.to_string(),
            installment.to_string(),
            personal_status.to_string(),
            other_parties.to_string(),
            residence.to_string(),
            property.to_string(),
            age.to_string(),
            payment_plans.to_string(),
            housing.to_string(),
            existing_credits.to_string(),
            job.to_string(),
            dependents.to_string(),
            telephone.to_string(),
            foreign.to_string(),
        ]);
        generated.scores.push(score);
    }

    // exactly 700 good (label 1) by latent-score rank
    attach_rank_labels(generated, 700, "1", "2")
}

// ---------------------------------------------------------------------------
// Adult census replica: 48842 rows, 14 attributes + label, comma separated,
// "?" marks missing workclass/occupation/native-country values.
// ---------------------------------------------------------------------------

const EDUCATION_NAMES: [&str; 16] = [
    "Preschool",
    "1st-4th",
    "5th-6th",
    "7th-8th",
    "9th",
    "10th",
    "11th",
    "12th",
    "HS-grad",
    "Some-college",
    "Assoc-voc",
    "Assoc-acdm",
    "Bachelors",
    "Masters",
    "Prof-school",
    "Doctorate",
];

const EDUCATION_WEIGHTS: [f64; 16] = [
    0.002, 0.004, 0.008, 0.013, 0.012, 0.020, 0.026, 0.010, 0.320, 0.220, 0.042, 0.032, 0.164,
    0.054, 0.012, 0.012,
];

fn generate_adult() -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0061_6475_6c74); // "adult"
    let n = 48_842;
    let mut generated = Generated {
        rows: Vec::with_capacity(n),
        scores: Vec::with_capacity(n),
    };

    for _ in 0..n {
        let mut score = 0.0;

        let male = rng.random::<f64>() < 0.668;
        let sex = if male { "Male" } else { "Female" };
        if male {
            score += 0.4; // direct gender gap
        }

        let age = (17.0 + standard_normal(&mut rng).abs() * 12.0 + rng.random::<f64>() * 25.0)
            .floor()
            .clamp(17.0, 90.0) as i64;
        score += 0.4 - ((age as f64 - 45.0) / 20.0).powi(2) * 0.45;

        let workclass = pick(
            &mut rng,
            &[
                ("Private", 0.737),
                ("Self-emp-not-inc", 0.082),
                ("Self-emp-inc", 0.036),
                ("Federal-gov", 0.030),
                ("Local-gov", 0.067),
                ("State-gov", 0.042),
                ("Without-pay", 0.004),
                ("Never-worked", 0.002),
            ],
        );
        score += match workclass {
            "Self-emp-inc" => 0.4,
            "Federal-gov" => 0.25,
            "Without-pay" | "Never-worked" => -1.0,
            _ => 0.0,
        };

        let fnlwgt = (11.7 + 0.5 * standard_normal(&mut rng))
            .exp()
            .clamp(12285.0, 1_484_705.0)
            .round() as i64;

        let mut education_index = pick_index(&mut rng, &EDUCATION_WEIGHTS);
        // men in this replica skew slightly toward degrees, one more proxy
        if male && education_index == 8 && rng.random::<f64>() < 0.12 {
            education_index = 12;
        }
        let education_num = education_index + 1;
        let education = EDUCATION_NAMES[education_index];
        score += (education_num as f64 - 9.5) * 0.22;

        // marriage is itself gender-skewed here, acting as a strong proxy
        let married_p = if male { 0.58 } else { 0.30 };
        let married = rng.random::<f64>() < married_p;
        let (marital_status, relationship) = if married {
            ("Married-civ-spouse", if male { "Husband" } else { "Wife" })
        } else {
            let marital = pick(
                &mut rng,
                &[
                    ("Never-married", 0.62),
                    ("Divorced", 0.26),
                    ("Separated", 0.06),
                    ("Widowed", 0.06),
                ],
            );
            let rel = pick(
                &mut rng,
                &[
                    ("Not-in-family", 0.55),
                    ("Own-child", 0.27),
                    ("Unmarried", 0.18),
                ],
            );
            (marital, rel)
        };
        if married {
            score += 0.55;
        }

        let occupation = if !male && rng.random::<f64>() < 0.32 {
            pick(
                &mut rng,
                &[
                    ("Adm-clerical", 0.50),
                    ("Other-service", 0.30),
                    ("Priv-house-serv", 0.05),
                    ("Sales", 0.15),
                ],
            )
        } else if education_num >= 13 {
            pick(
                &mut rng,
                &[
                    ("Prof-specialty", 0.40),
                    ("Exec-managerial", 0.30),
                    ("Sales", 0.10),
                    ("Tech-support", 0.07),
                    ("Adm-clerical", 0.08),
                    ("Other-service", 0.05),
                ],
            )
        } else {
            pick(
                &mut rng,
                &[
                    ("Craft-repair", 0.17),
                    ("Adm-clerical", 0.13),
                    ("Sales", 0.12),
                    ("Exec-managerial", 0.10),
                    ("Other-service", 0.12),
                    ("Machine-op-inspct", 0.09),
                    ("Transport-moving", 0.07),
                    ("Handlers-cleaners", 0.06),
                    ("Tech-support", 0.04),
                    ("Prof-specialty", 0.05),
                    ("Farming-fishing", 0.05),
                    ("Protective-serv", 0.03),
                    ("Armed-Forces", 0.001),
                    ("Priv-house-serv", 0.009),
                ],
            )
        };
        score += match occupation {
            "Exec-managerial" => 0.35,
            "Prof-specialty" => 0.30,
            "Tech-support" | "Protective-serv" => 0.15,
            "Sales" => 0.05,
            "Machine-op-inspct" => -0.15,
            "Farming-fishing" => -0.2,
            "Handlers-cleaners" => -0.25,
            "Other-service" => -0.35,
            "Priv-house-serv" => -0.5,
            _ => 0.0,
        };

        let race = pick(
            &mut rng,
            &[
                ("White", 0.855),
                ("Black", 0.096),
                ("Asian-Pac-Islander", 0.031),
                ("Amer-Indian-Eskimo", 0.010),
                ("Other", 0.008),
            ],
        );
        score += match race {
            "White" => 0.05,
            "Black" => -0.1,
            _ => 0.0,
        };

        let capital_gain = if rng.random::<f64>() < 0.917 {
            0
        } else {
            (7.7 + 1.2 * standard_normal(&mut rng))
                .exp()
                .round()
                .clamp(114.0, 99_999.0) as i64
        };
        if capital_gain > 5000 {
            score += 1.2;
        } else if capital_gain > 0 {
            score += 0.3;
        }

        let capital_loss = if rng.random::<f64>() < 0.953 {
            0
        } else {
            (1400.0 + 350.0 * standard_normal(&mut rng))
                .round()
                .clamp(155.0, 3_900.0) as i64
        };
        if capital_loss > 1500 {
            score += 0.25;
        }

        let hours_roll = rng.random::<f64>();
        let hours = if hours_roll < 0.24 {
            12 + (rng.random::<f64>() * 27.0).floor() as i64
        } else if hours_roll < 0.40 {
            41 + (rng.random::<f64>().powf(2.0) * 40.0).floor() as i64
        } else {
            40
        };
        // long hours skew male in this replica
        let hours = if male && hours == 40 && rng.random::<f64>() < 0.18 {
            45 + (rng.random::<f64>() * 15.0).floor() as i64
        } else {
            hours
        };
        score += ((hours as f64 - 40.0) / 12.0).clamp(-1.2, 1.6) * 0.3;

        let native_country = pick(
            &mut rng,
            &[
                ("United-States", 0.897),
                ("Mexico", 0.020),
                ("Philippines", 0.006),
                ("Germany", 0.004),
                ("Canada", 0.004),
                ("Puerto-Rico", 0.004),
                ("El-Salvador", 0.003),
                ("India", 0.003),
                ("Cuba", 0.003),
                ("England", 0.003),
                ("China", 0.003),
                ("South", 0.002),
                ("Jamaica", 0.002),
                ("Italy", 0.002),
                ("Dominican-Republic", 0.002),
                ("Japan", 0.002),
                ("Guatemala", 0.002),
                ("Poland", 0.002),
                ("Vietnam", 0.002),
                ("Columbia", 0.002),
                ("Haiti", 0.001),
                ("Portugal", 0.001),
                ("Taiwan", 0.001),
                ("Iran", 0.001),
                ("Greece", 0.001),
                ("Nicaragua", 0.001),
                ("Peru", 0.001),
                ("Ecuador", 0.001),
                ("France", 0.001),
                ("Ireland", 0.001),
                ("Hong", 0.001),
                ("Thailand", 0.001),
                ("Cambodia", 0.001),
                ("Trinadad&Tobago", 0.001),
                ("Laos", 0.001),
                ("Yugoslavia", 0.001),
                ("Outlying-US(Guam-USVI-etc)", 0.001),
                ("Scotland", 0.001),
                ("Honduras", 0.001),
                ("Hungary", 0.001),
                ("Holand-Netherlands", 0.0002),
            ],
        );

        score += standard_normal(&mut rng) * 0.95;

        // missingness mirrors the original: workclass and occupation vanish
        // together, native country independently
        let mut workclass = workclass.to_string();
        let mut occupation = occupation.to_string();
        let mut native_country = native_country.to_string();
        if rng.random::<f64>() < 0.056 {
            workclass = "?".to_string();
            occupation = "?".to_string();
        }
        if rng.random::<f64>() < 0.0175 {
            native_country = "?".to_string();
        }

        generated.rows.push(vec![
            age.to_string(),
            workclass,
            fnlwgt.to_string(),
            education.to_string(),
            education_num.to_string(),
            marital_status.to_string(),
            occupation,
            relationship.to_string(),
            race.to_string(),
            sex.to_string(),
            capital_gain.to_string(),
            capital_loss.to_string(),
            hours.to_string(),
            native_country,
        ]);
        generated.scores.push(score);
    }

    // 23.93% high earners by latent-score rank, as in the original counts
    let positives = (n as f64 * 0.2393).round() as usize;
    attach_rank_labels(generated, positives, ">50K", "<=50K")
}

fn pick_index<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut roll = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if roll < *w {
            return i;
        }
        roll -= w;
    }
    weights.len() - 1
}

/// Append the label column: the `positives` highest latent scores get
/// `positive_label`, everything else `negative_label`.
fn attach_rank_labels(
    generated: Generated,
    positives: usize,
    positive_label: &str,
    negative_label: &str,
) -> Vec<Vec<String>> {
    let Generated { mut rows, scores } = generated;
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut is_positive = vec![false; rows.len()];
    for &i in order.iter().take(positives) {
        is_positive[i] = true;
    }
    for (row, positive) in rows.iter_mut().zip(is_positive) {
        row.push(
            if positive {
                positive_label
            } else {
                negative_label
            }
            .to_string(),
        );
    }
    rows
}

fn render(rows: &[Vec<String>], separator: &str) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&row.join(separator));
        out.push('\n');
    }
    out
}

/// Label-stratified 200-row subsample of the rows without missing values,
/// preserving original row order.
fn sample_rows(rows: &[Vec<String>], positive_label: &str, seed: u64) -> Vec<Vec<String>> {
    let clean: Vec<usize> = (0..rows.len())
        .filter(|&i| !rows[i].iter().any(|cell| cell == "?"))
        .collect();
    let positives: Vec<usize> = clean
        .iter()
        .copied()
        .filter(|&i| rows[i].last().map(String::as_str) == Some(positive_label))
        .collect();
    let negatives: Vec<usize> = clean
        .iter()
        .copied()
        .filter(|&i| rows[i].last().map(String::as_str) != Some(positive_label))
        .collect();
    let positive_rate = positives.len() as f64 / clean.len() as f64;
    let take_positive = (200.0 * positive_rate).round() as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<usize> = Vec::with_capacity(200);
    for (pool, take) in [(positives, take_positive), (negatives, 200 - take_positive)] {
        let mut pool = pool;
        for i in (1..pool.len()).rev() {
            let j = rng.random_range(0..=i);
            pool.swap(i, j);
        }
        chosen.extend(pool.into_iter().take(take));
    }
    chosen.sort_unstable();
    chosen.into_iter().map(|i| rows[i].clone()).collect()
}

fn write(path: &Path, content: &str) {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).expect("create output directory");
    }
    fs::write(path, content).unwrap_or_else(|e| panic!("cannot write {}: {e}", path.display()));
    println!("wrote {}", path.display());
}

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"));

    let german = generate_german();
    write(&out_dir.join("german.synth.data"), &render(&german, " "));
    let german_sample = sample_rows(&german, "1", 0x7361_6d70);
    write(
        &out_dir.join("samples/german-sample.data"),
        &render(&german_sample, " "),
    );

    let adult = generate_adult();
    write(&out_dir.join("adult.synth.data"), &render(&adult, ", "));
    let adult_sample = sample_rows(&adult, ">50K", 0x7361_6d71);
    write(
        &out_dir.join("samples/adult-sample.data"),
        &render(&adult_sample, ", "),
    );

    let adult_clean = adult.iter().filter(|r| !r.iter().any(|c| c == "?")).count();
    let german_good = german.iter().filter(|r| r.last().unwrap() == "1").count();
    let adult_high = adult.iter().filter(|r| r.last().unwrap() == ">50K").count();
    println!(
        "german: {} rows ({german_good} good); adult: {} rows ({adult_clean} complete, {adult_high} >50K)",
        german.len(),
        adult.len()
    );
}
