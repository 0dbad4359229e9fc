use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use recspec::geometry::{
    ball_cylinder_check, distortion_constants, map_from_toml, recurrence_sandwich_on_orbit, MarkovExpandingMap,
};
use recspec::insertion::{build_ell_sequence_with, check_repetition_identity, insert, EllSequence, GrowthFloor, InsertionSpec};
use recspec::spectrum::{
    ae_rate_experiment, build_source, construct_e_point_with, default_base_cylinder, dimension_ladder, estimate_recurrence_rate,
    long_return_holes, ConstructOptions, RateInput, ScalePolicy,
};
use recspec::symbolic::{Sft, Word, SYMBOL_CHARS};
use recspec::thermo::{equilibrium_state, fmt_float, pressure, pressure_with_holes, Potential};
use serde_json::json;

use crate::args::*;
use crate::output::{num, Artifacts, CliError};

type Res<T = Option<String>> = Result<T, CliError>;

pub fn run(cli: &Cli) -> Res<()> {
    let maps = map_arg(&cli.command).map(load_map).transpose()?;
    if cli.dry_run {
        let plan = json!({ "plan": cli, "map": maps.as_ref().map(|m| m.name()) });
        println!("{}", serde_json::to_string_pretty(&plan).unwrap());
        return Ok(());
    }
    let mut out = Artifacts::new(&cli.out);
    let map = maps.as_ref();
    // `Some(message)` when a verification ran to completion but found violations.
    let failure = match &cli.command {
        Command::Pressure(a) => pressure_cmd(a, map, &mut out)?,
        Command::Dimension(a) => {
            let map = map.unwrap();
            let d = map.bowen_dimension(a.level)?;
            out.add(
                "dimension.csv",
                format!("map,level,dimension,refinement_gap\n{},{},{},{}\n", map.name(), a.level, fmt_float(d.dimension), fmt_float(d.refinement_gap)),
            );
            None
        }
        Command::Holes(a) => holes_cmd(a, map.unwrap(), &mut out)?,
        Command::Construct(a) => construct_cmd(a, map.unwrap(), cli.seed, &mut out)?,
        Command::Recurrence(a) => recurrence_cmd(a, map.unwrap(), cli.seed, &mut out)?,
        Command::Spectrum(SpectrumCommand::Ae(a)) => ae_cmd(a, map.unwrap(), cli.seed, &mut out)?,
        Command::Spectrum(SpectrumCommand::Ladder(a)) => ladder_cmd(a, map.unwrap(), &mut out)?,
        Command::Verify(VerifyCommand::LemmaG(a)) => lemma_g_cmd(a, cli.seed, &mut out)?,
        Command::Verify(VerifyCommand::Sandwich(a)) => sandwich_cmd(a, map.unwrap(), cli.seed, &mut out)?,
    };
    let manifest = json!({ "tool": "recspec", "version": env!("CARGO_PKG_VERSION"), "config": cli });
    out.write(manifest)?;
    match failure {
        Some(msg) => Err(CliError::Failed(msg)),
        None => Ok(()),
    }
}

fn map_arg(c: &Command) -> Option<&str> {
    let m = match c {
        Command::Pressure(a) if a.shift.is_some() => return None,
        Command::Pressure(a) => &a.map,
        Command::Dimension(a) => &a.map,
        Command::Holes(a) => &a.map,
        Command::Construct(a) => &a.map,
        Command::Recurrence(a) => &a.map,
        Command::Spectrum(SpectrumCommand::Ae(a)) => &a.map,
        Command::Spectrum(SpectrumCommand::Ladder(a)) => &a.map,
        Command::Verify(VerifyCommand::Sandwich(a)) => &a.map,
        Command::Verify(VerifyCommand::LemmaG(_)) => return None,
    };
    Some(&m.map)
}

fn load_map(spec: &str) -> Res<MarkovExpandingMap> {
    let path = Path::new(spec);
    if path.extension().is_some_and(|e| e == "toml") || path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{spec}: {e}")))?;
        return map_from_toml(&text).map_err(|e| CliError::Config(format!("{spec}: {e}")));
    }
    MarkovExpandingMap::preset(spec).map_err(|e| CliError::Config(e.to_string()))
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn weights_potential(sft: &Sft, weights: &[f64]) -> Res<Potential> {
    if weights.len() != sft.alphabet_size() || weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
        return Err(CliError::Config(format!("need {} positive weights", sft.alphabet_size())));
    }
    let total: f64 = weights.iter().sum();
    let logs: Vec<f64> = weights.iter().map(|w| (w / total).ln()).collect();
    Ok(Potential::from_symbol_values(sft, &logs)?)
}

fn max_dimension_potential(map: &MarkovExpandingMap) -> Res<Potential> {
    let psi = map.log_derivative_potential(1)?;
    let d = recspec::thermo::bowen_root(&psi)?;
    Ok(psi.scaled(-d))
}

fn pressure_cmd(a: &PressureArgs, map: Option<&MarkovExpandingMap>, out: &mut Artifacts) -> Res {
    match (&a.shift, map) {
        (Some(shift), _) => {
            let sft = Sft::parse_adjacency(&read(shift)?)?;
            let phi = match &a.potential {
                Some(p) => Potential::from_csv(&sft, &read(p)?)?,
                None => Potential::constant(&sft, 0.0),
            };
            out.add("pressure.csv", format!("shift,pressure\n{},{}\n", shift.display(), fmt_float(pressure(&phi)?)));
        }
        (None, Some(map)) => {
            let psi = map.log_derivative_potential(a.level)?;
            let p = pressure(&psi.scaled(-a.s))?;
            out.add("pressure.csv", format!("map,s,level,pressure\n{},{},{},{}\n", map.name(), fmt_float(a.s), a.level, fmt_float(p)));
        }
        (None, None) => unreachable!("map is loaded unless a shift is given"),
    }
    Ok(None)
}

fn holes_cmd(a: &HolesArgs, map: &MarkovExpandingMap, out: &mut Artifacts) -> Res {
    let sft = map.sft();
    let phi = match a.potential {
        HolePotential::Zero => Potential::constant(sft, 0.0),
        HolePotential::Geometric => max_dimension_potential(map)?,
    };
    let base_cylinder = default_base_cylinder(sft)?;
    let mut csv = String::from("n,holes,pressure\n");
    let first = if a.family == HoleFamily::Ones { 1 } else { 2 };
    for n in first..=a.n_max {
        let holes = match a.family {
            HoleFamily::Ones => vec![Word::new(vec![1; n], sft.alphabet_size())?],
            HoleFamily::LongReturns => long_return_holes(sft, &base_cylinder, n)?,
        };
        let p = if holes.is_empty() { pressure(&phi)? } else { pressure_with_holes(&phi, &holes)? };
        csv.push_str(&format!("{n},{},{}\n", holes.len(), fmt_float(p)));
    }
    out.add("holes.csv", csv);
    Ok(None)
}

fn word_string(w: &[u32]) -> String {
    let chars: Vec<char> = SYMBOL_CHARS.chars().collect();
    w.iter().map(|&s| chars[s as usize]).collect()
}

fn construct_cmd(a: &ConstructArgs, map: &MarkovExpandingMap, seed: u64, out: &mut Artifacts) -> Res {
    let source = build_source(map, a.n, a.birkhoff_tolerance)?;
    let opts = ConstructOptions { n0: a.n0, birkhoff_tolerance: a.birkhoff_tolerance, ..ConstructOptions::default() };
    let p = construct_e_point_with(map, &source, a.alpha, a.beta, a.horizon, seed, &opts)?;
    let mut csv = String::from("k,ell,repetition,ratio\n");
    for (&(k, got, want), &(_, ratio)) in p.identity.checked.iter().zip(&p.symbolic.samples) {
        let got = got.map_or("censored".to_string(), |g| g.to_string());
        csv.push_str(&format!("{k},{want},{got},{}\n", fmt_float(ratio)));
    }
    out.add("ell.csv", csv);
    let word_of = |l: u32| word_string(source.letters.entries()[l as usize].word.symbols());
    let summary = json!({
        "alpha": num(a.alpha),
        "beta": num(a.beta),
        "point": num(p.point),
        "base_symbols": p.base.len(),
        "induced_letters": p.induced.len(),
        "base_cylinder": word_string(source.a.symbols()),
        "marker": word_string(p.marker_word.symbols()),
        "c": word_of(p.spec.c()),
        "c_bar": word_of(p.spec.c_bar()),
        "ell_rates": [num(p.ell_rates.0), num(p.ell_rates.1)],
        "last_index": p.ell.last_index(),
        "source": {
            "n": source.n,
            "lambda": num(source.lambda),
            "mean_return": num(source.mean_return),
            "pressure": num(source.pressure),
            "dimension": num(source.source_dimension),
            "full_dimension": num(source.full_dimension),
            "birkhoff_tolerance": num(source.birkhoff_tolerance),
        },
        "sample": {
            "psi_average": num(p.sample.psi_average),
            "return_average": num(p.sample.return_average),
            "attempts": p.sample.attempts,
        },
        "identity": { "holds": p.identity.holds(), "violations": p.identity.violations },
        "perturbation": { "holds": p.perturbation.holds(), "worst_ratio": num(p.perturbation.worst_ratio) },
        "symbolic": { "lower": num(p.symbolic.lower), "upper": num(p.symbolic.upper), "window": p.symbolic.window },
        "base_symbolic": { "lower": num(p.base_symbolic.lower), "upper": num(p.base_symbolic.upper), "window": p.base_symbolic.window },
        "routes": {
            "symbolic": [num(p.routes.symbolic.0), num(p.routes.symbolic.1)],
            "geometric": [num(p.routes.geometric.0), num(p.routes.geometric.1)],
            "max_gap": num(p.routes.max_gap),
        },
    });
    out.add_json("construct.json", &summary);
    if a.save_word {
        out.add("word.txt", word_string(&p.base) + "\n");
    }
    Ok((!p.identity.holds()).then(|| format!("repetition identity fails at k = {:?}", p.identity.violations)))
}

fn recurrence_cmd(a: &RecurrenceArgs, map: &MarkovExpandingMap, seed: u64, out: &mut Artifacts) -> Res {
    let policy = match a.route {
        Route::Geometric => ScalePolicy::dyadic(a.j_min, a.j_max),
        Route::Symbolic => ScalePolicy::Symbolic { k_min: a.k_min, k_max: a.k_max },
    };
    let word;
    let input = if let Some(x) = a.point {
        RateInput::Point { x, horizon: a.horizon }
    } else if let Some(path) = &a.word_file {
        word = Word::parse(&read(path)?, map.alphabet_size())?.into_symbols();
        RateInput::Word(&word)
    } else {
        let weights = a.weights.clone().unwrap_or_else(|| vec![1.0; map.alphabet_size()]);
        let state = equilibrium_state(&weights_potential(map.sft(), &weights)?)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        word = state.sample_path(&mut rng, &[], a.horizon)?;
        RateInput::Word(&word)
    };
    let est = estimate_recurrence_rate(map, input, &policy)?;
    out.add("rates.csv", est.to_csv());
    out.add_json(
        "recurrence.json",
        &json!({
            "lower": num(est.lower),
            "upper": num(est.upper),
            "window": est.window,
            "censored": est.censored.iter().map(|&c| num(c)).collect::<Vec<_>>(),
        }),
    );
    Ok(None)
}

fn ae_cmd(a: &AeArgs, map: &MarkovExpandingMap, seed: u64, out: &mut Artifacts) -> Res {
    let phi = match &a.weights {
        Some(w) => weights_potential(map.sft(), w)?,
        None => max_dimension_potential(map)?,
    };
    let radii: Vec<f64> = (a.j_min..=a.j_max).map(|j| 2f64.powi(-j)).collect();
    let r = ae_rate_experiment(map, &phi, a.samples, a.horizon, &radii, seed)?;
    out.add("ae.csv", r.to_csv());
    out.add_json(
        "ae.json",
        &json!({
            "target": num(r.target),
            "median": num(r.median),
            "q1": num(r.q1),
            "q3": num(r.q3),
            "median_finest_ratio": num(r.median_finest),
            "samples": a.samples,
            "horizon": a.horizon,
        }),
    );
    Ok(None)
}

fn ladder_cmd(a: &LadderArgs, map: &MarkovExpandingMap, out: &mut Artifacts) -> Res {
    if a.n_min < 2 || a.n_max < a.n_min {
        return Err(CliError::Config("need 2 <= n-min <= n-max".into()));
    }
    let schedule: Vec<usize> = (a.n_min..=a.n_max).collect();
    let r = dimension_ladder(map, &schedule)?;
    out.add("ladder.csv", r.to_csv());
    out.add_json(
        "ladder.json",
        &json!({
            "skipped": r.skipped,
            "gap_rate": r.gap_rate.map(num),
            "full_dimension": r.rows.first().map(|row| num(row.full_dimension)),
        }),
    );
    Ok(None)
}

/// A random admissible sequence whose last inserted block fits in `horizon` letters.
/// Targets whose first jump overshoots the horizon are redrawn.
fn random_ell(rng: &mut ChaCha8Rng, horizon: usize) -> Res<EllSequence> {
    for _ in 0..256 {
        let n0 = rng.random_range(2..=4usize);
        let alpha = rng.random_range(0.0..1.0);
        let beta = alpha + rng.random_range(0.0..1.5);
        let floor = if rng.random_bool(0.5) { GrowthFloor::Cubic } else { GrowthFloor::QuadLog };
        let mut best = None;
        for k in n0 + 2.. {
            match build_ell_sequence_with(alpha, beta, k, n0, floor) {
                Ok(e) if e.get(k).unwrap() as usize + k < horizon => best = Some(e),
                _ => break,
            }
        }
        if let Some(e) = best {
            return Ok(e);
        }
    }
    Err(CliError::Config(format!("horizon {horizon} is too short for any sequence")))
}

fn lemma_g_cmd(a: &LemmaGArgs, seed: u64, out: &mut Artifacts) -> Res {
    let spec = InsertionSpec::standard(a.alphabet).map_err(|e| CliError::Config(e.to_string()))?;
    let rows = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let ell = random_ell(&mut rng, a.horizon)?;
            let k_hi = ell.last_index();
            let len = ell.get(k_hi).unwrap() as usize + k_hi + 1;
            let need = recspec::insertion::required_source_len(&ell, len);
            let w: Vec<u32> = (0..need).map(|_| rng.random_range(0..a.alphabet as u32)).collect();
            let g = insert(&w, &spec, &ell, len)?;
            let rep = check_repetition_identity(&g, &ell, ell.n0(), k_hi);
            Ok((i, ell, rep))
        })
        .collect::<Res<Vec<_>>>()?;
    let mut csv = String::from("trial,n0,k_max,ell_max,checked,violations\n");
    let mut violations = 0;
    let mut checked = 0;
    for (i, ell, rep) in &rows {
        let k = ell.last_index();
        csv.push_str(&format!("{i},{},{k},{},{},{}\n", ell.n0(), ell.get(k).unwrap(), rep.checked.len(), rep.violations.len()));
        violations += rep.violations.len();
        checked += rep.checked.len();
    }
    out.add("lemma_g.csv", csv);
    out.add_json(
        "lemma_g.json",
        &json!({ "trials": a.trials, "alphabet": a.alphabet, "checked": checked, "violations": violations }),
    );
    Ok((violations > 0).then(|| format!("{violations} repetition-time violations")))
}

fn sandwich_cmd(a: &SandwichArgs, map: &MarkovExpandingMap, seed: u64, out: &mut Artifacts) -> Res {
    let dist = distortion_constants(map, 8)?;
    let sft = map.sft();
    let rows = (0..a.points)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut w = vec![rng.random_range(0..sft.alphabet_size() as u32)];
            while w.len() < a.horizon {
                let succ = sft.successors(*w.last().unwrap());
                w.push(succ[rng.random_range(0..succ.len())]);
            }
            let orbit = map.shadow_orbit(&w)?;
            (1..=a.k_max)
                .map(|k| {
                    let ball = ball_cylinder_check(map, &w, k, &dist)?.holds();
                    let sandwich = recurrence_sandwich_on_orbit(map, &w, &orbit, k, &dist)?.holds();
                    Ok((i, k, ball, sandwich))
                })
                .collect::<Res<Vec<_>>>()
        })
        .collect::<Res<Vec<_>>>()?;
    let mut csv = String::from("point,k,inclusions,sandwich\n");
    let (mut violations, mut censored) = (0, 0);
    for &(i, k, ball, sandwich) in rows.iter().flatten() {
        let s = match sandwich {
            Some(true) => "holds",
            Some(false) => "fails",
            None => "censored",
        };
        violations += usize::from(!ball) + usize::from(sandwich == Some(false));
        censored += usize::from(sandwich.is_none());
        csv.push_str(&format!("{i},{k},{},{s}\n", if ball { "holds" } else { "fails" }));
    }
    out.add("sandwich.csv", csv);
    out.add_json(
        "sandwich.json",
        &json!({ "map": map.name(), "kappa": num(dist.kappa), "violations": violations, "censored": censored }),
    );
    Ok((violations > 0).then(|| format!("{violations} inclusion or sandwich violations")))
}

