use super::{Assemblage, Scenario};
use crate::atomic::{classical_outcome_effect, classical_point, unit_effect};
use crate::compose::{state_check, steer, tensor, tensor_all};
use crate::error::{Error, Result};
use crate::search::SearchConfig;
use crate::system::{AtomicSystem, SystemType};
use crate::transforms::{compose_par, compose_seq, controlled_map, copy_map, measurement_map, LinearMap};
use crate::vector::GptVector;

/// A measurement `Classical(|X|)·A → Classical(|A|)` whose classical
/// input selects the setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledMeasurement {
    map: LinearMap,
    settings: usize,
    outcomes: usize,
    effects: Vec<Vec<GptVector>>,
}

impl ControlledMeasurement {
    /// Wraps a controlled map, checking its shape and extracting the
    /// effects `e_{a|x}`.
    pub fn new(map: LinearMap) -> Result<Self> {
        let (settings, system) = match map.domain().atoms() {
            [AtomicSystem::Classical(x), rest @ ..] if !rest.is_empty() => {
                (*x, SystemType::new(rest.to_vec())?)
            }
            _ => {
                return Err(Error::WrongSystem {
                    expected: "Classical(|X|) followed by the measured system".into(),
                    found: map.domain().to_string(),
                })
            }
        };
        let outcomes = match map.codomain().atoms() {
            [AtomicSystem::Classical(k)] => *k,
            _ => {
                return Err(Error::WrongSystem {
                    expected: "a classical outcome register".into(),
                    found: map.codomain().to_string(),
                })
            }
        };
        let mut effects = Vec::with_capacity(settings);
        for x in 0..settings {
            let px = classical_point(settings, x)?;
            let mut row = Vec::with_capacity(outcomes);
            for a in 0..outcomes {
                let oa = classical_outcome_effect(outcomes, a)?;
                let pulled = GptVector::new(
                    map.domain().clone(),
                    (map.matrix().transpose() * nalgebra::DVector::from_column_slice(oa.coeffs()))
                        .as_slice()
                        .to_vec(),
                )?;
                row.push(steer(&pulled, &px, &[0])?.with_system(system.clone())?);
            }
            effects.push(row);
        }
        Ok(ControlledMeasurement {
            map,
            settings,
            outcomes,
            effects,
        })
    }

    /// From `effects[x][a]`, each row a valid measurement.
    pub fn from_effects(effects: &[Vec<GptVector>], tol: f64) -> Result<Self> {
        let branches = effects
            .iter()
            .map(|row| measurement_map(row, tol))
            .collect::<Result<Vec<_>>>()?;
        ControlledMeasurement::new(controlled_map(&branches)?)
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn settings(&self) -> usize {
        self.settings
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    /// The measured system.
    pub fn system(&self) -> &SystemType {
        self.effects[0][0].system()
    }

    /// `e_{a|x}`.
    pub fn effect(&self, a: usize, x: usize) -> &GptVector {
        &self.effects[x][a]
    }
}

/// What Bob's device does to his share before the assemblage is read off.
#[derive(Debug, Clone, PartialEq)]
pub enum BobStage {
    /// Bob's share is already the quantum system.
    None,
    /// A fixed transformation of Bob's share.
    Fixed(LinearMap),
    /// A map `Classical(|Y|)·B → Q` controlled on Bob's input `y`.
    WithInput(LinearMap),
    /// A map `Classical(|A|)·B → Q` fed a copy of Alice's outcome.
    Instrumental(LinearMap),
}

fn controlled_input(t: &LinearMap, bob: &SystemType) -> Result<usize> {
    match t.domain().atoms() {
        [AtomicSystem::Classical(y), rest @ ..] if rest == bob.atoms() => Ok(*y),
        _ => Err(Error::SystemMismatch {
            expected: format!("C<n>·{bob}"),
            found: t.domain().to_string(),
        }),
    }
}

/// Reads off the assemblage produced when the parties share `shared`,
/// black-box party `i` measures atom `i` with `measurements[i]`, and the
/// last atom goes through Bob's stage.
pub fn assemblage_from_realization(
    shared: &GptVector,
    measurements: &[ControlledMeasurement],
    bob: &BobStage,
    cfg: &SearchConfig,
) -> Result<Assemblage> {
    let atoms = shared.system().atoms();
    let n = measurements.len();
    if n == 0 || atoms.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} measurements cannot split {} into parties plus Bob",
            n,
            shared.system()
        )));
    }
    for (i, m) in measurements.iter().enumerate() {
        let atom = SystemType::atom(atoms[i]);
        if m.system() != &atom {
            return Err(Error::SystemMismatch {
                expected: atom.to_string(),
                found: m.system().to_string(),
            });
        }
    }
    let norm = unit_effect(shared.system()).inner(shared)?;
    if (norm - 1.0).abs() > cfg.tol {
        return Err(Error::InvalidArgument(format!("shared state has normalization {norm}")));
    }
    if state_check(shared, cfg)?.is_rejected() {
        return Err(Error::InvalidArgument("shared vector is outside the state cone".into()));
    }
    let bob_sys = SystemType::atom(atoms[n]);
    let outcomes: Vec<usize> = measurements.iter().map(ControlledMeasurement::outcomes).collect();
    let settings: Vec<usize> = measurements.iter().map(ControlledMeasurement::settings).collect();
    let parties: Vec<usize> = (0..n).collect();
    let conditional = |a: &[usize], x: &[usize]| -> Result<GptVector> {
        let e = tensor_all(
            &(0..n)
                .map(|i| measurements[i].effect(a[i], x[i]).clone())
                .collect::<Vec<_>>(),
        )
        .with_system(SystemType::new(atoms[..n].to_vec())?)?;
        steer(shared, &e, &parties)
    };
    let scenario_single = |s: Scenario| -> Result<Scenario> {
        if n == 1 {
            Ok(s)
        } else {
            Err(Error::InvalidArgument(format!("the {s} scenario has a single black-box party")))
        }
    };
    let base = if n == 1 { Scenario::Bipartite } else { Scenario::Multipartite(n) };

    match bob {
        BobStage::None => Assemblage::from_fn(base, outcomes, settings, cfg.tol, |i| conditional(&i.a, &i.x)),
        BobStage::Fixed(t) => {
            Assemblage::from_fn(base, outcomes, settings, cfg.tol, |i| t.apply(&conditional(&i.a, &i.x)?))
        }
        BobStage::WithInput(t) => {
            let scenario = scenario_single(Scenario::BobWithInput)?;
            let ny = controlled_input(t, &bob_sys)?;
            let mut all = settings;
            all.push(ny);
            Assemblage::from_fn(scenario, outcomes, all, cfg.tol, |i| {
                let y = i.y.expect("bob-with-input index");
                t.apply(&tensor(&classical_point(ny, y)?, &conditional(&i.a, &i.x)?))
            })
        }
        BobStage::Instrumental(t) => {
            let scenario = scenario_single(Scenario::Instrumental)?;
            let na = outcomes[0];
            if controlled_input(t, &bob_sys)? != na {
                return Err(Error::InvalidArgument(
                    "Bob's controlled map must take Alice's outcome as input".into(),
                ));
            }
            // (M ⊗ id) then (copy ⊗ id) then (id ⊗ cT), then read the outcome
            let id_b = LinearMap::identity(&bob_sys);
            let measure = compose_par(measurements[0].map(), &id_b);
            let copied = compose_seq(&compose_par(&copy_map(na), &id_b), &measure)?;
            let wired = compose_seq(
                &compose_par(&LinearMap::identity(&SystemType::classical(na)), t),
                &copied,
            )?;
            Assemblage::from_fn(scenario, outcomes, settings.clone(), cfg.tol, |i| {
                let input = tensor(&classical_point(settings[0], i.x[0])?, shared);
                let out = wired.apply(&input)?;
                steer(&out, &classical_outcome_effect(na, i.a[0])?, &[0])
            })
        }
    }
}
