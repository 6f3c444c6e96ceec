//! Command dispatch: each command produces a JSON subdocument; failures are
//! captured per command so independent later commands still run.

use crate::config::{CommandName, JobConfig};
use anyhow::{anyhow, Context, Result};
use nestpf::algebra::{parse_bivar, OneForm};
use nestpf::chen::enumerate_words;
use nestpf::connection::{block_structure, build_connection, ConnectionMatrix};
use nestpf::melnikov::{
    count_zeros, displacement_order_fit, melnikov_sequence_with, MelnikovError, MelnikovSettings,
    PerturbationForm, ZeroCountOptions,
};
use nestpf::numeric::continuation::ContinuationOptions;
use nestpf::numeric::eig::C64;
use nestpf::numeric::{eval_iterated, monodromy, trace_oval_with, FlowOptions, LinearSystem};
use nestpf::petrov::{certify, petrov_decompose, Hamiltonian};
use serde_json::{json, Value};
use std::sync::Arc;

pub struct RunOutput {
    pub report: Value,
    /// Named CSV side-outputs.
    pub csv_files: Vec<(String, String)>,
    pub errored: bool,
}

struct Session {
    cfg: JobConfig,
    ham: Option<Arc<Hamiltonian>>,
    omega: Option<PerturbationForm>,
    connection: Option<ConnectionMatrix>,
    csv_files: Vec<(String, String)>,
}

impl Session {
    fn flow_options(&self) -> FlowOptions {
        FlowOptions {
            rtol: self.cfg.tolerances.quadrature_rtol,
            level_tol: self.cfg.tolerances.level_tol,
            ..Default::default()
        }
    }

    fn hamiltonian(&mut self) -> Result<Arc<Hamiltonian>> {
        if let Some(h) = &self.ham {
            return Ok(h.clone());
        }
        let poly = parse_bivar(&self.cfg.hamiltonian)
            .map_err(|e| anyhow!("config field `hamiltonian`: {e}"))?;
        let ham = certify(&poly).context("certification failed")?;
        self.ham = Some(ham.clone());
        Ok(ham)
    }

    fn perturbation(&mut self) -> Result<PerturbationForm> {
        if let Some(w) = &self.omega {
            return Ok(w.clone());
        }
        let pert = self
            .cfg
            .perturbation
            .as_ref()
            .ok_or_else(|| anyhow!("config field `perturbation` is required"))?;
        let p = parse_bivar(&pert.p).map_err(|e| anyhow!("config field `perturbation.p`: {e}"))?;
        let q = parse_bivar(&pert.q).map_err(|e| anyhow!("config field `perturbation.q`: {e}"))?;
        let w = PerturbationForm::new(OneForm::new(p, q));
        self.omega = Some(w.clone());
        Ok(w)
    }

    fn connection_matrix(&mut self) -> Result<ConnectionMatrix> {
        if self.connection.is_none() {
            let ham = self.hamiltonian()?;
            self.connection = Some(build_connection(&ham, self.cfg.k)?);
        }
        Ok(self.connection.clone().unwrap())
    }

    fn cmd_certify(&mut self) -> Result<Value> {
        let ham = self.hamiltonian()?;
        let trace = trace_oval_with(&ham, self.cfg.p_seed, self.flow_options());
        let trace_doc = match &trace {
            Ok(tr) => {
                self.csv_files.push(("trace.csv".into(), tr.to_csv()));
                json!({
                    "level": tr.level,
                    "closure_residual": tr.closure_residual,
                    "arclength": tr.arclength,
                    "period": tr.period,
                    "orientation": tr.orientation,
                    "samples": tr.samples.len(),
                })
            }
            Err(e) => json!({ "error": e.to_string() }),
        };
        Ok(json!({
            "n": ham.n(),
            "n_basic": ham.n_basic(),
            "basic_forms": ham.basic_forms().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "m": ham.m().to_string(),
            "level_offset": nestpf::algebra::rat_to_string(ham.level_offset()),
            "genericity": serde_json::to_value(ham.genericity())?,
            "seed_trace": trace_doc,
        }))
    }

    fn cmd_decompose(&mut self) -> Result<Value> {
        let ham = self.hamiltonian()?;
        let w = self.perturbation()?;
        let dec = petrov_decompose(&w.omega, &ham)?;
        let (df, dg, dh) = dec.degrees();
        Ok(json!({
            "source": w.omega.to_string(),
            "f_coeffs": dec.f_coeffs.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "f": dec.f.to_string(),
            "g": dec.g.to_string(),
            "used_degree": dec.used_degree,
            "degrees": { "f": df, "g": dg, "f_i_h": dh },
        }))
    }

    fn cmd_connection(&mut self) -> Result<Value> {
        let omega = self.connection_matrix()?;
        let blocks = block_structure(&omega)?;
        let doc: Value = serde_json::from_str(&omega.to_json())?;
        Ok(json!({
            "dim": omega.dim(),
            "measured_degree": omega.measured_degree(),
            "measured_size": nestpf::algebra::rat_to_string(&omega.measured_size()),
            "block_sizes": blocks.iter().map(|b| b.entries.len()).collect::<Vec<_>>(),
            "matrix": doc,
        }))
    }

    fn cmd_verify_pf(&mut self) -> Result<Value> {
        let ham = self.hamiltonian()?;
        let omega = self.connection_matrix()?;
        let compiled = omega.compiled();
        let basis = enumerate_words(ham.n(), self.cfg.k)?;
        let flow = self.flow_options();
        let values = |p: f64| -> Result<Vec<f64>> {
            let tr = trace_oval_with(&ham, p, flow.clone())?;
            Ok(eval_iterated(&tr, &basis)?.values)
        };
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for p in self.cfg.nest_points() {
            let v = values(p)?;
            let h = 1e-3 * (self.cfg.p_interval[1] - self.cfg.p_interval[0]).max(0.1);
            let d1: Vec<f64> = values(p + h)?
                .iter()
                .zip(values(p - h)?)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            let d2: Vec<f64> = values(p + h / 2.0)?
                .iter()
                .zip(values(p - h / 2.0)?)
                .map(|(a, b)| (a - b) / h)
                .collect();
            let fd: Vec<f64> = d1
                .iter()
                .zip(&d2)
                .map(|(a, b)| (4.0 * b - a) / 3.0)
                .collect();
            let vc: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
            let mut pred = vec![C64::new(0.0, 0.0); vc.len()];
            compiled.apply(C64::new(p, 0.0), &vc, &mut pred);
            let scale = fd.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
            let res = fd
                .iter()
                .zip(&pred)
                .map(|(f, pr)| (f - pr.re).abs() / scale)
                .fold(0.0f64, f64::max);
            worst = worst.max(res);
            rows.push(json!({ "p": p, "relative_residual": res }));
        }
        Ok(json!({ "max_relative_residual": worst, "points": rows }))
    }

    fn cmd_monodromy(&mut self) -> Result<Value> {
        let omega = self.connection_matrix()?;
        let sys = omega.compiled();
        let opts = ContinuationOptions {
            margin: self.cfg.tolerances.continuation_margin,
            ..Default::default()
        };
        let mut loops = Vec::new();
        for s in &omega.singular_locus {
            let center = C64::new(s.re, s.im);
            let radius = self.cfg.tolerances.monodromy_radius;
            match monodromy(&sys, center, radius, self.cfg.tolerances.root_order, &opts) {
                Ok(m) => loops.push(serde_json::to_value(&m)?),
                Err(e) => loops.push(json!({
                    "center": [s.re, s.im],
                    "error": e.to_string(),
                })),
            }
        }
        Ok(json!({
            "singular_locus": serde_json::to_value(&omega.singular_locus)?,
            "loops": loops,
        }))
    }

    fn cmd_melnikov(&mut self) -> Result<Value> {
        let ham = self.hamiltonian()?;
        let w = self.perturbation()?;
        let settings = MelnikovSettings {
            k_max: self.cfg.k_max,
            vanish_tol: self.cfg.tolerances.melnikov_vanish,
            flow: self.flow_options(),
        };
        match melnikov_sequence_with(&ham, &w, settings, &self.cfg.nest_points()) {
            Ok(rep) => {
                self.csv_files
                    .push(("melnikov_samples.csv".into(), rep.samples_csv()));
                let symbolic = if rep.order <= nestpf::melnikov::MAX_SYMBOLIC_ORDER {
                    match nestpf::melnikov::reduce_melnikov_symbolic(&ham, &w, rep.order) {
                        Ok(red) => json!({
                            "coefficients": red
                                .coeffs
                                .iter()
                                .map(|(word, c)| json!({
                                    "word": word.to_string(),
                                    "coefficient": c.to_string(),
                                }))
                                .collect::<Vec<_>>(),
                            "max_degree": red.max_degree(),
                        }),
                        Err(e) => json!({ "error": e.to_string() }),
                    }
                } else {
                    Value::Null
                };
                Ok(json!({
                    "order": rep.order,
                    "samples": serde_json::to_value(&rep.samples)?,
                    "relative_exactness_log": serde_json::to_value(&rep.relative_exactness_log)?,
                    "symbolic": symbolic,
                }))
            }
            Err(MelnikovError::OrderExceeded { k_max, log }) => Ok(json!({
                "order": Value::Null,
                "integrable_up_to": k_max,
                "relative_exactness_log": serde_json::to_value(&log)?,
            })),
            Err(e) => Err(e.into()),
        }
    }

    fn cmd_poincare_fit(&mut self) -> Result<Value> {
        let ham = self.hamiltonian()?;
        let w = self.perturbation()?;
        let t = &self.cfg.tolerances;
        let fit = displacement_order_fit(
            &ham,
            &w,
            self.cfg.p_seed,
            t.eps_lo,
            t.eps_hi,
            t.eps_count,
            1e-10,
        )?;
        Ok(serde_json::to_value(&fit)?)
    }

    fn cmd_zeros(&mut self) -> Result<Value> {
        let ham = self.hamiltonian()?;
        let w = self.perturbation()?;
        let settings = MelnikovSettings {
            k_max: self.cfg.k_max,
            vanish_tol: self.cfg.tolerances.melnikov_vanish,
            flow: self.flow_options(),
        };
        let rep = melnikov_sequence_with(&ham, &w, settings, &self.cfg.nest_points())?;
        let zeros = count_zeros(
            |p| rep.eval(p).map(|(v, _)| v),
            (self.cfg.p_interval[0], self.cfg.p_interval[1]),
            &ZeroCountOptions {
                bracket_width: self.cfg.tolerances.zero_bracket,
                ..Default::default()
            },
        )?;
        Ok(json!({
            "melnikov_order": rep.order,
            "count": zeros.count,
            "brackets": zeros.brackets,
            "multiplicity_suspects": zeros.suspects,
        }))
    }
}

/// Executes the configured commands in order; failures are recorded and do
/// not abort later commands.
pub fn run(cfg: JobConfig, config_hash: &str) -> RunOutput {
    let mut session = Session {
        cfg: cfg.clone(),
        ham: None,
        omega: None,
        connection: None,
        csv_files: Vec::new(),
    };
    let mut results = serde_json::Map::new();
    let mut errors = serde_json::Map::new();
    let mut timings = serde_json::Map::new();
    for cmd in &cfg.commands {
        let begun = std::time::Instant::now();
        let out = match cmd {
            CommandName::Certify => session.cmd_certify(),
            CommandName::Decompose => session.cmd_decompose(),
            CommandName::Connection => session.cmd_connection(),
            CommandName::VerifyPf => session.cmd_verify_pf(),
            CommandName::Monodromy => session.cmd_monodromy(),
            CommandName::Melnikov => session.cmd_melnikov(),
            CommandName::PoincareFit => session.cmd_poincare_fit(),
            CommandName::Zeros => session.cmd_zeros(),
        };
        timings.insert(cmd.to_string(), json!(format!("{:.3?}", begun.elapsed())));
        match out {
            Ok(v) => {
                results.insert(cmd.to_string(), v);
            }
            Err(e) => {
                errors.insert(cmd.to_string(), json!(format!("{e:#}")));
            }
        }
    }
    let errored = !errors.is_empty();
    let report = json!({
        "schema": "nestpf.report/1",
        "config_hash": config_hash,
        "seed": cfg.seed,
        "results": Value::Object(results),
        "errors": Value::Object(errors),
        "timings": Value::Object(timings),
    });
    RunOutput {
        report,
        csv_files: session.csv_files,
        errored,
    }
}
