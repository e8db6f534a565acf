use std::fmt::Write as _;

use thiserror::Error;

use super::{ModelDocument, ModelSystem};
use crate::encode::{ode_to_rn, rn_to_ode, EncodeError};
use crate::ir::rational::format_rational;
use crate::ir::{Drifts, OdeSystem, Partition, Rational};

/// Target section kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    Ode,
    Rn,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SerializeError {
    #[error("drift of `{0}` is not polynomial and has no reaction form")]
    NonPolynomialDrift(String),
}

pub fn serialize_model(doc: &ModelDocument, form: Form) -> Result<String, SerializeError> {
    let mut out = String::from("begin model\n");
    let (names, init, observables) = match &doc.system {
        ModelSystem::Ode(s) => (s.names(), s.init(), s.observables()),
        ModelSystem::Reactions(rn) => (rn.species(), rn.init(), rn.observables()),
    };
    write_init(&mut out, names, init);
    match (form, &doc.system) {
        (Form::Ode, ModelSystem::Ode(s)) => write_odes(&mut out, s),
        (Form::Ode, ModelSystem::Reactions(rn)) => write_odes(&mut out, &rn_to_ode(rn)),
        (Form::Rn, ModelSystem::Ode(s)) => {
            let rn = ode_to_rn(s).map_err(|e| match e {
                EncodeError::NonPolynomialDrift(name) => SerializeError::NonPolynomialDrift(name),
                other => unreachable!("a valid system always encodes: {other}"),
            })?;
            write_reactions(&mut out, names, rn.reactions());
        }
        (Form::Rn, ModelSystem::Reactions(rn)) => write_reactions(&mut out, names, rn.reactions()),
    }
    if let Some(p) = &doc.partition {
        write_partition(&mut out, names, p);
    }
    if !observables.is_empty() {
        let shown: Vec<&str> = observables.iter().map(|&o| names[o].as_str()).collect();
        let _ = writeln!(out, "  begin observe\n    {}\n  end observe", shown.join(", "));
    }
    out.push_str("end model\n");
    Ok(out)
}

fn write_init(out: &mut String, names: &[String], init: &[Rational]) {
    out.push_str("  begin init\n");
    for (name, value) in names.iter().zip(init) {
        let _ = writeln!(out, "    {name} = {}", format_rational(value));
    }
    out.push_str("  end init\n");
}

fn write_odes(out: &mut String, system: &OdeSystem) {
    out.push_str("  begin ode\n");
    let names = system.names();
    match system.drifts() {
        Drifts::Polynomial(ps) => {
            for (name, p) in names.iter().zip(ps) {
                let _ = writeln!(out, "    d({name}) = {}", p.display(names));
            }
        }
        Drifts::Expr(es) => {
            for (name, e) in names.iter().zip(es) {
                let _ = writeln!(out, "    d({name}) = {}", e.display(names));
            }
        }
    }
    out.push_str("  end ode\n");
}

fn write_reactions(out: &mut String, names: &[String], reactions: &[crate::encode::Reaction]) {
    out.push_str("  begin reactions\n");
    for r in reactions {
        let _ = writeln!(out, "    {}", r.display(names));
    }
    out.push_str("  end reactions\n");
}

fn write_partition(out: &mut String, names: &[String], partition: &Partition) {
    let _ = writeln!(out, "  begin partition\n    {}\n  end partition", partition.display(names));
}
