use std::fmt::Write;

use super::Program;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Canonical text form: domains, model declarations, facts, then rules, one
/// statement per line. Rules whose id is not the positional default `rN`, or
/// that are linked to a requirement, are printed with a `rule` label.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.domains {
        let members: Vec<&str> = d.members().iter().map(|m| m.as_str()).collect();
        writeln!(out, "domain {} = {{{}}}.", d.name, members.join(", ")).unwrap();
    }
    for c in &p.model.concerns {
        writeln!(out, "concern {}.", c.name).unwrap();
    }
    for r in &p.model.requirements {
        writeln!(out, "requirement {} of {} {}.", r.id, r.concern, quote(&r.text)).unwrap();
    }
    for c in &p.model.concepts {
        writeln!(out, "concept {} as {}.", quote(&c.name), c.symbol).unwrap();
    }
    for f in &p.facts {
        if f.multiplicity != 1 {
            write!(out, "{} * ", f.multiplicity).unwrap();
        }
        writeln!(out, "{}.", f.literal).unwrap();
    }
    for (i, r) in p.rules.iter().enumerate() {
        let link = p.model.rules.iter().find(|l| l.rule == r.id);
        match link {
            Some(l) => write!(out, "rule {} for {} : ", r.id, l.requirement).unwrap(),
            None if r.id.as_str() != format!("r{}", i + 1) => write!(out, "rule {} : ", r.id).unwrap(),
            None => {}
        }
        writeln!(out, "{r}.").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_program;

    #[test]
    fn empty_program_prints_nothing() {
        assert_eq!(print_program(&Program::default()), "");
    }

    #[test]
    fn skolemizable_fact_is_unchanged() {
        let src = "domain SMS = {}.\nexists M in SMS . O(Confidential(M)).\n";
        let p = parse_program(src).into_result().unwrap();
        assert_eq!(print_program(&p), src);
    }

    #[test]
    fn print_is_idempotent() {
        let src = "p(a). 2*e(a,b).\nrule keep : p(X)=>q(X). p(X) => r(X).\nrule z: 0.5 * q(X) => 2.25 * s(X).";
        let once = print_program(&parse_program(src).into_result().unwrap());
        let twice = print_program(&parse_program(&once).into_result().unwrap());
        assert_eq!(once, twice);
        assert!(once.contains("rule keep : p(X) => q(X)."));
        assert!(once.contains("\np(X) => r(X).\n"));
        assert!(once.contains("rule z : 0.5 * q(X) => 2.25 * s(X)."));
    }

    #[test]
    fn quoting_round_trips() {
        let src = "concern c.\nrequirement q of c \"say \\\"hi\\\" \\\\ bye\".\n";
        let p = parse_program(src).into_result().unwrap();
        assert_eq!(p.model.requirements[0].text, "say \"hi\" \\ bye");
        assert_eq!(print_program(&p), src);
    }
}
