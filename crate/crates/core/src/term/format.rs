use std::collections::HashMap;
use std::fmt::Write;

use super::Term;

/// Renders a term in the syntax accepted by [`parse_term`](super::parse_term).
///
/// Variables are named `A`, `B`, ... `Z`, `A1`, ... in order of first
/// occurrence, so variants print identically.
pub fn format_term(term: &Term) -> String {
    let mut out = String::new();
    let mut names = HashMap::new();
    write_term(term, &mut names, &mut out);
    out
}

fn var_name(index: usize) -> String {
    let letter = (b'A' + (index % 26) as u8) as char;
    match index / 26 {
        0 => letter.to_string(),
        round => format!("{letter}{round}"),
    }
}

fn write_term(term: &Term, names: &mut HashMap<u32, String>, out: &mut String) {
    match term {
        Term::Atom(a) => out.push_str(a),
        Term::Int(i) => write!(out, "{i}").unwrap(),
        Term::EmptyList => out.push_str("[]"),
        Term::Var(v) => {
            let next = names.len();
            let name = names.entry(*v).or_insert_with(|| var_name(next));
            out.push_str(name);
        }
        Term::Struct { functor, args } => {
            out.push_str(functor);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term(a, names, out);
            }
            out.push(')');
        }
        Term::List(head, tail) => {
            out.push('[');
            write_term(head, names, out);
            let mut rest = &**tail;
            loop {
                match rest {
                    Term::EmptyList => break,
                    Term::List(h, t) => {
                        out.push(',');
                        write_term(h, names, out);
                        rest = t;
                    }
                    other => {
                        out.push('|');
                        write_term(other, names, out);
                        break;
                    }
                }
            }
            out.push(']');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{is_variant, parse_term};
    use proptest::prelude::*;

    #[test]
    fn names_by_first_occurrence() {
        let t = Term::compound("p", vec![Term::Var(0), Term::Int(2), Term::Var(0)]);
        assert_eq!(format_term(&t), "p(A,2,A)");
        let t = Term::compound("q", vec![Term::Var(9), Term::Var(4)]);
        assert_eq!(format_term(&t), "q(A,B)");
    }

    #[test]
    fn scalars() {
        assert_eq!(format_term(&Term::Int(5)), "5");
        assert_eq!(format_term(&Term::Int(-5)), "-5");
        assert_eq!(format_term(&Term::EmptyList), "[]");
    }

    #[test]
    fn lists() {
        assert_eq!(format_term(&parse_term("[a,b|T]").unwrap()), "[a,b|A]");
        assert_eq!(format_term(&parse_term("[[1],2]").unwrap()), "[[1],2]");
    }

    #[test]
    fn many_variables_get_distinct_names() {
        let args: Vec<Term> = (0..60).map(Term::Var).collect();
        let t = Term::compound("v", args);
        let back = parse_term(&format_term(&t)).unwrap();
        assert!(is_variant(&t, &back));
    }

    proptest! {
        #[test]
        fn round_trip_is_variant(t in crate::testing::arb_term(4)) {
            let back = parse_term(&format_term(&t)).unwrap();
            prop_assert!(is_variant(&t, &back));
        }
    }
}
