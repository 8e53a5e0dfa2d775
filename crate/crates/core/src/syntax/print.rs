//! Precedence-aware printer. `parse(print(t))` is alpha-equal to `t` (names
//! are preserved verbatim, so in fact syntactically equal).

use super::FormalTerm;
use FormalTerm::*;

const P_BINDER: u8 = 0;
const P_ARROW: u8 = 1;
const P_STAR: u8 = 2;
const P_APP: u8 = 3;
const P_ITEM: u8 = 4;
const P_POSTFIX: u8 = 5;
const P_ATOM: u8 = 6;

fn prec(t: &FormalTerm) -> u8 {
    match t {
        Lam(..) | ClkLam(..) | Fix(..) | KProd(..) | Isect(..) | If(..) => P_BINDER,
        Pi(x, _, b) | Sg(x, _, b) => {
            if x == "_" && !b.free_vars().contains("_") {
                if matches!(t, Pi(..)) {
                    P_ARROW
                } else {
                    P_STAR
                }
            } else {
                P_BINDER
            }
        }
        WTy(..) => P_BINDER,
        App(..) => P_APP,
        Fst(..) | Snd(..) | Su(..) | Later(..) | Eq(..) => P_ITEM,
        ClkApp(..) => P_POSTFIX,
        _ => P_ATOM,
    }
}

fn go(t: &FormalTerm, min: u8, out: &mut String) {
    let p = prec(t);
    if p < min {
        out.push('(');
        go(t, 0, out);
        out.push(')');
        return;
    }
    match t {
        Var(x) => out.push_str(x),
        Lam(x, b) => {
            out.push_str("lam ");
            out.push_str(x);
            out.push_str(". ");
            go(b, P_BINDER, out);
        }
        ClkLam(k, b) => {
            out.push_str("clk-lam ");
            out.push_str(k);
            out.push_str(". ");
            go(b, P_BINDER, out);
        }
        Fix(x, b) => {
            out.push_str("fix ");
            out.push_str(x);
            out.push_str(". ");
            go(b, P_BINDER, out);
        }
        KProd(k, b) => {
            out.push_str("all ");
            out.push_str(k);
            out.push_str(". ");
            go(b, P_BINDER, out);
        }
        Isect(k, b) => {
            out.push_str("isect ");
            out.push_str(k);
            out.push_str(". ");
            go(b, P_BINDER, out);
        }
        If(b, t0, f0) => {
            out.push_str("if ");
            go(b, P_BINDER, out);
            out.push_str(" then ");
            go(t0, P_BINDER, out);
            out.push_str(" else ");
            go(f0, P_BINDER, out);
        }
        Pi(x, a, b) => {
            if x == "_" && !b.free_vars().contains("_") {
                go(a, P_STAR, out);
                out.push_str(" -> ");
                go(b, P_ARROW, out);
            } else {
                out.push_str("pi ");
                out.push_str(x);
                out.push_str(" : ");
                go(a, P_BINDER, out);
                out.push_str(" . ");
                go(b, P_BINDER, out);
            }
        }
        Sg(x, a, b) => {
            if x == "_" && !b.free_vars().contains("_") {
                go(a, P_APP, out);
                out.push_str(" * ");
                go(b, P_STAR, out);
            } else {
                out.push_str("sg ");
                out.push_str(x);
                out.push_str(" : ");
                go(a, P_BINDER, out);
                out.push_str(" . ");
                go(b, P_BINDER, out);
            }
        }
        WTy(x, a, b) => {
            out.push_str("wty ");
            out.push_str(x);
            out.push_str(" : ");
            go(a, P_BINDER, out);
            out.push_str(" . ");
            go(b, P_BINDER, out);
        }
        App(f, a) => {
            go(f, P_APP, out);
            out.push(' ');
            go(a, P_ITEM, out);
        }
        Fst(a) => {
            out.push_str("fst ");
            go(a, P_ITEM, out);
        }
        Snd(a) => {
            out.push_str("snd ");
            go(a, P_ITEM, out);
        }
        Su(a) => {
            out.push_str("succ ");
            go(a, P_ITEM, out);
        }
        Later(k, a) => {
            out.push_str("later ");
            out.push_str(k);
            out.push(' ');
            go(a, P_ITEM, out);
        }
        Eq(a, m, n) => {
            out.push_str("Eq ");
            go(a, P_ITEM, out);
            out.push(' ');
            go(m, P_ITEM, out);
            out.push(' ');
            go(n, P_ITEM, out);
        }
        ClkApp(f, k) => {
            go(f, P_POSTFIX, out);
            out.push_str(" @");
            out.push_str(k);
        }
        Pair(a, b) => {
            out.push('<');
            go(a, P_BINDER, out);
            out.push_str(", ");
            go(b, P_BINDER, out);
            out.push('>');
        }
        IfZe(n, z, x, s) => {
            out.push_str("ifze(");
            go(n, P_BINDER, out);
            out.push_str("; ");
            go(z, P_BINDER, out);
            out.push_str("; ");
            out.push_str(x);
            out.push_str(". ");
            go(s, P_BINDER, out);
            out.push(')');
        }
        Sup(m, x, n) => {
            out.push_str("sup(");
            go(m, P_BINDER, out);
            out.push_str("; ");
            out.push_str(x);
            out.push_str(". ");
            go(n, P_BINDER, out);
            out.push(')');
        }
        WRec(m, x, y, z, o) => {
            out.push_str("wrec(");
            go(m, P_BINDER, out);
            out.push_str("; ");
            out.push_str(x);
            out.push(' ');
            out.push_str(y);
            out.push(' ');
            out.push_str(z);
            out.push_str(". ");
            go(o, P_BINDER, out);
            out.push(')');
        }
        Ax => out.push_str("ax"),
        Tt => out.push_str("tt"),
        Ff => out.push_str("ff"),
        Ze => out.push_str("zero"),
        Void => out.push_str("void"),
        Unit => out.push_str("unit"),
        Bool => out.push_str("bool"),
        Nat => out.push_str("nat"),
        Univ(i) => {
            out.push_str("U<");
            out.push_str(&i.to_string());
            out.push('>');
        }
    }
}

pub fn print(t: &FormalTerm) -> String {
    let mut s = String::new();
    go(t, 0, &mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_sugar() {
        assert_eq!(print(&FormalTerm::arrow(Bool, Bool)), "bool -> bool");
        assert_eq!(print(&FormalTerm::times(Bool, Nat)), "bool * nat");
    }

    #[test]
    fn keeps_dependent_binders_explicit() {
        let t = FormalTerm::pi("x", Bool, FormalTerm::eq(Bool, FormalTerm::var("x"), Tt));
        assert_eq!(print(&t), "pi x : bool . Eq bool x tt");
    }

    #[test]
    fn parenthesizes_applications() {
        let t = FormalTerm::app(
            FormalTerm::lam("x", FormalTerm::var("x")),
            FormalTerm::app(FormalTerm::var("x"), Tt),
        );
        // inner application needs parens in argument position; lam needs parens in head position
        let s = print(&FormalTerm::lam("x", t));
        assert_eq!(s, "lam x. (lam x. x) (x tt)");
    }
}
