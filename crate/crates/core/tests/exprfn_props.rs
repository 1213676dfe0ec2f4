use proptest::prelude::*;
use varalg_core::exprfn::{compile, parse, BinOp, CmpOp, Condition, ExprAst, Func};

fn leaf() -> impl Strategy<Value = ExprAst> {
    prop_oneof![
        Just(ExprAst::Var),
        prop::sample::select(vec![0.0, 0.5, 1.0, 2.0, 3.0, 10.0, 0.25, 1e-3]).prop_map(ExprAst::Const),
    ]
}

fn expr() -> impl Strategy<Value = ExprAst> {
    // Four levels of nesting on top of a leaf: depth ≤ 5.
    leaf().prop_recursive(4, 48, 3, |inner| {
        let binop = prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow]);
        let cmp = prop::sample::select(vec![CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne]);
        let func = prop::sample::select(Func::ALL.to_vec());
        prop_oneof![
            inner.clone().prop_map(|e| ExprAst::Neg(Box::new(e))),
            (binop, inner.clone(), inner.clone()).prop_map(|(op, a, b)| ExprAst::Binary(op, Box::new(a), Box::new(b))),
            (func, inner.clone(), inner.clone()).prop_map(|(f, a, b)| {
                let args = if f.arity() == 2 { vec![a, b] } else { vec![a] };
                ExprAst::Call(f, args)
            }),
            (cmp, inner.clone(), inner.clone(), inner.clone(), inner).prop_map(|(op, lhs, rhs, then, otherwise)| {
                ExprAst::Piecewise { arms: vec![(Condition { op, lhs, rhs }, then)], otherwise: Box::new(otherwise) }
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn compiled_matches_interpreter(ast in expr(), points in prop::collection::vec(-20.0..20.0f64, 10)) {
        prop_assert!(ast.depth() <= 5);
        let f = compile(&ast);
        for s in points {
            let (a, b) = (f.eval(s), ast.eval(s));
            prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()), "{ast} at {s}: {a} vs {b}");
        }
    }

    #[test]
    fn print_parse_round_trip(ast in expr()) {
        let once = parse(&ast.to_string()).unwrap();
        let twice = parse(&once.to_string()).unwrap();
        prop_assert_eq!(&once, &ast);
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn precedence() {
    assert_eq!(compile(&parse("2+3*4^2").unwrap()).eval(0.0), 50.0);
}
