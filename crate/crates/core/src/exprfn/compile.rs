use alloc::vec::Vec;

use super::ast::{BinOp, CmpOp, ExprAst, Func};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    Var,
    Neg,
    Bin(BinOp),
    Call1(Func),
    Call2(Func),
    /// Pops rhs then lhs; jumps when the comparison is false.
    CmpJumpUnless(CmpOp, usize),
    Jump(usize),
}

const INLINE_STACK: usize = 32;

/// Flat stack-machine form of an [`ExprAst`].
#[derive(Debug, Clone)]
pub struct Program {
    ops: Vec<Op>,
    max_stack: usize,
}

impl Program {
    pub fn compile(ast: &ExprAst) -> Program {
        let mut ops = Vec::new();
        emit(ast, &mut ops);
        let max_stack = stack_need(&ops);
        Program { ops, max_stack }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn eval(&self, s: f64) -> f64 {
        if self.max_stack <= INLINE_STACK {
            let mut buf = [0.0f64; INLINE_STACK];
            self.run(s, &mut buf)
        } else {
            let mut buf = alloc::vec![0.0f64; self.max_stack];
            self.run(s, &mut buf)
        }
    }

    fn run(&self, s: f64, stack: &mut [f64]) -> f64 {
        let mut sp = 0usize;
        let mut pc = 0usize;
        while pc < self.ops.len() {
            match self.ops[pc] {
                Op::Const(c) => {
                    stack[sp] = c;
                    sp += 1;
                }
                Op::Var => {
                    stack[sp] = s;
                    sp += 1;
                }
                Op::Neg => stack[sp - 1] = -stack[sp - 1],
                Op::Bin(op) => {
                    sp -= 1;
                    stack[sp - 1] = op.apply(stack[sp - 1], stack[sp]);
                }
                Op::Call1(f) => stack[sp - 1] = f.apply1(stack[sp - 1]),
                Op::Call2(f) => {
                    sp -= 1;
                    stack[sp - 1] = f.apply2(stack[sp - 1], stack[sp]);
                }
                Op::CmpJumpUnless(op, target) => {
                    sp -= 2;
                    if !op.test(stack[sp], stack[sp + 1]) {
                        pc = target;
                        continue;
                    }
                }
                Op::Jump(target) => {
                    pc = target;
                    continue;
                }
            }
            pc += 1;
        }
        stack[0]
    }
}

fn emit(ast: &ExprAst, ops: &mut Vec<Op>) {
    match ast {
        ExprAst::Const(c) => ops.push(Op::Const(*c)),
        ExprAst::Var => ops.push(Op::Var),
        ExprAst::Neg(e) => {
            emit(e, ops);
            ops.push(Op::Neg);
        }
        ExprAst::Binary(op, a, b) => {
            emit(a, ops);
            emit(b, ops);
            ops.push(Op::Bin(*op));
        }
        ExprAst::Call(f, args) => {
            for a in args {
                emit(a, ops);
            }
            ops.push(if args.len() == 2 { Op::Call2(*f) } else { Op::Call1(*f) });
        }
        ExprAst::Piecewise { arms, otherwise } => {
            let mut exits = Vec::with_capacity(arms.len());
            for (cond, branch) in arms {
                emit(&cond.lhs, ops);
                emit(&cond.rhs, ops);
                let test_at = ops.len();
                ops.push(Op::CmpJumpUnless(cond.op, usize::MAX));
                emit(branch, ops);
                exits.push(ops.len());
                ops.push(Op::Jump(usize::MAX));
                let next = ops.len();
                ops[test_at] = Op::CmpJumpUnless(cond.op, next);
            }
            emit(otherwise, ops);
            let end = ops.len();
            for at in exits {
                ops[at] = Op::Jump(end);
            }
        }
    }
}

// Branches leave the stack at the same height, so a linear scan over the
// ops bounds the depth.
fn stack_need(ops: &[Op]) -> usize {
    let mut depth: isize = 0;
    let mut max: isize = 1;
    for op in ops {
        depth += match op {
            Op::Const(_) | Op::Var => 1,
            Op::Neg | Op::Call1(_) | Op::Jump(_) => 0,
            Op::Bin(_) | Op::Call2(_) => -1,
            Op::CmpJumpUnless(..) => -2,
        };
        if let Op::Jump(_) = op {
            // The taken branch value is discarded on the fall-through path.
            depth -= 1;
        }
        max = max.max(depth);
    }
    max.max(1) as usize
}
