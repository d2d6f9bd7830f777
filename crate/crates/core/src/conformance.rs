//! Feedback truth tables written out as data, and an exhaustive checker
//! that compares any FB1/FB2/FB3 implementation against them.

use serde::Serialize;

use crate::feedback::{fb1, fb2, fb3, FeedbackType, TaCommand};
use FeedbackType::{Type0, Type1, Type2};
use TaCommand::{Inaction, Penalty, Reward};

/// Implementation under test.
#[derive(Clone, Copy)]
pub struct FeedbackImpl {
    pub fb1: fn(bool, bool) -> FeedbackType,
    pub fb2: fn(FeedbackType, bool, bool) -> FeedbackType,
    pub fb3: fn(FeedbackType, bool, bool, bool, bool) -> TaCommand,
}

impl Default for FeedbackImpl {
    fn default() -> Self {
        Self { fb1, fb2, fb3 }
    }
}

/// `(learn, y_exp) -> FB1`.
pub const FB1_TABLE: [(bool, bool, FeedbackType); 4] = [
    (false, false, Type0),
    (false, true, Type0),
    (true, true, Type1),
    (true, false, Type2),
];

/// `(FB1, c_neg, q2) -> FB2`; `None` matches either value.
pub const FB2_CASES: [(FeedbackType, Option<bool>, Option<bool>, FeedbackType); 7] = [
    (Type0, None, None, Type0),
    (Type1, None, Some(false), Type0),
    (Type2, None, Some(true), Type0),
    (Type2, Some(true), Some(false), Type1),
    (Type1, Some(true), Some(true), Type2),
    (Type1, Some(false), Some(true), Type1),
    (Type2, Some(false), Some(false), Type2),
];

type Fb3Row = (FeedbackType, Option<bool>, Option<bool>, Option<bool>, Option<bool>, TaCommand);

/// `(FB2, inc, c, x, q3) -> action`. Inputs no row covers default to inaction.
pub const FB3_TABLE: [Fb3Row; 14] = [
    (Type0, None, None, None, None, Inaction),
    (Type1, Some(true), Some(false), None, Some(false), Penalty),
    (Type1, Some(true), Some(false), None, Some(true), Inaction),
    (Type1, Some(true), Some(true), None, Some(false), Inaction),
    (Type1, Some(true), Some(true), None, Some(true), Reward),
    (Type1, Some(false), Some(false), None, Some(false), Reward),
    (Type1, Some(false), Some(false), None, Some(true), Inaction),
    (Type1, Some(false), Some(true), Some(false), Some(false), Inaction),
    (Type1, Some(false), Some(true), Some(false), Some(true), Reward),
    (Type1, Some(false), Some(true), Some(true), Some(false), Inaction),
    (Type1, Some(false), Some(true), Some(true), Some(true), Penalty),
    (Type2, Some(true), None, None, None, Inaction),
    (Type2, Some(false), Some(true), Some(false), None, Penalty),
    (Type2, Some(false), Some(false), None, None, Inaction),
];

fn hit(want: Option<bool>, got: bool) -> bool {
    want.map_or(true, |w| w == got)
}

fn expected_fb2(s1: FeedbackType, c_neg: bool, q2: bool) -> FeedbackType {
    FB2_CASES
        .iter()
        .find(|r| r.0 == s1 && hit(r.1, c_neg) && hit(r.2, q2))
        .map(|r| r.3)
        .expect("case list is complete")
}

fn expected_fb3(f: FeedbackType, inc: bool, c: bool, x: bool, q3: bool) -> TaCommand {
    FB3_TABLE
        .iter()
        .find(|r| r.0 == f && hit(r.1, inc) && hit(r.2, c) && hit(r.3, x) && hit(r.4, q3))
        .map_or(Inaction, |r| r.5)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableMismatch {
    pub inputs: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableCheck {
    pub table: &'static str,
    pub cases: usize,
    pub pass: bool,
    pub mismatches: Vec<TableMismatch>,
}

impl TableCheck {
    fn new(table: &'static str) -> Self {
        Self { table, cases: 0, pass: true, mismatches: Vec::new() }
    }

    fn compare<T: PartialEq + std::fmt::Debug>(&mut self, inputs: String, expected: T, got: T) {
        self.cases += 1;
        if expected != got {
            self.pass = false;
            self.mismatches.push(TableMismatch {
                inputs,
                expected: format!("{expected:?}"),
                got: format!("{got:?}"),
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub pass: bool,
    pub fb1: TableCheck,
    pub fb2: TableCheck,
    pub fb3: TableCheck,
}

/// Enumerates every input of each stage: 3 learning cases for FB1
/// (learn low collapses both labels), 12 for FB2 and 48 for FB3.
pub fn check_feedback_tables(imp: &FeedbackImpl) -> TableReport {
    let b = [false, true];
    let mut t1 = TableCheck::new("fb1");
    let learn_low = [(imp.fb1)(false, false), (imp.fb1)(false, true)];
    let collapsed = if learn_low[0] == learn_low[1] { learn_low[0] } else { learn_low[1] };
    t1.compare("learn=0".into(), Type0, if learn_low[0] == Type0 { collapsed } else { learn_low[0] });
    for (learn, y, want) in FB1_TABLE.into_iter().skip(2) {
        t1.compare(format!("learn={} y={}", u8::from(learn), u8::from(y)), want, (imp.fb1)(learn, y));
    }

    let mut t2 = TableCheck::new("fb2");
    for s1 in FeedbackType::ALL {
        for c_neg in b {
            for q2 in b {
                let inputs = format!("fb1={s1:?} c_neg={} q2={}", u8::from(c_neg), u8::from(q2));
                t2.compare(inputs, expected_fb2(s1, c_neg, q2), (imp.fb2)(s1, c_neg, q2));
            }
        }
    }

    let mut t3 = TableCheck::new("fb3");
    for f in FeedbackType::ALL {
        for inc in b {
            for c in b {
                for x in b {
                    for q3 in b {
                        let inputs = format!(
                            "fb2={f:?} inc={} c={} x={} q3={}",
                            u8::from(inc),
                            u8::from(c),
                            u8::from(x),
                            u8::from(q3)
                        );
                        t3.compare(inputs, expected_fb3(f, inc, c, x, q3), (imp.fb3)(f, inc, c, x, q3));
                    }
                }
            }
        }
    }
    TableReport { pass: t1.pass && t2.pass && t3.pass, fb1: t1, fb2: t2, fb3: t3 }
}
