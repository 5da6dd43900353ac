use std::collections::BTreeSet;

use bigdecimal::num_bigint::BigInt;
use bigdecimal::BigDecimal;

use super::EvalError;
use crate::asp::{AggregateFunction, Symbol};

/// Reduces the collected element tuples; the first term of each tuple is its
/// value. `None` stands for the minimum or maximum of an empty set.
pub fn evaluate_aggregate(
    function: AggregateFunction,
    tuples: &BTreeSet<Vec<Symbol>>,
) -> Result<Option<Symbol>, EvalError> {
    let values = tuples.iter().filter_map(|t| t.first());
    Ok(match function {
        AggregateFunction::Count => Some(Symbol::int(tuples.len())),
        AggregateFunction::Sum => {
            let mut integer = BigInt::from(0);
            let mut real: Option<BigDecimal> = None;
            for value in values {
                match value {
                    Symbol::Integer(i) => integer += i,
                    Symbol::Real(r) => *real.get_or_insert_with(BigDecimal::default) += r,
                    other => {
                        return Err(EvalError::Arithmetic(format!("`#sum` over the non-number {other}")))
                    }
                }
            }
            Some(match real {
                Some(r) => Symbol::real(r + BigDecimal::from(integer)),
                None => Symbol::Integer(integer),
            })
        }
        AggregateFunction::Min => values.min().cloned(),
        AggregateFunction::Max => values.max().cloned(),
    })
}
