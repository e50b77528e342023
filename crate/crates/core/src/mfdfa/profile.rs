use crate::error::{Error, Result};
use crate::scalar::{mean, Scalar};

/// Cumulative sum of the mean-subtracted series.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T = f64> {
    pub values: Vec<T>,
    pub source_length: usize,
}

impl<T: Scalar> Profile<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn make_profile<T: Scalar>(r: &[T]) -> Result<Profile<T>> {
    if r.len() < 2 {
        return Err(Error::TooShort { need: 2, got: r.len() });
    }
    let m = mean(r);
    let mut acc = T::zero();
    let values = r
        .iter()
        .map(|&x| {
            acc = acc + (x - m);
            acc
        })
        .collect();
    Ok(Profile {
        values,
        source_length: r.len(),
    })
}
