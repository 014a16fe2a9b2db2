use super::ConvertError;

/// The padded selector composition of a base function `g` on `n` bits.
///
/// With `|x| = |z| = 2n`, returns 0 unless exactly `n` bits of `z` are set,
/// and otherwise `g` of the bits of `x` selected by `z`, in index order.
pub fn select_compose(g: impl Fn(&[bool]) -> bool, x: &[bool], z: &[bool]) -> Result<bool, ConvertError> {
    if x.len() != z.len() || !x.len().is_multiple_of(2) {
        return Err(ConvertError::LengthMismatch { x: x.len(), z: z.len() });
    }
    let n = x.len() / 2;
    if z.iter().filter(|&&bit| bit).count() != n {
        return Ok(false);
    }
    let selected: Vec<bool> = x.iter().zip(z).filter(|(_, &s)| s).map(|(&b, _)| b).collect();
    Ok(g(&selected))
}
