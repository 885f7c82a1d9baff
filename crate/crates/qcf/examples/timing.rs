use astro_float::BigFloat;

fn main() {
    for p in [40usize, 64] {
        let mut one = BigFloat::from_i64(1, p);
        println!("p={p}: one = {one}, exp = {:?}", one.exponent());
        if let Some(cur) = one.exponent() {
            one.set_exponent(cur + (-24));
        }
        println!("  after set_exponent: {one} nan={}", one.is_nan());
    }
    // alternative: powi
    let x = BigFloat::from_i64(2, 64).powi(24, 64, astro_float::RoundingMode::ToEven);
    println!("2^24 = {x}");
    let inv = BigFloat::from_i64(1, 64).div(&x, 64, astro_float::RoundingMode::ToEven);
    println!("2^-24 = {inv}");
}
