use symnorm::normal_forms::theorem2_normalize;
use symnorm::{Jet, VariableSpace};

#[test]
fn library_example() -> symnorm::Result<()> {
    let k = VariableSpace::constrained(1);
    let f = Jet::parse(k, 8, "y + p1 q1 + x^2 q1")?;
    let h = Jet::parse(k, 8, "x^2 + y + p1 + q1 y + 2 y^2")?;
    let nf = theorem2_normalize(&f, &h)?;
    assert!(nf.r.order() >= 3);
    assert!(nf.certificate.all_passed());
    println!("r = {}, phi = {}", nf.r, nf.phi);
    Ok(())
}
