use cdsopt_core::single_name::{price, OptionSpec};
use cdsopt_core::{CreditCurve, QuadratureRule, Side, Vol, BP};
use chrono::NaiveDate;

fn main() -> cdsopt_core::Result<()> {
    let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).unwrap();
    let curve = CreditCurve::new(d(2009, 11, 9), 0.03, 500.0 * BP, 0.2)?;
    let spec = OptionSpec::running(d(2010, 3, 20), d(2014, 12, 20), 400.0 * BP, Side::Receiver).with_upfront(0.05);
    let result = price(&curve, &spec, Vol::new(1.0)?, &QuadratureRule::default(), None)?;
    println!("{:.2}bp", result.premium / BP);
    for (k, v) in &result.diagnostics {
        println!("  {k} = {v:.6}");
    }
    Ok(())
}
