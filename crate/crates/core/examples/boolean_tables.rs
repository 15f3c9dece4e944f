// Recomputes the truth-table explanations of SUM, OR and XOR and checks
// them cell by cell against the published values.

use ciu::prelude::*;

pub fn run_example() -> ciu::Result<Vec<TableReport>> {
    let mut reports = Vec::new();
    for table in [1, 2, 3] {
        let report = reproduce_table(table)?;
        print!("{}", report.render_text());
        println!();
        reports.push(report);
    }
    Ok(reports)
}

fn main() -> ciu::Result<()> {
    let reports = run_example()?;
    let bad: usize = reports.iter().map(|r| r.mismatches().len()).sum();
    println!("{bad} mismatching cells");
    Ok(())
}
