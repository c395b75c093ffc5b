use dx_core::{classify_full, det_check_warning, eigendecompose, Matrix, Outcome, TolerancePolicy};

fn main() -> dx_core::Result<()> {
    let a = Matrix::from_rows(&[[2.0, 1.0], [0.0, 3.0]])?;
    let policy = TolerancePolicy::default();
    let verdict = classify_full(&a, &policy)?;
    assert_eq!(verdict.outcome, Outcome::Diagonalizable);
    println!("{}", verdict.summary());

    let basis = eigendecompose(&a, &policy, false)?;
    assert!(basis.residual < 1e-12);
    assert!(!det_check_warning(&basis).inconclusive);
    Ok(())
}
