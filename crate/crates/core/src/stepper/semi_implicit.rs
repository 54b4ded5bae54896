use super::{FrozenOperator, QuasilinearProblem, Solution, StepError};

/// `(uⁿ⁺¹ − uⁿ)/Δt + A(uⁿ) uⁿ⁺¹ = F(uⁿ)`.
pub fn semi_implicit_step<P: QuasilinearProblem>(problem: &P, u: &[f64], dt: f64) -> Result<Vec<f64>, StepError> {
    problem.check_admissible(u)?;
    let (a, f) = problem.split(u)?;
    let rhs: Vec<f64> = u.iter().zip(&f).map(|(ui, fi)| ui + dt * fi).collect();
    a.implicit_solve(dt, &rhs)
}

/// `steps` uniform semi-implicit steps of size `dt`.
pub fn march<P: QuasilinearProblem>(problem: &P, u0: &[f64], dt: f64, steps: usize) -> Result<Solution, StepError> {
    let mut sol = Solution { times: vec![0.0], states: vec![u0.to_vec()] };
    for n in 1..=steps {
        let next = semi_implicit_step(problem, sol.last(), dt)?;
        sol.times.push(n as f64 * dt);
        sol.states.push(next);
    }
    Ok(sol)
}
